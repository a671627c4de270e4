#include "rkhskit/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "rkhskit/rng.hpp"

namespace rkhs {

std::pair<Vector, Vector> gen_rotation_pair(int n, double theta, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_rotation_pair: n must be >= 1");
    const double a = std::sqrt(7.0);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Rng rng(seed);
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(-a, a);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double v = sign * rng.uniform(1.0, 2.0);
        x[i] = c * u - s * v;
        y[i] = s * u + c * v;
    }
    return {std::move(x), std::move(y)};
}

MarkovTriple gen_markov_triple(int n, double coupling, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_markov_triple: n must be >= 1");
    Rng rng(seed);
    MarkovTriple t{Vector(n), Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
        const double u1 = rng.normal();
        const double u2 = rng.normal();
        const double u3 = rng.normal();
        t.x[i] = u1;
        t.y[i] = coupling * (u1 * u1 - 1.0) + u2;
        t.z[i] = t.y[i] + u3;
    }
    return t;
}

Vector gen_nl_ar(int n, double noise_sd, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("gen_nl_ar: n must be >= 3");
    Rng rng(seed);
    Vector z(n);
    z[0] = 0.0;
    z[1] = 0.0;
    for (int i = 2; i < n; ++i) {
        const double z1 = z[i - 1];
        const double z2 = z[i - 2];
        const double e = std::exp(-z1 * z1);
        z[i] = (8.0 - 5.0 * e) * z1 / 10.0 - (3.0 + 9.0 * e) * z2 / 10.0 +
               std::sin(M_PI * z1) / 10.0 + noise_sd * rng.normal();
    }
    return z;
}

}  // namespace rkhs
