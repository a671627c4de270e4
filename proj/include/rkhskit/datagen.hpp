#pragma once

#include <cstdint>
#include <utility>

#include "rkhskit/kernels.hpp"

namespace rkhs {

// Rotated uniform pair: X ~ U[-sqrt(7), sqrt(7)], Y uniform on
// [-2,-1] u [1,2] (both variance 7/3), the vector (X,Y) rotated by theta.
// Components come back as two scalar sample columns.
std::pair<Vector, Vector> gen_rotation_pair(int n, double theta, std::uint64_t seed);

struct MarkovTriple {
    Vector x, y, z;
};

// X = U1; Y = a (X^2 - 1) + U2; Z = Y + U3 with independent standard
// normal U's and coupling parameter a.
MarkovTriple gen_markov_triple(int n, double coupling, std::uint64_t seed);

// Nonlinear AR(2) series with zero initial conditions:
// z_n = (8 - 5 e^{-z_{n-1}^2}) z_{n-1}/10 - (3 + 9 e^{-z_{n-1}^2}) z_{n-2}/10
//       + sin(pi z_{n-1})/10 + noise.
Vector gen_nl_ar(int n, double noise_sd, std::uint64_t seed);

}  // namespace rkhs
