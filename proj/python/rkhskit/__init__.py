"""RKHS numerics: kernels, mean embeddings, HSIC and conditional-independence
tests, kernel Bayes filtering and online kernel adaptive filters."""

try:
    from ._core import *  # noqa: F401,F403
except ImportError:  # development builds keep the extension on sys.path
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
