"""Normal angle and distance from a point to an ellipse by exact-coefficient series."""

from .bipoly import BiPoly, bipoly_mul, bipoly_truncate
from .coeffgen import (
    DEFAULT_BOUNDS,
    CoefficientGenerator,
    gen_c_phi,
    gen_d_cos,
    gen_d_cosdiff,
    gen_d_h,
    gen_d_N,
    gen_d_phi,
    gen_d_sin,
    gen_phi_diff_powers,
    gen_sin_ratio_powers,
    gen_tensor,
    sinpow_to_fourier,
)
from .errors import CacheFormatError, ConfigurationError, ConvergenceError, DomainError
from .oracle import OracleResult, h_from_phi, residual_pair, solve_phi
from .rational import Rational, gen_binom, rat_arith, rising_factorial
from .series import (
    EllipseParams,
    EvalResult,
    QueryPoint,
    SeriesSet,
    Truncation,
    convergence_diag,
    eval_fourier,
    eval_h,
    eval_phi,
    eval_sincos,
    eval_sincos_joint,
    eval_sinpow,
    evaluate,
    to_polar,
)
from .tensor import CoeffTensor, PowerCoeffFamily, read_cache, write_cache

__version__ = "0.1.0"
