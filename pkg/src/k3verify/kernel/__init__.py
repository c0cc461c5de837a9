"""Kernel matrix A, exact linear algebra and evaluation of K3."""

from .config import FAMILIES, PointConfig, random_config, random_rational, trial_rng
from .matrix import (build_A, det_A, det_exact, eval_K3, identity, inverse_exact,
                     matmul, trace, transpose)
from .sampling import draw_nonsingular

__all__ = [
    "FAMILIES", "PointConfig", "random_config", "random_rational", "trial_rng",
    "build_A", "det_A", "det_exact", "eval_K3", "identity", "inverse_exact",
    "matmul", "trace", "transpose", "draw_nonsingular",
]
