"""Seeded sampling of nonsingular rational configurations."""
from __future__ import annotations

import random

from .config import PointConfig, random_config
from .matrix import det_A


def draw_nonsingular(rng: random.Random, n: int, *, with_lambda: bool = False,
                     max_tries: int = 1000) -> tuple[PointConfig, int]:
    """Draw until det A != 0.  Returns the configuration and the number of rejects.

    Coincident t values are redrawn inside :func:`random_config`; those redraws
    are not counted, only singular matrices are.
    """
    rejected = 0
    for _ in range(max_tries):
        cfg = random_config(rng, n, with_lambda=with_lambda)
        if n < 2 or det_A(cfg) != 0:
            return cfg, rejected
        rejected += 1
    raise RuntimeError(f"no nonsingular configuration after {max_tries} draws")
