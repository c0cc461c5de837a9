"""Quadrature configuration and Gaussian-weighted rules."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEMES = ("tensor-gauss-hermite", "monte-carlo", "adaptive-polar")


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings shared by the numerical oracles.

    ``order`` is the per-axis node count for Gauss rules and the sample count
    for Monte Carlo; ``radius`` is the truncation radius for integrals over
    unbounded domains.
    """

    scheme: str = "tensor-gauss-hermite"
    order: int = 40
    seed: int = 0
    radius: float = 40.0
    tolerance: float = 1e-5

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.order <= 0:
            raise ValueError("order/sample count must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.radius > 0:
            raise ValueError("truncation radius must be positive")

    def with_order(self, order: int) -> "QuadratureConfig":
        return QuadratureConfig(self.scheme, order, self.seed, self.radius, self.tolerance)


def standard_normal_rule(n: int, q: QuadratureConfig):
    """Nodes (n, N) and weights (N,) approximating E[g(v)] for v ~ N(0, I_n)."""
    if q.scheme == "tensor-gauss-hermite":
        x, w = np.polynomial.hermite_e.hermegauss(q.order)
        w = w / np.sqrt(2 * np.pi)
        nodes = np.stack([g.ravel() for g in np.meshgrid(*([x] * n), indexing="ij")])
        weights = np.ones(nodes.shape[1])
        for g in np.meshgrid(*([w] * n), indexing="ij"):
            weights = weights * g.ravel()
        return nodes, weights
    if q.scheme == "monte-carlo":
        rng = np.random.default_rng(q.seed)
        nodes = rng.standard_normal((n, q.order))
        return nodes, np.full(q.order, 1.0 / q.order)
    raise ValueError(f"scheme {q.scheme!r} does not provide a Gaussian rule")


def pairwise_sum(values) -> float:
    """Summation with a fixed, order-independent tree (numpy's pairwise sum)."""
    return np.add.reduce(np.asarray(values), axis=None)
