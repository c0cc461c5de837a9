"""Fourier transforms of the chirps exp(+-i x^2) by Fresnel-type extrapolation.

The transform F(y) = int_R exp(i sigma x^2 + i x y) dx (sigma = +-1) is only
conditionally convergent.  The half-lines on either side of the stationary
point x0 = -sigma y / 2 are cut at the points where the phase has advanced by
a multiple of pi, every half-period is integrated by Gauss-Legendre, and the
alternating sequence of partial integrals is accelerated by repeated averaging
of neighbours.  No damping factor is introduced.

Up to a constant, F(y) is proportional to exp(-i sigma y^2 / 4); the constants
C_sigma = F(y) exp(i sigma y^2 / 4) are fitted, never hard-coded.
"""
from __future__ import annotations

import math

import numpy as np

from ..report import Report, Status
from .quadrature import QuadratureConfig

AVERAGING_LEVELS = 12


def _phase(x, y, sigma):
    return sigma * x * x + x * y


def _half_line(y: float, sigma: int, side: int, segments: int, nodes: int,
               levels: int = AVERAGING_LEVELS):
    """Accelerated integral over the half-line from x0 towards side * infinity.

    Returns (value, estimate) where the estimate is the change produced by the
    last averaging level.
    """
    x0 = -sigma * y / 2
    cuts = x0 + side * np.sqrt(np.pi * np.arange(segments + 1))
    g, w = np.polynomial.legendre.leggauss(nodes)
    partial = np.empty(segments, dtype=complex)
    acc = 0.0 + 0.0j
    for k in range(segments):
        a, b = cuts[k], cuts[k + 1]
        x = 0.5 * (a + b) + 0.5 * (b - a) * g
        acc += 0.5 * (b - a) * np.sum(w * np.exp(1j * _phase(x, y, sigma)))
        partial[k] = acc
    partial *= side
    levels = min(levels, segments - 1)
    prev = partial
    for _ in range(levels):
        prev, partial = partial, 0.5 * (partial[:-1] + partial[1:])
    return complex(partial[-1]), float(abs(partial[-1] - prev[-1]))


def chirp_transform(y: float, sigma: int = 1, q: QuadratureConfig | None = None):
    """F(y) = int exp(i sigma x^2 + i x y) dx with an extrapolation error estimate.

    ``q.order`` is the Gauss-Legendre node count per half-period and
    ``q.radius`` the distance from the stationary point covered explicitly.
    """
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    q = q or QuadratureConfig()
    segments = max(AVERAGING_LEVELS + 2, int(q.radius ** 2 / math.pi))
    nodes = min(q.order, 64)
    right, er = _half_line(y, sigma, 1, segments, nodes)
    left, el = _half_line(y, sigma, -1, segments, nodes)
    return right + left, er + el


def truncated_transform(y: float, R: float, sigma: int = 1, nodes_per_unit: int = 40) -> complex:
    """Plain truncated integral over [-R, R] (no extrapolation; error ~ 1/R)."""
    pieces = max(8, int(2 * R * max(1.0, R)))
    edges = np.linspace(-R, R, pieces + 1)
    g, w = np.polynomial.legendre.leggauss(min(nodes_per_unit, 64))
    total = 0.0 + 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        x = 0.5 * (a + b) + 0.5 * (b - a) * g
        total += 0.5 * (b - a) * np.sum(w * np.exp(1j * _phase(x, y, sigma)))
    return complex(total)


def fit_constant(ys, sigma: int = 1, q: QuadratureConfig | None = None) -> dict:
    """C_sigma(y) = F(y) exp(i sigma y^2/4) for each y, their mean and spread."""
    vals, errs = [], []
    for y in ys:
        F, e = chirp_transform(float(y), sigma, q)
        vals.append(F * np.exp(1j * sigma * y * y / 4))
        errs.append(e)
    vals = np.array(vals)
    mean = complex(np.mean(vals))
    return {"per_y": [complex(v) for v in vals], "constant": mean,
            "spread": float(np.max(np.abs(vals - mean))), "extrapolation_error": float(max(errs))}


def gaussian_fourier_check(q: QuadratureConfig | None = None, ys=(0, 1, 2, 3),
                           tolerance: float = 1e-3) -> Report:
    """Fit C_1 (and C_{-1}) and check modulus sqrt(pi), y-independence and the phase law."""
    q = q or QuadratureConfig()
    rep = Report("fresnel", mode="f64",
                 conventions={"transform": "int exp(i sigma x^2 + i x y) dx, Lebesgue measure on R",
                              "extrapolation": f"half-period partial integrals, {AVERAGING_LEVELS} averaging levels"})
    worst = 0.0
    for sigma, name in ((1, "C1"), (-1, "C2")):
        fit = fit_constant(ys, sigma, q)
        dev_mod = abs(abs(fit["constant"]) - math.sqrt(math.pi))
        worst = max(worst, dev_mod, fit["spread"])
        rep.add_check(f"{name}_modulus", Status.PASS if dev_mod <= tolerance else Status.FAIL,
                      constant=fit["constant"], modulus=abs(fit["constant"]),
                      expected=math.sqrt(math.pi), deviation=dev_mod)
        rep.add_check(f"{name}_y_independent", Status.PASS if fit["spread"] <= tolerance else Status.FAIL,
                      ys=list(ys), per_y=fit["per_y"], spread=fit["spread"])
        conv = fit["extrapolation_error"]
        rep.add_check(f"{name}_extrapolation",
                      Status.PASS if conv <= tolerance else Status.INCONCLUSIVE,
                      estimate=conv)
    F0, _ = chirp_transform(0.0, 1, q)
    F2, _ = chirp_transform(2.0, 1, q)
    ratio = F2 / F0
    dev_ratio = abs(ratio - np.exp(-1j))
    worst = max(worst, dev_ratio)
    rep.add_check("phase_ratio_y2_y0", Status.PASS if dev_ratio <= tolerance else Status.FAIL,
                  ratio=ratio, expected=complex(np.exp(-1j)), deviation=dev_ratio)
    R = q.radius
    rep.diagnostics["truncated_R"] = {str(r): abs(truncated_transform(0.0, r) - F0)
                                      for r in (R / 8, R / 4, R / 2)}
    rep.max_deviation = worst
    return rep.finalize()
