"""Gaussian integrals and Wick contractions.

Measure normalization: d^n u / (2 pi)^{n/2}, so that the integral of
exp(-(1/2)(u, u)) equals 1 and the integral of exp(-(1/2)(u, A u)) equals
(det A)^{-1/2}.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import NotPositiveDefinite
from ..kernel.matrix import det_exact
from ..report import Report, Status
from .quadrature import QuadratureConfig, pairwise_sum, standard_normal_rule

MEASURE = "d^n u/(2pi)^(n/2): integral of exp(-(u,u)/2) is 1"


def _as_array(M) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in M], dtype=float)


def check_positive_definite(A) -> None:
    """Exact leading principal minors for rational input, Cholesky otherwise."""
    rows = [list(r) for r in A]
    n = len(rows)
    if all(isinstance(v, (int, Fraction)) for r in rows for v in r):
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise NotPositiveDefinite()
        for k in range(1, n + 1):
            if det_exact([r[:k] for r in rows[:k]]) <= 0:
                raise NotPositiveDefinite()
        return
    M = _as_array(rows)
    # floating input: symmetric up to roundoff
    if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise NotPositiveDefinite()
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite() from exc


def _gaussian_moment(A, integrand, q: QuadratureConfig) -> float:
    """Normalized integral of integrand(u) exp(-(1/2)(u, A u)).

    ``integrand`` receives u as an (n, N) array.  Each axis is rescaled by
    sqrt(A_ii) (Jacobi scaling) so that the Gauss-Hermite weight matches the
    diagonal of the form; the off-diagonal coupling
    exp(-(1/2) v^T (A~ - I) v), with A~ the unit-diagonal rescaling of A,
    remains part of the integrand, so the rule is not exact and its error
    genuinely decreases with the order.
    """
    Af = _as_array(A)
    n = Af.shape[0]
    d = np.sqrt(np.diag(Af))
    V, W = standard_normal_rule(n, q)
    At = Af / np.outer(d, d) - np.eye(n)
    quad_form = np.einsum("in,ij,jn->n", V, At, V)
    U = V / d[:, None]
    vals = W * np.exp(-0.5 * quad_form) * integrand(U)
    return float(pairwise_sum(vals)) / float(np.prod(d))


def gauss_normalized(A, q: QuadratureConfig | None = None) -> float:
    """Normalized Gaussian integral, approximately (det A)^{-1/2}."""
    q = q or QuadratureConfig()
    check_positive_definite(A)
    return _gaussian_moment(A, lambda U: np.ones(U.shape[1]), q)


def _bilinear(B, A):
    """u -> (B u, A u) evaluated column-wise."""
    K = _as_array(B).T @ _as_array(A)
    return lambda U: np.einsum("in,ij,jn->n", U, K, U)


def wick_closed_forms(A, B, C=None) -> dict:
    """Closed forms of the first and second Wick relations and the general contraction.

    ``first``  = Tr(B) (det A)^{-1/2}
    ``second`` = (Tr B Tr C + 2 Tr BC) (det A)^{-1/2}
    ``isserlis_second`` is the exact Gaussian moment for arbitrary B, C:
    with K = sym(B^T A), L = sym(C^T A), S = A^{-1}:  Tr(KS)Tr(LS) + 2 Tr(KSLS).
    It coincides with ``second`` whenever A B and A C are symmetric (for
    instance B = A^{-1} D with D symmetric), but not for generic symmetric B, C.
    """
    Af, Bf = _as_array(A), _as_array(B)
    Cf = Bf if C is None else _as_array(C)
    g0 = np.linalg.det(Af) ** -0.5
    S = np.linalg.inv(Af)
    K = 0.5 * (Bf.T @ Af + Af @ Bf)
    L = 0.5 * (Cf.T @ Af + Af @ Cf)
    out = {
        "g0": g0,
        "first": np.trace(Bf) * g0,
        "second": (np.trace(Bf) * np.trace(Cf) + 2 * np.trace(Bf @ Cf)) * g0,
        "isserlis_second": (np.trace(K @ S) * np.trace(L @ S) + 2 * np.trace(K @ S @ L @ S)) * g0,
        "AB_symmetric": bool(np.allclose(Af @ Bf, (Af @ Bf).T, rtol=1e-12, atol=1e-12)),
        "AC_symmetric": bool(np.allclose(Af @ Cf, (Af @ Cf).T, rtol=1e-12, atol=1e-12)),
    }
    return out


def wick_moments(A, B, C=None, q: QuadratureConfig | None = None) -> tuple[float, float]:
    """Quadrature values of the first and second Wick moments."""
    q = q or QuadratureConfig()
    C = B if C is None else C
    fb, fc = _bilinear(B, A), _bilinear(C, A)
    return (_gaussian_moment(A, fb, q), _gaussian_moment(A, lambda U: fb(U) * fc(U), q))


def _rel(a, b, scale):
    return abs(a - b) / max(abs(b), scale)


def wick_check(A, B, C=None, q: QuadratureConfig | None = None) -> Report:
    """Compare quadrature moments with the Wick closed forms.

    B and C must be symmetric, or satisfy A B = (A B)^T, A C = (A C)^T.
    Checks: ``gauss`` (det A)^{-1/2}; ``first_relation``; ``second_relation``
    (valid when A B, A C are symmetric -- the situation B = A^{-1} D with D
    symmetric; it fails for generic symmetric B, C); ``isserlis_second``
    (always valid); and, for tensor
    Gauss-Hermite, ``convergence`` at orders order/4, order/2, order.
    """
    q = q or QuadratureConfig()
    check_positive_definite(A)
    Af = _as_array(A)
    for M in (B, C if C is not None else B):
        Mf = _as_array(M)
        atol = 1e-12 * max(1.0, np.abs(Mf).max(), np.abs(Af @ Mf).max())
        if not (np.allclose(Mf, Mf.T, rtol=0, atol=atol)
                or np.allclose(Af @ Mf, (Af @ Mf).T, rtol=0, atol=atol)):
            raise ValueError("Wick relations need B, C symmetric or A B, A C symmetric")
    cf = wick_closed_forms(A, B, C)
    g = gauss_normalized(A, q)
    m1, m2 = wick_moments(A, B, C, q)
    scale = cf["g0"]
    tol = q.tolerance
    rep = Report("wick", mode="f64", seed=q.seed if q.scheme == "monte-carlo" else None,
                 conventions={"measure": MEASURE, "scheme": q.scheme, "order": q.order})
    dev = {"gauss": _rel(g, cf["g0"], scale), "first_relation": _rel(m1, cf["first"], scale),
           "second_relation": _rel(m2, cf["second"], scale),
           "isserlis_second": _rel(m2, cf["isserlis_second"], scale)}
    rep.add_check("gauss", Status.PASS if dev["gauss"] <= tol else Status.FAIL,
                  value=g, expected=cf["g0"], deviation=dev["gauss"])
    rep.add_check("first_relation", Status.PASS if dev["first_relation"] <= tol else Status.FAIL,
                  value=m1, expected=cf["first"], deviation=dev["first_relation"])
    rep.add_check("second_relation", Status.PASS if dev["second_relation"] <= tol else Status.FAIL,
                  value=m2, expected=cf["second"], deviation=dev["second_relation"],
                  AB_symmetric=cf["AB_symmetric"], AC_symmetric=cf["AC_symmetric"])
    rep.add_check("isserlis_second", Status.PASS if dev["isserlis_second"] <= tol else Status.FAIL,
                  value=m2, expected=cf["isserlis_second"], deviation=dev["isserlis_second"])
    if q.scheme == "tensor-gauss-hermite" and q.order >= 8:
        conv = gh_convergence(A, B, C, q)
        rep.add_check("convergence", Status.PASS if conv["monotone"] else Status.FAIL, **conv)
    rep.max_deviation = max(dev.values())
    return rep.finalize()


ROUNDOFF_FLOOR = 1e-13


def gh_convergence(A, B, C=None, q: QuadratureConfig | None = None) -> dict:
    """Errors of the second moment at orders order/4, order/2, order.

    ``monotone`` requires each doubling to at least halve the error, unless the
    finer error is already at roundoff level (ROUNDOFF_FLOOR, relative).
    """
    q = q or QuadratureConfig()
    cf = wick_closed_forms(A, B, C)
    target = cf["isserlis_second"]
    orders = [max(2, q.order // 4), max(3, q.order // 2), q.order]
    errors = []
    for k in orders:
        _, m2 = wick_moments(A, B, C, q.with_order(k))
        errors.append(_rel(m2, target, cf["g0"]))
    ok = all(e2 <= max(e1 / 2, ROUNDOFF_FLOOR) for e1, e2 in zip(errors, errors[1:]))
    return {"orders": orders, "errors": errors, "monotone": ok}
