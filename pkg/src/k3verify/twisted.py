"""Formal u-calculus for the lambda-twisted kernel.

The twisted kernel is a formal integral of ``prod_i u_i^{n_i} exp(E)`` with
``n_i = -lambda_i - 1`` and exponent ``E = (1/2)(u, A u)``.  Applying the
(non-constant part of the) twisted Gaudin operator under the integral produces
``prod u^n exp(E)`` times a polynomial symbol in u:

* a quartic double sum, and
* quadratic blocks weighted by ``n_s + 1`` (one per s != r) and ``n_r + 1``.

A weighted block ``(n_v + 1) u_v^{n_v} P`` is a total derivative up to
``-u_v^{n_v} * u_v (d_v P + P d_v E)``; :func:`ibp_reduce` applies exactly that
rule, using :meth:`MultiPoly.diff` and ``d_v E = sum_k Q_vk u_k``.  After
reduction the symbol no longer depends on the exponents n_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product

import numpy as np

from .algebra.poly import MultiPoly
from .errors import K3Error
from .kernel.config import FAMILIES, PointConfig, trial_rng
from .kernel.matrix import build_A, inverse_exact
from .kernel.sampling import draw_nonsingular
from .parallel import run_indexed
from .report import Report, Status


def u_vars(n: int) -> tuple[str, ...]:
    return tuple(f"u{i}" for i in range(n))


@dataclass(frozen=True)
class WeightedBlock:
    """A polynomial multiplied by the weight ``n_index + 1``."""

    index: int
    poly: MultiPoly
    label: str = ""


@dataclass(frozen=True)
class IntegrandSymbol:
    """Polynomial symbol multiplying ``prod u_i^{n_i} exp((1/2)(u, Q u))``.

    ``base`` is the unweighted part; ``blocks`` are the (n_v + 1)-weighted parts.
    ``quadratic_form`` is Q (the kernel matrix A unless overridden).
    """

    base: MultiPoly
    n_exponents: tuple
    quadratic_form: tuple
    blocks: tuple = ()
    copy: str = "y"
    r: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def variables(self):
        return self.base.variables

    def weight(self, i: int):
        return self.n_exponents[i] + 1

    @property
    def poly(self) -> MultiPoly:
        """Total symbol with the weights evaluated."""
        out = self.base
        for blk in self.blocks:
            out = out + blk.poly * self.weight(blk.index)
        return out

    def is_reduced(self) -> bool:
        return not self.blocks


def _roles(cfg: PointConfig, copy: str):
    """(a, u, b): the differentiated family u and the two spectator families."""
    if copy not in FAMILIES:
        raise ValueError(f"unknown variable family {copy!r}")
    a, b = (cfg.family(f) for f in FAMILIES if f != copy)
    return a, cfg.family(copy), b


def _inv(d):
    if d == 0:
        raise K3Error("degenerate t configuration")
    return 1 / d


def twisted_action_symbol(cfg: PointConfig, r: int, copy: str = "y") -> IntegrandSymbol:
    """The symbol of G_r^lambda (differentiating ``copy``) acting on the twisted integrand."""
    if cfg.lam is None:
        raise K3Error("twisted symbol requires lambda values in the configuration")
    cfg.check_distinct_t()
    n = cfg.n
    x, y, z = _roles(cfg, copy)
    t = cfg.t
    names = u_vars(n)
    u = [MultiPoly.var(v, names) for v in names]
    zero = MultiPoly.zero(names)

    quartic = zero
    for s in range(n):
        if s == r:
            continue
        for m in range(n):
            if m == r:
                continue
            for p in range(n):
                if p == s:
                    continue
                c = ((y[r] - y[s]) ** 2 * (x[r] - x[m]) * (x[s] - x[p]) * (z[r] - z[m]) * (z[s] - z[p])
                     * _inv(t[r] - t[s]) * _inv(t[r] - t[m]) * _inv(t[s] - t[p]))
                if c:
                    quartic = quartic - u[r] * u[s] * u[m] * u[p] * c

    blocks = []
    for s in range(n):
        if s == r:
            continue
        P = zero
        for m in range(n):
            if m != r:
                c = (x[r] - x[m]) * (y[r] - y[s]) * (z[r] - z[m]) * _inv(t[r] - t[s]) * _inv(t[r] - t[m])
                P = P + u[r] * u[m] * c
        blocks.append(WeightedBlock(s, P, f"second:{s}"))
    P3 = zero
    for s in range(n):
        if s == r:
            continue
        for p in range(n):
            if p != s:
                c = (x[s] - x[p]) * (y[r] - y[s]) * (z[s] - z[p]) * _inv(t[r] - t[s]) * _inv(t[s] - t[p])
                P3 = P3 - u[s] * u[p] * c
    blocks.append(WeightedBlock(r, P3, "third"))

    n_exp = tuple(-lam - 1 for lam in cfg.lam)
    A = tuple(tuple(row) for row in build_A(cfg))
    return IntegrandSymbol(quartic, n_exp, A, tuple(blocks), copy, r)


def ibp_block(P: MultiPoly, v: int, Q) -> MultiPoly:
    """Replacement for ``(n_v + 1) P``: ``-u_v (d_v P + P d_v E)`` with E = (u, Q u)/2."""
    names = P.variables
    u = [MultiPoly.var(name, names) for name in names]
    dE = MultiPoly.zero(names)
    for k, q in enumerate(Q[v]):
        if q:
            dE = dE + u[k] * q
    return -(u[v] * (P.diff(names[v]) + P * dE))


def ibp_reduce(sym: IntegrandSymbol, cfg: PointConfig | None = None, *,
               quadratic_form=None) -> IntegrandSymbol:
    """Integrate every weighted block by parts (boundary terms dropped).

    ``quadratic_form`` overrides the exponent matrix; by default the symbol's own
    Q is used (``cfg`` is accepted for symmetry with the other operations and,
    if given, supplies Q = A(cfg)).
    """
    Q = quadratic_form
    if Q is None:
        Q = build_A(cfg) if cfg is not None else sym.quadratic_form
    base = sym.base
    for blk in sym.blocks:
        base = base + ibp_block(blk.poly, blk.index, Q)
    return replace(sym, base=base, blocks=(), quadratic_form=tuple(tuple(r) for r in Q))


# ---------------------------------------------------------------------------
# Displayed forms of the block reductions
# ---------------------------------------------------------------------------

def displayed_second_sum(cfg: PointConfig, r: int, copy: str = "y") -> MultiPoly:
    """-sum (x_r-x_m)(x_s-x_p)(y_r-y_s)(y_s-y_p)(z_r-z_m)(z_s-z_p)/(...) u_r u_s u_m u_p."""
    return _displayed(cfg, r, copy, second=True)


def displayed_third_sum(cfg: PointConfig, r: int, copy: str = "y") -> MultiPoly:
    """+sum (x_r-x_m)(x_s-x_p)(y_r-y_s)(y_r-y_m)(z_r-z_m)(z_s-z_p)/(...) u_r u_s u_m u_p."""
    return _displayed(cfg, r, copy, second=False)


def _displayed(cfg, r, copy, second):
    n = cfg.n
    x, y, z = _roles(cfg, copy)
    t = cfg.t
    names = u_vars(n)
    u = [MultiPoly.var(v, names) for v in names]
    out = MultiPoly.zero(names)
    for s in range(n):
        if s == r:
            continue
        for m in range(n):
            if m == r:
                continue
            for p in range(n):
                if p == s:
                    continue
                ypart = (y[s] - y[p]) if second else (y[r] - y[m])
                c = ((x[r] - x[m]) * (x[s] - x[p]) * (y[r] - y[s]) * ypart * (z[r] - z[m]) * (z[s] - z[p])
                     * _inv(t[r] - t[s]) * _inv(t[r] - t[m]) * _inv(t[s] - t[p]))
                if c:
                    out = out + u[r] * u[s] * u[m] * u[p] * (-c if second else c)
    return out


def derivative_residue(cfg: PointConfig, r: int) -> MultiPoly:
    """-sum_{s != r} A_rs/(t_r - t_s) u_r u_s: the d_v P part of one block reduction.

    Each of the two block families contributes this quadratic once; it depends
    on A only and is therefore symmetric under exchanging the families.
    """
    A = build_A(cfg)
    names = u_vars(cfg.n)
    u = [MultiPoly.var(v, names) for v in names]
    out = MultiPoly.zero(names)
    for s in range(cfg.n):
        if s != r:
            out = out - u[r] * u[s] * (A[r][s] * _inv(cfg.t[r] - cfg.t[s]))
    return out


# ---------------------------------------------------------------------------
# Formal Gaussian expectations (lambda = -1 collapse)
# ---------------------------------------------------------------------------

def _pairings_sum(idx, cov):
    if not idx:
        return 1
    first, rest = idx[0], idx[1:]
    total = 0
    for k in range(len(rest)):
        c = cov[first][rest[k]]
        if c:
            total = total + c * _pairings_sum(rest[:k] + rest[k + 1:], cov)
    return total


def gaussian_expectation(p: MultiPoly, cov):
    """Formal expectation of a polynomial under covariance ``cov`` (Isserlis' theorem)."""
    total = 0
    for exp, c in p.terms.items():
        idx = tuple(i for i, e in enumerate(exp) for _ in range(e))
        if len(idx) % 2:
            continue
        total = total + c * _pairings_sum(idx, cov)
    return total


def untwisted_expectation(sym: IntegrandSymbol):
    """Expectation w.r.t. the formal weight exp((1/2)(u, A u)): covariance -A^{-1}."""
    Q = [list(row) for row in sym.quadratic_form]
    b = inverse_exact(Q)
    cov = [[-v for v in row] for row in b]
    return gaussian_expectation(sym.poly, cov)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def twisted_symmetry_check(cfg: PointConfig, r: int) -> Report:
    """Reduced symbols of the y- and z-copy operators coincide exactly."""
    from .gaudin import omega_direct

    rep = Report("twisted", config=cfg.to_dict(), trials=1,
                 conventions={"exponent": "(1/2)(u,Au)", "n_i": "-lambda_i-1",
                              "constant_term": "omitted (copy-independent)", "index_base": 0})
    sym_y = twisted_action_symbol(cfg, r, "y")
    sym_z = twisted_action_symbol(cfg, r, "z")
    red_y, red_z = ibp_reduce(sym_y), ibp_reduce(sym_z)
    rep.add_check("reduced_yz_equal", Status.PASS if red_y.poly == red_z.poly else Status.FAIL,
                  difference=str(red_y.poly - red_z.poly) if red_y.poly != red_z.poly else "0")

    # each block reduction: quartic part is the displayed sum, quadratic part the residue
    second = [b for b in sym_y.blocks if b.label.startswith("second")]
    third = [b for b in sym_y.blocks if b.label == "third"]
    Q = sym_y.quadratic_form
    red2 = sum((ibp_block(b.poly, b.index, Q) for b in second), MultiPoly.zero(sym_y.variables))
    red3 = ibp_block(third[0].poly, r, Q)
    resid = derivative_residue(cfg, r)
    ok2 = red2.homogeneous_part(4) == displayed_second_sum(cfg, r) and red2.homogeneous_part(2) == resid
    ok3 = red3.homogeneous_part(4) == displayed_third_sum(cfg, r) and red3.homogeneous_part(2) == resid
    rep.add_check("second_block_matches_display", Status.PASS if ok2 else Status.FAIL)
    rep.add_check("third_block_matches_display", Status.PASS if ok3 else Status.FAIL)

    # lambda = -1: the expectation of the symbol is Omega_r of the untwisted problem
    flat = cfg.with_lambda([Fraction(-1)] * cfg.n)
    ok_collapse = True
    vals = {}
    for copy in ("y", "z"):
        sym = twisted_action_symbol(flat, r, copy)
        e_unred = untwisted_expectation(sym)
        e_red = untwisted_expectation(ibp_reduce(sym))
        om = omega_direct(cfg, r, copy, include_constant=False, convention="paper_s3")
        vals[copy] = str(om)
        ok_collapse &= (e_unred == om == e_red)
    rep.add_check("lambda_minus_one_collapse", Status.PASS if ok_collapse else Status.FAIL,
                  omega=vals)
    return rep.finalize()


def _twisted_trial(index, *, n, seed):
    cfg, rejected = draw_nonsingular(trial_rng(seed, index, "twisted"), n, with_lambda=True)
    failures = []
    for r in range(n):
        sub = twisted_symmetry_check(cfg, r)
        for c in sub.checks:
            if Status(c["status"]) is not Status.PASS:
                failures.append({"index": index, "r": r, "check": c["name"], "config": cfg.to_dict()})
    return {"rejected": rejected, "failures": failures}


def twisted_check(n=3, trials=10, seed=0, *, workers=1) -> Report:
    res = run_indexed(_twisted_trial, range(trials), workers, n=n, seed=seed)
    failures = [f for x in res for f in x["failures"]]
    rep = Report("twisted", seed=seed, trials=trials, rejected=sum(x["rejected"] for x in res),
                 conventions={"exponent": "(1/2)(u,Au)", "n_i": "-lambda_i-1",
                              "constant_term": "omitted (copy-independent)", "index_base": 0})
    for name in ("reduced_yz_equal", "second_block_matches_display",
                 "third_block_matches_display", "lambda_minus_one_collapse"):
        bad = [f for f in failures if f["check"] == name]
        rep.add_check(name, Status.FAIL if bad else Status.PASS, failures=len(bad))
    rep.finalize()
    rep.counterexample = failures[0] if failures else None
    rep.diagnostics = {"n": n}
    return rep


# ---------------------------------------------------------------------------
# Numerical oracle for the integration-by-parts rule
# ---------------------------------------------------------------------------

def ibp_quadrature_residual(P: MultiPoly, v: int, n_exponents, M, order: int = 24) -> dict:
    """Gauss-Hermite check that a block and its reduction integrate to the same value.

    Uses the convergent weight ``prod u_i^{n_i} exp(-(1/2)(u, M u))`` with integer
    ``n_i >= 0`` and symmetric positive-definite ``M`` (i.e. Q = -M).
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    L = np.linalg.cholesky(M)
    Linv_T = np.linalg.inv(L).T
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    V = np.stack([g.ravel() for g in grids])          # standard normal coordinates
    W = np.ones(V.shape[1])
    for wg in np.meshgrid(*([weights] * n), indexing="ij"):
        W = W * wg.ravel()
    U = Linv_T @ V                                      # u with (u, M u) = |v|^2
    negM = [[-float(a) for a in row] for row in M]
    reduced = ibp_block(P.map_coefficients(float), v, negM)
    weighted = P.map_coefficients(float) * (n_exponents[v] + 1)

    def integrate(poly):
        vals = np.zeros(U.shape[1])
        for exp, c in poly.terms.items():
            vals = vals + c * np.prod(U ** np.asarray(exp)[:, None], axis=0)
        prefactor = np.prod(U ** np.asarray(n_exponents)[:, None], axis=0)
        return float(np.sum(W * vals * prefactor))

    a, b = integrate(weighted), integrate(reduced)
    return {"block_integral": a, "reduced_integral": b,
            "relative_gap": abs(a - b) / max(abs(a), abs(b), 1e-300)}
