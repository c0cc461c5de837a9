"""Trace-formula side of the intertwining proof.

Everything here is a literal evaluation of an explicit finite sum in the
entries ``b_ij`` of ``A^{-1}``; the functions are checked against
:func:`k3verify.gaudin.omega_direct` (convention ``paper_s3``, no constant).

Notation (0-based indices, ``w(a, b) = 1/(t_a - t_b)``):

* ``D_km`` — the matrices with ``A = sum_{k,m} y_k z_m D_km``;
* ``Omega_rs`` — the per-pair contribution, ``Omega_r = sum_s w(r, s) Omega_rs``;
* degree split ``Omega_r = Omega_r^(2) + Omega_r^(1)`` by degree in ``b``;
* ``Omega_r^(2) = Omega''_r^(2) + Sigma^(1),1 + Sigma^(1),2``, where the Sigma
  pieces are degree 1 in ``b`` and ``Omega''`` is the y/z symmetric remainder.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateConfig, KernelPole, SingularMatrix
from .kernel.config import PointConfig, trial_rng
from .kernel.matrix import build_A, inverse_exact
from .kernel.sampling import draw_nonsingular
from .parallel import run_indexed
from .report import Report, Status


def _w(t, a, b):
    d = t[a] - t[b]
    if d == 0:
        raise DegenerateConfig(f"t[{a}] == t[{b}]")
    return 1 / d


def b_matrix(cfg: PointConfig):
    """b = A^{-1} (raises KernelPole on singular A)."""
    try:
        return inverse_exact(build_A(cfg))
    except SingularMatrix as exc:
        raise KernelPole(str(exc)) from exc


def build_D(cfg: PointConfig, k: int, m: int):
    n = cfg.n
    x, t = cfg.x, cfg.t
    zero = t[0] * 0
    D = [[zero] * n for _ in range(n)]
    if k != m:
        c = -(x[k] - x[m]) * _w(t, k, m)
        D[k][m] = D[m][k] = c
        return D
    for mm in range(n):
        if mm == k:
            continue
        c = (x[k] - x[mm]) * _w(t, k, mm)
        D[k][mm] = D[k][mm] + c
        D[mm][k] = D[mm][k] + c
    return D


def _dot_tr(P, Q):
    """Tr(P Q) without forming the product."""
    n = len(P)
    return sum(P[i][j] * Q[j][i] for i in range(n) for j in range(n))


def _products_DB(cfg, b):
    n = cfg.n
    out = {}
    for k in range(n):
        for m in range(n):
            D = build_D(cfg, k, m)
            out[k, m] = [[sum(D[i][l] * b[l][j] for l in range(n)) for j in range(n)]
                         for i in range(n)]
    return out


def omega_trace(cfg: PointConfig, r: int, *, restrict_indices: bool = False, b=None):
    """Omega_r from traces of D_km A^{-1} (Wick-contracted form of the Gaudin action).

    The sums over the auxiliary indices m and p run over *all* points.  With
    ``restrict_indices=True`` the sums skip m = r and p = s instead; this variant
    is kept only to demonstrate that the restricted sums are not equal to Omega_r.
    """
    n = cfg.n
    y, z, t = cfg.y, cfg.z, cfg.t
    b = b_matrix(cfg) if b is None else b
    DB = _products_DB(cfg, b)
    T = {key: sum(M[i][i] for i in range(n)) for key, M in DB.items()}
    total = t[0] * 0
    for s in range(n):
        if s == r:
            continue
        dy = y[r] - y[s]
        inner = total * 0
        for m in range(n):
            if restrict_indices and m == r:
                continue
            acc = inner * 0
            for p in range(n):
                if restrict_indices and p == s:
                    continue
                acc = acc + dy * z[p] * (T[r, m] * T[s, p] + 2 * _dot_tr(DB[r, m], DB[s, p]))
            inner = inner + z[m] * (-acc - 2 * (T[r, m] - T[s, m]))
        total = total + dy * _w(t, r, s) * inner
    return total / 4


def _quartic_rs(cfg, b, r, s):
    n = cfg.n
    x, y, z, t = cfg.x, cfg.y, cfg.z, cfg.t
    dy2 = (y[r] - y[s]) ** 2
    q = t[0] * 0
    for m in range(n):
        if m == r:
            continue
        cm = (z[r] - z[m]) * (x[r] - x[m]) * _w(t, r, m)
        for p in range(n):
            if p == s:
                continue
            c = cm * (z[p] - z[s]) * (x[s] - x[p]) * _w(t, s, p)
            q = q + c * (b[m][r] * b[s][p] + b[m][s] * b[r][p] + b[m][p] * b[s][r])
    return dy2 * q


def _linear_rs(cfg, b, r, s):
    n = cfg.n
    x, y, z, t = cfg.x, cfg.y, cfg.z, cfg.t
    dy = y[r] - y[s]
    lin = t[0] * 0
    for m in range(n):
        if m != r:
            lin = lin - (x[r] - x[m]) * dy * (z[r] - z[m]) * _w(t, r, m) * b[r][m]
    for p in range(n):
        if p != s:
            lin = lin + (x[s] - x[p]) * dy * (z[s] - z[p]) * _w(t, s, p) * b[s][p]
    return lin


def omega_rs(cfg: PointConfig, r: int, s: int, *, b=None):
    """The per-pair quantity with Omega_r = sum_{s != r} Omega_rs / (t_r - t_s)."""
    if r == s:
        raise ValueError("omega_rs needs r != s")
    b = b_matrix(cfg) if b is None else b
    return _quartic_rs(cfg, b, r, s) + _linear_rs(cfg, b, r, s)


def omega_from_pairs(cfg: PointConfig, r: int, *, b=None):
    b = b_matrix(cfg) if b is None else b
    return sum((omega_rs(cfg, r, s, b=b) * _w(cfg.t, r, s) for s in range(cfg.n) if s != r),
               cfg.t[0] * 0)


# ---------------------------------------------------------------------------
# H and A tensors
# ---------------------------------------------------------------------------

def h_tensor(v, r, m, s, p):
    """H_rmsp(v) = (v_r - v_m)(v_s - v_p)."""
    return (v[r] - v[m]) * (v[s] - v[p])


def a_tensor(cfg: PointConfig, r, m, s, p):
    """A_rmsp = H_rspm(y) H_rmsp(x) H_rmsp(z) / ((t_r-t_m)(t_r-t_s)(t_r-t_p))."""
    t = cfg.t
    return (h_tensor(cfg.y, r, s, p, m) * h_tensor(cfg.x, r, m, s, p) * h_tensor(cfg.z, r, m, s, p)
            * _w(t, r, m) * _w(t, r, s) * _w(t, r, p))


# ---------------------------------------------------------------------------
# Degree decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceDecomposition:
    omega_deg2: object
    omega_deg1: object
    sigma_11: object
    sigma_12: object
    omega_dprime2: object
    residue_11: object = 0
    labels: dict = field(default_factory=dict)

    @property
    def total(self):
        return self.omega_deg2 + self.omega_deg1

    @property
    def sigma(self):
        return self.sigma_11 + self.sigma_12

    def chain_defect(self):
        """omega_deg2 - (omega_dprime2 + sigma_11 + sigma_12); zero when the chain holds."""
        return self.omega_deg2 - (self.omega_dprime2 + self.sigma_11 + self.sigma_12)

    def to_dict(self):
        keys = ("omega_deg2", "omega_deg1", "sigma_11", "sigma_12", "omega_dprime2", "residue_11")
        return {k: str(getattr(self, k)) for k in keys} | {"labels": dict(self.labels)}


def _sigma_11(cfg, b, r):
    n = cfg.n
    x, y, z, t = cfg.x, cfg.y, cfg.z, cfg.t
    main = t[0] * 0
    for m in range(n):
        if m == r:
            continue
        cm = (x[r] - x[m]) * (z[r] - z[m]) * _w(t, r, m) * b[r][m]
        for s in range(n):
            if s != r:
                main = main + cm * (y[r] - y[s]) * _w(t, r, s)
    A = build_A(cfg)
    # the m = s contraction left over when b is contracted against A; it is
    # a function of A and b alone, hence symmetric in the three families
    residue = sum((A[r][s] * b[r][s] * _w(t, r, s) for s in range(n) if s != r), t[0] * 0)
    return main + residue, residue


def _sigma_12(cfg, b, r):
    n = cfg.n
    x, y, z, t = cfg.x, cfg.y, cfg.z, cfg.t
    acc = t[0] * 0
    for s in range(n):
        if s == r:
            continue
        for p in range(n):
            if p == r or p == s:
                continue
            acc = acc + ((x[s] - x[p]) * (y[r] - y[s]) * (z[s] - z[p]) * _w(t, r, p) * _w(t, r, s)
                         * b[s][p])
    return -acc / 2


def _dprime2(cfg, b, r):
    n = cfg.n
    acc = cfg.t[0] * 0
    for m in range(n):
        if m == r:
            continue
        for s in range(n):
            if s == r:
                continue
            for p in range(n):
                if p == r:
                    continue
                acc = acc + a_tensor(cfg, r, m, s, p) * (b[m][r] * b[s][p] + b[m][s] * b[r][p]
                                                         + b[m][p] * b[s][r])
    return acc / 2


def decompose(cfg: PointConfig, r: int, *, b=None) -> TraceDecomposition:
    b = b_matrix(cfg) if b is None else b
    t = cfg.t
    others = [s for s in range(cfg.n) if s != r]
    deg2 = sum((_quartic_rs(cfg, b, r, s) * _w(t, r, s) for s in others), t[0] * 0)
    deg1 = sum((_linear_rs(cfg, b, r, s) * _w(t, r, s) for s in others), t[0] * 0)
    s11, residue = _sigma_11(cfg, b, r)
    return TraceDecomposition(
        omega_deg2=deg2, omega_deg1=deg1, sigma_11=s11, sigma_12=_sigma_12(cfg, b, r),
        omega_dprime2=_dprime2(cfg, b, r), residue_11=residue,
        labels={"omega_deg2": "degree-2 part of sum_s Omega_rs/(t_r-t_s)",
                "omega_deg1": "degree-1 part of sum_s Omega_rs/(t_r-t_s)",
                "sigma_11": "first reduction term, includes residue_11",
                "residue_11": "sum_s A_rs b_rs/(t_r-t_s) (materialized m=s contraction)",
                "sigma_12": "second reduction term",
                "omega_dprime2": "symmetrized remainder, (1/2) sum A_rmsp (bb+bb+bb)"})


def deg1_closed_form(cfg: PointConfig, r: int, *, b=None):
    """-(1/4) sum_{s,p != r} (x_s-x_p)(y_s-y_p)(z_s-z_p)(2t_r-t_s-t_p) b_sp / ((t_r-t_p)(t_r-t_s)(t_s-t_p))."""
    b = b_matrix(cfg) if b is None else b
    n = cfg.n
    x, y, z, t = cfg.x, cfg.y, cfg.z, cfg.t
    acc = t[0] * 0
    for s in range(n):
        if s == r:
            continue
        for p in range(n):
            if p == r or p == s:
                continue
            acc = acc + ((x[s] - x[p]) * (y[s] - y[p]) * (z[s] - z[p]) * (2 * t[r] - t[s] - t[p])
                         * _w(t, r, p) * _w(t, r, s) * _w(t, s, p) * b[s][p])
    return -acc / 4


def deg1_plus_sigma(cfg: PointConfig, r: int):
    d = decompose(cfg, r)
    return d.omega_deg1 + d.sigma_11 + d.sigma_12


def deg1_symmetry_check(cfg: PointConfig, r: int) -> Report:
    """Omega^(1)_r + Sigma^(1)_r is fixed by y <-> z, and equals the closed form."""
    value = deg1_plus_sigma(cfg, r)
    swapped = deg1_plus_sigma(cfg.swap("y", "z"), r)
    closed = deg1_closed_form(cfg, r)
    rep = Report("deg1-symmetry", config=cfg.to_dict(), trials=1)
    rep.add_check("yz_symmetry", Status.PASS if value == swapped else Status.FAIL,
                  value=value, swapped=swapped)
    rep.add_check("closed_form", Status.PASS if value == closed else Status.FAIL,
                  value=value, closed_form=closed)
    return rep.finalize()


# ---------------------------------------------------------------------------
# Batch checks used by the CLI
# ---------------------------------------------------------------------------

def _trace_trial(index, *, n, seed, restrict_indices=False):
    from .gaudin import omega_direct

    cfg, rejected = draw_nonsingular(trial_rng(seed, index, "trace"), n)
    b = b_matrix(cfg)
    bad = None
    ratios = []
    for r in range(cfg.n):
        direct = omega_direct(cfg, r, "y", include_constant=False, convention="paper_s3")
        traced = omega_trace(cfg, r, restrict_indices=restrict_indices, b=b)
        pairs = omega_from_pairs(cfg, r, b=b)
        if direct != 0:
            ratios.append(traced / direct)
        if (traced != direct or pairs != direct) and bad is None:
            bad = {"index": index, "r": r, "config": cfg.to_dict(), "omega_direct": str(direct),
                   "omega_trace": str(traced), "omega_pairs": str(pairs),
                   "fitted_ratio": str(traced / direct) if direct != 0 else None}
    return {"rejected": rejected, "counterexample": bad, "ratios": [str(q) for q in ratios]}


def trace_equivalence_check(n=3, trials=10, seed=0, *, restrict_indices=False, workers=1) -> Report:
    res = run_indexed(_trace_trial, range(trials), workers, n=n, seed=seed,
                      restrict_indices=restrict_indices)
    bad = [x["counterexample"] for x in res if x["counterexample"]]
    ratios = sorted({q for x in res for q in x["ratios"]})
    rep = Report("trace-equiv", seed=seed, trials=trials, rejected=sum(x["rejected"] for x in res),
                 status=Status.FAIL if bad else Status.PASS, counterexample=bad[0] if bad else None,
                 conventions={"convention": "paper_s3", "include_constant": False,
                              "restrict_indices": restrict_indices, "index_base": 0})
    # a constant-factor mismatch would show up as a single repeated ratio != 1
    rep.diagnostics = {"n": n, "failures": len(bad),
                       "distinct_trace_to_direct_ratios": ratios[:10],
                       "constant_factor": ratios[0] if len(ratios) == 1 else None}
    return rep


def _decompose_trial(index, *, n, seed):
    cfg, rejected = draw_nonsingular(trial_rng(seed, index, "decompose"), n)
    from .gaudin import omega_direct

    swapped = cfg.swap("y", "z")
    failures = []
    for r in range(cfg.n):
        d = decompose(cfg, r)
        ds = decompose(swapped, r)
        checks = {
            "chain": d.chain_defect() == 0,
            "total": d.omega_deg1 + d.sigma_11 + d.sigma_12 + d.omega_dprime2
            == omega_direct(cfg, r, "y"),
            "dprime2_yz_symmetry": d.omega_dprime2 == ds.omega_dprime2,
            "deg1_yz_symmetry": d.omega_deg1 + d.sigma == ds.omega_deg1 + ds.sigma,
            "deg1_closed_form": d.omega_deg1 + d.sigma == deg1_closed_form(cfg, r),
        }
        for name, ok in checks.items():
            if not ok:
                failures.append({"index": index, "r": r, "check": name, "config": cfg.to_dict()})
    return {"rejected": rejected, "failures": failures}


def decomposition_check(n=3, trials=10, seed=0, *, workers=1, h_vectors=1000) -> Report:
    res = run_indexed(_decompose_trial, range(trials), workers, n=n, seed=seed)
    failures = [f for x in res for f in x["failures"]]
    rep = Report("decompose", seed=seed, trials=trials, rejected=sum(x["rejected"] for x in res),
                 conventions={"convention": "paper_s3", "index_base": 0})
    names = ("chain", "total", "dprime2_yz_symmetry", "deg1_yz_symmetry", "deg1_closed_form")
    for name in names:
        bad = [f for f in failures if f["check"] == name]
        rep.add_check(name, Status.FAIL if bad else Status.PASS, failures=len(bad),
                      first_counterexample=bad[0] if bad else None)
    rep.add_check("h_cyclic_identity", **h_cyclic_check(h_vectors, seed))
    rep.finalize()
    rep.counterexample = failures[0] if failures else None
    rep.diagnostics = {"n": n}
    return rep


def h_cyclic_check(vectors: int, seed: int, n: int = 5) -> dict:
    """H_rmsp + H_rspm + H_rpms = 0 on random rational vectors (all index quadruples)."""
    from .kernel.config import random_rational

    bad = None
    for k in range(vectors):
        rng = trial_rng(seed, k, "h-tensor")
        v = [random_rational(rng) for _ in range(n)]
        r, m, s, p = (rng.randrange(n) for _ in range(4))
        val = h_tensor(v, r, m, s, p) + h_tensor(v, r, s, p, m) + h_tensor(v, r, p, m, s)
        if val != 0 and bad is None:
            bad = {"vector": [str(a) for a in v], "indices": [r, m, s, p], "value": str(val)}
    return {"status": Status.FAIL if bad else Status.PASS, "vectors": vectors,
            "first_counterexample": bad}
