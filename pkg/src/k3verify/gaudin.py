"""Gaudin operators and the normalized quantity Omega_r.

The Gaudin operator attached to the marked point ``t_r`` and acting on a family
of variables ``u`` (the copy: x, y or z) is

    G_r = sum_{s != r} w_rs [ -(u_r-u_s)^2 d_r d_s + (u_r-u_s)(d_r - d_s) + c/2 ]

with ``c`` the constant-term flag and the weight ``w_rs`` fixed by the sign
convention:

* ``paper_s2``:  w_rs = 1/(t_s - t_r)
* ``paper_s3``:  w_rs = 1/(t_r - t_s)

The two differ by a global sign only.  The lambda-twisted operator replaces the
first-order part by ``-(u_r-u_s)(lam_s d_r - lam_r d_s)`` and the constant by
``lam_r lam_s / 2``; at lam = (-1, ..., -1) it reduces to the plain operator.

``Omega_r = (det A)^{1/2} G_r (det A)^{-1/2}`` is computed without square roots
from the second-order jet of ``f = det A`` in the active variables (u_r, u_s).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra.jet import Jet2
from .algebra.poly import MultiPoly
from .algebra.scalar import Field, Mode, to_float
from .errors import DegenerateConfig, KernelPole
from .kernel.config import FAMILIES, PointConfig, random_rational, trial_rng
from .kernel.matrix import build_A, det_exact
from .kernel.sampling import draw_nonsingular
from .parallel import run_indexed
from .report import Report, Status

CONVENTIONS = ("paper_s2", "paper_s3")


def weight(t, r: int, s: int, convention: str = "paper_s3"):
    """The 1/(t_r - t_s) factor in the requested sign convention."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    d = t[r] - t[s] if convention == "paper_s3" else t[s] - t[r]
    if d == 0:
        raise DegenerateConfig(f"t[{r}] == t[{s}]")
    return 1 / d if not isinstance(d, int) else Fraction(1, d)


def family_vars(copy: str, n: int) -> tuple[str, ...]:
    """Variable names of a family: ``("y0", "y1", ...)``."""
    if copy not in FAMILIES:
        raise ValueError(f"unknown variable family {copy!r}")
    return tuple(f"{copy}{i}" for i in range(n))


@dataclass(frozen=True)
class GaudinSpec:
    r: int
    copy: str = "y"
    include_constant: bool = False
    twist: tuple | None = None
    convention: str = "paper_s2"

    def __post_init__(self):
        if self.copy not in FAMILIES:
            raise ValueError(f"unknown variable family {self.copy!r}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.twist is not None:
            # integers become Fractions so that lam_r lam_s / 2 stays exact
            object.__setattr__(self, "twist", tuple(
                Fraction(v) if isinstance(v, int) and not isinstance(v, bool) else v
                for v in self.twist))


def gaudin_apply_poly(spec: GaudinSpec, f: MultiPoly, cfg: PointConfig) -> MultiPoly:
    """Apply G_r (plain or twisted) to a polynomial in the copy's variables."""
    n = cfg.n
    if not 0 <= spec.r < n:
        raise IndexError(f"operator index {spec.r} out of range for n={n}")
    names = family_vars(spec.copy, n)
    if f.variables != names:
        raise ValueError(f"polynomial must be in variables {names}, got {f.variables}")
    cfg.check_distinct_t()
    lam = spec.twist
    if lam is not None and len(lam) != n:
        raise ValueError("twist vector has the wrong length")
    r = spec.r
    u = [MultiPoly.var(v, names) for v in names]
    dr = f.diff(names[r])
    out = MultiPoly.zero(names)
    for s in range(n):
        if s == r:
            continue
        w = weight(cfg.t, r, s, spec.convention)
        ds = f.diff(names[s])
        diff_rs = u[r] - u[s]
        term = -(diff_rs * diff_rs) * dr.diff(names[s])
        if lam is None:
            term = term + diff_rs * (dr - ds)
            const = Fraction(1, 2)
        else:
            term = term - diff_rs * (dr * lam[s] - ds * lam[r])
            const = lam[r] * lam[s] / 2
        if spec.include_constant:
            term = term + f * const
        out = out + term * w
    return out


def commutator_check(i: int, j: int, f: MultiPoly, cfg: PointConfig, *,
                     copy: str = "y", include_constant: bool = False,
                     twist=None, convention: str = "paper_s2") -> MultiPoly:
    """G_i(G_j f) - G_j(G_i f) as an exact polynomial."""
    if i == j:
        raise ValueError("commutator needs two distinct indices")
    gi = GaudinSpec(i, copy, include_constant, twist, convention)
    gj = GaudinSpec(j, copy, include_constant, twist, convention)
    return gaudin_apply_poly(gi, gaudin_apply_poly(gj, f, cfg), cfg) - \
        gaudin_apply_poly(gj, gaudin_apply_poly(gi, f, cfg), cfg)


def random_poly(rng: random.Random, variables: Sequence[str], degree: int = 3,
                density: float = 0.7) -> MultiPoly:
    """Random polynomial of total degree <= ``degree`` with rational coefficients."""
    variables = tuple(variables)
    k = len(variables)
    terms = {}

    def exps(rem, pos):
        if pos == k - 1:
            for e in range(rem + 1):
                yield (e,)
            return
        for e in range(rem + 1):
            for rest in exps(rem - e, pos + 1):
                yield (e,) + rest

    for exp in exps(degree, 0):
        if rng.random() < density:
            terms[exp] = random_rational(rng)
    return MultiPoly(variables, terms)


# ---------------------------------------------------------------------------
# Omega_r from jets of det A
# ---------------------------------------------------------------------------

def omega_direct(cfg: PointConfig, r: int, copy: str = "y", include_constant: bool = False,
                 convention: str = "paper_s3"):
    """(det A)^{1/2} G_r^{copy} (det A)^{-1/2}, exact in rational mode.

    For every s != r the determinant is recomputed with jet-valued coordinates
    seeded in (u_r, u_s), which yields f, f_r, f_s and f_rs exactly.
    """
    n = cfg.n
    if not 0 <= r < n:
        raise IndexError(f"index {r} out of range for n={n}")
    cfg.check_distinct_t()
    u = cfg.family(copy)
    one = u[0] * 0 + 1
    half, three_quarters = one / 2, one * 3 / 4
    total = one * 0
    for s in range(n):
        if s == r:
            continue
        names = (f"{copy}{r}", f"{copy}{s}")
        jets = [Jet2.seed(v, names[0], names) if i == r else
                Jet2.seed(v, names[1], names) if i == s else
                Jet2.constant(v, names) for i, v in enumerate(u)]
        f = det_exact(build_A(cfg, **{copy: jets}))
        if f.value == 0:
            raise KernelPole()
        f0, (fr, fs), frs = f.value, f.grad, f.hess[1]
        d = u[r] - u[s]
        bracket = (-(d * d) * (three_quarters * fr * fs / (f0 * f0) - half * frs / f0)
                   - half * d * (fr - fs) / f0)
        if include_constant:
            bracket = bracket + half
        total = total + weight(cfg.t, r, s, convention) * bracket
    return total


def omega_all_copies(cfg: PointConfig, r: int, **kw) -> dict:
    return {c: omega_direct(cfg, r, c, **kw) for c in FAMILIES}


def _rel_dev(values) -> float:
    vals = [to_float(v) for v in values]
    scale = max(max(abs(v) for v in vals), 1e-300)
    return max(abs(a - b) for a in vals for b in vals) / scale


def _intertwine_trial(index: int, *, n: int, seed: int, mode: str, precision: int,
                      include_constant: bool, convention: str, tolerance: float,
                      cfg: PointConfig | None = None):
    if cfg is not None:
        rejected = 0
    else:
        cfg, rejected = draw_nonsingular(trial_rng(seed, index, "intertwine"), n)
    fld = Field(mode, precision)
    work = cfg if fld.exact else cfg.convert(fld)
    worst = 0.0
    bad = None
    for r in range(cfg.n):
        vals = omega_all_copies(work, r, include_constant=include_constant, convention=convention)
        if fld.exact:
            ok = vals["x"] == vals["y"] == vals["z"]
            dev = 0.0 if ok else _rel_dev(vals.values())
        else:
            dev = _rel_dev(vals.values())
            ok = dev <= tolerance
        worst = max(worst, dev)
        if not ok and bad is None:
            bad = {"index": index, "r": r, "config": cfg.to_dict(),
                   "omega": {k: str(v) for k, v in vals.items()}}
    return {"index": index, "rejected": rejected, "deviation": worst, "counterexample": bad}


def intertwining_check(n: int = 3, trials: int = 10, seed: int = 0, *, cfg: PointConfig | None = None,
                       mode: str = "exact", precision: int = 113, include_constant: bool = False,
                       convention: str = "paper_s3", tolerance: float = 1e-9,
                       workers: int = 1) -> Report:
    """Check Omega_r^x = Omega_r^y = Omega_r^z for every r.

    With ``cfg`` given, that single configuration is checked; otherwise
    ``trials`` fresh random rational configurations of size ``n`` are drawn
    (seeded per trial index).  Exact mode demands equality; float modes compare
    against ``tolerance`` (relative).
    """
    mode = Mode(mode).value
    kwargs = dict(n=n, seed=seed, mode=mode, precision=precision,
                  include_constant=include_constant, convention=convention, tolerance=tolerance)
    if cfg is not None:
        n = cfg.n
        # a single given configuration runs in-process, in whatever field it was loaded
        kwargs.update(n=n, cfg=cfg)
        results = [_intertwine_trial(0, **kwargs)]
    else:
        results = run_indexed(_intertwine_trial, range(trials), workers, **kwargs)
    rep = Report("intertwine", mode=mode, seed=seed, trials=len(results),
                 conventions={"convention": convention, "include_constant": include_constant,
                              "index_base": 0})
    rep.rejected = sum(res["rejected"] for res in results)
    rep.max_deviation = max(res["deviation"] for res in results)
    bad = [res["counterexample"] for res in results if res["counterexample"]]
    rep.status = Status.FAIL if bad else Status.PASS
    rep.counterexample = bad[0] if bad else None
    rep.diagnostics = {"n": n, "failures": len(bad)}
    if cfg is not None:
        rep.config = cfg.to_dict()
    return rep


def _commute_trial(index: int, *, n: int, seed: int, degree: int):
    rng = trial_rng(seed, index, "commute")
    while True:
        t = tuple(random_rational(rng) for _ in range(n))
        if len(set(t)) == n:
            break
    zero = tuple(Fraction(0) for _ in range(n))
    cfg = PointConfig(zero, zero, zero, t)
    f = random_poly(rng, family_vars("y", n), degree)
    bad = None
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            for const in (False, True):
                pairs += 1
                c = commutator_check(i, j, f, cfg, include_constant=const)
                if not c.is_zero() and bad is None:
                    bad = {"index": index, "i": i, "j": j, "include_constant": const,
                           "t": [str(v) for v in t], "f": str(f), "commutator": str(c)}
    return {"pairs": pairs, "counterexample": bad}


def commutativity_check(n: int = 3, trials: int = 5, seed: int = 0, *, degree: int = 3,
                        workers: int = 1) -> Report:
    """[G_i, G_j] f = 0 for random t and random polynomials f of degree <= ``degree``."""
    results = run_indexed(_commute_trial, range(trials), workers, n=n, seed=seed, degree=degree)
    bad = [res["counterexample"] for res in results if res["counterexample"]]
    rep = Report("commute", seed=seed, trials=trials,
                 status=Status.FAIL if bad else Status.PASS,
                 counterexample=bad[0] if bad else None,
                 conventions={"convention": "paper_s2", "index_base": 0},
                 diagnostics={"n": n, "degree": degree,
                              "commutators_checked": sum(res["pairs"] for res in results)})
    return rep
