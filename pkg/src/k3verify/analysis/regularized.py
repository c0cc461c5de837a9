"""Regularized integrals of |u|^s f(u) over the complex plane.

For a smooth, rapidly decaying f and a partition of unity rho1 + rho2 = 1 with
rho1 = 1 near 0 and rho1 = 0 for |u| >= r2,

    int |u|^s f  =  c(s, m) int |u|^{s+2m} Delta^m (rho1 f)  +  int |u|^s rho2 f,

where Delta = d_u d_ubar = (1/4)(d_x^2 + d_y^2) and

    c(s, m) = 4^m / prod_{k=1}^{m} (s + 2k)^2,

which follows from Delta |u|^{a} = (a/2)^2 |u|^{a-2}.  The right-hand side
converges for Re s + 2m > -2 and defines the meromorphic continuation in s
(poles at s = -2, -4, ...).  The measure is Lebesgue measure on R^2.

Built-in test functions carry a sympy expression, so Delta^m is exact; plain
callables fall back to a nested 9-point stencil (with a warning).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp
from scipy import integrate as spi
from scipy import special

from ..errors import RegularizationError

MEASURE = "Lebesgue measure on R^2 (d^2u = dx dy)"
_X, _Y = sp.symbols("x y", real=True)
_R, _T = sp.symbols("r theta", positive=True)


@dataclass(frozen=True)
class PlaneFunction:
    """A test function on C = R^2: sympy expression in x, y, or a numpy callable f(x, y)."""

    expr: sp.Expr | None = None
    func: Callable | None = None
    name: str = "f"

    def __post_init__(self):
        if self.expr is None and self.func is None:
            raise ValueError("need an expression or a callable")

    def __call__(self, x, y):
        if self.func is not None:
            return self.func(x, y)
        return _lambdify_xy(self.expr)(x, y)

    @property
    def symbolic(self) -> bool:
        return self.expr is not None


def gaussian(a=1) -> PlaneFunction:
    """exp(-a |u|^2)."""
    return PlaneFunction(sp.exp(-sp.nsimplify(a) * (_X ** 2 + _Y ** 2)), name=f"exp(-{a}|u|^2)")


def gaussian_times(poly: str | sp.Expr, a=1) -> PlaneFunction:
    """poly(x, y) * exp(-a |u|^2); ``poly`` is a sympy expression or string in x, y."""
    p = sp.sympify(poly, locals={"x": _X, "y": _Y})
    return PlaneFunction(p * sp.exp(-sp.nsimplify(a) * (_X ** 2 + _Y ** 2)), name=f"({p})exp(-{a}|u|^2)")


@lru_cache(maxsize=256)
def _lambdify_xy(expr):
    f = sp.lambdify((_X, _Y), expr, "numpy")
    return lambda x, y: np.broadcast_to(f(x, y), np.broadcast(x, y).shape) * np.ones_like(x, dtype=float)


@dataclass(frozen=True)
class RegIntSpec:
    s: complex
    m: int = 0
    r1: float = 1.0
    r2: float = 2.0
    theta_points: int = 64

    def __post_init__(self):
        if not 0 < self.r1 < self.r2:
            raise ValueError("partition radii must satisfy 0 < r1 < r2")
        if self.m < 0 or int(self.m) != self.m:
            raise ValueError("regularization depth m must be a non-negative integer")
        check_exponent(self.s, self.m)

    @property
    def smoothness(self) -> int:
        """The transition of rho1 is C^k with k = 2m + 2."""
        return 2 * self.m + 2


def is_pole(s) -> bool:
    s = complex(s)
    if abs(s.imag) > 1e-14 or s.real > -1:
        return False
    k = round(-s.real / 2)
    return k >= 1 and abs(s.real + 2 * k) < 1e-12


def check_exponent(s, m: int) -> None:
    if is_pole(s):
        raise RegularizationError("pole of the meromorphic continuation")
    if complex(s).real + 2 * m <= -2:
        raise RegularizationError("insufficient regularization depth")


def minimal_depth(s) -> int:
    """Smallest m with Re s + 2m > -2."""
    re = complex(s).real
    return max(0, math.floor((-2 - re) / 2) + 1)


def c_coefficient(s, m: int):
    """c(s, m) = 4^m / prod_{k=1}^m (s + 2k)^2."""
    out = 1.0 + 0j
    for k in range(1, m + 1):
        out /= (complex(s) + 2 * k) ** 2
    out *= 4 ** m
    return out.real if complex(s).imag == 0 else out


def c_coefficient_shifted(s, m: int):
    """4^m / prod_{k=0}^{m-1} (s + 2k)^2 -- the variant with the product shifted by one step.

    Kept only for comparison: it does not satisfy c * Delta^m |u|^{s+2m} = |u|^s.
    """
    out = 1.0 + 0j
    for k in range(m):
        out /= (complex(s) + 2 * k) ** 2
    out *= 4 ** m
    return out.real if complex(s).imag == 0 else out


def smoothstep(k: int):
    """Polynomial S on [0, 1], S(0) = 0, S(1) = 1, first k derivatives vanishing at both ends."""
    tau = sp.Symbol("tau")
    S = tau ** (k + 1) * sum(sp.binomial(k + j, j) * sp.binomial(2 * k + 1, k - j) * (-tau) ** j
                             for j in range(k + 1))
    return sp.expand(S), tau


def _cartesian_laplacian(g):
    return (sp.diff(g, _X, 2) + sp.diff(g, _Y, 2)) / 4


def _radial_laplacian(g):
    """Delta restricted to radial functions: (1/4)(g'' + g'/r)."""
    return (sp.diff(g, _R, 2) + sp.diff(g, _R) / _R) / 4


def _monomial_angle(i: int, j: int):
    """int_0^{2 pi} cos^i sin^j dt (zero unless both exponents are even)."""
    if i % 2 or j % 2:
        return sp.Integer(0)
    return 2 * sp.gamma(sp.Rational(i + 1, 2)) * sp.gamma(sp.Rational(j + 1, 2)) / sp.gamma(
        sp.Rational(i + j + 2, 2))


def _angular_integral(expr):
    """int_0^{2 pi} expr(r cos t, r sin t) dt as an expression in r, or None.

    Each term of the expanded expression is split as x^i y^j times a factor
    that depends on x^2 + y^2 only; terms of that shape integrate in closed
    form.  Anything else falls back to sympy's integrator.
    """
    polar = {_X: _R * sp.cos(_T), _Y: _R * sp.sin(_T)}
    total = sp.Integer(0)
    radial_cache = {}
    for term in sp.Add.make_args(sp.expand(expr)):
        i = j = 0
        rest = []
        for fac in sp.Mul.make_args(term):
            base, e = fac.as_base_exp()
            if base == _X and e.is_Integer and e > 0:
                i += int(e)
            elif base == _Y and e.is_Integer and e > 0:
                j += int(e)
            else:
                rest.append(fac)
        rest = sp.Mul(*rest)
        if rest not in radial_cache:
            rp = sp.simplify(sp.trigsimp(rest.subs(polar)))
            radial_cache[rest] = None if rp.has(_T) else rp
        rp = radial_cache[rest]
        if rp is None:
            res = sp.integrate(term.subs(polar), (_T, 0, 2 * sp.pi))
            if res.has(sp.Integral):
                return None
            total += res
        else:
            total += _monomial_angle(i, j) * _R ** (i + j) * rp
    return sp.expand(total)


@lru_cache(maxsize=16)
def _radial_power_coefficients(m: int):
    """L^m g = sum_k coef_k(r) g^(k)(r) for the radial operator L, as exact expressions."""
    g = sp.Function("g")
    out = g(_R)
    for _ in range(m):
        out = sp.expand(_radial_laplacian(out))
    return {k: sp.simplify(out.coeff(sp.diff(g(_R), _R, k)) if k else out.coeff(g(_R)))
            for k in range(1, 2 * m + 1)} if m else {0: sp.Integer(1)}


def _cutoff_derivatives(m: int, r1: float, r2: float):
    """Callables for rho1^(j), j = 0..2m, with rho1(r) = 1 - S((r - r1)/(r2 - r1)).

    S is the regularized incomplete beta function I_tau(k+1, k+1), so
    S' = tau^k (1 - tau)^k / B(k+1, k+1); higher derivatives come from Leibniz'
    rule on that product, which is far better conditioned than differentiating
    the monomial expansion of S.
    """
    k = 2 * m + 2
    h = r2 - r1
    inv_beta = 1.0 / special.beta(k + 1, k + 1)
    clip = lambda r: min(max((r - r1) / h, 0.0), 1.0)
    fall = lambda a, i: math.perm(a, i) if i <= a else 0

    def bump_deriv(tau, d):
        # d-th derivative of tau^k (1 - tau)^k
        u = 1.0 - tau
        return sum(math.comb(d, i) * fall(k, i) * tau ** (k - i)
                   * (-1) ** (d - i) * fall(k, d - i) * u ** (k - d + i)
                   for i in range(d + 1) if i <= k and d - i <= k)

    derivs = [lambda r: 1.0 - special.betainc(k + 1, k + 1, clip(r))]
    for j in range(1, 2 * m + 1):
        derivs.append(lambda r, j=j: -inv_beta * bump_deriv(clip(r), j - 1) / h ** j)
    return derivs


@lru_cache(maxsize=64)
def _symbolic_pieces(expr, m: int, r1: float, r2: float):
    """Radial callables for the angular integrals of Delta^m f, Delta^m(rho1 f) and f.

    Rotation averaging commutes with Delta, so the angular integral of
    Delta^m (rho1 f) is L^m (rho1 F), with F the angular integral of f and L the
    radial part of Delta.  L^m is expanded once as sum_k coef_k(r) d^k/dr^k and
    the derivatives of rho1 F are assembled by Leibniz' rule, which avoids
    symbolic expression swell.  On the disk the Cartesian Delta^m f is
    averaged, keeping the integrand free of 1/r terms near the origin.
    """
    inner = expr
    for _ in range(m):
        inner = _cartesian_laplacian(inner)
    F = _angular_integral(expr)
    G = _angular_integral(inner)
    if F is None or G is None:
        return None
    mk = lambda e: sp.lambdify(_R, e, "math")
    dF = [mk(sp.diff(F, _R, i)) for i in range(2 * m + 1)]
    coef = {k: mk(c) for k, c in _radial_power_coefficients(m).items()}
    rho = _cutoff_derivatives(m, r1, r2)
    binom = [[math.comb(k, j) for j in range(k + 1)] for k in range(2 * m + 1)]

    def ann(r):
        rv = [d(r) for d in rho]
        fv = [d(r) for d in dF]
        return sum(c(r) * sum(binom[k][j] * rv[j] * fv[k - j] for j in range(k + 1))
                   for k, c in coef.items())
    return mk(G), ann, dF[0], rho[0]


def stencil_laplacian(g: Callable, h: float) -> Callable:
    """Isotropic 9-point approximation of Delta = (1/4)(d_xx + d_yy), error O(h^2)."""
    def lap(x, y):
        c = g(x, y)
        N = g(x, y + h) + g(x, y - h) + g(x + h, y) + g(x - h, y)
        K = g(x + h, y + h) + g(x - h, y + h) + g(x + h, y - h) + g(x - h, y - h)
        return (4 * N + K - 20 * c) / (6 * h * h) / 4
    return lap


def _numeric_pieces(func: Callable, m: int, r1: float, r2: float, h: float,
                    theta_points: int = 64):
    if m > 0:
        warnings.warn("Delta^m of a plain callable uses a nested 9-point stencil "
                      f"(error O(h^2), h={h}); expect ~{h ** 2:.0e} relative accuracy at best",
                      RuntimeWarning, stacklevel=3)
    S, tau = smoothstep(2 * m + 2)
    rho_poly = sp.lambdify(tau, 1 - S, "numpy")

    def rho1(r):
        r = np.asarray(r, dtype=float)
        t = np.clip((r - r1) / (r2 - r1), 0.0, 1.0)
        return rho_poly(t)

    def product(x, y):
        return rho1(np.hypot(x, y)) * func(x, y)

    inner, ann = func, product
    for _ in range(m):
        inner, ann = stencil_laplacian(inner, h), stencil_laplacian(ann, h)
    pol = lambda g: _angular_mean(lambda r, th: g(r * np.cos(th), r * np.sin(th)), theta_points)
    return pol(inner), pol(ann), pol(func), rho1


def _angular_mean(fn, theta_points: int):
    th = 2 * np.pi * np.arange(theta_points) / theta_points

    def avg(r):
        vals = fn(np.full_like(th, r), th)
        return 2 * np.pi * np.mean(np.broadcast_to(vals, th.shape))
    return avg


def _radial(fn, a, b, power, *, alg_weight=False):
    """int_a^b r^power fn(r) dr for complex power (fn real-valued)."""
    with warnings.catch_warnings():
        # the requested tolerance sits at roundoff level; quad's warning is expected
        warnings.simplefilter("ignore", spi.IntegrationWarning)
        return _radial_quad(fn, a, b, complex(power), alg_weight)


def _radial_quad(fn, a, b, p: complex, alg_weight: bool):
    opts = dict(limit=200, epsabs=1e-13, epsrel=1e-12)
    if alg_weight:
        # r^{Re p} is handled by the algebraic weight; the phase r^{i Im p} stays in the integrand
        re = lambda r: fn(r) * math.cos(p.imag * math.log(r)) if r > 0 else 0.0
        im = lambda r: fn(r) * math.sin(p.imag * math.log(r)) if r > 0 else 0.0
        out = spi.quad(re, a, b, weight="alg", wvar=(p.real, 0.0), **opts)[0]
        if p.imag:
            out += 1j * spi.quad(im, a, b, weight="alg", wvar=(p.real, 0.0), **opts)[0]
        return out
    powr = lambda r: r ** p
    re = lambda r: (fn(r) * powr(r)).real
    im = lambda r: (fn(r) * powr(r)).imag
    out = spi.quad(re, a, b, **opts)[0]
    if p.imag:
        out += 1j * spi.quad(im, a, b, **opts)[0]
    return out


def reg_integral_parts(spec: RegIntSpec, f: PlaneFunction, *, constant=c_coefficient,
                       stencil_h: float = 0.05) -> dict:
    """All pieces of the regularized integral (see :func:`reg_integral`)."""
    s, m, r1, r2 = spec.s, spec.m, spec.r1, spec.r2
    pieces = _symbolic_pieces(f.expr, m, r1, r2) if f.symbolic else None
    method = "symbolic"
    if pieces is None:
        method = "stencil"
        fn = f.func if f.func is not None else f
        pieces = _numeric_pieces(fn, m, r1, r2, stencil_h, spec.theta_points)
    g_inner, g_ann, F, rho1 = pieces
    a = complex(s) + 2 * m + 1
    disk = _radial(g_inner, 0.0, r1, a, alg_weight=True)
    annulus = _radial(g_ann, r1, r2, a)
    outer_ann = _radial(lambda r: (1 - rho1(r)) * F(r), r1, r2, complex(s) + 1)
    tail = _radial(F, r2, np.inf, complex(s) + 1)
    c = constant(s, m)
    value = c * (disk + annulus) + outer_ann + tail
    if complex(s).imag == 0:
        value = complex(value).real
    return {"value": value, "c": c, "regularized_part": disk + annulus,
            "rho2_part": outer_ann + tail, "m": m, "radii": (r1, r2),
            "transition_smoothness": spec.smoothness, "laplacian": method, "measure": MEASURE}


def reg_integral(spec: RegIntSpec, f: PlaneFunction | None = None) -> float | complex:
    """Regularized value of int_C |u|^s f(u) d^2u (default f = exp(-|u|^2))."""
    return reg_integral_parts(spec, f or gaussian())["value"]


def direct_integral(s, f: PlaneFunction | None = None, theta_points: int = 64):
    """Absolutely convergent polar quadrature, valid for Re s > -2."""
    if complex(s).real <= -2:
        raise RegularizationError("direct quadrature needs Re s > -2")
    f = f or gaussian()
    fpol = (lambda r, th: f(r * np.cos(th), r * np.sin(th)))
    F = _angular_mean(fpol, theta_points)
    val = _radial(F, 0.0, 1.0, complex(s) + 1, alg_weight=True) + _radial(F, 1.0, np.inf, complex(s) + 1)
    return complex(val).real if complex(s).imag == 0 else val


def gaussian_reference(s):
    """pi * Gamma((s + 2)/2): the continuation of int |u|^s exp(-|u|^2) d^2u."""
    if is_pole(s):
        raise RegularizationError("pole of the meromorphic continuation")
    v = math.pi * special.gamma(complex(s) / 2 + 1) if complex(s).imag else math.pi * special.gamma(s / 2 + 1)
    return v


def fourier_const_C(s):
    """C(s) = 2^{-s} pi Gamma(-s/2) / Gamma((2+s)/2), via complex log-Gamma."""
    z = complex(s)
    if abs(z.imag) < 1e-14 and abs(z.real - 2 * round(z.real / 2)) < 1e-12:
        raise RegularizationError("pole of the Fourier constant: s is an even integer")
    val = np.exp(-z * math.log(2) + math.log(math.pi) + special.loggamma(-z / 2)
                 - special.loggamma((2 + z) / 2))
    val = complex(val)
    return val.real if z.imag == 0 else val
