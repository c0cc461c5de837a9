"""The kernel matrix A, determinants, inverses and the kernel K3 itself.

Matrices are plain lists of rows.  Elements may be Fractions, floats, complex
numbers, mpmath numbers or :class:`~k3verify.algebra.Jet2`; the elimination
routine is picked from the element type:

* exact elements (Fraction, int, or jets over them) -> fraction-free Bareiss;
* floating elements -> Gaussian elimination with partial pivoting.
"""
from __future__ import annotations

import numbers
from fractions import Fraction

from ..algebra.jet import Jet2
from ..algebra.scalar import exact_sqrt
from ..errors import DegenerateConfig, KernelPole, SingularMatrix
from .config import PointConfig


def _base(v):
    return v.value if isinstance(v, Jet2) else v


def _is_exact(v) -> bool:
    return isinstance(_base(v), numbers.Rational)


def build_A(cfg: PointConfig, *, x=None, y=None, z=None):
    """A_ij = (x_i-x_j)(y_i-y_j)(z_i-z_j)/(t_i-t_j), zero diagonal.

    ``x``, ``y``, ``z`` optionally override the families of ``cfg`` (used to pass
    jet-valued coordinates).  Only the upper triangle is computed; the lower is
    filled by symmetry, so the result is symmetric by construction.
    """
    cfg.check_distinct_t()
    x = cfg.x if x is None else x
    y = cfg.y if y is None else y
    z = cfg.z if z is None else z
    t = cfg.t
    n = cfg.n
    zero = _base(t[0]) * 0
    A = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dt = t[i] - t[j]
            if dt == 0:
                raise DegenerateConfig(f"t[{i}] == t[{j}]")
            a = (x[i] - x[j]) * (y[i] - y[j]) * (z[i] - z[j]) / dt
            A[i][j] = a
            A[j][i] = a
    # diagonal zeros of the right type (jets need a jet zero)
    sample = A[0][1] if n > 1 else zero
    if isinstance(sample, Jet2):
        jz = Jet2.constant(zero, sample.vars)
        for i in range(n):
            A[i][i] = jz
    return A


def identity(n: int, one=Fraction(1)):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def det_exact(M):
    """Determinant of a square matrix (see module docstring for the method)."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    if n == 0:
        return Fraction(1)
    if _is_exact(M[0][0]):
        return _det_bareiss(M)
    return _det_pivot(M)


def _det_bareiss(M):
    n = len(M)
    a = [list(row) for row in M]
    sign = 1
    prev = None
    for k in range(n - 1):
        if _base(a[k][k]) == 0:
            for i in range(k + 1, n):
                if _base(a[i][k]) != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return a[k][k] * 0
        p = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = a[i][j] * p - a[i][k] * a[k][j]
                a[i][j] = v if prev is None else v / prev
        prev = p
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def _det_pivot(M):
    n = len(M)
    a = [list(row) for row in M]
    det = a[0][0] * 0 + 1
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(_base(a[i][k])))
        if _base(a[piv][k]) == 0:
            return a[k][k] * 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        p = a[k][k]
        det = det * p
        for i in range(k + 1, n):
            f = a[i][k] / p
            if not isinstance(f, Jet2) and f == 0:
                continue
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return det


def inverse_exact(M):
    """Inverse by Gauss-Jordan elimination (exact for rational entries)."""
    n = len(M)
    exact = _is_exact(M[0][0])
    one = M[0][0] * 0 + 1
    a = [list(row) + identity(n, one)[i] for i, row in enumerate(M)]
    for k in range(n):
        if exact:
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        else:
            piv = max(range(k, n), key=lambda i: abs(a[i][k]))
            if a[piv][k] == 0:
                piv = None
        if piv is None:
            raise SingularMatrix()
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [v / p for v in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [vi - f * vk for vi, vk in zip(a[i], a[k])]
    return [row[n:] for row in a]


def matmul(P, Q):
    n, m = len(P), len(Q[0])
    inner = len(Q)
    return [[sum((P[i][k] * Q[k][j] for k in range(1, inner)), P[i][0] * Q[0][j])
             for j in range(m)] for i in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)]


def trace(M):
    return sum((M[i][i] for i in range(1, len(M))), M[0][0])


def det_A(cfg: PointConfig):
    return det_exact(build_A(cfg))


def eval_K3(cfg: PointConfig, mode: str = "complex"):
    """K3 = 1/|det A| (``mode="complex"``) or 1/sqrt|det A| (``mode="real"``).

    In exact arithmetic the complex-mode value is an exact Fraction; the real
    mode is exact when |det A| is a perfect square and a float otherwise.
    """
    d = det_A(cfg)
    if d == 0:
        raise KernelPole()
    mag = abs(d)
    if mode == "complex":
        return 1 / mag
    if mode == "real":
        if isinstance(mag, Fraction):
            return 1 / exact_sqrt(mag)
        return 1 / mag ** 0.5
    raise ValueError(f"unknown kernel mode {mode!r}; expected 'complex' or 'real'")
