"""Second-order jets (value, gradient, Hessian) for exact mixed partials.

A :class:`Jet2` stores the truncated Taylor data of a function in a small set of
*active* variables.  The Hessian is kept as its upper triangle, so symmetry is
structural.  Coefficients may live in any of the scalar fields (``Fraction``,
``float``, ``mpf``): the arithmetic below only uses ``+ - * /``.
"""
from __future__ import annotations

from typing import Sequence

from ..errors import JetDivisionByZero, VariableSetMismatch


def _tri_index(i: int, j: int, k: int) -> int:
    if i > j:
        i, j = j, i
    return i * k - i * (i - 1) // 2 + (j - i)


class Jet2:
    """Second-order jet over the active variables ``vars``."""

    __slots__ = ("value", "grad", "hess", "vars")

    def __init__(self, value, grad: Sequence, hess: Sequence, vars: Sequence[str]):
        k = len(vars)
        if len(grad) != k or len(hess) != k * (k + 1) // 2:
            raise ValueError("jet component sizes do not match the active variables")
        self.value = value
        self.grad = tuple(grad)
        self.hess = tuple(hess)
        self.vars = tuple(vars)

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, c, vars: Sequence[str]) -> "Jet2":
        k = len(vars)
        z = c * 0
        return cls(c, (z,) * k, (z,) * (k * (k + 1) // 2), vars)

    @classmethod
    def seed(cls, value, var: str, vars: Sequence[str]) -> "Jet2":
        """The coordinate function ``var`` evaluated at ``value``."""
        vars = tuple(vars)
        k = len(vars)
        z = value * 0
        one = z + 1
        grad = tuple(one if v == var else z for v in vars)
        if var not in vars:
            raise ValueError(f"{var!r} is not an active variable")
        return cls(value, grad, (z,) * (k * (k + 1) // 2), vars)

    # -- accessors -----------------------------------------------------------
    def d(self, var: str):
        return self.grad[self.vars.index(var)]

    def d2(self, v1: str, v2: str):
        k = len(self.vars)
        return self.hess[_tri_index(self.vars.index(v1), self.vars.index(v2), k)]

    def hessian(self):
        """Full symmetric Hessian as a list of rows."""
        k = len(self.vars)
        return [[self.hess[_tri_index(i, j, k)] for j in range(k)] for i in range(k)]

    def is_constant(self) -> bool:
        return all(g == 0 for g in self.grad) and all(h == 0 for h in self.hess)

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.vars != self.vars:
                raise VariableSetMismatch(self.vars, other.vars)
            return other
        return Jet2.constant(other, self.vars)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.grad, self.hess, self.vars)
        o = self._coerce(other)
        return Jet2(self.value + o.value,
                    [a + b for a, b in zip(self.grad, o.grad)],
                    [a + b for a, b in zip(self.hess, o.hess)], self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, [-a for a in self.grad], [-a for a in self.hess], self.vars)

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value - other, self.grad, self.hess, self.vars)
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, [a * other for a in self.grad],
                        [a * other for a in self.hess], self.vars)
        o = self._coerce(other)
        f, g = self.value, o.value
        fg, gg = self.grad, o.grad
        k = len(self.vars)
        hess = []
        for i in range(k):
            for j in range(i, k):
                idx = _tri_index(i, j, k)
                hess.append(self.hess[idx] * g + fg[i] * gg[j] + fg[j] * gg[i] + f * o.hess[idx])
        grad = [fg[i] * g + f * gg[i] for i in range(k)]
        return Jet2(f * g, grad, hess, self.vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if other == 0:
                raise JetDivisionByZero()
            return Jet2(self.value / other, [a / other for a in self.grad],
                        [a / other for a in self.hess], self.vars)
        o = self._coerce(other)
        b = o.value
        if b == 0:
            raise JetDivisionByZero()
        k = len(self.vars)
        q = self.value / b
        # solve a = q*b order by order
        qg = [(self.grad[i] - q * o.grad[i]) / b for i in range(k)]
        hess = []
        for i in range(k):
            for j in range(i, k):
                idx = _tri_index(i, j, k)
                hess.append((self.hess[idx] - q * o.hess[idx]
                             - qg[i] * o.grad[j] - qg[j] * o.grad[i]) / b)
        return Jet2(q, qg, hess, self.vars)

    def __rtruediv__(self, other):
        return Jet2.constant(other, self.vars) / self

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("jets support non-negative integer powers only")
        out = Jet2.constant(self.value * 0 + 1, self.vars)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Jet2):
            return NotImplemented
        return (self.vars == other.vars and self.value == other.value
                and self.grad == other.grad and self.hess == other.hess)

    def __hash__(self):
        return hash((self.vars, self.value, self.grad, self.hess))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r}, vars={self.vars!r})"


def jet_arith(a: Jet2, b: Jet2 | None, op: str) -> Jet2:
    """Functional form of the jet operations: ``op`` in add/sub/mul/div/neg."""
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if isinstance(b, Jet2) and a.vars != b.vars:
        raise VariableSetMismatch(a.vars, b.vars)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")
