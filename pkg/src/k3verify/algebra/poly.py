"""Sparse multivariate polynomials over named variables.

A polynomial is a mapping ``exponent tuple -> coefficient``; zero coefficients
are never stored, so equality of polynomials is equality of their term maps.
Printing orders terms by graded-lex (highest total degree first).
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from ..errors import VariableSetMismatch


def _grlex_key(exp):
    return (sum(exp), exp)


class MultiPoly:
    """Immutable polynomial in the variables ``variables``."""

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping | Iterable = ()):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        k = len(self.variables)
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != k or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp}")
            if c == 0:
                continue
            if exp in clean:
                s = clean[exp] + c
                if s == 0:
                    del clean[exp]
                else:
                    clean[exp] = s
            else:
                clean[exp] = c
        self._terms = clean
        self._hash = None

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, variables) -> "MultiPoly":
        return cls(variables, {})

    @classmethod
    def constant(cls, c, variables) -> "MultiPoly":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, name: str, variables, coeff=1) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: coeff})

    # -- inspection ----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lex order (highest degree first)."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def coefficient(self, exp):
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly(self.variables, {e: c for e, c in self._terms.items() if sum(e) == d})

    def map_coefficients(self, fn) -> "MultiPoly":
        return MultiPoly(self.variables, {e: fn(c) for e, c in self._terms.items()})

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.variables != self.variables:
            raise VariableSetMismatch(self.variables, other.variables)

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(other, self.variables)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self._terms)
        for e, c in o._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if other == 0:
                return MultiPoly.zero(self.variables)
            return MultiPoly(self.variables, {e: c * other for e, c in self._terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, MultiPoly):
            raise TypeError("polynomial division is not supported")
        if c == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return MultiPoly(self.variables, {e: x / c for e, x in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus / evaluation ----------------------------------------------
    def diff(self, var: str) -> "MultiPoly":
        if var not in self.variables:
            raise ValueError(f"unknown variable {var!r}")
        i = self.variables.index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[ne] = c * e[i]
        return MultiPoly(self.variables, out)

    def evaluate(self, point: Mapping):
        missing = [v for v in self.variables if v not in point]
        if missing:
            raise KeyError(f"missing assignment for {missing}")
        vals = [point[v] for v in self.variables]
        total = 0
        for e, c in self._terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    # -- comparison / display -----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self._terms == other._terms
        if other == 0:
            return not self._terms
        return self == MultiPoly.constant(other, self.variables)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self.variables!r}, {str(self)!r})"


def poly_ring(variables: Sequence[str]):
    """Generators of the polynomial ring in ``variables`` (one MultiPoly each)."""
    variables = tuple(variables)
    return tuple(MultiPoly.var(v, variables) for v in variables)


def poly_diff(p: MultiPoly, var: str) -> MultiPoly:
    return p.diff(var)


def poly_eval(p: MultiPoly, point: Mapping):
    return p.evaluate(point)
