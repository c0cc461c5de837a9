"""Scalar fields.

Three numeric back-ends are supported and selected through :class:`Mode`:

* ``exact``    -- :class:`fractions.Fraction` (always reduced, positive denominator,
  division by zero raises instead of producing NaN);
* ``f64``      -- Python ``float`` / ``complex``;
* ``bigfloat`` -- :mod:`mpmath` ``mpf`` / ``mpc`` at a configurable mantissa width.

Values themselves are plain Python / mpmath numbers; a :class:`Field` only knows
how to create, convert and print them.  Keeping the numbers "naked" lets all the
arithmetic code downstream stay generic.
"""
from __future__ import annotations

import math
import numbers
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import mpmath

from ..errors import UsageError


class Mode(str, Enum):
    EXACT = "exact"
    F64 = "f64"
    BIGFLOAT = "bigfloat"


_FRACTION_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*[+-]?\d+\s*)?$")


@dataclass(frozen=True)
class Field:
    """A numeric field back-end.

    Parameters
    ----------
    mode : Mode or str
        One of ``exact``, ``f64``, ``bigfloat``.
    precision : int
        Mantissa bits for ``bigfloat`` (ignored otherwise).
    """

    mode: Mode = Mode.EXACT
    precision: int = 113
    _ctx: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.precision <= 0:
            raise ValueError("precision must be positive")
        if self.mode is Mode.BIGFLOAT:
            ctx = mpmath.MPContext()
            ctx.prec = self.precision
            object.__setattr__(self, "_ctx", ctx)

    @property
    def exact(self) -> bool:
        return self.mode is Mode.EXACT

    @property
    def ctx(self):
        """The private mpmath context (``bigfloat`` only)."""
        return self._ctx

    def zero(self):
        return self.convert(0)

    def one(self):
        return self.convert(1)

    def convert(self, value):
        """Coerce ``value`` (number or string) into this field."""
        if isinstance(value, str):
            return parse_scalar(value, self)
        if self.mode is Mode.EXACT:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, numbers.Rational):
                return Fraction(value)
            if isinstance(value, float):
                # floats are dyadic rationals; the conversion is exact
                return Fraction(value)
            raise TypeError(f"cannot represent {value!r} exactly")
        if self.mode is Mode.F64:
            if isinstance(value, complex) or _is_mp_complex(value):
                return complex(value)
            return float(value)
        ctx = self._ctx
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, complex) or _is_mp_complex(value):
            return ctx.mpc(value)
        return ctx.mpf(value)

    def sqrt(self, value):
        if self.mode is Mode.EXACT:
            return exact_sqrt(value)
        if self.mode is Mode.F64:
            if isinstance(value, complex) or value < 0:
                return complex(value) ** 0.5
            return math.sqrt(value)
        return self._ctx.sqrt(value)

    def abs(self, value):
        return abs(value)

    def is_zero(self, value) -> bool:
        return value == 0


def _is_mp_complex(value) -> bool:
    return type(value).__name__ == "mpc"


def exact_sqrt(q: Fraction):
    """Square root of a rational; exact when ``q`` is a perfect square.

    Returns a :class:`Fraction` for perfect squares and a ``float`` otherwise.
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return math.sqrt(q.numerator) / math.sqrt(q.denominator)


def parse_scalar(text: str, fld: Field | Mode | str = Mode.EXACT):
    """Parse a scalar literal.

    Exact mode accepts only integers and fractions ``"p/q"``; the float modes
    also accept decimals and Python complex literals such as ``"1+2j"``.
    """
    if not isinstance(fld, Field):
        fld = Field(fld)
    s = str(text).strip()
    if _FRACTION_RE.match(s):
        try:
            q = Fraction(s.replace(" ", ""))
        except ZeroDivisionError as exc:
            raise UsageError(f"zero denominator in {text!r}") from exc
        return fld.convert(q)
    if fld.exact:
        raise UsageError(f"exact mode requires integers or fractions p/q, got {text!r}")
    try:
        if "j" in s:
            return fld.convert(complex(s.replace(" ", "")))
        if fld.mode is Mode.BIGFLOAT:
            return fld.ctx.mpf(s)
        return float(s)
    except ValueError as exc:
        raise UsageError(f"cannot parse scalar {text!r}") from exc


def format_scalar(value) -> str | float | list:
    """JSON-friendly rendering: fractions as ``"p/q"``, reals as floats."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex) or _is_mp_complex(value):
        z = complex(value)
        return [z.real, z.imag]
    if value is None:
        return None
    return float(value)


def to_float(value) -> float | complex:
    """Best-effort conversion to a Python float (complex if needed)."""
    if isinstance(value, complex) or _is_mp_complex(value):
        return complex(value)
    return float(value)
