"""Point configurations: the evaluation sites (x, y, z, t[, lambda]).

Indices are 0-based everywhere: point ``i`` has coordinates ``x[i], y[i], z[i]``
and marked point ``t[i]``.  Only the finite marked points are stored.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from ..algebra.scalar import Field, Mode, format_scalar, parse_scalar
from ..errors import DegenerateConfig, UsageError

FAMILIES = ("x", "y", "z")


@dataclass(frozen=True)
class PointConfig:
    x: tuple
    y: tuple
    z: tuple
    t: tuple
    lam: tuple | None = None

    def __post_init__(self):
        for name in ("x", "y", "z", "t"):
            object.__setattr__(self, name, _normalize(getattr(self, name)))
        if self.lam is not None:
            object.__setattr__(self, "lam", _normalize(self.lam))
        n = len(self.t)
        lengths = {len(self.x), len(self.y), len(self.z), n}
        if self.lam is not None:
            lengths.add(len(self.lam))
        if len(lengths) != 1:
            raise DegenerateConfig("x, y, z, t (and lambda) must have equal length")
        if n < 1:
            raise DegenerateConfig("empty configuration")

    @property
    def n(self) -> int:
        return len(self.t)

    def family(self, name: str) -> tuple:
        if name not in FAMILIES:
            raise ValueError(f"unknown variable family {name!r}")
        return getattr(self, name)

    def with_family(self, name: str, values) -> "PointConfig":
        return replace(self, **{name: tuple(values)})

    def swap(self, a: str, b: str) -> "PointConfig":
        """Exchange two of the families x, y, z."""
        if a == b:
            return self
        return replace(self, **{a: self.family(b), b: self.family(a)})

    def permute(self, perm: Sequence[int]) -> "PointConfig":
        """Relabel points: new point i is old point perm[i]."""
        pick = lambda v: tuple(v[p] for p in perm)
        return PointConfig(pick(self.x), pick(self.y), pick(self.z), pick(self.t),
                           None if self.lam is None else pick(self.lam))

    def with_lambda(self, lam) -> "PointConfig":
        return replace(self, lam=tuple(lam))

    def convert(self, fld: Field) -> "PointConfig":
        conv = lambda v: tuple(fld.convert(a) for a in v)
        return PointConfig(conv(self.x), conv(self.y), conv(self.z), conv(self.t),
                           None if self.lam is None else conv(self.lam))

    def check_distinct_t(self):
        for i, ti in enumerate(self.t):
            if any(ti == tj for tj in self.t[:i]):
                raise DegenerateConfig(f"t[{i}] coincides with an earlier point")

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        out = {"n": self.n}
        for name in ("x", "y", "z", "t"):
            out[name] = [_fmt(v) for v in getattr(self, name)]
        if self.lam is not None:
            out["lambda"] = [_fmt(v) for v in self.lam]
        return out

    @classmethod
    def from_dict(cls, data: dict, fld: Field | Mode | str = Mode.EXACT) -> "PointConfig":
        if not isinstance(fld, Field):
            fld = Field(fld)
        try:
            vals = {k: tuple(parse_scalar(str(v), fld) for v in data[k]) for k in ("x", "y", "z", "t")}
        except KeyError as exc:
            raise UsageError(f"config is missing field {exc.args[0]!r}") from exc
        lam = data.get("lambda")
        if lam is not None:
            lam = tuple(parse_scalar(str(v), fld) for v in lam)
        cfg = cls(vals["x"], vals["y"], vals["z"], vals["t"], lam)
        if "n" in data and int(data["n"]) != cfg.n:
            raise UsageError(f"config declares n={data['n']} but has {cfg.n} points")
        return cfg

    @classmethod
    def load(cls, path, fld: Field | Mode | str = Mode.EXACT) -> "PointConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a flat record")
        return cls.from_dict(data, fld)


def _normalize(values) -> tuple:
    # plain ints would turn into floats under '/', so promote them to Fractions
    return tuple(Fraction(v) if isinstance(v, int) and not isinstance(v, bool) else v
                 for v in values)


def _fmt(v):
    if isinstance(v, (Fraction, int)):
        return str(Fraction(v))
    f = format_scalar(v)
    if isinstance(f, list):
        return repr(complex(*f))
    return repr(f)


def random_rational(rng: random.Random, bound: int = 20, max_den: int = 10) -> Fraction:
    """Numerator uniform in [-bound, bound], denominator uniform in [1, max_den]."""
    return Fraction(rng.randint(-bound, bound), rng.randint(1, max_den))


def random_config(rng: random.Random, n: int, *, with_lambda: bool = False,
                  bound: int = 20, max_den: int = 10) -> PointConfig:
    """Draw one rational configuration with pairwise distinct t (other checks by caller)."""
    draw = lambda: tuple(random_rational(rng, bound, max_den) for _ in range(n))
    while True:
        t = draw()
        if len(set(t)) == n:
            break
    x, y, z = draw(), draw(), draw()
    lam = draw() if with_lambda else None
    return PointConfig(x, y, z, t, lam)


def trial_rng(seed: int, index: int, salt: str = "") -> random.Random:
    """Independent, reproducible generator for trial ``index`` of a seeded run."""
    return random.Random(f"{salt}:{seed}:{index}")
