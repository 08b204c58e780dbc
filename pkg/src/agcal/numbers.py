"""Generalized numbers: moderate nets modulo negligible ones."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .gauges import AlgebraSpec, Gauge, is_moderate, is_negligible_num, subsumed
from .index_core import INCONCLUSIVE, Net, Verdict, eventually


class SpecMismatch(ValueError):
    pass


class NotModerate(ValueError):
    pass


@dataclass(frozen=True)
class GenNumber:
    """The class [rep] in R~(B, Z).  ``dim`` > 1 stores a tuple of nets."""

    rep: Net
    spec: AlgebraSpec
    dim: int = 1
    moderate: Optional[Verdict] = None

    @staticmethod
    def of(x, spec: AlgebraSpec, trust: bool = False) -> "GenNumber":
        net = Net.of(x)
        v = is_moderate(net, spec.B)
        if v.fails or (v.status == INCONCLUSIVE and not trust):
            raise NotModerate(f"{net.describe()} is not moderate for {spec.B.describe()} ({v.status})")
        return GenNumber(net, spec, 1, v)

    def describe(self) -> str:
        return f"[{self.rep.describe()}]"

    def _check(self, other: "GenNumber") -> None:
        if self.spec != other.spec:
            raise SpecMismatch("generalized numbers from different algebras")

    def __add__(self, other: "GenNumber") -> "GenNumber":
        self._check(other)
        return GenNumber.of(self.rep + other.rep, self.spec, trust=True)

    def __sub__(self, other: "GenNumber") -> "GenNumber":
        self._check(other)
        return GenNumber.of(self.rep - other.rep, self.spec, trust=True)

    def __mul__(self, other: "GenNumber") -> "GenNumber":
        self._check(other)
        return GenNumber.of(self.rep * other.rep, self.spec, trust=True)

    def __neg__(self) -> "GenNumber":
        return GenNumber.of(-self.rep, self.spec, trust=True)


def gn(x, spec: AlgebraSpec) -> GenNumber:
    return GenNumber.of(x, spec)


def gn_add(a: GenNumber, b: GenNumber) -> GenNumber:
    return a + b


def gn_mul(a: GenNumber, b: GenNumber) -> GenNumber:
    return a * b


def gn_neg(a: GenNumber) -> GenNumber:
    return -a


def gn_eq(a: GenNumber, b: GenNumber) -> Verdict:
    """a ~ b: the difference of representatives is Z-negligible."""
    a._check(b)
    diff = a.rep - b.rep
    return is_negligible_num(diff, a.spec.Z)


def is_bounded_by(a: GenNumber, B0: Gauge) -> Verdict:
    """Some representative of a is B0-moderate.

    Representatives differ by Z-negligible nets, which are moderate for every
    gauge with an infinite member, so testing the stored one suffices.
    """
    if not subsumed(B0, a.spec.B).holds:
        raise ValueError(f"R_M({B0.describe()}) is not contained in R_M({a.spec.B.describe()})")
    return is_moderate(a.rep, B0)


def bar_project(a: GenNumber, target: AlgebraSpec) -> GenNumber:
    """Reinterpret a bounded element under the smaller algebra ``target``."""
    v = is_bounded_by(a, target.B)
    if not v.holds:
        raise ValueError(f"{a.describe()} is not bounded by {target.B.describe()}")
    return GenNumber(a.rep, target, a.dim, v)


@dataclass(frozen=True)
class CompactPoint:
    """A generalized point whose representative eventually lies in ``hull``."""

    rep: Net
    hull: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.hull
        if not lo <= hi:
            raise ValueError("empty hull")
        v = eventually(self.rep.index_set, lambda e: _inside(self.rep, e, lo, hi))
        if not v.holds:
            raise ValueError(f"{self.rep.describe()} does not stay in {list(self.hull)}")

    @staticmethod
    def of(x, hull) -> "CompactPoint":
        return CompactPoint(Net.of(x), (float(hull[0]), float(hull[1])))

    def value(self, eps: float) -> float:
        return self.rep._raw(eps)


def _inside(net: Net, e: float, lo: float, hi: float) -> bool:
    v = net.value(e)
    return v is not None and lo <= v <= hi
