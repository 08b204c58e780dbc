"""Generalized functions on an interval: eps-indexed families of smooth maps."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

from . import rates
from .gauges import AlgebraSpec, is_moderate, is_negligible_num, principal_generator
from .index_core import (
    GridConfig,
    Net,
    Verdict,
    big_o,
    conjunction,
    grid_config,
)
from .numbers import CompactPoint, GenNumber
from .rates import Abs, Add, Exp, Mul, Neg, Num, Pow, RateExpr

Interval = tuple[float, float]


class CapabilityError(ValueError):
    pass


class DomainError(ValueError):
    pass


def _const(x: float, up: bool = True) -> Num:
    """Decimal constant, nudged upwards when used as a bound."""
    if up and x > 0:
        x *= 1 + 1e-10
    return Num(Fraction(f"{x:.12g}"))


def _is_zero_expr(e: RateExpr) -> bool:
    try:
        return rates.normalize(e).zero
    except rates.RateError:
        return False


# ---------------------------------------------------------------------------
# Profiles


_PROFILE_KINDS = ("poly", "sin", "cos", "exp", "gauss", "bump")


@dataclass(frozen=True)
class Profile:
    """A closed-form smooth map x -> Q(y)*base(y) with y = a*(x - c).

    ``coeffs`` is the ascending polynomial factor Q.  For ``bump`` the value is
    Q(y) (1-y^2)^(-upow) exp(-1/(1-y^2)) on |y| < 1 and 0 elsewhere.  For the
    trigonometric kinds Q must be constant.
    """

    kind: str
    coeffs: tuple = (1.0,)
    upow: int = 0
    a: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in _PROFILE_KINDS:
            raise ValueError(f"unknown profile {self.kind!r}")
        co = tuple(float(v) for v in self.coeffs) or (0.0,)
        while len(co) > 1 and co[-1] == 0.0:
            co = co[:-1]
        object.__setattr__(self, "coeffs", co)
        if self.kind in ("sin", "cos") and len(co) > 1:
            raise ValueError("trigonometric profiles take a constant factor")

    # -- structure ---------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.coeffs)

    def scaled(self, k: float) -> "Profile":
        return replace(self, coeffs=tuple(k * v for v in self.coeffs))

    def deriv(self, k: int = 1) -> "Profile":
        p = self
        for _ in range(k):
            p = p._d1()
        return p

    def _d1(self) -> "Profile":
        q = np.array(self.coeffs)
        y = np.array([0.0, 1.0])
        kind, n = self.kind, self.upow
        if kind == "poly":
            new = P.polyder(q) if len(q) > 1 else np.array([0.0])
        elif kind == "sin":
            return replace(self, kind="cos", coeffs=(self.a * q[0],))
        elif kind == "cos":
            return replace(self, kind="sin", coeffs=(-self.a * q[0],))
        elif kind == "exp":
            new = P.polyadd(_der(q), q)
        elif kind == "gauss":
            new = P.polysub(_der(q), P.polymul(2 * y, q))
        else:
            u = np.array([1.0, 0.0, -1.0])
            t1 = P.polymul(_der(q), P.polymul(u, u))
            t2 = P.polymul(2.0 * n * y, P.polymul(q, u))
            t3 = P.polymul(2 * y, q)
            new = P.polysub(P.polyadd(t1, t2), t3)
            return replace(self, coeffs=tuple(self.a * new), upow=n + 2)
        return replace(self, coeffs=tuple(self.a * np.atleast_1d(new)))

    # -- evaluation ----------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = self.a * (x - self.c)
        q = P.polyval(y, np.array(self.coeffs))
        kind = self.kind
        if kind == "poly":
            return q
        if kind == "sin":
            return q * np.sin(y)
        if kind == "cos":
            return q * np.cos(y)
        if kind == "exp":
            with np.errstate(over="ignore"):
                return q * np.exp(y)
        if kind == "gauss":
            return q * np.exp(-y * y)
        u = 1.0 - y * y
        inside = u > 0
        out = np.zeros_like(y)
        us = np.where(inside, u, 1.0)
        with np.errstate(over="ignore", divide="ignore"):
            val = q * np.exp(-1.0 / us - self.upow * np.log(us))
        out[inside] = val[inside]
        return out

    def support(self) -> Interval:
        """Closed interval outside of which the profile vanishes (or is negligible)."""
        if self.kind == "bump":
            r = 1.0 / abs(self.a)
            return (self.c - r, self.c + r)
        if self.kind == "gauss":
            r = (math.sqrt(len(self.coeffs)) + 40.0) / abs(self.a)
            return (self.c - r, self.c + r)
        return (-math.inf, math.inf)

    def sup_abs(self, lo: float, hi: float, n: int = 2049) -> float:
        """max over [lo, hi] of |profile|: dense sampling, then local refinement."""
        s0, s1 = self.support()
        lo_, hi_ = max(lo, s0), min(hi, s1)
        if lo_ > hi_:
            return 0.0
        if self.kind in ("sin", "cos") and hi_ - lo_ >= 2 * math.pi / abs(self.a):
            return abs(self.coeffs[0])
        return _sup_abs(self, lo_, hi_, n)

    def global_sup(self) -> float:
        if self.kind in ("sin", "cos"):
            return abs(self.coeffs[0])
        s0, s1 = self.support()
        if math.isinf(s0) or math.isinf(s1):
            return 0.0 if self.is_zero else math.inf
        return _sup_abs(self, s0, s1, 8193)

    def describe(self) -> str:
        if self.kind == "poly":
            body = f"poly[{','.join(_g(v) for v in self.coeffs)}]"
        elif self.coeffs == (1.0,):
            body = self.kind
        else:
            body = f"{self.kind}*poly[{','.join(_g(v) for v in self.coeffs)}]"
        if self.upow:
            body += f"/u^{self.upow}"
        if self.a != 1.0 or self.c != 0.0:
            body += f"@({_g(self.a)},{_g(self.c)})"
        return body


def _g(v: float) -> str:
    return f"{v:.12g}"


def _der(q: np.ndarray) -> np.ndarray:
    return P.polyder(q) if len(q) > 1 else np.array([0.0])


def _sup_abs(f: Callable, lo: float, hi: float, n: int) -> float:
    if lo == hi:
        return float(abs(f(np.array([lo]))[0]))
    xs = np.linspace(lo, hi, n)
    vals = np.abs(f(xs))
    i = int(np.argmax(vals))
    best = float(vals[i])
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    if b > a:
        r = minimize_scalar(lambda t: -abs(float(f(np.array([t]))[0])), bounds=(a, b),
                            method="bounded", options={"xatol": 1e-12 * max(1.0, abs(b))})
        best = max(best, -float(r.fun))
    return best


_PROFILE_RE = re.compile(r"^\s*(poly)\s*\[([^\]]*)\]\s*$|^\s*(sin|cos|exp|gauss|bump)\s*$")


def parse_profile(text: str) -> Profile:
    m = _PROFILE_RE.match(text)
    if not m:
        raise ValueError(f"bad profile literal {text!r}")
    if m.group(1):
        items = [s for s in m.group(2).split(",") if s.strip()]
        return Profile("poly", tuple(float(Fraction(s.strip())) for s in items) or (0.0,))
    return Profile(m.group(3))


def poly(*coeffs) -> Profile:
    return Profile("poly", tuple(coeffs))


SIN, COS, EXP, GAUSS, BUMP = (Profile(k) for k in ("sin", "cos", "exp", "gauss", "bump"))


# ---------------------------------------------------------------------------
# Families


def _expr(x) -> RateExpr:
    if isinstance(x, RateExpr):
        return x
    if isinstance(x, str):
        return rates.parse(x)
    return Num(Fraction(x))


def _fd_step(k: int, width: float) -> float:
    return max(width, 1e-12) * max(1e-4, 1e-16 ** (1.0 / (k + 2)))


def _central_diff(f: Callable, x: np.ndarray, k: int, h: float) -> np.ndarray:
    if k == 0:
        return f(x)
    out = np.zeros_like(x, dtype=float)
    for j in range(k + 1):
        out = out + (-1) ** j * math.comb(k, j) * f(x + (k / 2 - j) * h)
    return out / h ** k


class Family:
    """Base class of the representable eps-families."""

    def value(self, eps: float, x):  # pragma: no cover - interface
        raise NotImplementedError

    def deriv(self, k: int = 1) -> "Family":  # pragma: no cover - interface
        raise NotImplementedError

    def sup_norm_net(self, K: Interval, alpha: int, cfg: Optional[GridConfig] = None) -> Net:
        raise NotImplementedError  # pragma: no cover

    def scale(self, c: RateExpr) -> "Family":  # pragma: no cover - interface
        raise NotImplementedError

    def describe(self) -> str:  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, eps: float, x):
        return self.value(eps, x)


@dataclass(frozen=True)
class SeparableSum(Family):
    """x -> sum_i coef_i(eps) * prod_j profile_ij(x)."""

    terms: tuple = ()

    @staticmethod
    def of(pairs: Sequence) -> "SeparableSum":
        out = []
        for coef, prof in pairs:
            profs = prof if isinstance(prof, tuple) else (prof,)
            out.append((_expr(coef), tuple(profs)))
        return SeparableSum(tuple(out)).merged()

    def merged(self) -> "SeparableSum":
        acc: dict = {}
        for coef, profs in self.terms:
            if any(p.is_zero for p in profs):
                continue
            if profs in acc:
                acc[profs] = Add(acc[profs], coef)
            else:
                acc[profs] = coef
        terms = tuple((c, p) for p, c in acc.items() if not _is_zero_expr(c))
        return SeparableSum(terms)

    def value(self, eps: float, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for coef, profs in self.terms:
            v = rates.eval_at(coef, eps)
            term = np.full_like(x, v)
            for p in profs:
                term = term * p(x)
            out = out + term
        return out

    def deriv(self, k: int = 1) -> "SeparableSum":
        fam = self
        for _ in range(k):
            new = []
            for coef, profs in fam.terms:
                for i in range(len(profs)):
                    d = profs[:i] + (profs[i].deriv(),) + profs[i + 1:]
                    new.append((coef, d))
            fam = SeparableSum(tuple(new)).merged()
        return fam

    def sup_norm_net(self, K: Interval, alpha: int, cfg: Optional[GridConfig] = None) -> Net:
        fam = self.deriv(alpha)
        groups: dict = {}
        order = []
        for coef, profs in fam.terms:
            key = rates.pretty(coef)
            if key not in groups:
                groups[key] = (coef, [])
                order.append(key)
            groups[key][1].append(profs)
        acc: Optional[RateExpr] = None
        for key in order:
            coef, plist = groups[key]

            def g(x, plist=plist):
                tot = np.zeros_like(np.asarray(x, dtype=float))
                for profs in plist:
                    t = np.ones_like(tot)
                    for p in profs:
                        t = t * p(x)
                    tot = tot + t
                return tot

            m = _sup_abs(g, K[0], K[1], 2049)
            if m == 0.0:
                continue
            term = Mul(Abs(coef), _const(m))
            acc = term if acc is None else Add(acc, term)
        return Net.symbolic(acc if acc is not None else Num(Fraction(0)))

    def scale(self, c: RateExpr) -> "SeparableSum":
        return SeparableSum(tuple((Mul(c, coef), p) for coef, p in self.terms)).merged()

    def times(self, other: "SeparableSum") -> "SeparableSum":
        out = [(Mul(c1, c2), p1 + p2) for c1, p1 in self.terms for c2, p2 in other.terms]
        return SeparableSum(tuple(out)).merged()

    def plus(self, other: "SeparableSum") -> "SeparableSum":
        return SeparableSum(self.terms + other.terms).merged()

    def describe(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coef, profs in self.terms:
            parts.append(f"({rates.pretty(coef)}, {'*'.join(p.describe() for p in profs)})")
        return "sep[" + ", ".join(parts) + "]"


@dataclass(frozen=True)
class ScaledKernel(Family):
    """x -> scale_out(eps) * kernel(scale_in(eps) * (x - shift))."""

    kernel: Profile
    scale_in: RateExpr
    scale_out: RateExpr
    shift: float = 0.0

    def __post_init__(self):
        if self.kernel.a != 1.0 or self.kernel.c != 0.0:
            raise ValueError("kernel profiles must be unshifted and unscaled")
        object.__setattr__(self, "scale_in", _expr(self.scale_in))
        object.__setattr__(self, "scale_out", _expr(self.scale_out))
        object.__setattr__(self, "shift", float(self.shift))

    def value(self, eps: float, x):
        x = np.asarray(x, dtype=float)
        b = rates.eval_at(self.scale_in, eps)
        o = rates.eval_at(self.scale_out, eps)
        with np.errstate(over="ignore", invalid="ignore"):
            return o * self.kernel(b * (x - self.shift))

    def deriv(self, k: int = 1) -> "ScaledKernel":
        out = self.scale_out
        for _ in range(k):
            out = Mul(out, self.scale_in)
        return ScaledKernel(self.kernel.deriv(k), self.scale_in, out, self.shift)

    def _in_infinite(self) -> bool:
        try:
            return rates.limit_class(Abs(self.scale_in))[0] == "+inf"
        except rates.RateError:
            return False

    def sup_norm_net(self, K: Interval, alpha: int, cfg: Optional[GridConfig] = None) -> Net:
        lo, hi = K
        fam = self.deriv(alpha)
        k = fam.kernel
        if k.is_zero:
            return Net.symbolic(Num(Fraction(0)))
        base = Abs(fam.scale_out)
        b = Abs(fam.scale_in)
        rmax = max(abs(lo - self.shift), abs(hi - self.shift))
        dist = 0.0 if lo <= self.shift <= hi else min(abs(lo - self.shift), abs(hi - self.shift))

        def polybound(s: RateExpr) -> RateExpr:
            acc: Optional[RateExpr] = None
            for i, ci in enumerate(k.coeffs):
                if ci == 0.0:
                    continue
                t = _const(abs(ci)) if i == 0 else Mul(_const(abs(ci)), Pow(s, Fraction(i)))
                acc = t if acc is None else Add(acc, t)
            return acc if acc is not None else Num(Fraction(0))

        if k.kind in ("sin", "cos"):
            return Net.symbolic(Mul(base, _const(abs(k.coeffs[0]))))
        if k.kind == "poly":
            return Net.symbolic(Mul(base, polybound(Mul(b, _const(rmax)))))
        if k.kind == "exp":
            sgn = rates.normalize(fam.scale_in).sign
            edge = (hi if sgn > 0 else lo) - self.shift
            grow = Exp(Mul(fam.scale_in, _const(edge, up=False)))
            return Net.symbolic(Mul(Mul(base, polybound(Mul(b, _const(rmax)))), grow))
        # decaying kernels
        if dist == 0.0 or not self._in_infinite():
            return Net.symbolic(Mul(base, _const(k.global_sup())))
        if k.kind == "bump":
            return Net.symbolic(Num(Fraction(0)))
        s = Mul(b, _const(dist, up=False))
        return Net.symbolic(Mul(Mul(base, polybound(s)), Exp(Neg(Pow(s, Fraction(2))))))

    def scale(self, c: RateExpr) -> "ScaledKernel":
        return replace(self, scale_out=Mul(c, self.scale_out))

    def describe(self) -> str:
        return (f"kernel({self.kernel.describe()}, {rates.pretty(self.scale_in)}, "
                f"{rates.pretty(self.scale_out)}, {_g(self.shift)})")


@dataclass(frozen=True)
class BlackBox(Family):
    """An opaque family (eps, x) -> value.

    ``deriv_fn(eps, x, k)`` supplies exact derivatives when known; otherwise
    derivatives come from central differences and ``max_deriv`` bounds the
    order.  ``log_sup(eps, lo, hi, k)`` and ``envelope(lo, hi, k)`` are
    optional overflow-free and symbolic bounds respectively.
    """

    fn: Callable = field(compare=False)
    max_deriv: int = 4
    label: str = "blackbox"
    order: int = 0
    deriv_fn: Optional[Callable] = field(default=None, compare=False)
    log_sup: Optional[Callable] = field(default=None, compare=False)
    envelope: Optional[Callable] = field(default=None, compare=False)
    fd_width: float = 1.0

    def _eval(self, eps: float, x: np.ndarray, k: int) -> np.ndarray:
        if k == 0:
            return np.asarray(self.fn(eps, x), dtype=float)
        if self.deriv_fn is not None:
            return np.asarray(self.deriv_fn(eps, x, k), dtype=float)
        h = _fd_step(k, self.fd_width)
        return _central_diff(lambda z: np.asarray(self.fn(eps, z), dtype=float), x, k, h)

    def value(self, eps: float, x):
        return self._eval(eps, np.asarray(x, dtype=float), self.order)

    def deriv(self, k: int = 1) -> "BlackBox":
        if self.deriv_fn is None and k > self.max_deriv:
            raise CapabilityError(f"derivative order {k} exceeds {self.max_deriv}")
        md = self.max_deriv if self.deriv_fn is not None else self.max_deriv - k
        return replace(self, order=self.order + k, max_deriv=md, label=f"d^{k}({self.label})")

    @property
    def exact_derivatives(self) -> bool:
        return self.deriv_fn is not None

    def sup_norm_net(self, K: Interval, alpha: int, cfg: Optional[GridConfig] = None, nx: int = 400) -> Net:
        if self.deriv_fn is None and alpha > self.max_deriv:
            raise CapabilityError(f"derivative order {alpha} exceeds {self.max_deriv}")
        lo, hi = K
        k = self.order + alpha
        if self.envelope is not None:
            env = self.envelope(lo, hi, k)
            if env is not None:
                return Net.symbolic(env)
        if self.log_sup is not None:
            return Net.log_callable(lambda e: self.log_sup(e, lo, hi, k), label=f"sup|{self.label}|")
        cfg = cfg or grid_config()
        xs = np.linspace(lo, hi, nx)
        width = hi - lo
        pairs = []
        for e in cfg.points():
            if self.deriv_fn is None and k > 0:
                h = _fd_step(k, width)
                vals = _central_diff(lambda z: np.asarray(self.fn(e, z), dtype=float), xs, k, h)
            else:
                vals = self._eval(e, xs, k)
            with np.errstate(invalid="ignore"):
                m = float(np.max(np.abs(vals))) if vals.size else 0.0
            pairs.append((e, m if math.isfinite(m) else math.inf))
        return Net.sampled(pairs)

    def scale(self, c: RateExpr) -> "BlackBox":
        base = self
        return _lift_bb(lambda e, x: rates.eval_at(c, e) * base.value(e, x),
                        f"{rates.pretty(c)}*{self.label}", base.max_deriv)

    def describe(self) -> str:
        return f"blackbox:{self.label}"


def _lift_bb(fn, label: str, max_deriv: int = 4) -> BlackBox:
    return BlackBox(fn=fn, max_deriv=max_deriv, label=label)


# sums below this multiple of the summed magnitudes are treated as cancelled
ROUNDOFF = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class SumFamily(Family):
    parts: tuple

    def value(self, eps, x):
        out = 0.0
        for p in self.parts:
            out = out + p.value(eps, x)
        return out

    def deriv(self, k: int = 1) -> "SumFamily":
        return SumFamily(tuple(p.deriv(k) for p in self.parts))

    def sup_norm_net(self, K: Interval, alpha: int, cfg: Optional[GridConfig] = None) -> Net:
        nets = [p.sup_norm_net(K, alpha, cfg) for p in self.parts]
        if all(n.is_symbolic for n in nets):
            acc = nets[0].expr
            for n in nets[1:]:
                acc = Add(acc, n.expr)
            return Net.symbolic(acc)
        # A triangle bound cannot see cancellation between parts, so a Fails
        # read off it would be unsound.  Sample the actual sum when possible.
        sampled = self._sampled_sup(K, alpha, cfg or grid_config())
        if sampled is not None:
            return sampled

        def f(e):
            logs = [n.log_abs(e) for n in nets]
            if any(v is None for v in logs):
                raise OverflowError
            finite = [v for v in logs if v != -math.inf]
            if not finite:
                return -math.inf
            m = max(finite)
            return m + math.log(sum(math.exp(v - m) for v in finite))

        return Net.log_callable(f, label="triangle bound")

    def _sampled_sup(self, K: Interval, alpha: int, cfg: GridConfig, nx: int = 400) -> Optional[Net]:
        fam = self.deriv(alpha) if alpha else self
        xs = np.linspace(K[0], K[1], nx)
        pairs = []
        try:
            with np.errstate(over="raise", invalid="raise"):
                for e in cfg.points():
                    parts = [np.abs(np.asarray(p.value(e, xs), dtype=float)) for p in fam.parts]
                    m = float(np.max(np.abs(fam.value(e, xs))))
                    # roundoff floor of the cancelling sum
                    floor = ROUNDOFF * float(np.max(sum(parts)))
                    if not math.isfinite(m + floor):
                        return None
                    pairs.append((e, 0.0 if m <= floor else m))
        except (ArithmeticError, FloatingPointError, CapabilityError):
            return None
        return Net.sampled(pairs)

    def scale(self, c: RateExpr) -> "SumFamily":
        return SumFamily(tuple(p.scale(c) for p in self.parts))

    def describe(self) -> str:
        return " + ".join(p.describe() for p in self.parts)


ZERO_FAMILY = SeparableSum(())


# ---------------------------------------------------------------------------
# Generalized functions


@dataclass(frozen=True)
class GenFunction:
    family: Family
    spec: AlgebraSpec
    domain: Interval = (-math.inf, math.inf)
    moderate: Optional[Verdict] = field(default=None, compare=False)

    @staticmethod
    def of(family: Family, spec: AlgebraSpec, domain: Interval = (-math.inf, math.inf),
           trust: bool = False, Kset=None, alpha_max: int = 4) -> "GenFunction":
        """Build and verify moderateness; ``trust`` skips the check."""
        u = GenFunction(family, spec, (float(domain[0]), float(domain[1])))
        if trust:
            return u
        v = is_moderate_fn(u, Kset, alpha_max)
        if v.fails:
            raise ValueError(f"{family.describe()} is not moderate for {spec.B.describe()}")
        if not v.holds:
            raise ValueError(f"moderateness of {family.describe()} is {v.status}; pass trust=True")
        return replace(u, moderate=v)

    def describe(self) -> str:
        return self.family.describe()

    def value(self, eps: float, x):
        return self.family.value(eps, x)


def default_kset(domain: Interval) -> list[Interval]:
    lo, hi = max(-1.0, domain[0]), min(1.0, domain[1])
    if lo >= hi:
        raise DomainError("the default compact set misses the domain")
    pad = 0.01 * (hi - lo)
    if lo == domain[0]:
        lo += pad
    if hi == domain[1]:
        hi -= pad
    return [(lo, hi)]


def _ks(u: GenFunction, Kset) -> list[Interval]:
    ks = default_kset(u.domain) if Kset is None else [(float(a), float(b)) for a, b in Kset]
    for a, b in ks:
        if not (u.domain[0] <= a <= b <= u.domain[1]):
            raise DomainError(f"[{a}, {b}] is not inside the domain")
    return ks


def _trunc(ks, alpha_max, mmax=None) -> str:
    kd = ",".join(f"[{_g(a)},{_g(b)}]" for a, b in ks)
    s = f"verified up to K={{{kd}}}, alpha<={alpha_max}"
    return s + (f", m<={mmax}" if mmax is not None else "")


def sup_norm_net(u, K: Interval, alpha: int, cfg: Optional[GridConfig] = None) -> Net:
    fam = u.family if isinstance(u, GenFunction) else u
    return fam.sup_norm_net((float(K[0]), float(K[1])), alpha, cfg)


def is_moderate_fn(u: GenFunction, Kset=None, alpha_max: int = 4,
                   cfg: Optional[GridConfig] = None) -> Verdict:
    ks = _ks(u, Kset)
    vs = []
    for K in ks:
        for a in range(alpha_max + 1):
            v = is_moderate(sup_norm_net(u, K, a, cfg), u.spec.B, cfg)
            vs.append(v)
            if v.fails:
                return conjunction(vs, note=_trunc(ks, alpha_max)).with_info(K=[K[0], K[1]], alpha=a)
    return conjunction(vs, note=_trunc(ks, alpha_max))


def is_negligible_fn(u: GenFunction, Kset=None, alpha_max: int = 4, mmax: int = 8,
                     cfg: Optional[GridConfig] = None) -> Verdict:
    ks = _ks(u, Kset)
    gen = principal_generator(u.spec.Z)[0]
    note = _trunc(ks, alpha_max, mmax)
    vs = []
    for K in ks:
        for a in range(alpha_max + 1):
            net = sup_norm_net(u, K, a, cfg)
            v = _negligible_net(net, u.spec.Z, gen, mmax, cfg)
            vs.append(v)
            if v.fails:
                return conjunction(vs, note=note).with_info(K=[K[0], K[1]], alpha=a,
                                                            **({"m": v.get("m")} if v.get("m") else {}))
    return conjunction(vs, note=note)


def _negligible_net(net: Net, Z, gen, mmax: int, cfg) -> Verdict:
    if gen is None:
        return is_negligible_num(net, Z, cfg, mmax)
    vs = []
    for m in range(1, mmax + 1):
        v = big_o(net, Pow(gen, Fraction(-m)), cfg)
        vs.append(v)
        if v.fails:
            return conjunction(vs).with_info(m=m)
    return conjunction(vs)


def _same(u: GenFunction, v: GenFunction) -> None:
    if u.spec != v.spec:
        raise ValueError("generalized functions from different algebras")
    if u.domain != v.domain:
        raise DomainError("generalized functions on different domains")


def _add_fam(f: Family, g: Family) -> Family:
    if isinstance(f, SeparableSum) and isinstance(g, SeparableSum):
        return f.plus(g)
    if isinstance(f, ScaledKernel) and isinstance(g, ScaledKernel) and (f.kernel, f.shift) == (g.kernel, g.shift) \
            and rates.pretty(f.scale_in) == rates.pretty(g.scale_in):
        return replace(f, scale_out=Add(f.scale_out, g.scale_out))
    fp = f.parts if isinstance(f, SumFamily) else (f,)
    gp = g.parts if isinstance(g, SumFamily) else (g,)
    return SumFamily(fp + gp)


def _mul_fam(f: Family, g: Family) -> Family:
    if isinstance(f, SeparableSum) and isinstance(g, SeparableSum):
        return f.times(g)
    md = min(getattr(f, "max_deriv", 4), getattr(g, "max_deriv", 4))
    return BlackBox(fn=lambda e, x: f.value(e, x) * g.value(e, x), max_deriv=md,
                    label=f"({f.describe()})*({g.describe()})")


def gf_add(u: GenFunction, v: GenFunction) -> GenFunction:
    _same(u, v)
    return GenFunction(_add_fam(u.family, v.family), u.spec, u.domain)


def gf_neg(u: GenFunction) -> GenFunction:
    return GenFunction(u.family.scale(Num(Fraction(-1))), u.spec, u.domain)


def gf_sub(u: GenFunction, v: GenFunction) -> GenFunction:
    return gf_add(u, gf_neg(v))


def gf_mul(u: GenFunction, v: GenFunction) -> GenFunction:
    _same(u, v)
    return GenFunction(_mul_fam(u.family, v.family), u.spec, u.domain)


def gf_scale(u: GenFunction, c) -> GenFunction:
    return GenFunction(u.family.scale(_expr(c)), u.spec, u.domain)


def gf_deriv(u: GenFunction, k: int = 1) -> GenFunction:
    return GenFunction(u.family.deriv(k), u.spec, u.domain, u.moderate)


def gf_restrict(u: GenFunction, sub: Interval) -> GenFunction:
    a, b = float(sub[0]), float(sub[1])
    if not (u.domain[0] <= a < b <= u.domain[1]):
        raise DomainError(f"({a}, {b}) is not a subinterval of the domain")
    return GenFunction(u.family, u.spec, (a, b), u.moderate)


def _is_num(e: RateExpr, v) -> bool:
    return isinstance(e, Num) and e.value == v


def _plus(a: RateExpr, b: RateExpr) -> RateExpr:
    return b if _is_num(a, 0) else a if _is_num(b, 0) else Add(a, b)


def _times(a: RateExpr, b: RateExpr) -> RateExpr:
    return b if _is_num(a, 1) else a if _is_num(b, 1) else Mul(a, b)


def _symbolic_point(fam: Family, x: RateExpr) -> Optional[RateExpr]:
    if isinstance(fam, SeparableSum):
        acc: RateExpr = Num(Fraction(0))
        for coef, profs in fam.terms:
            t = coef
            for p in profs:
                if p.kind != "poly" or p.a != 1.0 or p.c != 0.0:
                    return None
                pe: RateExpr = Num(Fraction(0))
                for i, ci in enumerate(p.coeffs):
                    if ci:
                        mono = Pow(x, Fraction(i)) if i > 1 else x
                        pe = _plus(pe, _times(Num(Fraction(ci)), mono) if i else Num(Fraction(ci)))
                t = _times(t, pe)
            acc = _plus(acc, t)
        return acc
    if isinstance(fam, ScaledKernel) and fam.kernel.kind == "exp" and len(fam.kernel.coeffs) == 1:
        arg = fam.scale_in if fam.shift == 0 and _is_num(x, 1) else \
            _times(fam.scale_in, x if fam.shift == 0 else rates.Sub(x, Num(Fraction(fam.shift))))
        return _times(_times(Num(Fraction(fam.kernel.coeffs[0])), fam.scale_out), Exp(arg))
    return None


def point_value(u: GenFunction, x: CompactPoint) -> GenNumber:
    lo, hi = x.hull
    if not (u.domain[0] <= lo <= hi <= u.domain[1]):
        raise DomainError("the hull of the point escapes the domain")
    ex = x.rep.exact_expr()
    if ex is not None:
        sym = _symbolic_point(u.family, ex)
        if sym is not None:
            return GenNumber.of(sym, u.spec, trust=True)
    fam, rep = u.family, x.rep

    def f(e):
        return float(np.asarray(fam.value(e, np.array([rep._raw(e)])))[0])

    return GenNumber.of(Net.callable(f, label="point value"), u.spec, trust=True)


def support_estimate(u: GenFunction, tol: float, Kset=None, alpha_max: int = 2, mmax: int = 4,
                     cfg: Optional[GridConfig] = None) -> list[Interval]:
    """Union of closed tol-cells on which u is not negligible, merged."""
    out: list[list[float]] = []
    if Kset is None and all(math.isfinite(t) for t in u.domain):
        Kset = [u.domain]
    for lo, hi in _ks(u, Kset):
        k0, k1 = math.floor(lo / tol + 1e-9), math.ceil(hi / tol - 1e-9)
        edges = sorted({lo, hi} | {k * tol for k in range(k0, k1 + 1) if lo < k * tol < hi})
        for a, b in zip(edges, edges[1:]):
            v = is_negligible_fn(u, [(a, b)], alpha_max, mmax, cfg)
            if v.holds:
                continue
            if out and abs(out[-1][1] - a) < 1e-12:
                out[-1][1] = b
            else:
                out.append([a, b])
    return [(round(a, 12), round(b, 12)) for a, b in out]
