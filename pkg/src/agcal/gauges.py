"""Asymptotic gauges as closed family descriptors.

Within the rate fragment every gauge query reduces to comparing monomials of
the exponent (the "log-scale" of a net).  Writing a fragment net as
``x = c * exp(h*T + lower)`` with ``T`` its fastest exponent monomial:

* ``x`` lies in R_M(powers(b)) iff x is bounded or ``T`` grows no faster than
  the leading exponent monomial of ``b``;
* ``x`` lies in R_M(expof(G)) iff x is bounded or the net ``T`` lies in R_M(G);
* negligibility is the mirror statement with ``h < 0`` and strict escape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import rates
from .index_core import (
    EXACT,
    HALF_OPEN,
    INCONCLUSIVE,
    NUMERIC,
    GridConfig,
    IndexSet,
    Net,
    Verdict,
    big_o,
    conjunction,
    fails,
    grid_config,
    holds,
    order_gt,
)
from .rates import (
    LHYP,
    LL,
    Exp,
    IterExp,
    Mul,
    Num,
    Pow,
    RateExpr,
    RateNormalForm,
    mono_cmp,
    normalize,
    pretty,
)

# Stand-in for "arbitrarily large" exponent parameters when a family is
# quantified over all a > 0 or all H > 0.  Membership along such a ray is
# monotone, so the largest representative decides it.
BIG = Fraction(10**6)
TINY = Fraction(1, 10**9)


class GaugeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers on normal forms


def _nf(x) -> RateNormalForm:
    if isinstance(x, RateNormalForm):
        return x
    if isinstance(x, str):
        x = rates.parse(x)
    return normalize(x)


def _top(nf: RateNormalForm):
    """(monomial, coefficient) of the fastest exponent monomial, or None."""
    if nf.zero or not nf.key:
        return None
    top = max((m for m, _ in nf.key), key=rates._mono_key)
    return top, dict(nf.key)[top]


def _mono_as_nf(T) -> RateNormalForm:
    """A fragment net of the same growth as the monomial T (upper bound for the
    two bottom atoms, which have no logarithm in the tower)."""
    if len(T) == 1 and T[0][0] in (LL, LHYP):
        key = (((T[0][0], Fraction(1)),), TINY),
    else:
        key = tuple(sorted((((rates._pred(a), Fraction(1)),), p) for a, p in T))
    return RateNormalForm(False, 1, 1.0, key)


def _bounded(nf: RateNormalForm) -> bool:
    return nf.growth() <= 0


def _mono_expr(T) -> RateExpr:
    """Readable expression for a tower monomial."""
    parts = []
    for a, p in T:
        if a == LL:
            base = rates.parse("log(log(1/eps))")  # display only
        elif a == rates.L:
            base = rates.parse("log(1/eps)")
        elif a == rates.LAM:
            base = rates.parse("1/eps")
        elif a == LHYP:
            base = rates.parse("log(hyper(1))")
        else:
            base = IterExp(a[1], rates.parse("1/eps"))
        parts.append(base if p == 1 else Pow(base, Fraction(p)))
    out = parts[0]
    for q in parts[1:]:
        out = Mul(out, q)
    return out


# ---------------------------------------------------------------------------
# Gauge descriptor


@dataclass(frozen=True)
class Gauge:
    """A gauge family.

    kind:
      * ``powers``  -- {base^a : a > 0}  (domain ``reals``) or a in N (``naturals``)
      * ``gens``    -- a finite list of nets
      * ``expof``   -- {exp(H*b) : H > 0, b in inner}
      * ``tower``   -- {exp@k(base) : k in N}
      * ``closure`` -- R_M(inner) itself
    """

    kind: str
    base: Optional[RateExpr] = None
    domain: str = "reals"
    members: tuple = ()
    inner: Optional["Gauge"] = None
    index_set: IndexSet = HALF_OPEN
    validate: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("powers", "gens", "expof", "tower", "closure"):
            raise GaugeError(f"unknown gauge kind {self.kind!r}")
        if self.kind in ("powers", "tower"):
            if self.base is None:
                raise GaugeError("base required")
            lim = rates.limit_class(self.base)
            if lim != ("+inf",):
                raise GaugeError(f"base {pretty(self.base)} must tend to +infinity")
            if self.domain not in ("reals", "naturals"):
                raise GaugeError("domain must be 'reals' or 'naturals'")
        if self.kind == "gens":
            if not self.members:
                raise GaugeError("empty generator list")
            for m in self.members:
                normalize(m)
        if self.kind in ("expof", "closure") and self.inner is None:
            raise GaugeError("inner gauge required")
        if self.kind == "expof" and not self.inner.positive_infinite_member():
            raise GaugeError("exponential of a gauge needs a positive infinite member")
        if self.validate and self.kind == "gens":
            rep = check_axioms(self)
            bad = [k for k, v in rep.items() if not v.holds]
            if bad:
                raise GaugeError(f"generators violate axiom(s) {', '.join(bad)}")

    # -- constructors -----------------------------------------------------
    @staticmethod
    def powers(base, domain: str = "reals") -> "Gauge":
        return Gauge("powers", base=_expr(base), domain=domain)

    @staticmethod
    def gens(members: Sequence, validate: bool = False) -> "Gauge":
        return Gauge("gens", members=tuple(_expr(m) for m in members), validate=validate)

    @staticmethod
    def tower(base="1/eps") -> "Gauge":
        return Gauge("tower", base=_expr(base))

    @staticmethod
    def expof(inner: "Gauge") -> "Gauge":
        return Gauge("expof", inner=inner)

    def closure(self) -> "Gauge":
        return Gauge("closure", inner=self)

    def compose(self, scale) -> "Gauge":
        """B o rho: every member composed with a positive infinitesimal scale."""
        scale = _expr(scale)
        rates._check_scale(scale)

        def c(e):
            return rates.substitute(e, scale)

        if self.kind in ("powers", "tower"):
            return Gauge(self.kind, base=c(self.base), domain=self.domain)
        if self.kind == "gens":
            return Gauge("gens", members=tuple(c(m) for m in self.members), validate=self.validate)
        return Gauge(self.kind, inner=self.inner.compose(scale))

    # -- description ------------------------------------------------------
    def describe(self) -> str:
        if self.kind == "powers":
            return f"{'powers' if self.domain == 'reals' else 'powers_nat'}({pretty(self.base)})"
        if self.kind == "tower":
            return f"tower({pretty(self.base)})"
        if self.kind == "gens":
            return "gens[" + ", ".join(pretty(m) for m in self.members) + "]"
        if self.kind == "expof":
            return f"expof({self.inner.describe()})"
        return f"closure({self.inner.describe()})"

    def __str__(self) -> str:
        return self.describe()

    # -- members ------------------------------------------------------------
    def member(self, param=1, b: Optional[RateExpr] = None) -> RateExpr:
        if self.kind == "powers":
            a = Fraction(param)
            if a == 1:
                return self.base
            if isinstance(self.base, Pow):
                return Pow(self.base.base, self.base.exponent * a)
            if isinstance(self.base, rates.Div) and self.base.left == Num(Fraction(1)):
                return Pow(self.base.right, -a)
            return Pow(self.base, a)
        if self.kind == "tower":
            k = int(param)
            if k == 0:
                return self.base
            return Exp(self.base) if k == 1 else IterExp(k, self.base)
        if self.kind == "gens":
            return self.members[int(param)]
        if self.kind == "expof":
            H = Fraction(param)
            b = b if b is not None else self.inner.representatives()[0]
            return Exp(b if H == 1 else Mul(Num(H), b))
        raise GaugeError("closure members are not enumerable")

    def representatives(self) -> list[RateExpr]:
        """Members ordered from small to extreme; the last one decides
        membership questions that are monotone in the family parameter."""
        if self.kind == "powers":
            return [self.member(1), self.member(BIG)]
        if self.kind == "tower":
            return [self.member(1), self.member(2), self.member(64)]
        if self.kind == "gens":
            return list(self.members)
        if self.kind == "expof":
            return [self.member(H, b) for b in self.inner.representatives() for H in (1, BIG)]
        return self.inner.representatives()

    def sample_members(self) -> list[RateExpr]:
        """A modest sample for axiom spot checks."""
        if self.kind == "powers":
            ps = [Fraction(1, 3), Fraction(1), Fraction(5, 2)] if self.domain == "reals" else [1, 2, 3]
            return [self.member(a) for a in ps]
        if self.kind == "tower":
            return [self.member(k) for k in (0, 1, 2)]
        if self.kind == "gens":
            return list(self.members)
        if self.kind == "expof":
            inner = self.inner.sample_members()[:2]
            return [self.member(H, b) for b in inner for H in (Fraction(1, 2), Fraction(3))]
        return self.inner.sample_members()

    def positive_infinite_member(self) -> Optional[RateExpr]:
        for m in self.representatives():
            try:
                if rates.limit_class(m) == ("+inf",):
                    return m
            except rates.RateError:
                continue
        return None

    @cached_property
    def positive(self) -> bool:
        if self.kind in ("expof",):
            return True
        if self.kind == "closure":
            return False
        return all(order_gt(m, 0).holds for m in self.sample_members())

    @cached_property
    def totally_ordered(self) -> bool:
        # every pair of fragment nets is comparable under compare_O
        return True

    # -- exact membership ---------------------------------------------------
    def witness(self, x) -> Optional[RateExpr]:
        """A member b with x = O(b), or None when x is not B-moderate."""
        return self._witness(_nf(x))

    def _witness(self, nf: RateNormalForm) -> Optional[RateExpr]:
        if self.kind == "closure":
            w = self.inner._witness(nf)
            return None if w is None else w
        if self.kind == "gens":
            cands = [m for m in self.members if rates.is_big_o(nf, _nf(m))]
            if not cands:
                return None
            return min(cands, key=lambda m: _GrowthKey(_nf(m)))
        if _bounded(nf):
            return self.positive_infinite_member() or self.representatives()[0]
        T, h = _top(nf)
        if self.kind == "powers":
            tb, hb = _top(_nf(self.base))
            c = mono_cmp(T, tb)
            if c > 0:
                return None
            a = Fraction(1) if c < 0 else max(Fraction(1), Fraction(math.ceil(h / hb)))
            for cand in (a, a + 1):
                if rates.is_big_o(nf, _nf(self.member(cand))):
                    return self.member(cand)
            return None  # pragma: no cover - unreachable within the fragment
        if self.kind == "tower":
            if T[0][0] == LHYP:
                return None
            for k in range(0, 70):
                m = self.member(k)
                if rates.is_big_o(nf, _nf(m)):
                    return m
            return None
        # expof: x = O(exp(H b)) iff the monomial T is inner-moderate
        b = self.inner._witness(_mono_as_nf(T))
        if b is None:
            return None
        H = 1
        while H <= 2**20:
            m = self.member(H, b)
            try:
                if rates.is_big_o(nf, _nf(m)):
                    return m
            except rates.RateError:
                break
            H *= 2
        return self.member(BIG, b)

    def negligible(self, x) -> bool:
        """x = O(1/w) for every positive member w (exact, fragment nets)."""
        return self._negligible(_nf(x))

    def _negligible(self, nf: RateNormalForm) -> bool:
        if nf.zero:
            return True
        if self.kind == "closure":
            return self.inner._negligible(nf)
        if self.kind == "gens":
            pos = [m for m in self.members if order_gt(m, 0).holds]
            return all(rates.is_big_o(nf, _nf(rates.Div(Num(Fraction(1)), m))) for m in pos)
        top = _top(nf)
        if top is None:
            return False
        T, h = top
        if h > 0:
            return False
        if self.kind == "powers":
            tb, _ = _top(_nf(self.base))
            return mono_cmp(T, tb) > 0
        if self.kind == "tower":
            return T[0][0] == LHYP
        return self.inner._witness(_mono_as_nf(T)) is None

    # -- verdict-level queries -----------------------------------------------
    def is_moderate(self, x, cfg: Optional[GridConfig] = None) -> Verdict:
        return is_moderate(x, self, cfg)


class _GrowthKey:
    def __init__(self, nf):
        self.nf = nf

    def __lt__(self, other):
        return rates.compare_O(self.nf, other.nf) == rates.XBIGOY


def _expr(x) -> RateExpr:
    if isinstance(x, RateExpr):
        return x
    return rates.parse(str(x))


# ---------------------------------------------------------------------------
# Named gauges

def B_s() -> Gauge:
    """{eps^-a : a > 0}."""
    return Gauge.powers("eps^-1")


def AG(b) -> Gauge:
    """{b^m : m in N}."""
    return Gauge.powers(b, "naturals")


def B_fin_exp() -> Gauge:
    return Gauge.tower("1/eps")


def B_inf_exp() -> Gauge:
    return Gauge.powers("hyper(1)")


def exp_gauge(g: Gauge) -> Gauge:
    return Gauge.expof(g)


# ---------------------------------------------------------------------------
# Axioms


def _pair_name(i, j) -> str:
    return f"({pretty(i)}, {pretty(j)})"


def check_axioms(g: Gauge) -> dict:
    """Verdicts for axioms (i)-(v) of an asymptotic gauge."""
    rep: dict = {}
    sample = g.sample_members() if g.kind != "gens" else list(g.members)
    # (i) members are real nets on the index set
    try:
        for m in sample:
            normalize(m)
        rep["i"] = holds(EXACT, note="members are fragment nets on (0,1]")
    except rates.RateError as exc:  # pragma: no cover
        rep["i"] = fails(EXACT, note=str(exc))
    # (ii) an infinite member
    inf = None
    for m in (g.members if g.kind == "gens" else g.representatives()):
        if rates.limit_class(m)[0] in ("+inf", "-inf"):
            inf = m
            break
    rep["ii"] = (holds(EXACT).with_info(member=pretty(inf)) if inf is not None
                 else fails(EXACT, note="no member tends to infinity"))
    if g.kind == "gens":
        rep.update(_axioms_finite(g))
        return rep
    # (iii)-(v) for parametric families: structural witnesses, then spot checks
    structural = {
        "powers": ("b^a * b^c = b^(a+c)", "r * b^a = O(b^a)", "|b^a| + |b^c| = O(b^max(a,c))"),
        "tower": ("e_k * e_j = O(e_(max+1))", "r * e_k = O(e_k)", "e_k + e_j = O(e_max)"),
        "expof": ("exp(Hb) exp(Kc) = O(exp((H+K) s)), b + c = O(s) in inner",
                  "r * exp(Hb) = O(exp(Hb))", "exp(Hb) + exp(Kc) = O(exp((H+K) s))"),
        "closure": ("R_M is a ring", "R_M is a module", "R_M is solid"),
    }[g.kind]
    checks = {"iii": [], "iv": [], "v": []}
    for i in sample:
        for j in sample:
            w = g.witness(rates.Mul(i, j))
            checks["iii"].append((i, j, w))
            s = g.witness(rates.Add(rates.Abs(i), rates.Abs(j)))
            checks["v"].append((i, j, s))
        checks["iv"].append((i, i, g.witness(rates.Mul(Num(Fraction(-7, 2)), i))))
    for ax, note in zip(("iii", "iv", "v"), structural):
        bad = [(i, j) for i, j, w in checks[ax] if w is None]
        if ax == "v":
            bad += [(i, j) for i, j, w in checks[ax] if w is not None and not order_gt(w, 0).holds]
        if bad:
            rep[ax] = fails(EXACT, note=f"offending pair {_pair_name(*bad[0])}").with_info(
                pair=[pretty(bad[0][0]), pretty(bad[0][1])])
        else:
            rep[ax] = holds(EXACT, note=note).with_info(checked_pairs=len(checks[ax]))
    if g.kind == "expof":
        inner = check_axioms(g.inner)
        if not all(v.holds for v in inner.values()):
            rep["iii"] = fails(EXACT, note="inner family is not a gauge")
    return rep


def _axioms_finite(g: Gauge) -> dict:
    ms = list(g.members)
    out = {}
    bad3 = None
    for i in ms:
        for j in ms:
            prod = _nf(rates.Mul(i, j))
            if not any(rates.is_big_o(prod, _nf(p)) for p in ms):
                bad3 = (i, j)
                break
        if bad3:
            break
    out["iii"] = (fails(EXACT, note=f"{pretty(rates.Mul(*bad3))} is dominated by no member").with_info(
        pair=[pretty(bad3[0]), pretty(bad3[1])]) if bad3 else holds(EXACT))
    out["iv"] = holds(EXACT, note="r * i = O(i)")
    pos = [m for m in ms if order_gt(m, 0).holds]
    bad5 = None
    for i in ms:
        for j in ms:
            s = _nf(rates.Add(rates.Abs(i), rates.Abs(j)))
            if not any(rates.is_big_o(s, _nf(p)) for p in pos):
                bad5 = (i, j)
                break
        if bad5:
            break
    out["v"] = (fails(EXACT, note=f"|i|+|j| for {_pair_name(*bad5)} has no positive dominating member").with_info(
        pair=[pretty(bad5[0]), pretty(bad5[1])]) if bad5 else holds(EXACT))
    return out


# ---------------------------------------------------------------------------
# Moderateness and negligibility


def is_moderate(x, g: Gauge, cfg: Optional[GridConfig] = None) -> Verdict:
    """x in R_M(g): x = O(b) for some member b."""
    net = Net.of(x)
    e = net.exact_expr()
    if e is not None:
        try:
            nf = normalize(e)
        except rates.RateError:
            pass
        else:
            w = g._witness(nf)
            if w is None:
                return fails(EXACT)
            return holds(EXACT).with_info(member=pretty(w))
    return _numeric_moderate(net, g, cfg or grid_config())


def _log_net(net: Net) -> Net:
    """1 + log^+|x| as a callable net."""

    def f(eps):
        la = net.log_abs(eps)
        if la is None:
            raise OverflowError
        return 1.0 + max(la, 0.0)

    return Net.callable(f, label=f"log+|{net.describe()}|")


def _numeric_moderate(net: Net, g: Gauge, cfg: GridConfig) -> Verdict:
    if g.kind == "closure":
        return _numeric_moderate(net, g.inner, cfg)
    if g.kind == "gens":
        vs = [big_o(net, m, cfg) for m in g.members]
        for m, v in zip(g.members, vs):
            if v.holds:
                return v.with_info(member=pretty(m))
        if all(v.fails for v in vs):
            return fails(NUMERIC, confidence=min(v.confidence for v in vs))
        return Verdict(INCONCLUSIVE, NUMERIC, confidence=0.5)
    if g.kind in ("powers", "tower"):
        pts = net.points(cfg)
        tail = pts[-cfg.tail:]
        logs = []
        for p in tail:
            la = net.log_abs(p)
            lb = Net.symbolic(g.base).log_abs(p)
            if la is not None and lb is not None and la != -math.inf and lb > 0:
                logs.append(la / lb)
        if g.kind == "powers":
            last = logs[-cfg.trend:]
            if (len(last) == cfg.trend and last[-1] > 1 and last[-1] >= 2 * last[0]
                    and all(b > a for a, b in zip(last, last[1:]))):
                # log|x| / log|base| keeps doubling: faster than every power
                return fails(NUMERIC, counterexample=tuple(tail[-cfg.trend:]), confidence=1.0,
                             note="log-ratio to the base grows without bound")
            a = max(1, math.ceil(max(logs) + 1e-9)) if logs else 1
            last = None
            for cand in (a, a + 1):
                last = big_o(net, g.member(cand), cfg)
                if last.holds:
                    return last.with_info(member=pretty(g.member(cand)))
            return last
        for k in range(1, 4):
            v = big_o(net, g.member(k), cfg)
            if v.holds:
                return v.with_info(member=pretty(g.member(k)))
        return v
    # expof: moderate iff log^+|x| is moderate in the inner gauge
    inner = _numeric_moderate(_log_net(net), g.inner, cfg)
    if not inner.holds:
        return inner
    b = rates.parse(inner.get("member"))
    for H in (1, 2, 4, 8, 16, 64, 256):
        v = big_o(net, g.member(H, b), cfg)
        if v.holds:
            return v.with_info(member=pretty(g.member(H, b)))
    return v


def is_negligible_num(x, z: Gauge, cfg: Optional[GridConfig] = None, mmax: int = 8) -> Verdict:
    """x = O(1/w) for every positive member w of z."""
    net = Net.of(x)
    e = net.exact_expr()
    if e is not None:
        try:
            nf = normalize(e)
        except rates.RateError:
            pass
        else:
            return holds(EXACT) if z._negligible(nf) else fails(EXACT)
    cfg = cfg or grid_config()
    gen = principal_generator(z)[0]
    if gen is None:
        reps = [m for m in z.sample_members()]
        probes = [rates.Div(Num(Fraction(1)), m) for m in reps]
        note = "verified against sampled members"
    else:
        probes = [Pow(gen, Fraction(-m)) for m in range(1, mmax + 1)]
        note = f"verified up to m={mmax}"
    vs = [big_o(net, p, cfg) for p in probes]
    return conjunction(vs, note=note)


# ---------------------------------------------------------------------------
# Principality, equivalence, compatibility


def principal_generator(g: Gauge) -> tuple[Optional[RateExpr], dict]:
    """(generator or None, certificate)."""
    if g.kind == "powers":
        return g.base, {"rule": "every member b^a is O(b^ceil(a))"}
    if g.kind == "closure":
        return principal_generator(g.inner)
    if g.kind == "gens":
        best = max(g.members, key=lambda m: _TopKey(m))
        tb = _top(_nf(best))
        if tb is None or tb[1] <= 0:
            return None, {"rule": "no unbounded member"}
        for m in g.members:
            t = _top(_nf(m))
            if t is not None and t[1] > 0 and mono_cmp(t[0], tb[0]) > 0:
                return None, {"rule": "members not dominated by powers of a single member"}
        return best, {"rule": "every member is O(b^m) for some m"}
    if g.kind == "tower":
        cand = g.member(1)
        esc = g.member(2)
        return None, {"candidate": pretty(cand), "escaper": pretty(esc),
                      "rule": "exp@(k+1) is not O((exp@k)^m) for any m",
                      "verified": _escapes(esc, cand)}
    # expof: exp(H b) cannot generate, since exp(p) with b = o(p) escapes
    b = g.inner.positive_infinite_member()
    cand = g.member(1, b)
    p = rates.Mul(b, b)
    w = g.inner.witness(p)
    esc = Exp(w if w is not None else p)
    return None, {"candidate": pretty(cand), "escaper": pretty(esc),
                  "rule": "exp(p) is not O(exp(H b)^m) for any m when b = o(p)",
                  "verified": _escapes(esc, cand)}


class _TopKey:
    def __init__(self, m):
        t = _top(_nf(m))
        self.t = t

    def __lt__(self, other):
        if self.t is None:
            return other.t is not None
        if other.t is None:
            return False
        c = mono_cmp(self.t[0], other.t[0])
        return c < 0 or (c == 0 and self.t[1] < other.t[1])


def _escapes(esc: RateExpr, cand: RateExpr) -> bool:
    """esc is not O(cand^m) for every m: its exponent top monomial is faster."""
    te, tc = _top(_nf(esc)), _top(_nf(cand))
    return te is not None and te[1] > 0 and mono_cmp(te[0], tc[0]) > 0


def subsumed(a: Gauge, b: Gauge) -> Verdict:
    """R_M(a) subset of R_M(b), with the first escaping member on failure."""
    for m in a.representatives():
        if b.witness(m) is None:
            return fails(EXACT, note=f"{pretty(m)} escapes {b.describe()}").with_info(escaper=pretty(m))
    return holds(EXACT, note=f"every member of {a.describe()} is {b.describe()}-moderate")


def equivalent_gauges(a: Gauge, b: Gauge) -> Verdict:
    if a.index_set != b.index_set:
        raise ValueError("gauges on different index sets")
    v1 = subsumed(a, b)
    if not v1.holds:
        return v1
    v2 = subsumed(b, a)
    if not v2.holds:
        return v2
    return holds(EXACT, note="mutual domination")


def ideal_compatible(B: Gauge, Z: Gauge) -> Verdict:
    """Decided through the equivalent inclusion R_M(B) in R_M(Z)."""
    v = subsumed(B, Z)
    return v.with_info(direction="R_M(B) subset R_M(Z)")


@dataclass(frozen=True)
class AlgebraSpec:
    B: Gauge
    Z: Gauge

    def __post_init__(self):
        if not subsumed(self.B, self.Z).holds:
            raise GaugeError(f"R_M({self.B}) is not contained in R_M({self.Z})")

    @staticmethod
    def of(B: Gauge, Z: Optional[Gauge] = None) -> "AlgebraSpec":
        return AlgebraSpec(B, Z if Z is not None else B)

    def describe(self) -> str:
        return f"({self.B.describe()}, {self.Z.describe()})"


def algebra_order(s1: AlgebraSpec, s2: AlgebraSpec) -> Verdict:
    """(B1,Z1) is smaller than (B2,Z2)."""
    checks = [
        ("R_M(B1) in R_M(B2)", subsumed(s1.B, s2.B)),
        ("R_M(Z1) in R_M(Z2)", subsumed(s1.Z, s2.Z)),
        ("R_M(B1) in R_M(Z1)", subsumed(s1.B, s1.Z)),
        ("R_M(B2) in R_M(Z2)", subsumed(s2.B, s2.Z)),
    ]
    for name, v in checks:
        if not v.holds:
            return fails(EXACT, note=f"{name} fails: {v.note}")
    return holds(EXACT, note="all four inclusions certified")


# ---------------------------------------------------------------------------
# Gauge literals


def _split_top(s: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def parse_gauge(text: str, validate: bool = False) -> Gauge:
    """powers(e) | powers_nat(e) | gens[e, ...] | expof(g) | tower(e) | comp(g, scale)."""
    t = text.strip()
    try:
        if t.startswith("gens[") and t.endswith("]"):
            return Gauge.gens([rates.parse(p) for p in _split_top(t[5:-1])], validate=validate)
        name, _, rest = t.partition("(")
        name = name.strip()
        if not rest.endswith(")"):
            raise GaugeError(f"malformed gauge literal {text!r}")
        body = rest[:-1]
        if name == "powers":
            return Gauge.powers(rates.parse(body))
        if name == "powers_nat":
            return Gauge.powers(rates.parse(body), "naturals")
        if name == "tower":
            return Gauge.tower(rates.parse(body))
        if name == "expof":
            return Gauge.expof(parse_gauge(body, validate))
        if name == "closure":
            return parse_gauge(body, validate).closure()
        if name == "comp":
            parts = _split_top(body)
            if len(parts) != 2:
                raise GaugeError("comp(<gauge>, <scale>) takes two arguments")
            return parse_gauge(parts[0], validate).compose(rates.parse(parts[1]))
    except rates.RateError as exc:
        raise GaugeError(f"in gauge literal {text!r}: {exc}") from exc
    raise GaugeError(f"malformed gauge literal {text!r}")
