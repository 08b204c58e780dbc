"""Index sets, nets, the "eventually" quantifier, big-O, order and limits."""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

from . import rates
from .rates import RateExpr

HOLDS = "Holds"
FAILS = "Fails"
INCONCLUSIVE = "Inconclusive"
EXACT = "Exact"
NUMERIC = "Numeric"


# ---------------------------------------------------------------------------
# Numeric grid configuration


@dataclass(frozen=True)
class GridConfig:
    eps0: float = 0.1
    r: float = 0.7
    n: int = 40
    tail: int = 25
    trend: int = 10
    h_factor: float = 1.05

    def points(self) -> list[float]:
        return [self.eps0 * self.r**j for j in range(self.n)]

    def as_dict(self) -> dict:
        return {"eps0": self.eps0, "r": self.r, "count": self.n}


_GRID: contextvars.ContextVar[GridConfig] = contextvars.ContextVar("agcal_grid", default=GridConfig())


def grid_config() -> GridConfig:
    return _GRID.get()


@contextlib.contextmanager
def using_grid(cfg: GridConfig):
    token = _GRID.set(cfg)
    try:
        yield cfg
    finally:
        _GRID.reset(token)


# ---------------------------------------------------------------------------
# Index sets


@dataclass(frozen=True)
class IndexSet:
    """A concrete set of indices.

    ``HalfOpenUnit`` is (0,1] with base sets (0, e0]; ``NaturalsFrechet`` is N
    with cofinite tails, read through eps = 1/n; ``Composed`` evaluates nets at
    scale(eps) for a positive infinitesimal scale.
    """

    kind: str = "HalfOpenUnit"
    scale: Optional[RateExpr] = None

    def __post_init__(self):
        if self.kind not in ("HalfOpenUnit", "NaturalsFrechet", "Composed"):
            raise ValueError(f"unknown index set kind {self.kind!r}")
        if self.kind == "Composed":
            if self.scale is None:
                raise ValueError("Composed index set needs a scale")
            rates._check_scale(self.scale)

    # filter-base structure, checked by construction
    def base_set(self, t: float) -> tuple[float, float]:
        """Base set with parameter t, as an interval of eps values."""
        if self.kind == "NaturalsFrechet":
            return (0.0, 1.0 / max(1, math.ceil(t)))
        return (0.0, min(1.0, t))

    def meet(self, a: float, b: float) -> float:
        """Parameter of a base set contained in the intersection of two."""
        return max(a, b) if self.kind == "NaturalsFrechet" else min(a, b)

    def whole(self) -> float:
        return 1.0

    def points(self, cfg: Optional[GridConfig] = None) -> list[float]:
        """Sampling points as eps values (decreasing)."""
        cfg = cfg or grid_config()
        pts = cfg.points()
        if self.kind == "NaturalsFrechet":
            out, seen = [], set()
            for p in pts:
                n = max(1, round(1.0 / p))
                if n not in seen:
                    seen.add(n)
                    out.append(1.0 / n)
            return out
        return pts

    def describe(self) -> str:
        if self.kind == "Composed":
            return f"Composed({rates.pretty(self.scale)})"
        return self.kind


HALF_OPEN = IndexSet("HalfOpenUnit")
NATURALS = IndexSet("NaturalsFrechet")


# ---------------------------------------------------------------------------
# Nets


@dataclass(frozen=True)
class Net:
    """A map from the index set to the reals.

    Exactly one of ``expr``, ``samples`` or ``fn`` is set.  Callables receive
    eps (for NaturalsFrechet, eps = 1/n).
    """

    expr: Optional[RateExpr] = None
    samples: Optional[tuple] = None
    fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    index_set: IndexSet = HALF_OPEN
    label: str = ""
    log: bool = False  # fn returns log|x| instead of x

    def __post_init__(self):
        given = sum(x is not None for x in (self.expr, self.samples, self.fn))
        if given != 1:
            raise ValueError("a net has exactly one representation")
        if self.samples is not None:
            eps = [e for e, _ in self.samples]
            if len(eps) < 8:
                raise ValueError("sampled nets need at least 8 points")
            if any(b >= a for a, b in zip(eps, eps[1:])):
                raise ValueError("sampled grid must be strictly decreasing in eps")

    # constructors -------------------------------------------------------
    @staticmethod
    def symbolic(e: Union[str, RateExpr], index_set: IndexSet = HALF_OPEN) -> "Net":
        if isinstance(e, str):
            e = rates.parse(e)
        return Net(expr=e, index_set=index_set)

    @staticmethod
    def sampled(pairs: Sequence[tuple[float, float]], index_set: IndexSet = HALF_OPEN) -> "Net":
        return Net(samples=tuple((float(a), float(b)) for a, b in pairs), index_set=index_set)

    @staticmethod
    def callable(f: Callable[[float], float], index_set: IndexSet = HALF_OPEN, label: str = "") -> "Net":
        return Net(fn=f, index_set=index_set, label=label or getattr(f, "__name__", "callable"))

    @staticmethod
    def log_callable(f: Callable[[float], float], index_set: IndexSet = HALF_OPEN, label: str = "") -> "Net":
        """Net given through log|x(eps)|; avoids overflow for fast-growing nets."""
        return Net(fn=f, index_set=index_set, label=label or "log-callable", log=True)

    @staticmethod
    def of(x, index_set: IndexSet = HALF_OPEN) -> "Net":
        if isinstance(x, Net):
            return x
        if isinstance(x, (str, RateExpr)):
            return Net.symbolic(x, index_set)
        if isinstance(x, (int, float)):
            return Net.symbolic(rates.Num(rates.Fraction(x)), index_set)
        if callable(x):
            return Net.callable(x, index_set)
        return Net.sampled(x, index_set)

    @property
    def kind(self) -> str:
        if self.expr is not None:
            return "Symbolic"
        return "Sampled" if self.samples is not None else "Callable"

    @property
    def is_symbolic(self) -> bool:
        return self.expr is not None

    def describe(self) -> str:
        if self.expr is not None:
            return rates.pretty(self.expr)
        if self.samples is not None:
            return f"sampled[{len(self.samples)}]"
        return f"callable:{self.label}"

    def exact_expr(self) -> Optional[RateExpr]:
        """Rate expression in the plain eps variable, when symbolic."""
        if self.expr is None:
            return None
        if self.index_set.kind == "Composed":
            return rates.Comp(self.expr, self.index_set.scale)
        return self.expr

    # evaluation ----------------------------------------------------------
    def _raw(self, eps: float) -> float:
        if self.index_set.kind == "Composed":
            eps = rates.eval_at(self.index_set.scale, eps)
        if self.expr is not None:
            return rates.eval_at(self.expr, eps)
        if self.fn is not None:
            if self.log:
                v = float(self.fn(eps))
                return 0.0 if v == -math.inf else math.exp(v)
            return float(self.fn(eps))
        for e, v in self.samples:
            if e == eps:
                return v
        raise KeyError(eps)

    def value(self, eps: float) -> Optional[float]:
        """Value at eps or None on overflow."""
        try:
            v = self._raw(eps)
        except (rates.RateOverflow, OverflowError):
            return None
        if math.isinf(v) or math.isnan(v):
            return None
        return v

    def log_abs(self, eps: float) -> Optional[float]:
        """log|x(eps)|; symbolic nets avoid overflow through the exact form."""
        if self.expr is not None:
            try:
                return rates.log_abs_at(self.exact_expr(), eps)
            except (rates.FragmentError, rates.RateArgumentError, OverflowError, ValueError):
                pass
        if self.log:
            try:
                v = float(self.fn(eps))
            except (OverflowError, ValueError):
                return None
            return None if math.isnan(v) else v
        v = self.value(eps)
        if v is None:
            return None
        return -math.inf if v == 0 else math.log(abs(v))

    def points(self, cfg: Optional[GridConfig] = None) -> list[float]:
        if self.samples is not None:
            return [e for e, _ in self.samples]
        return self.index_set.points(cfg)

    # arithmetic -----------------------------------------------------------
    def _combine(self, other: "Net", op: str) -> "Net":
        other = Net.of(other, self.index_set)
        if self.index_set != other.index_set:
            raise ValueError("nets live on different index sets")
        if self.expr is not None and other.expr is not None:
            node = {"+": rates.Add, "-": rates.Sub, "*": rates.Mul}[op](self.expr, other.expr)
            return Net(expr=node, index_set=self.index_set)
        if self.samples is not None and other.samples is not None:
            pts = [e for e, _ in self.samples if e in {p for p, _ in other.samples}]
            a, b = dict(self.samples), dict(other.samples)
            f = {"+": lambda u, v: u + v, "-": lambda u, v: u - v, "*": lambda u, v: u * v}[op]
            return Net.sampled([(e, f(a[e], b[e])) for e in pts], self.index_set)
        x, y = self, other
        f = {"+": lambda u, v: u + v, "-": lambda u, v: u - v, "*": lambda u, v: u * v}[op]

        def g(eps: float) -> float:
            return f(x._plain(eps), y._plain(eps))

        return Net(fn=g, index_set=HALF_OPEN if self.index_set.kind == "Composed" else self.index_set,
                   label=f"({x.describe()} {op} {y.describe()})")

    def _plain(self, eps: float) -> float:
        v = self._raw(eps)
        return v

    def __add__(self, other):
        return self._combine(other, "+")

    def __sub__(self, other):
        return self._combine(other, "-")

    def __mul__(self, other):
        return self._combine(other, "*")

    def __neg__(self):
        return Net.of(-1, self.index_set)._combine(self, "*")


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Verdict:
    status: str
    mode: str = EXACT
    witness: Optional[tuple] = None  # (H, eps0)
    counterexample: Optional[tuple] = None
    confidence: Optional[float] = None
    note: str = ""
    info: tuple = ()  # extra (key, value) pairs, e.g. the dominating member

    def __post_init__(self):
        if self.status not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(self.status)
        if self.mode == NUMERIC and self.confidence is None:
            object.__setattr__(self, "confidence", 0.0)
        if self.confidence is not None and not (0.0 <= self.confidence <= 1.0):
            raise ValueError("confidence must lie in [0, 1]")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("use .holds / .fails on a Verdict")

    def with_note(self, note: str) -> "Verdict":
        return replace(self, note=note)

    def with_info(self, **kw) -> "Verdict":
        d = dict(self.info)
        d.update(kw)
        return replace(self, info=tuple(sorted(d.items())))

    def get(self, key: str, default=None):
        return dict(self.info).get(key, default)

    def as_dict(self) -> dict:
        d = {"status": self.status, "mode": self.mode}
        if self.witness is not None:
            d["witness"] = {"H": _num(self.witness[0]), "eps0": _num(self.witness[1])}
        if self.counterexample is not None:
            d["counterexample"] = [_num(e) for e in self.counterexample]
        if self.confidence is not None:
            d["confidence"] = _num(self.confidence)
        if self.note:
            d["note"] = self.note
        for k, v in self.info:
            d[k] = v
        return d


def _num(x: float) -> float:
    """Round for stable textual reports."""
    if isinstance(x, int):
        return x
    if x == 0 or math.isinf(x) or math.isnan(x):
        return x
    return float(f"{x:.12g}")


def holds(mode: str = EXACT, **kw) -> Verdict:
    return Verdict(HOLDS, mode, **kw)


def fails(mode: str = EXACT, **kw) -> Verdict:
    return Verdict(FAILS, mode, **kw)


def conjunction(verdicts: Sequence[Verdict], note: str = "") -> Verdict:
    """Conjunction with the weakest mode; Inconclusive propagates pessimistically."""
    if not verdicts:
        return Verdict(HOLDS, EXACT, note=note)
    mode = NUMERIC if any(v.mode == NUMERIC for v in verdicts) else EXACT
    conf = min((v.confidence for v in verdicts if v.confidence is not None), default=None)
    if mode == NUMERIC and conf is None:
        conf = 1.0
    for v in verdicts:
        if v.fails:
            return Verdict(FAILS, v.mode, counterexample=v.counterexample,
                           confidence=v.confidence if v.mode == NUMERIC else None,
                           note=note or v.note)
    if any(v.status == INCONCLUSIVE for v in verdicts):
        return Verdict(INCONCLUSIVE, NUMERIC, confidence=conf, note=note)
    return Verdict(HOLDS, mode, confidence=conf if mode == NUMERIC else None, note=note)


# ---------------------------------------------------------------------------
# eventually


@dataclass(frozen=True)
class Compare:
    """Symbolic predicate ``lhs op rhs`` on rate expressions."""

    lhs: RateExpr
    op: str
    rhs: RateExpr

    def __call__(self, eps: float) -> bool:
        a, b = rates.eval_at(self.lhs, eps), rates.eval_at(self.rhs, eps)
        return {">": a > b, "<": a < b, ">=": a >= b, "<=": a <= b}[self.op]


def _probe_points(index_set: IndexSet, budget: int) -> list[float]:
    lo = 1e-8
    if budget == 1:
        return [1.0]
    ratio = lo ** (1.0 / (budget - 1))
    pts = [ratio**k for k in range(budget)]
    if index_set.kind == "NaturalsFrechet":
        seen, out = set(), []
        for p in pts:
            n = max(1, round(1 / p))
            if n not in seen:
                seen.add(n)
                out.append(1.0 / n)
        return out
    return pts


def eventually(index_set: IndexSet, predicate, budget: int = 200) -> Verdict:
    """Decide whether predicate(eps) holds for all sufficiently small eps."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    if isinstance(predicate, Compare):
        lhs, rhs = predicate.lhs, predicate.rhs
        if predicate.op in (">", ">="):
            v = order_gt(Net.symbolic(lhs, index_set), Net.symbolic(rhs, index_set))
        else:
            v = order_gt(Net.symbolic(rhs, index_set), Net.symbolic(lhs, index_set))
        if v.mode == EXACT and (v.holds or predicate.op in (">", "<")):
            return v
        # non-strict comparison with equal nets: fall through to sampling

    def pred(e: float) -> Optional[bool]:
        try:
            if index_set.kind == "Composed":
                e = rates.eval_at(index_set.scale, e)
            return bool(predicate(e))
        except (rates.RateOverflow, OverflowError, ValueError):
            return None

    pts = _probe_points(index_set, budget)
    vals = [pred(e) for e in pts]
    known = [(e, v) for e, v in zip(pts, vals) if v is not None]
    if not known:
        return Verdict(INCONCLUSIVE, NUMERIC, confidence=0.0, note="predicate undefined on probes")
    false_idx = [k for k, (_, v) in enumerate(known) if not v]
    n = len(known)
    if not false_idx:
        return holds(NUMERIC, witness=(1.0, known[0][0]), confidence=1.0)
    tail_start = n - max(2, n // 5)
    tail_false = [k for k in false_idx if k >= tail_start]
    if len(tail_false) >= 3 or false_idx[-1] == n - 1:
        ce = tuple(known[k][0] for k in false_idx[-10:])
        return fails(NUMERIC, counterexample=ce, confidence=min(1.0, len(tail_false) / 3))
    # bisection between the last failing probe and the next succeeding one
    k = false_idx[-1]
    hi, lo = known[k][0], known[k + 1][0]
    for _ in range(80):
        mid = 0.5 * (hi + lo)
        if mid in (hi, lo):
            break
        v = pred(mid)
        if v:
            lo = mid
        else:
            hi = mid
    conf = 1.0 - len(false_idx) / n if tail_false else 1.0
    return holds(NUMERIC, witness=(1.0, lo), confidence=max(0.0, min(1.0, conf)))


# ---------------------------------------------------------------------------
# big-O


def _check_same(x: Net, y: Net) -> None:
    if x.index_set != y.index_set:
        raise ValueError("nets live on different index sets")


_DENSE = [10.0 ** (-k / 20.0) for k in range(0, 161)]


def _log_ratio_at(x: Net, y: Net, e: float) -> Optional[float]:
    a, b = x.log_abs(e), y.log_abs(e)
    if a is None or b is None:
        return None
    if a == -math.inf:
        return -math.inf
    if b == -math.inf:
        return math.inf
    d = a - b
    return None if math.isnan(d) else d


def _exact_witness(x: Net, y: Net, strict: bool, cx: float, cy: float) -> tuple:
    """(H, eps0) such that |x| <= H |y| on the sampled part of (0, eps0]."""
    if strict:
        H = 1.0
    else:
        H = float(f"{1.05 * cx / cy:.3g}")
        if H < 1.05 * cx / cy:
            H = float(f"{H * 1.01:.3g}")
    logH = math.log(H) + 1e-12
    eps0 = None
    for e in reversed(_DENSE):  # from small eps upwards
        lr = _log_ratio_at(x, y, e)
        if lr is None:
            if eps0 is None:
                continue
            break
        if lr <= logH:
            eps0 = e
        else:
            break
    return (H, eps0 if eps0 is not None else _DENSE[-1])


def big_o(x, y, cfg: Optional[GridConfig] = None) -> Verdict:
    """x = O(y) as eps -> 0 in the common index set."""
    x, y = Net.of(x), Net.of(y, Net.of(x).index_set)
    _check_same(x, y)
    ex, ey = x.exact_expr(), y.exact_expr()
    if ex is not None and ey is not None:
        try:
            nx, ny = rates.normalize(ex), rates.normalize(ey)
        except rates.RateError:
            pass
        else:
            r = rates.compare_O(nx, ny)
            if r in (rates.XBIGOY, rates.BOTH):
                w = _exact_witness(x, y, r == rates.XBIGOY or nx.zero, nx.c or 1.0, ny.c or 1.0)
                return holds(EXACT, witness=w)
            return fails(EXACT)
    return _numeric_big_o(x, y, cfg or grid_config())


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((a - mx) ** 2 for a in xs)
    if sxx == 0:
        return 0.0
    return sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sxx


def _common_points(x: Net, y: Net, cfg: GridConfig) -> list[float]:
    if x.samples is not None and y.samples is not None:
        ys = {e for e, _ in y.samples}
        return [e for e, _ in x.samples if e in ys]
    if x.samples is not None:
        return x.points()
    if y.samples is not None:
        return y.points()
    return x.index_set.points(cfg)


def _numeric_big_o(x: Net, y: Net, cfg: GridConfig) -> Verdict:
    pts = _common_points(x, y, cfg)
    data = []
    for e in pts:
        lr = _log_ratio_at(x, y, e)
        if lr is not None:
            data.append((e, lr))
    if len(data) < cfg.trend:
        return Verdict(INCONCLUSIVE, NUMERIC, confidence=0.0, note="grid truncated by overflow")
    tail = data[-cfg.tail:]
    if any(lr == math.inf for _, lr in tail[-cfg.trend:]):
        ce = tuple(e for e, lr in tail if lr == math.inf)
        return fails(NUMERIC, counterexample=ce, confidence=1.0)
    finite = [(e, lr) for e, lr in tail if lr != -math.inf and lr != math.inf]
    if not finite:
        return holds(NUMERIC, witness=(cfg.h_factor * 0.0 or 1.0, tail[0][0]), confidence=1.0)
    xs = [-math.log(e) for e, _ in finite]
    ys = [lr for _, lr in finite]
    s = _slope(xs, ys)
    last = finite[-cfg.trend:]
    increasing = len(last) >= cfg.trend and all(b[1] > a[1] for a, b in zip(last, last[1:]))
    s_last = _slope([-math.log(e) for e, _ in last], [lr for _, lr in last])
    if increasing and s_last >= 0.05:
        return fails(NUMERIC, counterexample=tuple(e for e, _ in last),
                     confidence=min(1.0, s_last / 0.25))
    if s <= 0.02 or max(ys[-cfg.trend:]) <= max(ys[: -cfg.trend] or ys) + 1e-12:
        # start the witness where the remaining ratios fit in a float
        k = 0
        while k < len(ys) - 1 and max(ys[k:]) > 700.0:
            k += 1
        H = cfg.h_factor * math.exp(min(max(ys[k:]), 700.0))
        conf = 1.0 if s <= 0 else max(0.0, 1.0 - s / 0.05)
        return holds(NUMERIC, witness=(H, finite[k][0]), confidence=conf)
    return Verdict(INCONCLUSIVE, NUMERIC, confidence=0.5, note=f"tail slope {s:.3g}")


# ---------------------------------------------------------------------------
# order


def _order_witness(diff: RateExpr) -> float:
    eps0 = None
    for e in reversed(_DENSE):
        try:
            v = rates.eval_at(diff, e)
        except (rates.RateOverflow, rates.RateArgumentError):
            if eps0 is None:
                continue
            break
        if v > 0:
            eps0 = e
        else:
            break
    return eps0 if eps0 is not None else _DENSE[-1]


def order_gt(i, j, cfg: Optional[GridConfig] = None) -> Verdict:
    """i > j for all sufficiently small eps."""
    i = Net.of(i)
    j = Net.of(j, i.index_set)
    _check_same(i, j)
    ei, ej = i.exact_expr(), j.exact_expr()
    if ei is not None and ej is not None:
        diff = rates.Sub(ei, ej)
        try:
            f = rates.to_form(diff)
            d = rates._dominant(f)
        except rates.RateError:
            pass
        else:
            if d.zero or d.sign < 0:
                return fails(EXACT)
            return holds(EXACT, witness=(1.0, _order_witness(diff)))
    cfg = cfg or grid_config()
    pts = _common_points(i, j, cfg)
    diffs = []
    for e in pts:
        a, b = i.value(e), j.value(e)
        if a is not None and b is not None:
            diffs.append((e, a - b))
    tail = diffs[-cfg.tail:]
    if len(tail) < cfg.trend:
        return Verdict(INCONCLUSIVE, NUMERIC, confidence=0.0, note="grid truncated")
    if all(d > 0 for _, d in tail):
        return holds(NUMERIC, witness=(1.0, tail[0][0]), confidence=1.0)
    last = tail[-cfg.trend:]
    if all(d <= 0 for _, d in last):
        return fails(NUMERIC, counterexample=tuple(e for e, _ in last), confidence=1.0)
    pos = sum(d > 0 for _, d in tail) / len(tail)
    return Verdict(INCONCLUSIVE, NUMERIC, confidence=round(abs(2 * pos - 1), 6),
                   note="sign not eventually constant on the sampled tail")


# ---------------------------------------------------------------------------
# limits


@dataclass(frozen=True)
class Limit:
    kind: str  # Finite | PlusInf | MinusInf | UnsignedInf | None
    value: Optional[float] = None
    mode: str = EXACT

    def __str__(self) -> str:
        return f"Finite({_num(self.value)})" if self.kind == "Finite" else self.kind

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "mode": self.mode}
        if self.value is not None:
            d["value"] = _num(self.value)
        return d


def limit_of(f, cfg: Optional[GridConfig] = None) -> Limit:
    f = Net.of(f)
    e = f.exact_expr()
    if e is not None:
        try:
            c = rates.limit_class(e)
        except rates.RateError:
            pass
        else:
            if c[0] == "finite":
                return Limit("Finite", c[1])
            return Limit("PlusInf" if c[0] == "+inf" else "MinusInf")
    cfg = cfg or grid_config()
    vals = []
    for p in f.points(cfg):
        v = f.value(p)
        if v is None:
            vals.append((p, None))
        else:
            vals.append((p, v))
    tail = vals[-cfg.tail:]
    if any(v is None for _, v in tail[-cfg.trend:]):
        # overflow at the smallest eps: magnitude diverges
        return Limit("UnsignedInf", mode=NUMERIC)
    tail = [(p, v) for p, v in tail if v is not None]
    last = tail[-cfg.trend:]
    mags = [abs(v) for _, v in last]
    logm = [math.log(m) if m > 0 else -745.0 for m in mags]
    s = _slope([-math.log(p) for p, _ in last], logm)
    growing = s > 0.05 and logm[-1] > logm[0] + 0.5
    if growing:
        if all(v > 0 for _, v in last):
            return Limit("PlusInf", mode=NUMERIC)
        if all(v < 0 for _, v in last):
            return Limit("MinusInf", mode=NUMERIC)
        return Limit("UnsignedInf", mode=NUMERIC)
    vs = [v for _, v in last]
    spread = max(vs) - min(vs)
    scale = 1.0 + abs(vs[-1])
    if spread <= 1e-6 * scale:
        return Limit("Finite", vs[-1], NUMERIC)
    diffs = [abs(b - a) for a, b in zip(vs, vs[1:])]
    if all(b <= a * 1.0000001 for a, b in zip(diffs, diffs[1:])) and diffs[-1] <= 1e-3 * scale:
        # geometric extrapolation of a monotonically settling tail
        q = diffs[-1] / diffs[-2] if diffs[-2] > 0 else 0.0
        corr = (vs[-1] - vs[-2]) * q / (1 - q) if q < 1 else 0.0
        return Limit("Finite", vs[-1] + corr, NUMERIC)
    return Limit("None", mode=NUMERIC)
