"""Rate expressions over eps in (0, 1]: parser, normal forms, exact big-O oracle.

Every expression in the fragment is normalized to an *exact form*: a finite
signed sum of terms ``c * exp(L)`` where ``L`` is a linear combination of
monomials over the tower of atoms

    loglog(1/eps) < log(1/eps) < 1/eps < exp(1/eps) < exp@2(1/eps) < ... < loghyper

(``loghyper`` is the logarithm of the opaque super-exponential base behind
``hyper(a)``).  Distinct monomials have distinct growth, so comparing two
terms reduces to reading the sign of the fastest surviving monomial in the
difference of their exponents.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Callable, Union

Number = Union[Fraction, float]


class RateError(Exception):
    """Base class for rate-expression errors."""


class RateSyntaxError(RateError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class FragmentError(RateError):
    """The expression leaves the decidable fragment."""


class _LazyMessage:
    """Exception mixin that renders the offending expression only on demand."""

    def __init__(self, msg: str = "", expr=None, at=None):
        super().__init__(msg)
        self.msg, self.expr, self.at = msg, expr, at

    def __str__(self) -> str:
        if self.expr is None:
            return self.msg
        return f"{self.msg} {pretty(self.expr)} at {self.at!r}"


class RateOverflow(_LazyMessage, ArithmeticError):
    """Floating-point evaluation overflowed."""


class RateArgumentError(_LazyMessage, ValueError):
    """Evaluation point or argument outside the admissible range."""


class PreconditionError(RateError):
    pass


# ---------------------------------------------------------------------------
# AST


class RateExpr:
    """Base class of the expression tree.  Nodes are immutable and hashable."""

    def __str__(self) -> str:
        return pretty(self)

    # small operator sugar for building expressions in code
    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, r):
        return Pow(self, Fraction(r))


def _lift(x) -> RateExpr:
    if isinstance(x, RateExpr):
        return x
    if isinstance(x, str):
        return parse(x)
    return Num(Fraction(x))


@dataclass(frozen=True)
class Eps(RateExpr):
    pass


@dataclass(frozen=True)
class Num(RateExpr):
    value: Fraction


@dataclass(frozen=True)
class Add(RateExpr):
    left: RateExpr
    right: RateExpr


@dataclass(frozen=True)
class Sub(RateExpr):
    left: RateExpr
    right: RateExpr


@dataclass(frozen=True)
class Mul(RateExpr):
    left: RateExpr
    right: RateExpr


@dataclass(frozen=True)
class Div(RateExpr):
    left: RateExpr
    right: RateExpr


@dataclass(frozen=True)
class Neg(RateExpr):
    arg: RateExpr


@dataclass(frozen=True)
class Pow(RateExpr):
    base: RateExpr
    exponent: Fraction


@dataclass(frozen=True)
class Log(RateExpr):
    arg: RateExpr


@dataclass(frozen=True)
class Exp(RateExpr):
    arg: RateExpr


@dataclass(frozen=True)
class IterExp(RateExpr):
    k: int
    arg: RateExpr


@dataclass(frozen=True)
class Hyper(RateExpr):
    a: Fraction


@dataclass(frozen=True)
class Abs(RateExpr):
    arg: RateExpr


@dataclass(frozen=True)
class Comp(RateExpr):
    """``comp(expr, scale)``: expr with eps replaced by scale(eps)."""

    expr: RateExpr
    scale: RateExpr


EPS = Eps()

# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<iexp>exp@)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise RateSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise RateSyntaxError(f"unexpected {val or 'end of input'!r}", pos, (repr(op),))

    def at_op(self, *ops: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def parse(self) -> RateExpr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise RateSyntaxError(f"trailing input {val!r}", pos, ("'+'", "'-'", "'*'", "'/'", "end"))
        return e

    def expr(self) -> RateExpr:
        left = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> RateExpr:
        left = self.unary()
        while self.at_op("*", "/"):
            op = self.take()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self) -> RateExpr:
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> RateExpr:
        base = self.primary()
        if self.at_op("^"):
            self.take()
            base = Pow(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        if self.at_op("("):
            self.take()
            r = self.signed_rational()
            self.expect_op(")")
            return r
        return self.signed_rational()

    def signed_rational(self) -> Fraction:
        sign = 1
        if self.at_op("-"):
            self.take()
            sign = -1
        elif self.at_op("+"):
            self.take()
        return sign * self.rational()

    def rational(self) -> Fraction:
        kind, val, pos = self.take()
        if kind != "num":
            raise RateSyntaxError(f"unexpected {val or 'end of input'!r}", pos, ("number",))
        r = Fraction(val)
        # 'int / nat' binds as a single literal when followed by a plain integer
        if "." not in val and self.at_op("/"):
            k2, v2, _ = self.toks[self.i + 1]
            if k2 == "num" and "." not in v2:
                self.take()
                self.take()
                den = int(v2)
                if den == 0:
                    raise RateSyntaxError("zero denominator", pos)
                r = Fraction(int(val), den)
        return r

    def primary(self) -> RateExpr:
        kind, val, pos = self.peek()
        if kind == "num":
            return Num(self.rational())
        if kind == "iexp":
            self.take()
            k_kind, k_val, k_pos = self.take()
            if k_kind != "num" or "." in k_val or int(k_val) < 1:
                raise RateSyntaxError("iteration count must be a positive integer", k_pos, ("nat",))
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return IterExp(int(k_val), arg)
        if kind == "name":
            self.take()
            if val == "eps":
                return EPS
            if val in ("log", "exp", "abs"):
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return {"log": Log, "exp": Exp, "abs": Abs}[val](arg)
            if val == "hyper":
                self.expect_op("(")
                a = self.signed_rational()
                self.expect_op(")")
                return Hyper(a)
            if val == "comp":
                self.expect_op("(")
                e = self.expr()
                self.expect_op(",")
                s = self.expr()
                self.expect_op(")")
                return Comp(e, s)
            raise RateSyntaxError(f"unknown name {val!r}", pos, ("eps", "log", "exp", "exp@", "hyper", "abs", "comp"))
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.expect_op(")")
            return e
        raise RateSyntaxError(
            f"unexpected {val or 'end of input'!r}", pos, ("eps", "number", "'('", "function")
        )


def parse(text: str) -> RateExpr:
    """Parse a rate expression.  Raises RateSyntaxError with the position."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Pretty printer (canonical spacing)

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_frac(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def _fmt_exponent(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"({_fmt_frac(r)})"


def _prec(e: RateExpr) -> int:
    if isinstance(e, Num) and e.value < 0:
        return 3
    if isinstance(e, Num) and e.value.denominator != 1:
        return 2
    return _PREC.get(type(e), 5)


def pretty(e: RateExpr) -> str:
    def wrap(x: RateExpr, need: int) -> str:
        s = pretty(x)
        return f"({s})" if _prec(x) < need else s

    if isinstance(e, Eps):
        return "eps"
    if isinstance(e, Num):
        if e.value < 0:
            return "-" + _fmt_frac(-e.value)
        return _fmt_frac(e.value)
    if isinstance(e, Add):
        return f"{wrap(e.left, 1)} + {wrap(e.right, 2)}"
    if isinstance(e, Sub):
        return f"{wrap(e.left, 1)} - {wrap(e.right, 2)}"
    if isinstance(e, Mul):
        return f"{wrap(e.left, 2)} * {wrap(e.right, 3)}"
    if isinstance(e, Div):
        left = wrap(e.left, 2)
        right = wrap(e.right, 3)
        if isinstance(e.right, Num) or (left[-1:].isdigit() and right[:1].isdigit()):
            right = f"({pretty(e.right)})"
        return f"{left}/{right}"
    if isinstance(e, Neg):
        return "-" + wrap(e.arg, 3)
    if isinstance(e, Pow):
        base = pretty(e.base)
        if _prec(e.base) <= 4 or isinstance(e.base, Num):
            base = f"({base})"
        return f"{base}^{_fmt_exponent(e.exponent)}"
    if isinstance(e, Log):
        return f"log({pretty(e.arg)})"
    if isinstance(e, Exp):
        return f"exp({pretty(e.arg)})"
    if isinstance(e, IterExp):
        return f"exp@{e.k}({pretty(e.arg)})"
    if isinstance(e, Hyper):
        return f"hyper({_fmt_frac(e.a)})"
    if isinstance(e, Abs):
        return f"abs({pretty(e.arg)})"
    if isinstance(e, Comp):
        return f"comp({pretty(e.expr)}, {pretty(e.scale)})"
    raise TypeError(f"not a rate expression: {e!r}")


# ---------------------------------------------------------------------------
# Atoms and monomials
#
# atom = (level, k): (0,0) loglog(1/eps), (1,0) log(1/eps), (2,0) 1/eps,
# (3,k) exp@k(1/eps), (4,0) loghyper.

LL, L, LAM, LHYP = (0, 0), (1, 0), (2, 0), (4, 0)


def E(k: int) -> tuple[int, int]:
    return (3, k)


def _succ(atom):
    """exp(atom) as an atom."""
    if atom == LL:
        return L
    if atom == L:
        return LAM
    if atom == LAM:
        return E(1)
    if atom[0] == 3:
        return E(atom[1] + 1)
    raise FragmentError("exp(loghyper) is not representable")


def _pred(atom):
    """log(atom) as an atom."""
    if atom == L:
        return LL
    if atom == LAM:
        return L
    if atom == E(1):
        return LAM
    if atom[0] == 3:
        return E(atom[1] - 1)
    raise FragmentError("logarithm of loglog or loghyper is outside the fragment")


def atom_name(atom) -> str:
    if atom == LL:
        return "loglog"
    if atom == L:
        return "log"
    if atom == LAM:
        return "inv"
    if atom == LHYP:
        return "loghyper"
    return f"e{atom[1]}"


Monomial = tuple  # tuple[(atom, exponent)], atoms strictly descending


def _mono(d: dict) -> Monomial:
    return tuple(sorted(((a, p) for a, p in d.items() if p != 0), reverse=True))


def mono_mul(m1: Monomial, m2: Monomial, s: Number = 1) -> Monomial:
    d = dict(m1)
    for a, p in m2:
        d[a] = d.get(a, 0) + s * p
    return _mono(d)


def mono_growth(m: Monomial) -> int:
    """+1 if the monomial tends to infinity, -1 if to zero, 0 for the constant 1."""
    if not m:
        return 0
    return 1 if m[0][1] > 0 else -1


def mono_cmp(m1: Monomial, m2: Monomial) -> int:
    return mono_growth(mono_mul(m1, m2, -1))


_mono_key = cmp_to_key(mono_cmp)

# ---------------------------------------------------------------------------
# Exact forms


def _exact_num(x) -> Number:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def _is_zero(x: Number) -> bool:
    return x == 0


@dataclass(frozen=True)
class Term:
    """coef * exp(sum h * monomial)."""

    coef: Number
    lp: tuple  # tuple[(Monomial, h)] sorted, h != 0

    @staticmethod
    def make(coef, lp: dict) -> "Term":
        items = tuple(sorted((m, h) for m, h in lp.items() if h != 0 and m))
        c = _exact_num(coef)
        const = sum((h for m, h in lp.items() if not m), Fraction(0))
        if const != 0:
            c = c * math.exp(float(const))
        return Term(c, items)

    def growth_key(self) -> tuple:
        """The part of the exponent that is unbounded; determines growth class."""
        return tuple((m, h) for m, h in self.lp if mono_growth(m) > 0)


def _lp_add(a: tuple, b: tuple, s: Number = 1) -> dict:
    d = dict(a)
    for m, h in b:
        d[m] = d.get(m, 0) + s * h
    return d


def key_cmp(k1: tuple, k2: tuple) -> int:
    """Compare the growth of exp(k1) and exp(k2): sign of the leading coefficient."""
    d = _lp_add(k1, k2, -1)
    live = [m for m, h in d.items() if h != 0]
    if not live:
        return 0
    top = max(live, key=_mono_key)
    return 1 if d[top] > 0 else -1


@dataclass(frozen=True)
class ExactForm:
    terms: tuple  # tuple[Term], merged, nonzero coefficients
    exact: bool = True

    @staticmethod
    def of(terms, exact: bool = True) -> "ExactForm":
        acc: dict = {}
        order = []
        for t in terms:
            if t.lp not in acc:
                acc[t.lp] = t.coef
                order.append(t.lp)
            else:
                acc[t.lp] = acc[t.lp] + t.coef
        merged = tuple(sorted((Term(acc[lp], lp) for lp in order if acc[lp] != 0), key=lambda t: t.lp))
        return ExactForm(merged, exact)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExactForm") -> "ExactForm":
        return ExactForm.of(self.terms + other.terms, self.exact and other.exact)

    def __neg__(self) -> "ExactForm":
        return ExactForm(tuple(Term(-t.coef, t.lp) for t in self.terms), self.exact)

    def __mul__(self, other: "ExactForm") -> "ExactForm":
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(Term.make(a.coef * b.coef, _lp_add(a.lp, b.lp)))
        return ExactForm.of(out, self.exact and other.exact)

    def scale(self, k: Number) -> "ExactForm":
        if k == 0:
            return ExactForm(())
        return ExactForm(tuple(Term(t.coef * k, t.lp) for t in self.terms), self.exact)

    def dominant(self) -> "RateNormalForm":
        return _dominant(self)


def _const(c) -> ExactForm:
    c = _exact_num(c)
    return ExactForm(() if c == 0 else (Term(c, ()),))


def _single(coef, lp: dict) -> ExactForm:
    return ExactForm.of([Term.make(coef, lp)])


_EPS_FORM = _single(1, {((L, Fraction(1)),): Fraction(-1)})


def _dominant_groups(form: ExactForm):
    groups: dict = {}
    for t in form.terms:
        groups.setdefault(t.growth_key(), []).append(t)
    keys = sorted(groups, key=cmp_to_key(key_cmp), reverse=True)
    return [(k, groups[k]) for k in keys]


# ---------------------------------------------------------------------------
# Normal form


@dataclass(frozen=True)
class RateNormalForm:
    """Dominant behaviour of a net: sign * c * exp(key) (1 + o(1)).

    ``key`` is a tuple of (monomial, coefficient) over monomials tending to
    infinity.  ``zero`` marks the identically vanishing net.
    """

    zero: bool
    sign: int
    c: float
    key: tuple
    sum_remainder: bool = False

    @property
    def exponents(self) -> dict:
        """Exponents over the basis log(1/eps), 1/eps, exp@k(1/eps), hyper."""
        out = {}
        for m, h in self.key:
            if len(m) == 1 and m[0][1] == 1:
                a = m[0][0]
                if a == LHYP:
                    out["hyper"] = h
                    continue
                try:
                    out[atom_name(_succ(a))] = h
                except FragmentError:  # pragma: no cover
                    pass
        return out

    @property
    def exp_factor(self) -> tuple:
        """Remaining factors exp(H * inner) with inner not a basis logarithm."""
        out = []
        for m, h in self.key:
            if len(m) == 1 and m[0][1] == 1:
                continue
            out.append((h, {atom_name(a): p for a, p in m}))
        return tuple(out)

    def growth(self) -> int:
        """+1: |x| -> inf, 0: bounded away from 0 and inf, -1: x -> 0."""
        if self.zero:
            return -1
        if not self.key:
            return 0
        top = max((m for m, _ in self.key), key=_mono_key)
        return 1 if dict(self.key)[top] > 0 else -1


def _dominant(form: ExactForm) -> RateNormalForm:
    if form.is_zero:
        return RateNormalForm(True, 0, 0.0, ())
    groups = _dominant_groups(form)
    key, terms = groups[0]
    s = sum((t.coef for t in terms), Fraction(0))
    scale = max(abs(float(t.coef)) for t in terms)
    if s == 0 or abs(float(s)) <= 1e-12 * scale:
        raise FragmentError("leading terms cancel; sum leaves the fragment")
    return RateNormalForm(False, 1 if s > 0 else -1, abs(float(s)), key, len(form.terms) > 1)


# ---------------------------------------------------------------------------
# Normalization


def to_form(e: RateExpr) -> ExactForm:
    if isinstance(e, Eps):
        return _EPS_FORM
    if isinstance(e, Num):
        return _const(e.value)
    if isinstance(e, Add):
        return to_form(e.left) + to_form(e.right)
    if isinstance(e, Sub):
        return to_form(e.left) + (-to_form(e.right))
    if isinstance(e, Neg):
        return -to_form(e.arg)
    if isinstance(e, Mul):
        return to_form(e.left) * to_form(e.right)
    if isinstance(e, Div):
        return to_form(e.left) * _power(to_form(e.right), Fraction(-1))
    if isinstance(e, Pow):
        return _power(to_form(e.base), e.exponent)
    if isinstance(e, Abs):
        f = to_form(e.arg)
        if f.is_zero:
            return f
        return f.scale(_dominant(f).sign)
    if isinstance(e, Log):
        return _log(to_form(e.arg))
    if isinstance(e, Exp):
        return _exp(to_form(e.arg))
    if isinstance(e, IterExp):
        f = to_form(e.arg)
        for _ in range(e.k):
            f = _exp(f)
        return f
    if isinstance(e, Hyper):
        if e.a <= 0:
            raise FragmentError("hyper(a) requires a > 0")
        return _single(1, {((LHYP, Fraction(1)),): e.a})
    if isinstance(e, Comp):
        _check_scale(e.scale)
        return to_form(substitute(e.expr, e.scale))
    raise TypeError(f"not a rate expression: {e!r}")


def _power(f: ExactForm, r: Fraction) -> ExactForm:
    if f.is_zero:
        if r > 0:
            return f
        raise FragmentError("negative power of the zero net")
    if r == 0:
        return _const(1)
    if len(f.terms) == 1:
        t = f.terms[0]
        if t.coef < 0 and r.denominator != 1:
            raise FragmentError("fractional power of a negative net")
        if r.denominator == 1:
            coef = t.coef ** int(r)
        else:
            coef = float(t.coef) ** float(r)
        return ExactForm.of([Term.make(coef, {m: h * r for m, h in t.lp})], f.exact)
    if r.denominator == 1 and 0 < r <= 8:
        out = f
        for _ in range(int(r) - 1):
            out = out * f
        return out
    # approximate a sum by its dominant term: |sum|^r = dom^r (1 + o(1))
    d = _dominant(f)
    if d.sign < 0 and r.denominator != 1:
        raise FragmentError("fractional power of a negative net")
    base = ExactForm.of([Term.make(d.sign * d.c, dict(d.key))], False)
    return _power(base, r)._inexact()


def _inexact(self: ExactForm) -> ExactForm:
    return ExactForm(self.terms, False)


ExactForm._inexact = _inexact  # type: ignore[attr-defined]


def _exp(f: ExactForm) -> ExactForm:
    if not f.exact and _dominant(f).growth() >= 0:
        raise FragmentError("exp of an approximated sum")
    lp: dict = {}
    for t in f.terms:
        mono: dict = {}
        for m, h in t.lp:
            if len(m) != 1 or m[0][1] != 1:
                raise FragmentError("exp of a term that is not a tower monomial")
            a = _succ(m[0][0])
            mono[a] = mono.get(a, 0) + h
        key = _mono(mono)
        lp[key] = lp.get(key, 0) + t.coef
    return _single(1, lp)


def _log(f: ExactForm) -> ExactForm:
    if f.is_zero:
        raise FragmentError("log of the zero net")
    d = _dominant(f)
    if d.sign < 0:
        raise FragmentError("log of an eventually negative net")
    if len(f.terms) > 1:
        dom_terms = [t for t in f.terms if t.growth_key() == d.key]
        if len(dom_terms) != 1:
            raise FragmentError("log of a sum with several leading terms")
        lead = ExactForm.of(dom_terms)
        rest = ExactForm.of([t for t in f.terms if t.growth_key() != d.key])
        corr = rest * _power(lead, Fraction(-1))
        return (_log(lead) + corr)._inexact()
    t = f.terms[0]
    out = _const(math.log(float(t.coef)) if t.coef != 1 else 0)
    for m, h in t.lp:
        # the monomial prod a^p equals exp(sum p * log a)
        lp = {((_pred(a), Fraction(1)),): p for a, p in m}
        out = out + _single(h, lp)
    return ExactForm(out.terms, f.exact)


def substitute(e: RateExpr, scale: RateExpr) -> RateExpr:
    """Replace every eps in e by scale."""
    if isinstance(e, Eps):
        return scale
    if isinstance(e, (Num, Hyper)):
        if isinstance(e, Hyper):
            raise FragmentError("composition with hyper is not representable")
        return e
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute(e.left, scale), substitute(e.right, scale))
    if isinstance(e, (Neg, Log, Exp, Abs)):
        return type(e)(substitute(e.arg, scale))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, scale), e.exponent)
    if isinstance(e, IterExp):
        return IterExp(e.k, substitute(e.arg, scale))
    if isinstance(e, Comp):
        return Comp(substitute(e.expr, e.scale), scale)  # inner substitution first
    raise TypeError(e)


def _check_scale(scale: RateExpr) -> None:
    d = _dominant(to_form(scale))
    if d.zero or d.sign < 0 or d.growth() >= 0:
        raise PreconditionError(f"scale {pretty(scale)} is not a positive infinitesimal")


@lru_cache(maxsize=4096)
def normalize(e: RateExpr) -> RateNormalForm:
    """Canonical dominant-term normal form used for O-comparison."""
    return _dominant(to_form(e))


# ---------------------------------------------------------------------------
# Comparison

XBIGOY = "XbigOofY"
YBIGOX = "YbigOofX"
BOTH = "Both"
NEITHER = "Neither"


def _as_nf(x) -> RateNormalForm:
    if isinstance(x, RateNormalForm):
        return x
    if isinstance(x, str):
        x = parse(x)
    return normalize(x)


def compare_O(x, y) -> str:
    """Four-way big-O classification of two fragment nets."""
    nx, ny = _as_nf(x), _as_nf(y)
    if nx.zero and ny.zero:
        return BOTH
    if nx.zero:
        return XBIGOY
    if ny.zero:
        return YBIGOX
    c = key_cmp(nx.key, ny.key)
    if c == 0:
        return BOTH
    return XBIGOY if c < 0 else YBIGOX


def is_big_o(x, y) -> bool:
    return compare_O(x, y) in (XBIGOY, BOTH)


def relative_growth(x, y) -> int:
    """-1 if x = o(y), 0 if x and y have the same order, +1 if y = o(x)."""
    r = compare_O(x, y)
    return {XBIGOY: -1, BOTH: 0, YBIGOX: 1}[r]


def limit_class(x):
    """('finite', value) | ('+inf',) | ('-inf',) for fragment nets."""
    f = to_form(_lift(x)) if not isinstance(x, ExactForm) else x
    if f.is_zero:
        return ("finite", 0.0)
    d = _dominant(f)
    g = d.growth()
    if g > 0:
        return ("+inf",) if d.sign > 0 else ("-inf",)
    if g < 0:
        return ("finite", 0.0)
    return ("finite", float(d.sign * d.c))


def compose(e: RateExpr, scale) -> Union[RateExpr, Callable[[float], float]]:
    """Substitute eps := scale(eps).

    Returns a rate expression when the result stays in the fragment and a
    plain callable otherwise (numeric mode).
    """
    if isinstance(e, str):
        e = parse(e)
    if isinstance(scale, str):
        scale = parse(scale)
    if isinstance(scale, RateExpr):
        _check_scale(scale)
        out = Comp(e, scale)
        try:
            to_form(out)
            return substitute(e, scale)
        except FragmentError:
            return lambda eps: _eval(out, eps)
    if not callable(scale):
        raise TypeError("scale must be a rate expression or a callable")
    return lambda eps: _eval(e, float(scale(eps)))


# ---------------------------------------------------------------------------
# Floating-point evaluation


def _eval(e: RateExpr, x: float) -> float:
    try:
        v = _ev(e, x)
    except OverflowError as exc:
        raise RateOverflow("overflow evaluating", e, x) from exc
    except ZeroDivisionError as exc:
        raise RateArgumentError("division by zero in", e, x) from exc
    if math.isinf(v):
        raise RateOverflow("overflow evaluating", e, x)
    if math.isnan(v):
        raise RateArgumentError("undefined value of", e, x)
    return v


def _ev(e: RateExpr, x: float) -> float:
    if isinstance(e, Eps):
        return x
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Add):
        return _ev(e.left, x) + _ev(e.right, x)
    if isinstance(e, Sub):
        return _ev(e.left, x) - _ev(e.right, x)
    if isinstance(e, Mul):
        a = _ev(e.left, x)
        if a == 0.0:
            return 0.0
        b = _ev(e.right, x)
        v = a * b
        if math.isinf(v):
            raise OverflowError
        return v
    if isinstance(e, Div):
        return _ev(e.left, x) / _ev(e.right, x)
    if isinstance(e, Neg):
        return -_ev(e.arg, x)
    if isinstance(e, Pow):
        b = _ev(e.base, x)
        r = e.exponent
        if r.denominator == 1:
            return b ** int(r) if b != 0 or r > 0 else math.inf
        if b < 0:
            raise RateArgumentError("fractional power of a negative value")
        return b ** float(r)
    if isinstance(e, Log):
        a = _ev(e.arg, x)
        if a <= 0:
            raise RateArgumentError("log of a non-positive value")
        return math.log(a)
    if isinstance(e, Exp):
        return math.exp(_ev(e.arg, x))
    if isinstance(e, IterExp):
        v = _ev(e.arg, x)
        for _ in range(e.k):
            v = math.exp(v)
        return v
    if isinstance(e, Hyper):
        v = 1.0 / x
        for _ in range(math.floor(1.0 / x)):
            v = math.exp(v)
        return v ** float(e.a)
    if isinstance(e, Abs):
        return abs(_ev(e.arg, x))
    if isinstance(e, Comp):
        return _ev(e.expr, _ev(e.scale, x))
    raise TypeError(e)


def eval_at(e, eps: float) -> float:
    """IEEE evaluation at 0 < eps <= 1.  Overflow raises RateOverflow."""
    e = _lift(e)
    if not (0.0 < eps <= 1.0):
        raise RateArgumentError(f"eps must lie in (0, 1], got {eps!r}")
    return _eval(e, float(eps))


def _atom_value(atom, x: float) -> float:
    """log-free value of an atom at eps=x (may overflow to inf)."""
    inv = 1.0 / x
    if atom == LL:
        return math.log(math.log(inv))
    if atom == L:
        return math.log(inv)
    if atom == LAM:
        return inv
    if atom == LHYP:
        v = inv
        try:
            for _ in range(math.floor(inv) - 1):
                v = math.exp(v)
        except OverflowError:
            return math.inf
        return v
    v = inv
    try:
        for _ in range(atom[1]):
            v = math.exp(v)
    except OverflowError:
        return math.inf
    return v


def _mono_value(m: Monomial, x: float) -> float:
    v = 1.0
    for a, p in m:
        av = _atom_value(a, x)
        try:
            v *= av ** float(p)
        except OverflowError:
            return math.inf
    return v


@lru_cache(maxsize=4096)
def _log_terms(e: RateExpr) -> tuple:
    f = to_form(e)
    return tuple((math.log(abs(float(t.coef))), 1 if t.coef > 0 else -1,
                  tuple((m, float(h)) for m, h in t.lp)) for t in f.terms)


def log_abs_at(e, eps: float) -> float:
    """log|e(eps)| computed from the exact form (avoids overflow of exp towers)."""
    terms = _log_terms(_lift(e))
    if not terms:
        return -math.inf
    logs = []
    for lc, sg, lp in terms:
        s = 0.0
        for m, h in lp:
            s += h * _mono_value(m, eps)
        logs.append((lc + s, sg))
    top = max(v for v, _ in logs)
    if math.isinf(top):
        return top
    acc = sum(sg * math.exp(v - top) for v, sg in logs)
    if acc == 0:
        return -math.inf
    return top + math.log(abs(acc))


def grid(eps0: float = 0.1, r: float = 0.7, n: int = 40) -> list[float]:
    """Default geometric grid eps_j = eps0 * r**j."""
    return [eps0 * r**j for j in range(n)]
