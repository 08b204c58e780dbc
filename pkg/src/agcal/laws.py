"""Randomized law suites for big-O, the eventual order and limits.

Nets are drawn from the decidable fragment with a seeded generator so that
suites are reproducible; every check is decided by the exact procedures.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import rates
from .index_core import limit_of, order_gt
from .rates import Abs, Add, Eps, Exp, Log, Mul, Num, Pow, RateExpr

_ONE = Num(Fraction(1))


def _frac(rng: random.Random, lo: int, hi: int, den: int = 2) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_atom(rng: random.Random) -> RateExpr:
    """A positive fragment net: eps^p, log(1/eps)^q, exp(c eps^-r) or a constant."""
    kind = rng.choice(("pow", "pow", "log", "exp", "const"))
    if kind == "pow":
        p = _frac(rng, -3, 3)
        return _ONE if p == 0 else Pow(Eps(), p)
    if kind == "log":
        return Pow(Log(Pow(Eps(), Fraction(-1))), Fraction(rng.randint(1, 3)))
    if kind == "exp":
        c = _frac(rng, -2, 2)
        r = Fraction(rng.randint(1, 2), rng.randint(1, 2))
        return Exp(Mul(Num(c), Pow(Eps(), -r))) if c else _ONE
    return Num(Fraction(rng.randint(1, 9), rng.randint(1, 4)))


def random_net(rng: random.Random, terms: int = 2) -> RateExpr:
    """Positive sum of products of atoms."""
    acc = None
    for _ in range(rng.randint(1, terms)):
        t = random_atom(rng)
        if rng.random() < 0.5:
            t = Mul(t, random_atom(rng))
        t = Mul(Num(Fraction(rng.randint(1, 5))), t)
        acc = t if acc is None else Add(acc, t)
    return acc


def bounded_factor(rng: random.Random) -> RateExpr:
    """A net that is O(1): constant, positive power of eps, or a decaying exponential."""
    kind = rng.choice(("const", "pow", "exp", "mix"))
    if kind == "const":
        return Num(Fraction(rng.randint(1, 9), rng.randint(1, 3)))
    if kind == "pow":
        return Pow(Eps(), _frac(rng, 0, 3) or Fraction(1, 2))
    if kind == "exp":
        return Exp(Mul(Num(-Fraction(rng.randint(1, 3))), Pow(Eps(), Fraction(-1))))
    return Add(Num(Fraction(rng.randint(1, 4))), Pow(Eps(), Fraction(rng.randint(1, 3))))


def big_o_of(rng: random.Random, x: RateExpr) -> RateExpr:
    """A random representative of O(x)."""
    return Mul(bounded_factor(rng), x)


def _is_O(x: RateExpr, y: RateExpr) -> bool:
    return rates.is_big_o(x, y)


def big_o_laws(n: int = 200, seed: int = 1) -> dict:
    """Check the nine big-O laws on ``n`` random triples.  Returns counts and failures."""
    rng = random.Random(seed)
    failures: list = []
    checked = {k: 0 for k in ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix")}

    def check(law: str, ok: bool, *exprs):
        checked[law] += 1
        if not ok:
            failures.append((law, [rates.pretty(e) for e in exprs]))

    for _ in range(n):
        x, y, z = random_net(rng), random_net(rng), random_net(rng)
        check("i", _is_O(x, x), x)
        if _is_O(x, y) and _is_O(y, z):
            check("ii", _is_O(x, z), x, y, z)
        else:
            # build a chain that meets the hypothesis
            y2 = Mul(x, Add(_ONE, random_net(rng)))
            z2 = Mul(y2, Add(_ONE, random_net(rng)))
            check("ii", _is_O(x, z2), x, y2, z2)
        u, v = big_o_of(rng, x), big_o_of(rng, y)
        check("iii", _is_O(Mul(u, v), Mul(x, y)), u, v, x, y)
        su = Mul(Num(Fraction(rng.choice((-1, 1)))), u)
        sv = Mul(Num(Fraction(rng.choice((-1, 1)))), v)
        try:
            check("iv", _is_O(Add(su, sv), Add(Abs(x), Abs(y))), su, sv, x, y)
        except rates.FragmentError:
            check("iv", _is_O(Add(u, v), Add(Abs(x), Abs(y))), u, v, x, y)
        check("v", _is_O(Mul(z, v), Mul(z, y)), z, v, y)
        u2 = big_o_of(rng, x)
        check("vi", _is_O(Add(u, u2), x), u, u2, x)
        check("vii", _is_O(Add(x, v), Add(x, y)), x, v, y)
        k = Num(Fraction(rng.choice((-3, -1, 2, 5)), rng.randint(1, 3)))
        check("viii", _is_O(Mul(k, x), x) and _is_O(x, Mul(k, x)), k, x)
        k0 = Num(Fraction(rng.randint(-4, 4)))
        check("ix", _is_O(Mul(k0, u), x), k0, u, x)
    return {"checked": checked, "failures": failures}


def _signed_net(rng: random.Random) -> RateExpr:
    e = random_net(rng)
    return Mul(Num(Fraction(-1)), e) if rng.random() < 0.4 else e


def _gt(a: RateExpr, b: RateExpr) -> bool:
    return order_gt(a, b).holds


def _retry(fn: Callable, rng: random.Random, tries: int = 50):
    for _ in range(tries):
        try:
            return fn(rng)
        except rates.RateError:
            continue
    raise RuntimeError("could not draw a decidable sample")


def order_laws(n: int = 200, seed: int = 2) -> dict:
    rng = random.Random(seed)
    failures: list = []
    checked = {k: 0 for k in ("i", "ii", "iii", "iv", "v")}
    zero = Num(Fraction(0))

    def one(rng):
        i, j, k, z = (_signed_net(rng) for _ in range(4))
        out = []
        out.append(("i", not _gt(i, i), (i,)))
        # (ii): a strictly increasing chain built on top of k
        jj = Add(k, random_net(rng))
        ii = Add(jj, random_net(rng))
        if _gt(ii, jj) and _gt(jj, k):
            out.append(("ii", _gt(ii, k), (ii, jj, k)))
        ip = random_net(rng)
        kk = Add(j, random_net(rng))
        if _gt(ip, zero) and _gt(kk, j):
            out.append(("iii", _gt(Mul(ip, kk), Mul(ip, j)), (ip, kk, j)))
        i4, k4 = Add(j, random_net(rng)), Add(z, random_net(rng))
        if _gt(i4, j) and _gt(k4, z):
            out.append(("iv", _gt(Add(i4, k4), Add(j, z)), (i4, k4, j, z)))
        a, b = random_net(rng), random_net(rng)
        if not _gt(a, b):  # a <= b eventually (total order in the fragment)
            out.append(("v", rates.is_big_o(a, b), (a, b)))
        return out

    for _ in range(n):
        for law, ok, exprs in _retry(one, rng):
            checked[law] += 1
            if not ok:
                failures.append((law, [rates.pretty(e) for e in exprs]))
    return {"checked": checked, "failures": failures}


def _finite_net(rng: random.Random) -> RateExpr:
    """A net with a finite limit: constant plus infinitesimal corrections."""
    c = Num(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
    acc: RateExpr = c
    for _ in range(rng.randint(0, 2)):
        inf = rng.choice((
            Pow(Eps(), _frac(rng, 0, 3) or Fraction(1)),
            Exp(Mul(Num(-Fraction(rng.randint(1, 3))), Pow(Eps(), Fraction(-1)))),
            Pow(Log(Pow(Eps(), Fraction(-1))), Fraction(-rng.randint(1, 2))),
        ))
        acc = Add(acc, Mul(Num(Fraction(rng.randint(-4, 4) or 1)), inf))
    return acc


def _lim(e: RateExpr) -> float:
    L = limit_of(e)
    if L.kind != "Finite":
        raise AssertionError(f"{rates.pretty(e)} has limit {L}")
    return L.value


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * (1 + abs(a) + abs(b))


def limit_laws(n: int = 200, seed: int = 3) -> dict:
    rng = random.Random(seed)
    failures: list = []
    checked = {k: 0 for k in ("i", "ii", "iii", "iv", "v", "vi")}

    def one(rng):
        f, g = _finite_net(rng), _finite_net(rng)
        lf, lg = _lim(f), _lim(g)
        out = [("i", _close(_lim(Add(f, g)), lf + lg), (f, g)),
               ("ii", _close(_lim(Mul(f, g)), lf * lg), (f, g))]
        r = Num(Fraction(rng.randint(-20, 20), rng.randint(1, 7)))
        out.append(("iii", _close(_lim(r), float(r.value)), (r,)))
        if lg != 0:
            out.append(("iv", _close(_lim(rates.Div(f, g)), lf / lg), (f, g)))
        l0 = Num(Fraction(rng.randint(-5, 5)))
        d1 = Pow(Eps(), Fraction(rng.randint(1, 3)))
        d2 = Pow(Eps(), Fraction(rng.randint(1, 3), 2))
        lo, hi = rates.Sub(l0, d1), Add(l0, d2)
        h = Mul(Num(Fraction(1, 2)), Add(lo, hi))
        if _gt(h, lo) and _gt(hi, h):
            out.append(("v", _close(_lim(h), float(l0.value)), (lo, h, hi)))
        if lf > 0:
            out.append(("vi", _gt(f, Num(Fraction(0))), (f,)))
        return out

    for _ in range(n):
        for law, ok, exprs in _retry(one, rng):
            checked[law] += 1
            if not ok:
                failures.append((law, [rates.pretty(e) for e in exprs]))
    return {"checked": checked, "failures": failures}
