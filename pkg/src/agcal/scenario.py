"""Scenario files: parsing, validation and execution.

A scenario is a plain indented key-value text file::

    scenario: ode-section5
    grid: 0.1, 0.7, 40
    gauge Bs: powers(1/eps)
    expr b: 1/eps

    command: compare
      x: eps^-2
      y: $b^3
      expect: XbigOofY

Top-level lines define the name, the numeric grid, named gauges and named
expressions.  ``$NAME`` references are replaced textually before parsing
(expressions are parenthesized).  Each ``command:`` opens a block whose
indented lines are its parameters.  ``expect`` compares against the record's
``value`` when it has one and its ``status`` otherwise; ``expect.a.b`` compares
against the nested result field ``result.a.b``.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__, rates
from .embedding import (build_mollifier, check_strict_delta, compare_embeddings, dd, delta, delta_pairing,
                        density, embed, necessity_certificate, strict_delta_net, taylor_residual_slope)
from .functions import (CapabilityError, DomainError, GenFunction, ScaledKernel, SeparableSum, SumFamily,
                        is_moderate_fn, is_negligible_fn, parse_profile, support_estimate)
from .gauges import (AlgebraSpec, GaugeError, algebra_order, check_axioms, equivalent_gauges, is_moderate,
                     is_negligible_num, parse_gauge, principal_generator)
from .index_core import (EXACT, FAILS, HOLDS, INCONCLUSIVE, NUMERIC, GridConfig, Verdict, _num, big_o,
                         conjunction, grid_config, using_grid)
from .laws import big_o_laws, limit_laws, order_laws
from .ode import ODEError, ODEProblem, entry_bound, expm, minimality_check, solve_linear, uniqueness_residual, \
    verify_moderate_expB

ERROR = "Error"
SCENARIO_DIR = Path(__file__).with_name("scenarios")


class ScenarioError(ValueError):
    """Schema or reference error, located by line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0, path: str = ""):
        self.msg, self.line, self.col, self.path = msg, line, col, path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {msg}")


# ---------------------------------------------------------------------------
# Value literals


def _split(s: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return out


def _bracketed(s: str) -> str:
    s = s.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"expected a bracketed list, got {s!r}")
    return s[1:-1]


def parse_matrix(s: str) -> list[list[rates.RateExpr]]:
    rows = [_bracketed(r) for r in _split(_bracketed(s))]
    return [[rates.parse(a) for a in _split(r)] for r in rows]


def parse_vector(s: str) -> list[rates.RateExpr]:
    return [rates.parse(a) for a in _split(_bracketed(s))]


def parse_interval(s: str) -> tuple[float, float]:
    body = _bracketed(s) if s.strip().startswith("[") else s
    parts = _split(body)
    if len(parts) != 2:
        raise ValueError(f"expected two bounds, got {s!r}")
    lo, hi = (float(p) for p in parts)
    if not lo < hi:
        raise ValueError(f"empty interval {s!r}")
    return lo, hi


def parse_kset(s: str) -> list[tuple[float, float]]:
    return [parse_interval(p) for p in _split(_bracketed(s))]


def parse_intrange(s: str) -> list[int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", s)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise ValueError(f"empty range {s!r}")
        return list(range(a, b + 1))
    return [int(p) for p in _split(s)]


def parse_function(s: str):
    """kernel(<profile>; <scale_in>; <scale_out>; <shift>) or sum(<coef>: <profile>; ...)."""
    t = s.strip()
    name, _, rest = t.partition("(")
    name = name.strip()
    if not rest.endswith(")"):
        raise ValueError(f"malformed function literal {s!r}")
    parts = _split(rest[:-1], ";")
    if name == "kernel":
        if not 2 <= len(parts) <= 4:
            raise ValueError("kernel(<profile>; <scale_in>[; <scale_out>[; <shift>]])")
        prof = parse_profile(parts[0])
        sin = rates.parse(parts[1])
        sout = rates.parse(parts[2]) if len(parts) > 2 else rates.Num(Fraction(1))
        shift = float(parts[3]) if len(parts) > 3 else 0.0
        return ScaledKernel(prof, sin, sout, shift)
    if name == "sum":
        pairs = []
        for p in parts:
            c, sep, prof = p.rpartition(":")
            if not sep:
                raise ValueError(f"sum term {p!r} needs '<coef>: <profile>'")
            pairs.append((rates.parse(c), parse_profile(prof)))
        return SeparableSum.of(pairs)
    if name == "add":
        fams = [parse_function(p) for p in parts]
        return SumFamily(tuple(fams))
    raise ValueError(f"unknown function literal {name!r}")


def parse_distribution(s: str):
    """delta(a) | dd(alpha, a) | density(<profile>[, lo, hi]) | w1 + w2."""
    terms = _split(s, "+")
    if len(terms) > 1:
        acc = parse_distribution(terms[0])
        for t in terms[1:]:
            acc = acc + parse_distribution(t)
        return acc
    t = s.strip()
    name, _, rest = t.partition("(")
    name = name.strip()
    if not rest.endswith(")"):
        raise ValueError(f"malformed distribution literal {s!r}")
    args = _split(rest[:-1])
    if name == "delta":
        return delta(float(args[0]) if args and args[0] else 0.0)
    if name == "dd":
        return dd(int(args[0]), float(args[1]) if len(args) > 1 else 0.0)
    if name == "density":
        prof = parse_profile(args[0])
        if len(args) == 3:
            return density(prof, (float(args[1]), float(args[2])))
        if len(args) == 1:
            return density(prof)
        raise ValueError("density(<profile>) or density(<profile>, lo, hi)")
    raise ValueError(f"unknown distribution literal {name!r}")


def parse_gauge_list(s: str) -> list[tuple[str, Any]]:
    return [(p, parse_gauge(p)) for p in _split(s, ";")]


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _grid(s: str) -> GridConfig:
    parts = _split(s)
    if len(parts) != 3:
        raise ValueError("grid takes eps0, r, n")
    eps0, r, n = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < eps0 <= 1 and 0 < r < 1 and n >= 2):
        raise ValueError("grid needs 0 < eps0 <= 1, 0 < r < 1, n >= 2")
    return GridConfig(eps0, r, n)


_TYPES: dict[str, Callable[[str], Any]] = {
    "expr": rates.parse,
    "gauge": parse_gauge,
    "gauges": parse_gauge_list,
    "profile": parse_profile,
    "function": parse_function,
    "dist": parse_distribution,
    "matrix": parse_matrix,
    "vector": parse_vector,
    "interval": parse_interval,
    "kset": parse_kset,
    "ints": parse_intrange,
    "int": int,
    "float": float,
    "bool": _bool,
    "str": str,
    "grid": _grid,
}

# ---------------------------------------------------------------------------
# Command schemas: name -> {param: (type, default)}; REQ marks required


REQ = object()
_COMMON = {"expect": ("str", None), "grid": ("grid", None)}

SCHEMAS: dict[str, dict[str, tuple]] = {
    "compare": {"x": ("expr", REQ), "y": ("expr", REQ)},
    "gauge-check": {"gauge": ("gauge", REQ)},
    "principal": {"gauge": ("gauge", REQ)},
    "equivalent": {"a": ("gauge", REQ), "b": ("gauge", REQ)},
    "moderate": {"x": ("expr", None), "u": ("function", None), "gauge": ("gauge", REQ),
                 "Z": ("gauge", None), "kset": ("kset", None), "alpha": ("int", 4)},
    "negligible": {"x": ("expr", None), "u": ("function", None), "gauge": ("gauge", REQ),
                   "Z": ("gauge", None), "kset": ("kset", None), "alpha": ("int", 4), "mmax": ("int", 8)},
    "embed": {"w": ("dist", REQ), "b": ("expr", REQ), "M": ("int", 4), "tol": ("float", 0.05),
              "domain": ("interval", None), "alpha": ("int", 2), "mmax": ("int", 4)},
    "taylor": {"f": ("profile", REQ), "b": ("expr", REQ), "M": ("int", 4), "K": ("interval", (-1.0, 1.0)),
               "eps_range": ("interval", (1e-3, 1e-1)), "min_slope": ("float", None),
               "max_residual": ("float", None), "method": ("str", "remainder")},
    "pairing": {"w": ("dist", REQ), "phi": ("profile", REQ), "b": ("expr", REQ), "M": ("int", 4),
                "eps_range": ("interval", (1e-3, 1e-1)), "min_slope": ("float", None)},
    "strict-delta": {"b": ("expr", REQ), "mcap": ("int", 8), "tol": ("float", 1e-8)},
    "compare-embeddings": {"b": ("expr", REQ), "c": ("expr", REQ), "M": ("int", 4), "mmax": ("int", 8)},
    "necessity": {"b": ("expr", REQ), "Z": ("gauge", REQ), "m": ("ints", [1, 2, 3, 4]), "M": ("int", 4),
                  "q": ("float", 0.5), "p": ("float", None), "z": ("expr", None)},
    "ode": {"A": ("matrix", REQ), "c": ("vector", REQ), "B": ("gauge", REQ), "t0": ("float", 0.0),
            "solution_gauge": ("gauge", None), "moderate_in": ("gauges", None), "alpha": ("int", 4),
            "eps_points": ("int", 20), "t_range": ("interval", (-1.0, 1.0)), "t_points": ("int", 20),
            "tol": ("float", 1e-9), "table_stride": ("int", 4)},
    "uniqueness": {"A": ("matrix", REQ), "c": ("vector", REQ), "B": ("gauge", REQ),
                   "solution_gauge": ("gauge", None), "n": ("vector", None), "v": ("vector", None),
                   "R": ("float", 1.0)},
    "minimality": {"B": ("gauge", REQ), "Bprime": ("gauge", REQ), "probes": ("int", 3), "alpha": ("int", 2)},
    "algebra-order": {"B1": ("gauge", REQ), "Z1": ("gauge", None), "B2": ("gauge", REQ), "Z2": ("gauge", None)},
    "matrix-bound": {"n": ("int", 100), "seed": ("int", 7), "dmax": ("int", 4), "t_points": ("int", 13),
                     "tol": ("float", 1e-9)},
    "laws": {"n": ("int", 200), "seed": ("int", 1)},
    "order-laws": {"n": ("int", 200), "seed": ("int", 2)},
    "limit-laws": {"n": ("int", 200), "seed": ("int", 3)},
}

_ONE_OF = {"moderate": ("x", "u"), "negligible": ("x", "u")}


# ---------------------------------------------------------------------------
# Scenario model


@dataclass
class Command:
    name: str
    line: int
    raw: dict  # param -> (text after substitution, line, col)
    expects: dict = field(default_factory=dict)  # path -> expected text
    args: dict = field(default_factory=dict)  # parsed values
    orig: dict = field(default_factory=dict)  # param -> text before substitution

    def echo(self) -> dict:
        return {k: v[0] for k, v in self.raw.items()}


@dataclass
class Scenario:
    name: str
    path: str
    grid: Optional[GridConfig]
    gauges: dict
    exprs: dict
    commands: list

    def normalized(self) -> str:
        lines = [f"scenario: {self.name}"]
        if self.grid:
            lines.append(f"grid: {self.grid.eps0}, {self.grid.r}, {self.grid.n}")
        for c in self.commands:
            lines.append(f"command: {c.name}")
            for k, (v, _, _) in c.raw.items():
                lines.append(f"  {k}: {v}")
            for k, v in c.expects.items():
                lines.append(f"  expect{'.' + k if k else ''}: {v}")
        return "\n".join(lines) + "\n"


_REF = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")
_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_.\-]*)(?:\s+([A-Za-z_][A-Za-z0-9_]*))?\s*:\s?(.*)$")


def _substitute(text: str, line: int, col: int, gauges: dict, exprs: dict, path: str) -> str:
    def rep(m):
        name = m.group(1)
        if name in exprs:
            return f"({exprs[name]})"
        if name in gauges:
            return gauges[name]
        raise ScenarioError(f"dangling reference ${name}", line, col + m.start(), path)

    return _REF.sub(rep, text)


def _strip_comment(s: str) -> str:
    i = s.find("#")
    return s if i < 0 else s[:i]


def parse_scenario(text: str, path: str = "<string>") -> Scenario:
    """Parse and fully validate; raises ScenarioError before anything runs."""
    name, grid = Path(path).stem if path != "<string>" else "unnamed", None
    gauges: dict[str, str] = {}
    exprs: dict[str, str] = {}
    commands: list[Command] = []
    cur: Optional[Command] = None
    for ln, rawline in enumerate(text.splitlines(), 1):
        line = _strip_comment(rawline).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip(" "))
        if "\t" in line[:indent + 1]:
            raise ScenarioError("tabs are not allowed for indentation", ln, 1, path)
        body = line.strip()
        m = _KEY.match(body)
        if not m:
            raise ScenarioError(f"expected 'key: value', got {body!r}", ln, indent + 1, path)
        key, ident, value = m.group(1), m.group(2), m.group(3).strip()
        after = body.index(":") + 1
        vcol = indent + after + 1 + (len(body[after:]) - len(body[after:].lstrip()))
        if indent:
            if cur is None:
                raise ScenarioError("indented parameter outside a command block", ln, indent + 1, path)
            if ident:
                raise ScenarioError(f"unexpected name after {key!r}", ln, indent + 1, path)
            orig = value
            value = _substitute(value, ln, vcol, gauges, exprs, path)
            if key == "expect" or key.startswith("expect."):
                cur.expects[key[7:]] = value
                continue
            schema = {**SCHEMAS[cur.name], **_COMMON}
            if key not in schema:
                raise ScenarioError(f"unknown parameter {key!r} for command {cur.name!r}", ln, indent + 1, path)
            if key in cur.raw:
                raise ScenarioError(f"duplicate parameter {key!r}", ln, indent + 1, path)
            cur.raw[key] = (value, ln, vcol)
            cur.orig[key] = orig
            continue
        cur = None
        if key == "scenario":
            name = value
        elif key == "grid":
            try:
                grid = _grid(value)
            except ValueError as exc:
                raise ScenarioError(str(exc), ln, vcol, path) from None
        elif key in ("gauge", "expr"):
            if not ident:
                raise ScenarioError(f"'{key}' definitions need a name", ln, 1, path)
            if ident in gauges or ident in exprs:
                raise ScenarioError(f"{ident!r} is already defined", ln, 1, path)
            value = _substitute(value, ln, vcol, gauges, exprs, path)
            try:
                (parse_gauge if key == "gauge" else rates.parse)(value)
            except (GaugeError, rates.RateError, ValueError) as exc:
                raise ScenarioError(f"invalid {key} {ident!r}: {exc}", ln, vcol, path) from None
            (gauges if key == "gauge" else exprs)[ident] = value
        elif key == "command":
            if value not in SCHEMAS:
                raise ScenarioError(f"unknown command {value!r}", ln, vcol, path)
            cur = Command(value, ln, {})
            commands.append(cur)
        else:
            raise ScenarioError(f"unknown top-level key {key!r}", ln, 1, path)
    for c in commands:
        _validate(c, path)
    return Scenario(name, path, grid, gauges, exprs, commands)


def _validate(c: Command, path: str) -> None:
    schema = {**SCHEMAS[c.name], **_COMMON}
    for key, (typ, default) in schema.items():
        if key == "expect":
            continue
        if key in c.raw:
            text, ln, col = c.raw[key]
            try:
                c.args[key] = _TYPES[typ](text)
                if typ == "gauges":
                    names = [_gauge_key(n) for n in _split(c.orig[key], ";")]
                    c.args[key] = [(n, g) for n, (_, g) in zip(names, c.args[key])]
            except (GaugeError, rates.RateError, ValueError, CapabilityError) as exc:
                raise ScenarioError(f"parameter {key!r}: {exc}", ln, col, path) from None
        elif default is REQ:
            raise ScenarioError(f"command {c.name!r} requires parameter {key!r}", c.line, 1, path)
        else:
            c.args[key] = default
    one = _ONE_OF.get(c.name)
    if one and sum(c.args.get(k) is not None for k in one) != 1:
        raise ScenarioError(f"command {c.name!r} takes exactly one of {', '.join(one)}", c.line, 1, path)


def load_scenario(ref: str) -> Scenario:
    """A path, or the name of a bundled scenario."""
    p = Path(ref)
    if not p.exists():
        cand = SCENARIO_DIR / f"{ref}.agc"
        if cand.exists():
            p = cand
        else:
            raise FileNotFoundError(f"no scenario file or bundled scenario named {ref!r}")
    return parse_scenario(p.read_text(encoding="utf-8"), str(p))


def bundled() -> list[str]:
    return sorted(p.stem for p in SCENARIO_DIR.glob("*.agc"))


# ---------------------------------------------------------------------------
# JSON helpers


def jsonable(x):
    if isinstance(x, Verdict):
        return jsonable(x.as_dict())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return _num(v)
    if isinstance(x, rates.RateExpr):
        return rates.pretty(x)
    return x if x is None or isinstance(x, str) else str(x)


def _verdict_result(v: Verdict) -> tuple[str, str, dict]:
    d = v.as_dict()
    d.pop("status")
    d.pop("mode")
    return v.status, v.mode, d


def _trunc(cfg: GridConfig, **kw) -> dict:
    out = {k: v for k, v in kw.items() if v is not None}
    out["grid"] = cfg.as_dict()
    return out


# ---------------------------------------------------------------------------
# Command implementations: each returns (status, mode, value, result, truncation)


def _c_compare(a, cfg):
    x, y = a["x"], a["y"]
    rel = rates.compare_O(x, y)
    res = {"relation": rel}
    if rel in (rates.XBIGOY, rates.BOTH):
        res["x_is_O_y"] = big_o(x, y, cfg)
    if rel in (rates.YBIGOX, rates.BOTH):
        res["y_is_O_x"] = big_o(y, x, cfg)
    return HOLDS, EXACT, rel, res, None


def _c_gauge_check(a, cfg):
    rep = check_axioms(a["gauge"])
    v = conjunction(list(rep.values()))
    res = {"gauge": a["gauge"].describe(), "axioms": {k: rep[k] for k in sorted(rep)}}
    bad = [k for k in sorted(rep) if not rep[k].holds]
    if bad:
        res["failed"] = bad
    return v.status, v.mode, None, res, None


def _c_principal(a, cfg):
    gen, cert = principal_generator(a["gauge"])
    return HOLDS, EXACT, "absent" if gen is None else rates.pretty(gen), {"certificate": cert}, None


def _c_equivalent(a, cfg):
    s, m, r = _verdict_result(equivalent_gauges(a["a"], a["b"]))
    return s, m, None, r, None


def _spec(B, Z):
    return AlgebraSpec.of(B, Z)


def _c_moderate(a, cfg):
    if a["x"] is not None:
        v = is_moderate(a["x"], a["gauge"], cfg)
        s, m, r = _verdict_result(v)
        return s, m, None, r, _trunc(cfg) if m == NUMERIC else None
    u = GenFunction(a["u"], _spec(a["gauge"], a["Z"]))
    v = is_moderate_fn(u, a["kset"], a["alpha"], cfg)
    s, m, r = _verdict_result(v)
    return s, m, None, r, _trunc(cfg, Kset=a["kset"] or "default", alpha_max=a["alpha"])


def _c_negligible(a, cfg):
    if a["x"] is not None:
        v = is_negligible_num(a["x"], a["gauge"], cfg, a["mmax"])
        s, m, r = _verdict_result(v)
        return s, m, None, r, _trunc(cfg, mmax=a["mmax"])
    u = GenFunction(a["u"], _spec(a["gauge"], a["Z"]))
    v = is_negligible_fn(u, a["kset"], a["alpha"], a["mmax"], cfg)
    s, m, r = _verdict_result(v)
    return s, m, None, r, _trunc(cfg, Kset=a["kset"] or "default", alpha_max=a["alpha"], mmax=a["mmax"])


def _c_embed(a, cfg):
    w, tol = a["w"], a["tol"]
    rho = build_mollifier(a["M"])
    dom = a["domain"] or (-1.0, 1.0)
    u = embed(w, a["b"], rho, dom)
    est = support_estimate(u, tol, None, a["alpha"], a["mmax"], cfg)
    true = w.support()
    slack = tol + 1e-9

    def near(e, t):
        return abs(e[0] - t[0]) <= slack and abs(e[1] - t[1]) <= slack

    ok = (len(est) == len(true) and all(near(e, t) for e, t in zip(sorted(est), sorted(true))))
    res = {"support_estimate": [list(e) for e in est], "support": [list(t) for t in true],
           "resolution": tol, "agrees": ok}
    return (HOLDS if ok else FAILS), NUMERIC, None, res, _trunc(cfg, K=list(dom), alpha_max=a["alpha"],
                                                                  mmax=a["mmax"])


def _c_taylor(a, cfg):
    rho = build_mollifier(a["M"])
    rep = taylor_residual_slope(a["f"], a["b"], rho, a["K"], a["eps_range"], a["method"], cfg=cfg)
    ok = True
    if a["min_slope"] is not None:
        ok &= rep.slope is not None and rep.slope >= a["min_slope"]
    if a["max_residual"] is not None:
        ok &= rep.max_residual <= a["max_residual"]
    res = rep.as_dict()
    res["target"] = a["M"] + 1
    return (HOLDS if ok else FAILS), NUMERIC, None, res, _trunc(cfg, K=list(a["K"]))


def _c_pairing(a, cfg):
    rho = build_mollifier(a["M"])
    out = delta_pairing(a["w"], a["phi"], a["b"], rho, a["eps_range"], cfg=cfg)
    rep = out["report"]
    ok = a["min_slope"] is None or (rep.slope is not None and rep.slope >= a["min_slope"])
    res = {"exact": out["exact"], **rep.as_dict()}
    return (HOLDS if ok else FAILS), NUMERIC, None, res, _trunc(cfg)


def _c_strict_delta(a, cfg):
    rep = strict_delta_net(a["b"], a["mcap"], cfg)
    chk = check_strict_delta(rep, a["tol"])
    ok = all(chk[k] for k in ("i_support", "ii_mass", "iii_selection", "iv_moments"))
    res = {"properties": {k: chk[k] for k in ("i_support", "ii_mass", "iii_selection", "iv_moments")},
           "l1": chk["v_l1"], "l1_meets_1_plus_1_over_m": chk["v_meets_1_plus_1_over_m"],
           "masses": chk["masses"], **rep.as_dict()}
    return (HOLDS if ok else FAILS), NUMERIC, None, res, _trunc(cfg, mcap=a["mcap"], tol=a["tol"])


def _c_compare_embeddings(a, cfg):
    v = compare_embeddings(a["b"], a["c"], build_mollifier(a["M"]), a["mmax"], cfg)
    s, m, r = _verdict_result(v)
    return s, m, None, r, _trunc(cfg, mmax=a["mmax"])


def _c_necessity(a, cfg):
    cert = necessity_certificate(a["b"], a["Z"], a["m"], build_mollifier(a["M"]), a["p"], a["q"], a["z"], cfg)
    ok = cert["L_positive"] and cert["L_decreasing"] and cert["lower_bound_holds"]
    if cert["escaper"] is not None:
        ok &= all(s == FAILS for s in cert["b_pow_neg_m_is_O_inv_z"].values()) != cert["generator"]
    return (HOLDS if ok else FAILS), NUMERIC, cert["agreement"], cert, _trunc(cfg, m=list(a["m"]))


def _gauge_key(text: str) -> str:
    m = re.fullmatch(r"\(?\s*\$?([A-Za-z_]\w*)\s*\)?", text)
    return m.group(1) if m else text


def _c_ode(a, cfg):
    from .gauges import exp_gauge

    B = a["B"]
    sg = a["solution_gauge"]
    spec = AlgebraSpec.of(sg) if sg is not None else AlgebraSpec.of(exp_gauge(B))
    p = ODEProblem.of(a["A"], a["c"], B, a["t0"], spec)
    pts = cfg.points()[: a["eps_points"]]
    ts = [float(t) for t in np.linspace(a["t_range"][0], a["t_range"][1], a["t_points"])]
    sol = solve_linear(p, pts, ts)
    sol2 = solve_linear(p, pts, ts, extra=3)
    res: dict = {"dimension": p.dim, "grid_eps": len(pts), "grid_t": len(ts)}
    worst_rerun = 0.0
    closed = p.dim == 1
    worst = 0.0
    table = []
    for i, e in enumerate(pts):
        a_e = rates.eval_at(p.A.entries[0][0], e) if closed else None
        c_e = rates.eval_at(p.c[0], e) if closed else None
        for j, t in enumerate(ts):
            v1, L1 = sol.state_scaled(e, t)
            v2, L2 = sol2.state_scaled(e, t)
            if math.isfinite(L1) and math.isfinite(L2):
                m = float(np.max(np.abs(v1)))
                d = float(np.max(np.abs(v1 - v2 * math.exp(L2 - L1)))) / m if m else 0.0
                worst_rerun = max(worst_rerun, d)
            if closed:
                # log domain: x = c exp(-a (t - t0)); relative error |x/x_exact - 1|
                if c_e == 0:
                    rel = abs(float(v1[0])) if not math.isfinite(L1) else 0.0
                else:
                    lx = math.log(abs(c_e)) - a_e * (t - p.t0)
                    sgn = math.copysign(1.0, c_e) * math.copysign(1.0, float(v1[0]))
                    rel = abs(sgn * math.exp(L1 - lx) - 1.0)
                worst = max(worst, rel)
                if i % a["table_stride"] == 0 and j % a["table_stride"] == 0:
                    table.append([e, t, (L1 / math.log(10)), lx / math.log(10), rel])
    ok = True
    if closed:
        res["closed_form"] = "c exp(-a (t - t0))"
        res["max_relative_error"] = worst
        res["table_columns"] = ["eps", "t", "log10 x_num", "log10 x_exact", "rel_err"]
        res["table"] = table
        ok &= worst <= a["tol"]
    res["rerun_max_relative_difference"] = worst_rerun
    ok &= worst_rerun <= 1e-9
    cert = sol.certificate
    res["bound"] = cert["bound"]
    res["bound_violations"] = len(cert["bound_violations"])
    ok &= not cert["bound_violations"]
    if a["moderate_in"]:
        mods = {}
        for text, g in a["moderate_in"]:
            v = verify_moderate_expB(sol, g, [(-1.0, 1.0)], a["alpha"], cfg)
            mods[_gauge_key(text)] = v
        res["moderate"] = mods
    return (HOLDS if ok else FAILS), NUMERIC, None, res, _trunc(cfg, K=[-1.0, 1.0], alpha_max=a["alpha"])


def _c_uniqueness(a, cfg):
    from .gauges import exp_gauge

    sg = a["solution_gauge"]
    spec = AlgebraSpec.of(sg) if sg is not None else AlgebraSpec.of(exp_gauge(a["B"]))
    p = ODEProblem.of(a["A"], a["c"], a["B"], 0.0, spec)
    v = uniqueness_residual(p, a["n"], a["v"], a["R"], cfg=cfg)
    s, m, r = _verdict_result(v)
    return s, m, None, r, _trunc(cfg) if m == NUMERIC else None


def _c_minimality(a, cfg):
    v = minimality_check(a["B"], a["Bprime"], a["probes"], a["alpha"], cfg)
    s, m, r = _verdict_result(v)
    return s, m, None, r, _trunc(cfg, K=[-1.0, 1.0], alpha_max=a["alpha"], probes=a["probes"])


def _c_algebra_order(a, cfg):
    s1 = AlgebraSpec.of(a["B1"], a["Z1"])
    s2 = AlgebraSpec.of(a["B2"], a["Z2"])
    s, m, r = _verdict_result(algebra_order(s1, s2))
    return s, m, None, r, None


def _c_matrix_bound(a, cfg):
    rng = np.random.default_rng(a["seed"])
    ts = np.linspace(-3.0, 3.0, a["t_points"])
    tol = a["tol"]
    corr_bad, classic_bad_ge1, classic_bad_lt1, n_ge1, worst = 0, 0, 0, 0, 0.0
    for _ in range(a["n"]):
        d = int(rng.integers(1, a["dmax"] + 1))
        A = rng.uniform(-2.0, 2.0, (d, d))
        M = float(np.max(np.abs(A)))
        n_ge1 += M >= 1
        for t in ts:
            X = expm(-t * A)
            mx = float(np.max(np.abs(X)))
            pb, cb = entry_bound(A, float(t))
            worst = max(worst, mx / cb)
            corr_bad += mx > cb * (1 + tol)
            if mx > pb * (1 + tol):
                if M >= 1:
                    classic_bad_ge1 += 1
                else:
                    classic_bad_lt1 += 1
    Z = np.zeros((2, 2))
    pb0, cb0 = entry_bound(Z, 1.0)
    ident = float(np.max(np.abs(expm(Z))))
    flagged = pb0 < ident <= cb0
    res = {
        "matrices": a["n"], "t_points": len(ts), "M_ge_1": n_ge1,
        "corrected_violations": corr_bad, "classic_violations_M_ge_1": classic_bad_ge1,
        "classic_violations_M_lt_1": classic_bad_lt1, "max_entry_over_corrected": worst,
        "identity_counterexample": {"A": "0", "max_entry": ident, "classic_bound": pb0, "corrected_bound": cb0,
                                    "classic_bound_fails": pb0 < ident},
    }
    ok = corr_bad == 0 and classic_bad_ge1 == 0 and flagged
    return (HOLDS if ok else FAILS), NUMERIC, None, res, None


def _laws(fn):
    def run(a, cfg):
        out = fn(a["n"], a["seed"])
        res = {"samples": a["n"], "seed": a["seed"], "checked": out["checked"],
               "failures": out["failures"][:10], "failure_count": len(out["failures"])}
        return (HOLDS if not out["failures"] else FAILS), EXACT, None, res, None
    return run


HANDLERS = {
    "compare": _c_compare, "gauge-check": _c_gauge_check, "principal": _c_principal,
    "equivalent": _c_equivalent, "moderate": _c_moderate, "negligible": _c_negligible,
    "embed": _c_embed, "taylor": _c_taylor, "pairing": _c_pairing, "strict-delta": _c_strict_delta,
    "compare-embeddings": _c_compare_embeddings, "necessity": _c_necessity, "ode": _c_ode,
    "uniqueness": _c_uniqueness, "minimality": _c_minimality, "algebra-order": _c_algebra_order,
    "matrix-bound": _c_matrix_bound, "laws": _laws(big_o_laws), "order-laws": _laws(order_laws),
    "limit-laws": _laws(limit_laws),
}
assert set(HANDLERS) == set(SCHEMAS)


# ---------------------------------------------------------------------------
# Execution


def _lookup(d, path: str):
    cur = d
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            return _MISSING
    return cur


_MISSING = object()


def _matches(expected: str, actual) -> bool:
    if actual is _MISSING:
        return False
    if isinstance(actual, dict) and "status" in actual:
        actual = actual["status"]
    if isinstance(actual, (bool, list)):
        try:
            return json.loads(expected) == actual
        except ValueError:
            return False
    if isinstance(actual, (int, float)) and not isinstance(actual, bool):
        try:
            return float(expected) == float(actual)
        except ValueError:
            return False
    return str(actual) == expected.strip()


def run_command(cmd: Command, base: GridConfig) -> dict:
    cfg = cmd.args.get("grid") or base
    rec: dict = {"record": "result", "command": cmd.name, "line": cmd.line, "params": cmd.echo()}
    with using_grid(cfg):
        try:
            status, mode, value, result, trunc = HANDLERS[cmd.name](cmd.args, cfg)
        except (CapabilityError, DomainError, ODEError, GaugeError, rates.RateError, ValueError,
                ArithmeticError) as exc:
            status, mode, value, result, trunc = ERROR, EXACT, None, {"error": f"{type(exc).__name__}: {exc}"}, None
    rec["status"] = status
    rec["mode"] = mode
    if value is not None:
        rec["value"] = value
    rec["result"] = jsonable(result)
    if mode == NUMERIC or trunc is not None:
        rec["truncation"] = jsonable(trunc if trunc is not None else _trunc(cfg))
    checks = []
    for path, exp in cmd.expects.items():
        if path:
            actual = _lookup(rec["result"], path)
        else:
            actual = rec.get("value", rec["status"])
        checks.append({"path": path or ("value" if "value" in rec else "status"), "expected": exp,
                       "ok": _matches(exp, actual)})
    if checks:
        rec["expect"] = checks
        rec["match"] = all(c["ok"] for c in checks)
    else:
        rec["match"] = status == HOLDS
    return rec


def _worker(args):
    cmd, base = args
    return run_command(cmd, base)


@dataclass
class Report:
    header: dict
    records: list

    @property
    def ok(self) -> bool:
        return all(r["match"] for r in self.records)


def config_hash(sc: Scenario, cfg: GridConfig) -> str:
    h = hashlib.sha256()
    h.update(__version__.encode())
    h.update(json.dumps(cfg.as_dict(), sort_keys=True).encode())
    h.update(sc.normalized().encode())
    return h.hexdigest()[:16]


def run_scenario(sc: Scenario, grid: Optional[GridConfig] = None, parallel: bool = False,
                 timings: Optional[list] = None) -> Report:
    base = grid or sc.grid or grid_config()
    header = {"record": "header", "scenario": sc.name, "engine": "agcal", "version": __version__,
              "config_hash": config_hash(sc, base), "grid": base.as_dict(), "commands": len(sc.commands)}
    if parallel and len(sc.commands) > 1:
        with ProcessPoolExecutor() as pool:
            recs = list(pool.map(_worker, [(c, base) for c in sc.commands]))
    else:
        recs = []
        for c in sc.commands:
            t0 = time.perf_counter()
            recs.append(run_command(c, base))
            if timings is not None:
                timings.append((c.name, c.line, time.perf_counter() - t0))
    for i, r in enumerate(recs):
        r["index"] = i
    return Report(header, recs)


# ---------------------------------------------------------------------------
# Emission


_ORDER = ("record", "index", "command", "line", "params", "status", "mode", "value", "match", "expect",
          "result", "truncation")


def _ordered(rec: dict) -> dict:
    return {k: rec[k] for k in _ORDER if k in rec}


def emit_json_lines(rep: Report) -> str:
    lines = [json.dumps(rep.header, ensure_ascii=False)]
    lines += [json.dumps(_ordered(r), ensure_ascii=False) for r in rep.records]
    return "\n".join(lines) + "\n"


def _short(v, width: int) -> str:
    s = v if isinstance(v, str) else json.dumps(v, ensure_ascii=False)
    return s if len(s) <= width else s[: width - 3] + "..."


def emit_table(rep: Report) -> str:
    h = rep.header
    out = [f"scenario {h['scenario']}  agcal {h['version']}  config {h['config_hash']}  "
           f"grid eps0={h['grid']['eps0']} r={h['grid']['r']} n={h['grid']['count']}"]
    cols = f"{'#':>3}  {'command':<19} {'status':<12} {'mode':<8} {'value':<22} {'ok':<3} detail"
    out += [cols, "-" * len(cols)]
    for r in rep.records:
        detail = ", ".join(f"{k}={_short(v, 24)}" for k, v in r["params"].items())
        if r["status"] == ERROR:
            detail = r["result"].get("error", "")
        out.append(f"{r['index']:>3}  {r['command']:<19} {r['status']:<12} {r['mode']:<8} "
                   f"{_short(r.get('value', ''), 22):<22} {'yes' if r['match'] else 'NO':<3} {_short(detail, 70)}")
    out.append("-" * len(cols))
    bad = sum(not r["match"] for r in rep.records)
    out.append(f"{len(rep.records)} commands, {bad} mismatches")
    return "\n".join(out) + "\n"


def emit(rep: Report, fmt: str = "json-lines") -> str:
    if fmt == "json-lines":
        return emit_json_lines(rep)
    if fmt == "table":
        return emit_table(rep)
    raise ValueError(f"unknown format {fmt!r}")


__all__ = ["ScenarioError", "Scenario", "Command", "Report", "parse_scenario", "load_scenario", "bundled",
           "run_scenario", "run_command", "emit", "emit_json_lines", "emit_table", "SCHEMAS", "jsonable",
           "INCONCLUSIVE", "FAILS", "HOLDS", "ERROR"]
