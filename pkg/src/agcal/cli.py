"""Command-line front end: ``agcal run|parse|compare|version|list``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__, rates
from .index_core import big_o
from .scenario import ScenarioError, _grid, bundled, emit, jsonable, load_scenario, run_scenario


def _cmd_run(ns) -> int:
    try:
        sc = load_scenario(ns.scenario)
        grid = _grid(ns.grid) if ns.grid else None
    except (ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"agcal: {exc}", file=sys.stderr)
        return 2
    rep = run_scenario(sc, grid, parallel=ns.parallel)
    sys.stdout.write(emit(rep, ns.format))
    return 0 if rep.ok else 1


def _limit(e) -> dict:
    try:
        c = rates.limit_class(e)
    except rates.RateError as exc:
        return {"error": str(exc)}
    return {"kind": c[0], "value": c[1]} if c[0] == "finite" else {"kind": c[0]}


def _cmd_parse(ns) -> int:
    try:
        e = rates.parse(ns.expr)
    except rates.RateError as exc:
        print(f"agcal: {exc}", file=sys.stderr)
        return 2
    out = {"input": ns.expr, "pretty": rates.pretty(e)}
    try:
        nf = rates.normalize(e)
        out["normal_form"] = {"zero": nf.zero, "sign": nf.sign, "c": nf.c,
                              "exponents": nf.exponents, "growth": nf.growth()}
        out["limit"] = _limit(e)
    except rates.RateError as exc:
        out["normal_form"] = {"error": str(exc)}
    print(json.dumps(jsonable(out), ensure_ascii=False))
    return 0


def _cmd_compare(ns) -> int:
    try:
        x, y = rates.parse(ns.x), rates.parse(ns.y)
        rel = rates.compare_O(x, y)
    except rates.RateError as exc:
        print(f"agcal: {exc}", file=sys.stderr)
        return 2
    out = {"x": rates.pretty(x), "y": rates.pretty(y), "relation": rel, "mode": "Exact"}
    if rel in (rates.XBIGOY, rates.BOTH):
        out["x_is_O_y"] = big_o(x, y)
    if rel in (rates.YBIGOX, rates.BOTH):
        out["y_is_O_x"] = big_o(y, x)
    print(json.dumps(jsonable(out), ensure_ascii=False))
    return 0


def _cmd_version(ns) -> int:
    print(f"agcal {__version__}")
    return 0


def _cmd_list(ns) -> int:
    for name in bundled():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agcal", description="Generalized numbers and functions over asymptotic gauges.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario file or a bundled scenario by name")
    r.add_argument("scenario")
    r.add_argument("--format", choices=("json-lines", "table"), default="json-lines")
    r.add_argument("--grid", help="eps0,r,n")
    r.add_argument("--parallel", action="store_true", help="run commands in worker processes")
    r.set_defaults(fn=_cmd_run)
    p = sub.add_parser("parse", help="parse a rate expression and show its normal form")
    p.add_argument("expr")
    p.set_defaults(fn=_cmd_parse)
    c = sub.add_parser("compare", help="decide the big-O relation between two rate expressions")
    c.add_argument("x")
    c.add_argument("y")
    c.set_defaults(fn=_cmd_compare)
    v = sub.add_parser("version")
    v.set_defaults(fn=_cmd_version)
    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(fn=_cmd_list)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    return ns.fn(ns)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
