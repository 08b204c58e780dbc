import json

import pytest

from agcal import __version__
from agcal.cli import main
from agcal.scenario import (ScenarioError, emit, load_scenario, parse_distribution, parse_function,
                            parse_intrange, parse_matrix, parse_scenario, run_scenario)

SMALL = """\
scenario: small
grid: 0.1, 0.7, 40
expr X: eps^-2
command: compare
  x: $X
  y: eps^-3
  expect: XbigOofY
command: moderate
  x: exp(1/eps)
  gauge: powers(1/eps)
  expect: Fails
"""


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestParsing:
    def test_small(self):
        sc = parse_scenario(SMALL)
        assert [c.name for c in sc.commands] == ["compare", "moderate"]
        assert sc.commands[0].raw["x"][0] == "(eps^-2)"

    def test_unknown_parameter_position(self):
        with pytest.raises(ScenarioError) as ei:
            parse_scenario("command: compare\n  x: 1/eps\n  why: 2\n", "bad.agc")
        assert "bad.agc:3:" in str(ei.value)

    def test_malformed_gauge_position(self):
        text = "command: gauge-check\n  gauge: powers(1/eps\n"
        with pytest.raises(ScenarioError, match=r"<string>:2:10: parameter 'gauge'"):
            parse_scenario(text)

    def test_missing_required(self):
        with pytest.raises(ScenarioError, match="requires parameter 'y'"):
            parse_scenario("command: compare\n  x: 1/eps\n")

    def test_dangling_reference(self):
        with pytest.raises(ScenarioError, match="dangling"):
            parse_scenario("command: compare\n  x: $Y\n  y: 1\n")

    def test_unknown_command(self):
        with pytest.raises(ScenarioError):
            parse_scenario("command: frobnicate\n")

    def test_literals(self):
        assert len(parse_matrix("[[1/eps, 0], [0, 1]]")) == 2
        assert parse_intrange("1..4") == [1, 2, 3, 4]
        assert parse_distribution("delta(0.5) + dd(1, 0)").terms
        assert parse_function("kernel(exp; -1/eps)") is not None


class TestRun:
    def test_records(self):
        rep = run_scenario(parse_scenario(SMALL))
        a, b = rep.records
        assert a["value"] == "XbigOofY" and a["mode"] == "Exact" and a["match"]
        assert a["result"]["x_is_O_y"]["witness"]
        assert b["status"] == "Fails" and b["match"]
        assert rep.ok

    def test_key_order_and_header(self):
        out = emit(run_scenario(parse_scenario(SMALL)))
        lines = [json.loads(s) for s in out.splitlines()]
        h = lines[0]
        assert list(h) == ["record", "scenario", "engine", "version", "config_hash", "grid", "commands"]
        assert h["version"] == __version__ and len(h["config_hash"]) == 16
        assert list(lines[1])[:4] == ["record", "index", "command", "line"]

    def test_numeric_records_are_truncated(self):
        text = "command: moderate\n  u: kernel(exp; -1/eps)\n  gauge: expof(powers(1/eps))\n"
        rec = run_scenario(parse_scenario(text)).records[0]
        assert rec["status"] == "Holds"
        assert "truncation" in rec and rec["truncation"]["grid"]["count"] == 40

    def test_mismatch_is_reported(self):
        sc = parse_scenario("command: compare\n  x: 1/eps\n  y: eps^-2\n  expect: Both\n")
        rep = run_scenario(sc)
        assert not rep.ok
        assert rep.records[0]["expect"] == [{"path": "value", "expected": "Both", "ok": False}]

    def test_empty(self):
        rep = run_scenario(parse_scenario("scenario: empty\n"))
        assert rep.records == [] and rep.ok

    def test_deterministic(self):
        sc = load_scenario("gauges")
        assert emit(run_scenario(sc)) == emit(run_scenario(sc))

    def test_parallel_same_bytes(self):
        sc = parse_scenario(SMALL)
        assert emit(run_scenario(sc)) == emit(run_scenario(sc, parallel=True))


class TestCli:
    def test_version(self, capsys):
        code, out, _ = run(["version"], capsys)
        assert code == 0 and out.strip() == f"agcal {__version__}"

    def test_parse(self, capsys):
        code, out, _ = run(["parse", "eps^-2 * log(1/eps)"], capsys)
        d = json.loads(out)
        assert code == 0 and d["pretty"] and d["normal_form"]

    def test_parse_error(self, capsys):
        code, _, err = run(["parse", "eps^-2 * * eps"], capsys)
        assert code == 2 and "9" in err

    def test_compare(self, capsys):
        code, out, _ = run(["compare", "eps^-2", "eps^-3"], capsys)
        d = json.loads(out)
        assert code == 0 and d["relation"] == "XbigOofY"
        assert d["x_is_O_y"]["status"] == "Holds" and d["x_is_O_y"]["witness"]

    def test_run_bundled_table(self, capsys):
        code, out, _ = run(["run", "gauges", "--format", "table"], capsys)
        assert code == 0 and "0 mismatches" in out

    def test_run_exit_codes(self, tmp_path, capsys):
        bad = tmp_path / "bad.agc"
        bad.write_text("command: compare\n  x: 1/eps\n")
        assert run(["run", str(bad)], capsys)[0] == 2
        wrong = tmp_path / "wrong.agc"
        wrong.write_text("command: compare\n  x: 1/eps\n  y: eps^-2\n  expect: Both\n")
        assert run(["run", str(wrong)], capsys)[0] == 1
        assert run(["run", "nonexistent-scenario"], capsys)[0] == 2

    def test_grid_override(self, tmp_path, capsys):
        f = tmp_path / "s.agc"
        f.write_text(SMALL)
        code, out, _ = run(["run", str(f), "--grid", "0.05,0.8,30"], capsys)
        h = json.loads(out.splitlines()[0])
        assert code == 0 and h["grid"]["eps0"] == 0.05 and h["grid"]["count"] == 30
