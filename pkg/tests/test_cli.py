"""Command-line interface: exit codes, reproducible output, sweep artifacts."""

import json
import os

import pytest

from xprhl.cli import main
from xprhl.cases.registry import fixture_root


def fixture(name):
    return os.path.join(fixture_root(), name, "fixture.json")


def golden(name):
    with open(os.path.join(fixture_root(), name, "golden.pw")) as fh:
        return fh.read()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_accepted_fixture_exits_zero(capsys):
    code, out, _ = run(capsys, "check", fixture("rwalk_mirror"))
    assert code == 0
    assert "status: accepted" in out
    assert out.startswith("# xprhl")
    assert "sha256=" in out


def test_check_missing_file_exits_two(capsys):
    code, _, err = run(capsys, "check", "no_such_file.json")
    assert code == 2
    assert "no_such_file.json" in err


def test_check_malformed_json_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", str(bad))[0] == 2


def test_strict_flag_fails_evidence_grade_runs(capsys):
    assert run(capsys, "check", fixture("dynkin_race"))[0] == 0
    assert run(capsys, "check", "--strict", fixture("dynkin_race"))[0] == 1


def test_product_matches_golden(tmp_path, capsys):
    out_path = tmp_path / "out.pw"
    code, _, _ = run(capsys, "product", fixture("loop_stripmine"),
                     "-o", str(out_path))
    assert code == 0
    assert out_path.read_text() == golden("loop_stripmine")


def test_validate_fixture(capsys):
    code, out, _ = run(capsys, "validate", fixture("seq_affine"))
    assert code == 0
    assert "validate: ok" in out


def test_run_prints_exact_distribution(tmp_path, capsys):
    prog = tmp_path / "p.pw"
    prog.write_text("x <$ uniform(intv(1, 3));\ny <- x * 2")
    code, out, _ = run(capsys, "run", str(prog))
    assert code == 0
    assert out.count("1/3") == 3
    assert "converged: True" in out


def test_estimate_emits_reproducible_json(tmp_path, capsys):
    q = tmp_path / "q.json"
    q.write_text(json.dumps({
        "case": "rwalk_mirror",
        "pre_states": [{"i_1": 0, "i_2": 0, "T_1": 4, "T_2": 4,
                        "s_1": 0, "s_2": 1}],
        "mode": "exact",
    }))
    code, out1, _ = run(capsys, "estimate", str(q))
    assert code == 0
    payload = json.loads(out1)
    assert payload["bound"]["exact"] == "3/8"
    assert payload["mode"] == "exact"
    assert payload["header"]["version"]
    _, out2, _ = run(capsys, "estimate", str(q))
    assert out1 == out2


def test_pathcoupling_reports_honest_failure(tmp_path, capsys):
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps({"case": "chlg_cycle12"}))
    code, out, _ = run(capsys, "pathcoupling", str(cert))
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert payload["worst_expectation"]["exact"] == "7/8"
    assert payload["metric_verdict"] == "refuted"


def test_sweep_writes_csv_and_figure(tmp_path, capsys):
    q = tmp_path / "sweep.json"
    q.write_text(json.dumps({
        "case": "rwalk_mirror",
        "pre_states": [{"i_1": 0, "i_2": 0, "s_1": 0, "s_2": 1}],
        "mode": "montecarlo", "samples": 800,
        "closed_form": {"name": "rwalk", "params": {"k": 1}},
        "sweep": {"var": "T", "values": [4, 16, 64]},
    }))
    csv_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", str(q), "-o", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert "param,bound,empirical,stderr" in lines
    assert sum(1 for ln in lines if ln and not ln.startswith("#")) == 4
    png = tmp_path / "sweep.png"
    assert png.exists() and png.stat().st_size > 0


def test_cases_list_and_run(capsys):
    code, out, _ = run(capsys, "cases", "list")
    assert code == 0
    assert "rwalk_mirror" in out.split()
    code, out, _ = run(capsys, "cases", "run", "assg_linear")
    assert code == 0
    assert "golden=True" in out


def test_cases_run_unknown_name_exits_two(capsys):
    assert run(capsys, "cases", "run", "nope")[0] == 2


def test_usage_error_exits_two(capsys):
    assert run(capsys, "frobnicate")[0] == 2
