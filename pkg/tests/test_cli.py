import json

import pytest

from gelfond.cli import main, run_command

SQRT2 = '{"poly":[-2,0,1]}'


def _strip_timings(report):
    return {k: v for k, v in report.items() if k != "timings"}


def test_house_command(capsys):
    status, report = run_command(["house", "--field", SQRT2, "--elem", "x"])
    assert status == 0
    assert report["house"]["mid"].startswith("1.41421356")
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "ok"


def test_norm_and_minpoly_commands():
    status, report = run_command(["norm", "--field", SQRT2, "--elem", "3 + x", "--json-only"])
    assert status == 0 and report["norm"] == "7"
    status, report = run_command(["minpoly", "--field", SQRT2, "--elem", "x/3", "--json-only"])
    assert status == 0 and report["minpoly"] == "x^2 - 2/9"


def test_siegel_command():
    status, report = run_command(["siegel", "--matrix", '{"field":"Q","rows":[[2,3]]}', "--json-only"])
    assert status == 0
    assert report["vector"] == ["3", "-2"]
    assert report["claimed_bound"]["mid"].startswith("6")
    status, report = run_command(["siegel", "--matrix", '{"field":{"poly":[-2,0,1]},"rows":[["1","x"]]}', "--json-only"])
    assert status == 0 and len(report["vector"]) == 2


def test_usage_errors_exit_2(capsys):
    assert main(["bogus"]) == 2
    assert main(["house", "--field", SQRT2]) == 2
    assert main(["house", "--field", "{not json", "--elem", "x"]) == 2
    assert main(["pipeline"]) == 2
    assert main(["pipeline", "--instance", "/nonexistent/instance.json"]) == 2
    assert main(["siegel", "--matrix", '{"field":"Q","rows":[[1,0],[0,1]]}']) == 2


def test_input_error_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"field": {"poly": [-2, 0, 1]}, "alpha": "1", "beta": "x", "gamma": "2", "q": 12}))
    assert main(["constants", "--instance", str(bad), "--json-only"]) == 2


def test_stage_failure_exit_1(monkeypatch, capsys):
    from gelfond import auxfun

    def broken(*args, **kwargs):
        raise AssertionError("eta does not annihilate the cleared matrix")

    monkeypatch.setattr(auxfun, "solve_coefficients", broken)
    status, report = run_command(["synthetic-validate", "--instance", "synthetic_sqrt2.json", "--json-only"])
    assert status == 1
    assert report == {"status": "failed", "stage": "eta", "message": "eta: eta does not annihilate the cleared matrix"}
    assert "stage eta" in capsys.readouterr().err


def test_synthetic_validate_bundled():
    status, report = run_command(["synthetic-validate", "--instance", "synthetic_sqrt2.json", "--json-only"])
    assert status == 0
    assert report["eq7"]["overlap"] and report["eq7"]["combined_width"] < 1e-10
    assert report["order"]["r"] >= 2


def test_determinism_and_echo_roundtrip(tmp_path, capsys):
    argv = ["synthetic-validate", "--instance", "synthetic_sqrt2.json", "--json-only"]
    _, first = run_command(argv)
    _, second = run_command(argv)
    assert json.dumps(_strip_timings(first), sort_keys=True) == json.dumps(_strip_timings(second), sort_keys=True)
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(first))
    _, third = run_command(["synthetic-validate", "--instance", str(saved), "--json-only"])
    assert _strip_timings(third) == _strip_timings(first)


def test_constants_and_threshold_commands():
    status, report = run_command(["constants", "--instance", "demo_sqrt2.json", "--json-only"])
    assert status == 0
    assert report["constants"]["c1"]["exact"] == "2"
    assert report["checks"]["c7_forms_agree"]
    status, report = run_command(["threshold", "--instance", "demo_sqrt2.json", "--json-only"])
    assert status == 0
    assert report["threshold"]["n_of_q_required_ge_r_star"]
    assert report["threshold"]["monotone_certificate"]
