import json

import numpy as np
import pytest

from koopcontrol.cli import main, parse_config_text, resolve_system


def run(*argv):
    return main(list(argv))


# --- config parsing --------------------------------------------------------


def test_parse_config_basics():
    cfg = parse_config_text(
        """
        # a comment
        system = finite3
        seed = 7  # trailing comment
        name = "spaced value"
        """
    )
    assert cfg == {"system": "finite3", "seed": "7", "name": "spaced value"}


def test_parse_config_rejects_bare_words():
    with pytest.raises(Exception):
        parse_config_text("nonsense\n")


def test_resolve_inline_table_system():
    cfg = parse_config_text(
        """
        system = table
        states = p,q
        inputs = go
        step.p.go = q
        step.q.go = q
        """
    )
    sys_ = resolve_system(cfg)
    assert sys_.states.labels == ("p", "q")
    assert sys_.transition("p", "go") == "q"


def test_resolve_table_rejects_missing_entries():
    cfg = parse_config_text("system = table\nstates = p\ninputs = go\n")
    with pytest.raises(Exception):
        resolve_system(cfg)


def test_resolve_builtin_with_params():
    cfg = parse_config_text(
        "system = scalarlinear\nparam.lambdas.a = 0.3\nparam.lambdas.b = 0.7\n"
    )
    sys_ = resolve_system(cfg)
    assert sys_.transition(np.array([1.0]), "a") == pytest.approx(0.3)


# --- check command ---------------------------------------------------------


def test_check_exact_writes_reports_and_exits_zero(tmp_path, capsys):
    code = run("check", "--system", "finite3", "--exact", "--out", str(tmp_path))
    assert code == 0
    out = capsys.readouterr().out
    assert "20/20 checks passed" in out
    payload = json.loads((tmp_path / "check_report.json").read_text())
    assert len(payload) == 20
    assert all(entry["pass"] for entry in payload)
    assert (tmp_path / "check_report.txt").exists()


def test_check_sampled_requires_seed(tmp_path, capsys):
    code = run("check", "--system", "scalarlinear", "--out", str(tmp_path))
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_check_reports_are_byte_identical(tmp_path):
    args = (
        "check", "--system", "scalarlinear", "--seed", "5",
        "--points", "60", "--tol", "1e-12",
    )
    assert run(*args, "--out", str(tmp_path / "one")) == 0
    assert run(*args, "--out", str(tmp_path / "two")) == 0
    one = (tmp_path / "one" / "check_report.json").read_bytes()
    two = (tmp_path / "two" / "check_report.json").read_bytes()
    assert one == two


def test_check_only_subset_prints_witness(tmp_path, capsys):
    code = run("check", "--system", "finite3", "--only", "C19", "--out", str(tmp_path))
    assert code == 0
    out = capsys.readouterr().out
    assert "witness" in out
    assert "1/1 checks passed" in out


def test_check_unknown_only_id(tmp_path, capsys):
    code = run("check", "--system", "finite3", "--only", "C77", "--out", str(tmp_path))
    assert code == 2
    assert "unknown check ids" in capsys.readouterr().err


def test_check_skips_inapplicable_only_ids(tmp_path, capsys):
    code = run(
        "check", "--system", "scalarlinear", "--seed", "1",
        "--only", "C19", "--out", str(tmp_path),
    )
    assert code == 0
    assert "skipped" in capsys.readouterr().out


def test_check_unknown_system(tmp_path, capsys):
    code = run("check", "--system", "never", "--out", str(tmp_path))
    assert code == 2
    assert "unknown system" in capsys.readouterr().err


def test_env_var_sets_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("KOOPCONTROL_OUT", str(tmp_path / "envout"))
    assert run("check", "--system", "finite3", "--exact") == 0
    assert (tmp_path / "envout" / "check_report.json").exists()


def test_flag_overrides_config(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("system = never\nseed = 3\n")
    code = run(
        "check", "--config", str(config), "--system", "finite3",
        "--exact", "--out", str(tmp_path),
    )
    assert code == 0
    assert "finite3" in capsys.readouterr().out


def test_config_file_alone_drives_a_run(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        f"system = scalarlinear\nseed = 2\npoints = 40\nfunctions = 4\n"
        f"tol = 1e-12\nout = {tmp_path}\n"
    )
    assert run("check", "--config", str(config)) == 0
    assert (tmp_path / "check_report.json").exists()


# --- demo-naive ------------------------------------------------------------


def test_demo_naive_narrative(capsys):
    assert run("demo-naive", "--system", "finite3") == 0
    out = capsys.readouterr().out
    assert "second application is impossible" in out
    assert "witness-found" in out
    assert "singleton-input" in out
    assert "all-restrictions-input-free" in out
    assert "not two" in out


def test_demo_naive_on_input_blind_system(capsys):
    assert run("demo-naive", "--system", "collapse2") == 0
    assert "no two-step gap" in capsys.readouterr().out


def test_demo_naive_on_box(capsys):
    assert run("demo-naive", "--system", "scalarlinear") == 0
    assert "impossible" in capsys.readouterr().out


# --- fit / predict / report -----------------------------------------------


def test_fit_then_predict_pipeline(tmp_path, capsys):
    assert run(
        "fit", "--system", "scalarlinear", "--dict", "monomial:2",
        "--seed", "3", "--points", "200", "--out", str(tmp_path),
    ) == 0
    assert (tmp_path / "model.json").exists()
    assert (tmp_path / "training.csv").exists()
    capsys.readouterr()

    config = tmp_path / "predict.cfg"
    config.write_text("x0 = 0.8\nword = a,b\nsteps = 12\n")
    code = run(
        "predict", "--system", "scalarlinear", "--dict", "monomial:2",
        "--config", str(config), "--tol", "1e-8", "--out", str(tmp_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "max lifted prediction error" in out
    rows = (tmp_path / "prediction_errors.csv").read_text().strip().splitlines()
    assert rows[0] == "step,input,error"
    assert len(rows) == 14  # header + steps 0..12


def test_predict_fails_impossible_tolerance(tmp_path, capsys):
    assert run(
        "fit", "--system", "scalarlinear", "--seed", "3",
        "--points", "100", "--out", str(tmp_path),
    ) == 0
    config = tmp_path / "predict.cfg"
    config.write_text("x0 = 0.8\nword = a,b\nsteps = 8\n")
    code = run(
        "predict", "--system", "scalarlinear", "--config", str(config),
        "--tol", "1e-30", "--out", str(tmp_path),
    )
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_predict_without_model(tmp_path, capsys):
    code = run("predict", "--system", "scalarlinear", "--out", str(tmp_path))
    assert code == 2
    assert "run `koopcontrol fit` first" in capsys.readouterr().err


def test_fit_finite_exact(tmp_path, capsys):
    assert run("fit", "--system", "finite3", "--out", str(tmp_path)) == 0
    out = capsys.readouterr().out
    assert "indicator" in out
    model = json.loads((tmp_path / "model.json").read_text())
    entries = model["matrices"]["a"]
    assert len(entries) == 3


def test_fit_with_param_override(tmp_path):
    config = tmp_path / "fit.cfg"
    config.write_text("param.lambdas.a = 0.3\nparam.lambdas.b = 0.7\n")
    assert run(
        "fit", "--system", "scalarlinear", "--config", str(config),
        "--seed", "1", "--points", "150", "--out", str(tmp_path),
    ) == 0
    model = json.loads((tmp_path / "model.json").read_text())
    a = np.array([[c[0] + 1j * c[1] for c in row] for row in model["matrices"]["a"]])
    assert np.allclose(a, np.diag([1.0, 0.3, 0.09]), atol=1e-8)


def test_report_rerenders_saved_run(tmp_path, capsys):
    assert run("check", "--system", "finite3", "--exact", "--out", str(tmp_path)) == 0
    capsys.readouterr()
    assert run("report", "--out", str(tmp_path)) == 0
    assert "20/20 checks passed" in capsys.readouterr().out


def test_report_exit_one_on_recorded_failure(tmp_path, capsys):
    payload = [
        {
            "id": "C1",
            "pass": False,
            "max_abs_error": 1.0,
            "n_evaluated": 3,
            "counterexample": "pair (0, 'a')",
            "note": "",
        }
    ]
    (tmp_path / "check_report.json").write_text(json.dumps(payload))
    assert run("report", "--out", str(tmp_path)) == 1
    assert "FAIL" in capsys.readouterr().out


def test_report_without_file(tmp_path, capsys):
    assert run("report", "--out", str(tmp_path)) == 2
    assert "run `koopcontrol check` first" in capsys.readouterr().err
