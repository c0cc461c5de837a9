import json

import pytest

from k3verify.cli import main

TWO_POINT = {"n": 2, "x": [0, 1], "y": [0, 2], "z": [0, 3], "t": [0, 1]}


def run(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def report_of(out):
    return json.loads(out)


def strip_time(text):
    d = json.loads(text)
    d.pop("timestamp", None)
    return d


def test_kernel_eval_prints_value(capsys, write_json):
    cfg = write_json("two.json", TWO_POINT)
    code, out, err = run(capsys, "kernel-eval", "--config", cfg)
    assert code == 0 and out.strip() == "1/36"
    rep = json.loads(err[:err.rindex("}") + 1])
    assert rep["diagnostics"]["det_A"] == "-36"
    code, out, _ = run(capsys, "kernel-eval", "--config", cfg, "--kernel-mode", "real")
    assert out.strip() == "1/6"
    code, out, _ = run(capsys, "kernel-eval", "--config", cfg, "--mode", "f64")
    assert float(out) == pytest.approx(1 / 36)


def test_intertwine_pass(capsys):
    code, out, err = run(capsys, "intertwine", "--n", 3, "--trials", 4, "--threads", 1)
    assert code == 0
    rep = report_of(out)
    assert rep["status"] == "pass" and rep["trials"] == 4 and rep["seed"] == 0
    assert rep["max_deviation"] == 0
    assert "intertwine: PASS" in err


def test_intertwine_with_config_and_constant(capsys, write_json):
    cfg = write_json("c.json", {"x": [0, 1, 2], "y": [0, 1, 3], "z": [0, 2, 5], "t": [0, 1, 4]})
    code, out, _ = run(capsys, "intertwine", "--config", cfg, "--include-constant")
    assert code == 0 and report_of(out)["config"]["t"] == ["0", "1", "4"]
    code, out, _ = run(capsys, "intertwine", "--config", cfg, "--mode", "bigfloat", "--precision", 200)
    assert code == 0


def test_trace_equiv_and_planted_restriction(capsys):
    code, out, _ = run(capsys, "trace-equiv", "--n", 4, "--trials", 3)
    assert code == 0
    code, out, _ = run(capsys, "trace-equiv", "--n", 4, "--trials", 3, "--restrict-indices")
    assert code == 1
    ce = report_of(out)["counterexample"]
    assert ce["omega_trace"] != ce["omega_direct"] and "config" in ce


def test_decompose_commute_twisted(capsys, write_json, tmp_path):
    assert run(capsys, "decompose", "--n", 3, "--trials", 2, "--h-vectors", 50)[0] == 0
    assert run(capsys, "commute", "--n", 3, "--trials", 2, "--degree", 2)[0] == 0
    assert run(capsys, "twisted", "--n", 3, "--trials", 2)[0] == 0
    cfg = write_json("c.json", {"x": [0, 1, 2], "y": [0, 1, 3], "z": [0, 2, 5], "t": [0, 1, 4]})
    code, out, _ = run(capsys, "twisted", "--config", cfg, "--lambda", "1/2,-3,2")
    assert code == 0 and report_of(out)["config"]["lambda"] == ["1/2", "-3", "2"]
    lam = tmp_path / "lam.json"
    lam.write_text("[1, 2, 3]")
    assert run(capsys, "twisted", "--config", cfg, "--lambda", lam)[0] == 0
    assert run(capsys, "twisted", "--config", cfg, "--lambda", "1,2")[0] == 3


def test_wick(capsys, write_json):
    code, out, _ = run(capsys, "wick", "--n", 2)
    assert code == 0
    code, out, _ = run(capsys, "wick", "--n", 3, "--generic")
    assert code == 1
    status = {c["name"]: c["status"] for c in report_of(out)["checks"]}
    assert status["second_relation"] == "fail" and status["isserlis_second"] == "pass"
    cfg = write_json("w.json", {"A": [[2, 0], [0, 1]], "B": [[1, 0], [0, 3]]})
    assert run(capsys, "wick", "--config", cfg)[0] == 0
    bad = write_json("bad.json", {"A": [[1, 2], [2, 1]], "B": [[1, 0], [0, 1]]})
    assert run(capsys, "wick", "--config", bad)[0] == 3


def test_regint(capsys):
    code, out, _ = run(capsys, "regint", "--s", -3, "--m", 1)
    assert code == 0
    rep = report_of(out)
    assert {c["name"] for c in rep["checks"]} == {"reference", "m_independence"}
    assert run(capsys, "regint", "--s", -3, "--m", 1, "--shifted-constant")[0] == 1
    assert run(capsys, "regint", "--s", -4)[0] == 3
    assert run(capsys, "regint", "--s", -5.5, "--m", 1)[0] == 3
    assert run(capsys, "regint", "--s", "-1", "--function", "x**2+1")[0] == 0


def test_fresnel(capsys):
    code, out, _ = run(capsys, "fresnel")
    assert code == 0 and report_of(out)["status"] == "pass"


def test_hecke_probe_inconclusive(capsys, tmp_path):
    path = tmp_path / "h.json"
    code, out, err = run(capsys, "hecke-probe", "--report", path)
    assert code == 2 and out == ""
    rep = json.loads(path.read_text())
    assert rep["status"] == "inconclusive"
    assert "unconverged, increase R" in rep["message"]


def test_usage_errors(capsys, write_json):
    assert run(capsys, "kernel-eval")[0] == 3
    decimal = write_json("d.json", {"x": ["0.5", 1], "y": [0, 2], "z": [0, 3], "t": [0, 1]})
    assert run(capsys, "kernel-eval", "--config", decimal)[0] == 3
    assert run(capsys, "kernel-eval", "--config", "/nonexistent/cfg.json")[0] == 3
    degenerate = write_json("g.json", {"x": [0, 1], "y": [0, 2], "z": [0, 3], "t": [1, 1]})
    assert run(capsys, "kernel-eval", "--config", degenerate)[0] == 3
    singular = write_json("s.json", {"x": [0, 0], "y": [0, 2], "z": [0, 3], "t": [0, 1]})
    assert run(capsys, "kernel-eval", "--config", singular)[0] == 3
    for argv in (["bogus"], ["intertwine", "--n", "x"], ["intertwine", "--n", "0"],
                 ["intertwine", "--threads", "0"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 3
    capsys.readouterr()


def test_reports_are_reproducible(capsys, tmp_path):
    paths = [tmp_path / f"r{k}.json" for k in range(3)]
    run(capsys, "intertwine", "--n", 3, "--trials", 6, "--seed", 9, "--threads", 1, "--report", paths[0])
    run(capsys, "intertwine", "--n", 3, "--trials", 6, "--seed", 9, "--threads", 1, "--report", paths[1])
    run(capsys, "intertwine", "--n", 3, "--trials", 6, "--seed", 9, "--threads", 2, "--report", paths[2])
    texts = [p.read_text() for p in paths]
    assert strip_time(texts[0]) == strip_time(texts[1]) == strip_time(texts[2])
    lines = [[ln for ln in t.splitlines() if '"timestamp"' not in ln] for t in texts]
    assert lines[0] == lines[1] == lines[2]


def test_module_entry_point_exit_codes(run_cli):
    proc = run_cli("intertwine", "--n", 5, "--trials", 25, "--mode", "exact", "--seed", 7)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "pass"
    assert run_cli("regint", "--s", -4).returncode == 3
    assert run_cli("nonsense").returncode == 3
    proc = run_cli("--version")
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
