import json
import subprocess
import sys

from starforge.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_fx_a(capsys):
    code, out, _ = run(capsys, "analyze", "-i", "fx-a")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "h-local: yes; |Star|=2; |Star_stab|=2; G_v = R/Q"


def test_analyze_fx_b_structured(capsys):
    code, out, _ = run(capsys, "analyze", "-i", "fx-b", "--format", "structured")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["schema_version"] == 1
    body = rep["report"]
    assert body["h_local"] is False and body["star_count"]["exact"] is False
    assert body["stable_count"] == 2


def test_analyze_hlocal_five(capsys):
    code, out, _ = run(capsys, "analyze", "-i", "hlocal-5")
    assert code == EXIT_OK and "|Star|=8" in out


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "-i", "fx-a", "d", "R")
    assert code == EXIT_OK and out.startswith("R  ->  R") and "closed under d: yes" in out
    code, out, _ = run(capsys, "eval", "-i", "fx-a", "v", "M1: > (0) @1")
    assert code == EXIT_OK and "closed under v: no" in out
    code, out, _ = run(capsys, "eval", "-i", "fx-a", "branches{T[M1]:v, T[M2]:d}", "M1: > (0) @1")
    assert code == EXIT_OK and "->  R" in out


def test_eval_input_errors(capsys):
    code, _, err = run(capsys, "eval", "-i", "fx-a", "w", "R")
    assert code == EXIT_INPUT and err.startswith("error:")
    code, _, _ = run(capsys, "eval", "-i", "fx-a", "v", "M9: >= (0) @1")
    assert code == EXIT_INPUT


def test_malformed_files(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("forest:\n  - name: P\n    group: Z\n    maximal: true\n    children:\n"
                   "      - name: M\n        group: Y\n")
    code, _, err = run(capsys, "analyze", "-i", str(bad))
    assert code == EXIT_INPUT and f"{bad}:7:" in err
    broken = tmp_path / "broken.yaml"
    broken.write_text("forest: [\n")
    code, _, err = run(capsys, "analyze", "-i", str(broken))
    assert code == EXIT_INPUT and "error:" in err
    code, _, _ = run(capsys, "analyze", "-i", str(tmp_path / "missing.yaml"))
    assert code == EXIT_INPUT


def test_internal_node_marked_maximal_file(tmp_path, capsys):
    f = tmp_path / "f.yaml"
    f.write_text("forest:\n  - name: P\n    group: Z\n    maximal: true\n    children:\n"
                 "      - name: M\n        group: Z\n")
    code, _, err = run(capsys, "analyze", "-i", str(f))
    assert code == EXIT_INPUT and "internal node marked maximal" in err


def test_check_suites(capsys):
    code, out, _ = run(capsys, "check", "-i", "fx-b", "witness.intersez")
    assert code == EXIT_OK and "result: pass" in out
    code, _, _ = run(capsys, "check", "-i", "fx-a", "nope")
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "check", "-i", "fx-a", "--seed", "x")
    assert code == EXIT_INPUT


def test_check_fails_are_exit_one(monkeypatch, capsys):
    from starforge import cli
    monkeypatch.setattr(cli, "cmd_check", lambda *a, **k: {"passed": False, "results": [],
                                                           "fixture": "x", "suite": "s",
                                                           "seed": 0, "samples": 1})
    code, _, _ = run(capsys, "check", "-i", "fx-a", "stable")
    assert code == EXIT_FAIL


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("STARFORGE_SEED", "17")
    _, out, _ = run(capsys, "check", "-i", "fx-a", "stable", "--samples", "10",
                    "--format", "structured")
    assert json.loads(out)["report"]["seed"] == 17


def test_structured_reports_are_deterministic(capsys):
    argv = ("check", "-i", "fx-a", "all", "--seed", "3", "--samples", "40", "--format", "structured")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "starforge", "analyze", "-i", "fx-c"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("h-local: yes; |Star|=2")
