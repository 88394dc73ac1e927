import json
import subprocess
import sys

import pytest

from repvar.cli import load_schema, run, validate


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_dims(capsys):
    code, value = run_json(capsys, ["dims", "--genus", "3", "--query", "whole"])
    assert code == 0 and value == 12
    code, value = run_json(capsys, ["dims", "--genus", "3", "--query", "kill_separating", "--g1", "1"])
    assert value == 10


def test_dims_out_of_range(capsys):
    assert run(["dims", "--genus", "4", "--query", "kill_separating", "--g1", "9"]) == 2


def test_unknown_flag(capsys):
    assert run(["dims", "--genus", "3", "--query", "whole", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err.lower()
    assert run(["no-such-command"]) == 2


def test_build_and_certify_pipeline():
    exe = [sys.executable, "-m", "repvar.cli"]
    rep = subprocess.run(exe + ["build-rep", "--genus", "4", "--seed", "7"], capture_output=True, check=True)
    cert = subprocess.run(exe + ["certify", "--catalog-depth", "2", "--samples", "100"], input=rep.stdout,
                          capture_output=True)
    assert cert.returncode == 0, cert.stderr.decode()
    report = json.loads(cert.stdout)
    assert report["verdict"] == "PASS"
    validate(report, "certificate")


def test_build_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["build-rep", "--genus", "4", "--seed", "3", "-o", str(a)]) == 0
    assert run(["build-rep", "--genus", "4", "--seed", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c1, c2 = tmp_path / "c1.json", tmp_path / "c2.json"
    for out in (c1, c2):
        assert run(["certify", "--rep", str(a), "--samples", "50", "-o", str(out)]) == 0
    assert c1.read_bytes() == c2.read_bytes()


def test_certify_fail_exit(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    run(["build-rep", "--genus", "4", "--seed", "1", "-o", str(rep)])
    obj = json.loads(rep.read_text())
    one, zero = ["1", "0"], ["0", "0"]
    obj["images"][4] = [[one, zero], [zero, one]]
    rep.write_text(json.dumps(obj))
    assert run(["certify", "--rep", str(rep), "--samples", "10"]) == 1


def test_solve_fiber(capsys):
    code, fp = run_json(capsys, ["solve-fiber", "--m", "4", "--sqrt-m", "2"])
    assert code == 0 and fp["residual"] == 0
    validate(fp, "fiber_point")
    code, fp = run_json(capsys, ["solve-fiber", "--m", "4", "--sqrt-m", "2", "--family", "c", "--seed", "5"])
    assert code == 0 and fp["residual"] == 0
    assert run(["solve-fiber", "--m", "1"]) == 2
    assert run(["solve-fiber", "--m", "4", "--family", "a", "--params", "1,2"]) == 2


def test_detect_irreducible(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    run(["build-rep", "--genus", "4", "--seed", "2", "-o", str(rep)])
    code, res = run_json(capsys, ["detect-irreducible", "--input", str(rep)])
    assert code == 0 and res["irreducible"]
    validate(res, "irreducibility_result")


def test_lift_character_from_rep(tmp_path, capsys):
    import random
    from repvar.core.encoding import rep_to_json
    from repvar.sgood import random_sgood
    rep = tmp_path / "rep.json"
    rep.write_text(json.dumps(rep_to_json(random_sgood(random.Random(1), tail=1).representation())))
    code, res = run_json(capsys, ["lift-character", "--from-rep", "--input", str(rep), "--sheet", "2"])
    assert code == 0 and res["sheet"] == 2
    validate(res, "sgood_coords")
    # a built surface rep has tr[a1, b1] = 2 and lies outside the chart
    built = tmp_path / "built.json"
    run(["build-rep", "--genus", "4", "--seed", "2", "-o", str(built)])
    assert run(["lift-character", "--from-rep", "--input", str(built)]) == 2


def test_lift_path_round_trip(tmp_path, capsys):
    base = tmp_path / "fp.json"
    run(["solve-fiber", "--m", "4", "--sqrt-m", "2", "-o", str(base)])
    fp = json.loads(base.read_text())
    path = {"samples": [{"t": 0.0, "matrices": [fp["target"]]}, {"t": 1.0, "matrices": [fp["target"]]}],
            "step_bound": 0.0}
    pfile = tmp_path / "path.json"
    pfile.write_text(json.dumps(path))
    code, lift = run_json(capsys, ["lift-path", "--path", str(pfile), "--start", str(base), "--end", str(base),
                                   "--steps", "8"])
    assert code == 0 and len(lift["samples"]) == 9
    validate(lift, "matrix_path")


def test_deform_rejects_far_boundary(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    run(["build-rep", "--genus", "4", "--seed", "2", "-o", str(rep)])
    bnd = tmp_path / "b.json"
    bnd.write_text(json.dumps({"matrix": [["2", "0"], ["0", "1/2"]]}))
    assert run(["deform", "--rep", str(rep), "--boundary", str(bnd), "--subsurface", "0,1,2,3",
                "--max-norm", "1e-3"]) == 2


def test_suite_report_validates(tmp_path, capsys):
    out = tmp_path / "suite.json"
    assert run(["suite", "--criteria", "9,10", "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    validate(report, "suite_report")
    assert [c["number"] for c in report["criteria"]] == [9, 10]
    err = capsys.readouterr().err
    assert "PASS" in err


def test_config_from_environment(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"backend": "float"}))
    monkeypatch.setenv("REPVAR_CONFIG", str(cfg))
    code, rep = run_json(capsys, ["build-rep", "--genus", "4", "--seed", "1"])
    assert code == 0
    assert isinstance(rep["images"][0][0][0], list)
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run(["dims", "--genus", "3", "--query", "whole"]) == 2


def test_schema_is_loadable():
    schema = load_schema()
    for name in ("certificate", "suite_report", "representation", "fiber_point", "matrix_path", "config"):
        assert name in schema["$defs"]
    with pytest.raises(Exception):
        validate({"verdict": "MAYBE"}, "certificate")
