import json
import subprocess
import sys

import pytest

from qkadelic.cli import main
from qkadelic.config import EngineConfig
from qkadelic.lambda_ring import tau
from qkadelic.loopspace import dilaton_point
from qkadelic.qfun import RationalQ
from qkadelic.textio import dump_json


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, data):
    path.write_text(dump_json(data), encoding="utf-8")
    return path


def test_generate(tmp_path, capsys):
    empty = write(tmp_path / "empty.json", {})
    code, out, _ = run(capsys, "generate", empty, "--R", 3)
    assert code == 0
    data = json.loads(out)
    assert data["render"] == ["(1-q)"] * 3
    p1 = write(tmp_path / "p1.json", {"tau": {"1": "tau1"}})
    code, out, _ = run(capsys, "generate", p1, "--D", 1)
    assert code == 0 and json.loads(out)["render"][0] == "(1-q) + Psi1(tau1)"
    bad = write(tmp_path / "bad.json", {"tau": {"1": "3"}})
    code, _, err = run(capsys, "generate", bad)
    assert code == 2 and "augmentation ideal" in err


def test_generate_is_deterministic(tmp_path, capsys):
    p = write(tmp_path / "p.json", {"tau": {"1": "tau1 + 1/2*tau2*tau1", "3": "Psi2(tau1)"}, "t": {"2": "1 + tau1*q"}})
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(capsys, "generate", p, "--D", 3, "--R", 4, "-o", a)[0] == 0
    assert run(capsys, "generate", p, "--D", 3, "--R", 4, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_check_exit_codes(tmp_path, capsys):
    dil = tmp_path / "dil.json"
    run(capsys, "generate", write(tmp_path / "e.json", {}), "-o", dil)
    assert run(capsys, "check", dil)[0] == 0
    code, _, err = run(capsys, "check", dil, "--M-max", 5)
    assert code == 3 and "r1_zeta5" in err
    cfg = EngineConfig()
    point = dilaton_point(cfg.R, cfg)
    corrupted = point.replace(1, point[1] + RationalQ.inv_one_minus(2, tau(1, D=cfg.D)))
    bad = write(tmp_path / "bad.json", corrupted.to_json())
    code, out, err = run(capsys, "check", bad)
    assert code == 1
    cert = json.loads(out)
    assert cert["failed"] and cert["failed"][0] in err
    assert "witness" in cert["cells"][cert["failed"][0]]


def test_reconstruct(tmp_path, capsys):
    targets = write(tmp_path / "t.json", {"targets": ["1 - q"] * 3})
    code, out, _ = run(capsys, "reconstruct", targets, "--D", 1)
    assert code == 0 and json.loads(out)["params"] == {"t": {}, "tau": {}}
    targets = write(tmp_path / "t2.json", {"targets": ["1 - q + tau1", "1 - q + tau2"]})
    code, out, _ = run(capsys, "reconstruct", targets, "--D", 1)
    assert json.loads(out)["params"]["tau"] == {"1": "Psi1(tau1)", "2": "Psi1(tau2)"}
    far = write(tmp_path / "far.json", {"targets": ["2 - q"]})
    code, _, err = run(capsys, "reconstruct", far)
    assert code == 2 and "close" in err


def test_round_trip_is_byte_identical(tmp_path, capsys):
    flags = ["--D", 3, "--R", 6, "--M-max", 4, "--E", 10]
    for seed in range(3):
        params = tmp_path / f"p{seed}.json"
        point, targets = tmp_path / "pt.json", tmp_path / "tg.json"
        params2, point2 = tmp_path / "p2.json", tmp_path / "pt2.json"
        assert run(capsys, "random-params", "--seed", seed, *flags, "-o", params)[0] == 0
        assert run(capsys, "generate", params, *flags, "-o", point)[0] == 0
        assert run(capsys, "project", point, "-o", targets)[0] == 0
        assert run(capsys, "reconstruct", targets, "--params-out", params2, "-o", point2)[0] == 0
        assert params.read_bytes() == params2.read_bytes()
        assert point.read_bytes() == point2.read_bytes()
        assert run(capsys, "check", point2)[0] == 0


def test_identities(capsys):
    code, out, _ = run(capsys, "identities", "todd")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "identities", "all")
    assert code == 0
    assert {row["suite"] for row in json.loads(out)["results"]} == {
        "hurwitz", "todd", "box-delta", "adams-ops", "expansion-lemma"}
    code, out, err = run(capsys, "identities", "box-delta", "--perturb")
    assert code == 1 and "identity failed: box-delta" in err


def test_flows_and_transforms(tmp_path, capsys):
    dil = tmp_path / "dil.json"
    run(capsys, "generate", write(tmp_path / "e.json", {}), "-o", dil)
    ops = write(tmp_path / "ops.json", {"1": "tau1", "2": "tau2"})
    flowed = tmp_path / "flowed.json"
    assert run(capsys, "flow", dil, "--ops", ops, "-o", flowed)[0] == 0
    assert run(capsys, "check", flowed)[0] == 0
    gops = write(tmp_path / "gops.json", {"1": "tau1*q"})
    assert run(capsys, "flow", dil, "--kind", "generalized", "--ops", gops, "-o", flowed)[0] == 0
    assert run(capsys, "check", flowed)[0] == 0
    bad = write(tmp_path / "bad_ops.json", {"1": "q"})
    assert run(capsys, "flow", dil, "--kind", "generalized", "--ops", bad)[0] == 2
    mops = write(tmp_path / "mops.json", {"1": "1 + tau1*q"})
    code, out, _ = run(capsys, "multiply", dil, "--ops", mops)
    assert code == 0 and json.loads(out)["render"][0] == "(1-q) + Psi1(tau1)*q - Psi1(tau1)*q^2"

    t3 = write(tmp_path / "t3.json", {"N": [1], "G": 2, "f": [[[[0], "1"], [[1], "tau1"]]],
                                      "ops": {"1": [[[1], [0], "tau1"]]}})
    code, out, _ = run(capsys, "transform3", t3)
    assert code == 0 and json.loads(out)["f"][0]["G"] == 2
    t4 = write(tmp_path / "t4.json", {
        "N": [1], "G": 2, "basis": [[0], [1]],
        "f": {"1": [[[0], "1"], [[1], "1 + tau1*q"]], "2": [[[2], "tau2"]]},
        "c": [[0, 1, "1"], [1, 1, "tau1"], [0, 2, "q"]],
        "tau": [[1, 1, "tau1"], [0, 2, "tau2 + tau1*tau2"]],
    })
    code, out, _ = run(capsys, "transform4", t4, "--oracle")
    assert code == 0 and json.loads(out)["operator_pipeline_agrees"] is True

    code, out, _ = run(capsys, "adelic-expand", dil, "--M-max", 2)
    assert code == 0 and sorted(json.loads(out)) == sorted(
        f"r{r}_zeta{m}_{a}" for r in range(1, 5) for m, a in [(1, 0), (2, 1)])


def test_config_file_and_flags(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"R": 2, "D": 1})
    code, out, _ = run(capsys, "generate", write(tmp_path / "e.json", {}), "--config", cfg)
    assert json.loads(out)["config"]["R"] == 2
    code, out, _ = run(capsys, "generate", tmp_path / "e.json", "--config", cfg, "--R", 5)
    assert json.loads(out)["config"]["R"] == 5


def test_stdio_and_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qkadelic", "generate", "--stdio", "--R", "2"],
        input="{}", capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["render"] == ["(1-q)", "(1-q)"]
