import json
import os

import numpy as np
import pytest

from vnmlab import cli


def _run(argv, capsys):
    rc = cli.main(argv)
    out = capsys.readouterr().out
    return rc, out


def test_list_scenarios(capsys):
    rc, out = _run(["list-scenarios"], capsys)
    assert rc == 0
    names = out.split()
    assert len(names) == 9
    assert "stern-gerlach" in names and "tomography" in names


def test_validate_fills_defaults(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"scenario": "tomography"}')
    rc, out = _run(["validate", "--config", str(cfg)], capsys)
    assert rc == 0
    merged = json.loads(out)
    assert merged["params"]["epsilon1"] == 1.0
    assert merged["params"]["sigma_q"] == 1.0


def test_config_errors_are_path_precise(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": "tomography",
        "params": {"sigma_q": -1, "bogus": 3},
        "extra": 1,
    }))
    rc, out = _run(["validate", "--config", str(cfg)], capsys)
    assert rc == 2
    detail = json.loads(out)["detail"]
    joined = " | ".join(detail)
    assert "params.sigma_q" in joined
    assert "params.bogus" in joined
    assert "extra" in joined


def test_unknown_scenario_and_bad_json(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"scenario": "warp-drive"}')
    rc, out = _run(["validate", "--config", str(cfg)], capsys)
    assert rc == 2
    assert "unknown scenario" in json.loads(out)["detail"][0]
    cfg.write_text("{nope")
    rc, out = _run(["validate", "--config", str(cfg)], capsys)
    assert rc == 2
    rc, _ = _run(["validate", "--config", str(tmp_path / "missing.json")], capsys)
    assert rc == 2


def test_run_writes_manifest_and_is_reproducible(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"scenario": "pointer-density"}')
    out1, out2 = tmp_path / "a", tmp_path / "b"
    rc, _ = _run(["run", "--config", str(cfg), "--out", str(out1)], capsys)
    assert rc == 0
    rc, _ = _run(["run", "--config", str(cfg), "--out", str(out2)], capsys)
    assert rc == 0
    manifest = json.loads((out1 / "manifest.json").read_text())
    for name in manifest["files"]:
        assert (out1 / name).exists()
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["checks"]["mean_matches_born_average"] is True


def test_csv_has_full_precision(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"scenario": "quasi-distributions"}')
    out = tmp_path / "out"
    rc, _ = _run(["run", "--config", str(cfg), "--out", str(out)], capsys)
    assert rc == 0
    lines = (out / "quasi_margenau_hill.csv").read_text().splitlines()
    assert lines[0] == "m,n,b_m,a_n,re,im"
    table = {}
    for line in lines[1:]:
        f = line.split(",")
        table[(int(float(f[0])), int(float(f[1])))] = float(f[4])
    # the negative entry survives the round trip at full double precision
    assert table[(1, 1)] == pytest.approx((1 - np.sqrt(2)) / 4, abs=1e-15)


def test_runtime_error_exits_3(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": "pointer-density",
        "params": {"weights": [0.5, 0.5]},  # length clashes with 7 eigenvalues
    }))
    rc, out = _run(["run", "--config", str(cfg), "--out", str(tmp_path / "o")],
                   capsys)
    assert rc == 3
    assert json.loads(out)["error"] == "runtime"


def test_vnm_seed_overrides_config(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"scenario": "tomography", "params": {"seed": 5}}')
    monkeypatch.setenv("VNM_SEED", "77")
    rc, out = _run(["validate", "--config", str(cfg)], capsys)
    assert rc == 0
    assert json.loads(out)["params"]["seed"] == 77


def test_stern_gerlach_momentum_branches(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": "stern-gerlach",
        "params": {"spinor": [[0.6, 0.0], [0.8, 0.0]]},
    }))
    out = tmp_path / "out"
    rc, _ = _run(["run", "--config", str(cfg), "--out", str(out)], capsys)
    assert rc == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["born_weight_up"] == pytest.approx(0.36)
    assert summary["checks"]["branch_masses_match_born"] is True
