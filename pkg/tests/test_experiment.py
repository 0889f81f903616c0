import csv
import shutil

import pytest

from diglab import ExperimentConfig, run_sweep, verify
from diglab.experiment import THREADS_ENV, read_rows


def small_config(tmp_path, **over):
    d = {
        "models": [
            {"name": "er2", "model": "er", "lambda": 2.0},
            {"name": "reg2", "model": "cm", "law": "regular:2", "seeds": 2},
            {"name": "chain", "model": "fixture", "fixture": "scc-chain",
             "params": {"k": 3, "blob": 2}, "seeds": 1},
        ],
        "n_ladder": [1000],
        "seeds": 3,
        "base_seed": 11,
        "k_list": [2, 5],
        "radii": [2],
        "census_reps": 2000,
        "out_dir": str(tmp_path / "out"),
        "threads": 1,
    }
    d.update(over)
    return ExperimentConfig.from_dict(d)


def sweep_bytes(config):
    run_sweep(config)
    with open(f"{config.out_dir}/sweep.csv", "rb") as fh:
        return fh.read()


def test_sweep_shape(tmp_path):
    cfg = small_config(tmp_path)
    rows = run_sweep(cfg)
    assert [(r.model, r.seed) for r in rows] == [
        ("er2", 0), ("er2", 1), ("er2", 2), ("reg2", 0), ("reg2", 1), ("chain", 0)]
    for r in rows[:3]:
        assert 0 < r.lscc_frac < 1
        assert r.theory_zeta == pytest.approx(0.6349, abs=1e-4)
        assert set(r.census_tv) == {2}
    assert rows[-1].theory_zeta is None and rows[-1].kn_frac == 3 / 6
    with open(f"{cfg.out_dir}/sweep.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header == cfg.columns()
    assert header[:8] == ["model", "n", "seed", "lscc_frac", "second_frac", "kn_frac",
                          "alpha1", "giant_edge_frac"]
    timings = (tmp_path / "out" / "timings.csv").read_text().splitlines()
    assert len(timings) == 6


def test_rows_roundtrip(tmp_path):
    cfg = small_config(tmp_path)
    rows = run_sweep(cfg)
    again = read_rows(cfg)
    for a, b in zip(rows, again):
        a.wall_time = b.wall_time = 0.0
        assert a == b


def test_sweep_byte_identical_across_runs_and_threads(tmp_path, monkeypatch):
    cfg = small_config(tmp_path)
    first = sweep_bytes(cfg)
    assert sweep_bytes(cfg) == first
    monkeypatch.setenv(THREADS_ENV, "2")
    assert cfg.thread_budget() == 2
    assert sweep_bytes(cfg) == first


def test_resume_after_truncation(tmp_path):
    cfg = small_config(tmp_path)
    full = sweep_bytes(cfg)
    path = tmp_path / "out" / "sweep.csv"
    lines = full.split(b"\n")
    # header, two rows and half of the third, as if killed mid-write
    path.write_bytes(b"\n".join(lines[:3]) + b"\n" + lines[3][:25])
    run_sweep(cfg, resume=True)
    assert path.read_bytes() == full


def test_resume_rejects_foreign_file(tmp_path):
    cfg = small_config(tmp_path)
    run_sweep(cfg)
    other = small_config(tmp_path, k_list=[3])
    with pytest.raises(ValueError, match="columns"):
        run_sweep(other, resume=True)


def test_subcritical_rows(tmp_path):
    cfg = small_config(tmp_path, models=[{"name": "er05", "model": "er", "lambda": 0.5}],
                       n_ladder=[100_000], seeds=5, radii=[], k_list=[10],
                       tolerances={"lscc_each": 0.01, "kn_mean": 0.01})
    rows = run_sweep(cfg)
    assert len(rows) == 5 and all(r.lscc_frac < 0.01 for r in rows)
    report = verify(cfg, rows)
    assert report.passed
    assert all(line.startswith("PASS") for line in report.lines())
    assert any(r.target == 0.0 for r in report.results)


def test_verify_zero_tolerance_fails(tmp_path):
    cfg = small_config(tmp_path, tolerances={"lscc_mean": 0.0, "kn_mean": 0.0})
    report = verify(cfg)
    assert not report.passed
    fails = [r for r in report.results if not r.passed and not r.note]
    assert fails and all(r.margin < 0 for r in fails)
    assert any(line.startswith("FAIL") and "margin=-" in line for line in report.lines())


def test_verify_skips_models_without_theory(tmp_path):
    cfg = small_config(tmp_path, tolerances={"lscc_mean": 0.05})
    report = verify(cfg)
    skipped = [line for line in report.lines() if line.startswith("SKIP")]
    assert skipped and all("chain" in line for line in skipped)


def test_verify_reuses_rows_on_disk(tmp_path):
    cfg = small_config(tmp_path, tolerances={"second_max": 0.5})
    run_sweep(cfg)
    before = (tmp_path / "out" / "sweep.csv").read_bytes()
    assert verify(cfg).passed
    assert (tmp_path / "out" / "sweep.csv").read_bytes() == before


def test_per_model_overrides(tmp_path):
    cfg = small_config(tmp_path, models=[
        {"name": "a", "model": "er", "lambda": 1.5, "n_ladder": [200, 400], "seeds": 1,
         "radii": []},
    ])
    rows = run_sweep(cfg)
    assert [(r.n, r.seed) for r in rows] == [(200, 0), (400, 0)]
    assert rows[0].census_tv == {}


@pytest.mark.parametrize("bad, match", [
    ({"n_ladder": [1000, 100]}, "ascending"),
    ({"seeds": 0}, "seeds"),
    ({"bogus": 1}, "unknown config keys"),
    ({"k_list": [5, 2]}, "k_list"),
    ({"models": [{"name": "x", "model": "cm", "law": "file:/nonexistent.json"}]}, "not found"),
    ({"models": [{"name": "x", "model": "er", "lambda": 1, "radii": [3]}]}, "subset"),
    ({"models": [{"name": "x", "model": "ba"}]}, "unknown model"),
    ({"models": []}, "no models"),
])
def test_config_validation(tmp_path, bad, match):
    with pytest.raises(ValueError, match=match):
        small_config(tmp_path, **bad)


def test_shipped_acceptance_config_loads():
    cfg = ExperimentConfig.load("configs/acceptance.json")
    assert [m["name"] for m in cfg.models][:3] == ["er-2", "er-0.5", "er-1"]
    assert cfg.tolerances_for(cfg.models[0])["lscc_mean"] == 0.01
