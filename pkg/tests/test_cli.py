import base64
import json
import subprocess
import sys

import pytest

from diglab import read_edgelist
from diglab.cli import main


def test_generate_er(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["generate", "--model", "er", "--n", "500", "--lambda", "2",
                 "--seed", "3", "--out", str(out)]) == 0
    g = read_edgelist(out)
    assert g.n == 500 and g.m > 0
    again = tmp_path / "h.txt"
    main(["generate", "--model", "er", "--n", "500", "--lambda", "2", "--seed", "3",
          "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_generate_cm_and_fixture(tmp_path, capsys):
    out = tmp_path / "cm.txt"
    main(["generate", "--model", "cm", "--n", "300", "--law", "poisson:1.5", "--simple",
          "--seed", "1", "--out", str(out)])
    err = capsys.readouterr().err
    assert "repairs" in err and "erased" in err
    fx = tmp_path / "fx.txt"
    main(["generate", "--model", "fixture", "--name", "scc-chain", "--param", "k=3",
          "--param", "blob=2", "--out", str(fx)])
    assert fx.read_text().splitlines()[0] == "6 8"


def test_analyze(tmp_path):
    g = tmp_path / "g.txt"
    main(["generate", "--model", "fixture", "--name", "scc-chain", "--param", "k=3",
          "--param", "blob=2", "--out", str(g)])
    rep = tmp_path / "r.json"
    main(["analyze", "--in", str(g), "--k", "1,2", "--pairs", "exact", "--out", str(rep)])
    report = json.loads(rep.read_text())
    assert report["giant_stats"]["k_n"] == 3
    assert report["weak_components"]["i_max"] == 6
    cc = report["condition_counters"]
    assert [c["k"] for c in cc] == [1, 2] and cc[0]["n_k"] == 24 and cc[0]["n_k_2"] == 12
    assert sum(report["bowtie"].values()) == 6
    assert list(report) == ["n", "m", "giant_stats", "condition_counters", "bowtie",
                            "weak_components"]


def test_analyze_montecarlo(tmp_path, capsys):
    g = tmp_path / "g.txt"
    main(["generate", "--model", "er", "--n", "300", "--lambda", "1.5", "--out", str(g)])
    main(["analyze", "--in", str(g), "--k", "3", "--pairs", "montecarlo:5000"])
    report = json.loads(capsys.readouterr().out)
    assert report["condition_counters"][0]["estimate_mode"] == "montecarlo"
    with pytest.raises(SystemExit):
        main(["analyze", "--in", str(g), "--pairs", "sometimes"])


def test_census_graph_and_split(tmp_path):
    g = tmp_path / "g.txt"
    main(["generate", "--model", "fixture", "--name", "directed-path", "--param", "n=3",
          "--out", str(g)])
    out = tmp_path / "c.json"
    main(["census", "--in", str(g), "--r", "2", "--out", str(out)])
    rows = json.loads(out.read_text())
    assert len(rows) == 3 and all(r["freq"] == pytest.approx(1 / 3) for r in rows)
    assert all(r["exact"] for r in rows)
    base64.b64decode(rows[0]["signature"])
    main(["census", "--in", str(g), "--r", "2", "--split-giant", "--out", str(out)])
    split = json.loads(out.read_text())
    assert sum(r["freq"] for r in split["giant"]) == pytest.approx(1 / 3)
    assert sum(r["freq"] for r in split["complement"]) == pytest.approx(2 / 3)


def test_census_bp(tmp_path):
    out = tmp_path / "bp.json"
    main(["census", "--bp", "regular:1", "--r", "2", "--reps", "100", "--out", str(out)])
    rows = json.loads(out.read_text())
    assert len(rows) == 1 and rows[0]["freq"] == 1.0
    with pytest.raises(SystemExit):
        main(["census", "--r", "2"])


def test_limits(tmp_path, capsys):
    main(["limits", "--law", "poisson:2", "--k-list", "1,5,50", "--reps", "5000"])
    out = json.loads(capsys.readouterr().out)
    assert out["zeta"] == pytest.approx(0.6349, abs=1e-4)
    assert out["zeta_geq_k"]["1"]["estimate"] == 1.0
    ests = [out["zeta_geq_k"][k]["estimate"] for k in ("1", "5", "50")]
    assert ests == sorted(ests, reverse=True)
    law = tmp_path / "law.json"
    law.write_text(json.dumps([[2, 2, 1.0]]))
    main(["limits", "--law", f"file:{law}"])
    assert json.loads(capsys.readouterr().out)["zeta"] == 1.0


def _config(tmp_path, tol):
    cfg = {
        "models": [{"name": "er05", "model": "er", "lambda": 0.5}],
        "n_ladder": [2000], "seeds": 2, "k_list": [2], "radii": [],
        "tolerances": tol, "out_dir": str(tmp_path / "out"), "threads": 1,
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_sweep_and_verify(tmp_path, capsys):
    p = _config(tmp_path, {"lscc_each": 0.01})
    assert main(["sweep", "--config", str(p)]) == 0
    assert (tmp_path / "out" / "sweep.csv").exists()
    assert main(["sweep", "--config", str(p), "--resume"]) == 0
    capsys.readouterr()
    assert main(["verify", "--config", str(p)]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    bad = _config(tmp_path, {"kn_mean": 0.0})
    assert main(["verify", "--config", str(bad)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.txt"
    res = subprocess.run([sys.executable, "-m", "diglab", "generate", "--model", "er",
                          "--n", "50", "--lambda", "1", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and out.exists()
