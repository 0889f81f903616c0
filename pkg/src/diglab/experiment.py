"""
Configuration-driven sweeps and the pass/fail harness built on them.

A config is a JSON object::

    {
      "models": [
        {"name": "er2", "model": "er", "lambda": 2.0},
        {"name": "reg2", "model": "cm", "law": "regular:2", "seeds": 3},
        {"name": "chain", "model": "fixture", "fixture": "scc-chain",
         "params": {"k": 3, "blob": 2}}
      ],
      "n_ladder": [1000, 10000],
      "seeds": 5,
      "base_seed": 0,
      "k_list": [10, 50, 200],
      "radii": [2],
      "pair_budget": "auto",
      "census_sample": "all",
      "census_reps": 100000,
      "degree_max": 4,
      "tolerances": {"lscc_mean": 0.01},
      "out_dir": "runs/example",
      "threads": 4
    }

Any model may override ``n_ladder``, ``seeds``, ``tolerances`` and ``radii``
(a subset of the global radii; the others are left blank).  The
environment variable ``DIGLAB_THREADS`` overrides ``threads``.

Sweep output is ``<out_dir>/sweep.csv``, one row per (model, n, seed) in that
order.  Columns, in order: ``model, n, seed, lscc_frac, second_frac,
kn_frac, alpha1, giant_edge_frac, giant_half_degree_frac``, then
``z_frac_k<k>``, ``nk_frac_k<k>``, ``nk2_frac_k<k>``, ``nk2_se_k<k>`` for
each k, ``census_tv_r<r>`` for each radius, ``deg_frac_<l>_<m>`` for
``l, m <= degree_max``, and finally
``theory_zeta, theory_scc_density, theory_edge_density``.  Wall times go to
``<out_dir>/timings.csv`` so the sweep file itself is reproducible byte for
byte.
"""
import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .components import condition_counters, giant_stats
from .core import scc_decompose
from .generators import DegreeLaw, GeneratorSpec, derive_seed, generate
from .local import census, simulate_limit_census, tv_distance
from .theory import giant_degree_mass, solve_limits

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "CriterionResult",
    "VerifyReport",
    "run_replicate",
    "run_sweep",
    "read_rows",
    "verify",
    "THREADS_ENV",
]

log = logging.getLogger(__name__)

THREADS_ENV = "DIGLAB_THREADS"


@dataclass
class ExperimentConfig:
    models: list
    n_ladder: list
    seeds: int = 1
    base_seed: int = 0
    k_list: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    pair_budget: object = "auto"
    census_sample: object = "all"
    census_reps: int = 100_000
    degree_max: int = 4
    tolerances: dict = field(default_factory=dict)
    out_dir: str = "runs"
    threads: int = 1

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self):
        if not self.models:
            raise ValueError("config lists no models")
        names = [m.get("name") for m in self.models]
        if None in names or len(set(names)) != len(names):
            raise ValueError("every model needs a unique 'name'")
        for m in self.models:
            ladder = m.get("n_ladder", self.n_ladder)
            if not ladder or list(ladder) != sorted(ladder):
                raise ValueError(f"model {m['name']}: n_ladder must be nonempty and ascending")
            if int(m.get("seeds", self.seeds)) < 1:
                raise ValueError(f"model {m['name']}: seeds must be >= 1")
            if m.get("model") not in ("er", "cm", "fixture"):
                raise ValueError(f"model {m['name']}: unknown model {m.get('model')!r}")
            law = m.get("law", "")
            if isinstance(law, str) and law.startswith("file:") and not os.path.exists(law[5:]):
                raise ValueError(f"model {m['name']}: degree-law file {law[5:]} not found")
        if list(self.k_list) != sorted(self.k_list) or any(k < 1 for k in self.k_list):
            raise ValueError("k_list must be ascending positive integers")
        if any(r < 1 for r in self.radii):
            raise ValueError("radii must be >= 1")
        for m in self.models:
            if not set(m.get("radii", [])) <= set(self.radii):
                raise ValueError(f"model {m['name']}: radii must be a subset of the global radii")

    def thread_budget(self):
        env = os.environ.get(THREADS_ENV)
        return max(1, int(env)) if env else max(1, int(self.threads))

    def jobs(self):
        """(model index, n, seed index) triples in output order."""
        for i, m in enumerate(self.models):
            for n in m.get("n_ladder", self.n_ladder):
                for s in range(int(m.get("seeds", self.seeds))):
                    yield i, int(n), s

    def tolerances_for(self, model):
        tol = dict(self.tolerances)
        tol.update(model.get("tolerances", {}))
        return tol

    def columns(self):
        cols = ["model", "n", "seed", "lscc_frac", "second_frac", "kn_frac",
                "alpha1", "giant_edge_frac", "giant_half_degree_frac"]
        for k in self.k_list:
            cols += [f"z_frac_k{k}", f"nk_frac_k{k}", f"nk2_frac_k{k}", f"nk2_se_k{k}"]
        cols += [f"census_tv_r{r}" for r in self.radii]
        d = self.degree_max
        cols += [f"deg_frac_{l}_{m}" for l in range(d + 1) for m in range(d + 1)]
        cols += ["theory_zeta", "theory_scc_density", "theory_edge_density"]
        return cols


def model_law(model):
    """The degree law whose limit theory applies, or None."""
    if model["model"] == "er":
        lam = float(model["lambda"])
        return DegreeLaw.poisson(lam) if lam > 0 else None
    if model["model"] == "cm":
        law = model["law"]
        return DegreeLaw.parse(law) if isinstance(law, str) else DegreeLaw.explicit(law)
    return None


def _generator_spec(model, n, seed):
    if model["model"] == "er":
        return GeneratorSpec("er", n, seed, {"lam": float(model["lambda"])})
    if model["model"] == "cm":
        return GeneratorSpec("cm", n, seed, {"law": model["law"],
                                             "simple": bool(model.get("simple", False))})
    params = dict(model.get("params", {}))
    params["name"] = model["fixture"]
    return GeneratorSpec("fixture", n, seed, params)


@dataclass
class ResultRow:
    model: str
    n: int
    seed: int
    lscc_frac: float
    second_frac: float
    kn_frac: float
    alpha1: float
    giant_edge_frac: float
    giant_half_degree_frac: float = None
    z_frac: dict = field(default_factory=dict)
    nk_frac: dict = field(default_factory=dict)
    nk2_frac: dict = field(default_factory=dict)
    nk2_se: dict = field(default_factory=dict)
    census_tv: dict = field(default_factory=dict)
    deg_frac: dict = field(default_factory=dict)
    theory_zeta: float = None
    theory_scc_density: float = None
    theory_edge_density: float = None
    wall_time: float = 0.0

    def as_record(self, config):
        rec = {"model": self.model, "n": self.n, "seed": self.seed,
               "lscc_frac": self.lscc_frac, "second_frac": self.second_frac,
               "kn_frac": self.kn_frac, "alpha1": self.alpha1,
               "giant_edge_frac": self.giant_edge_frac,
               "giant_half_degree_frac": self.giant_half_degree_frac}
        for k in config.k_list:
            rec[f"z_frac_k{k}"] = self.z_frac.get(k)
            rec[f"nk_frac_k{k}"] = self.nk_frac.get(k)
            rec[f"nk2_frac_k{k}"] = self.nk2_frac.get(k)
            rec[f"nk2_se_k{k}"] = self.nk2_se.get(k)
        for r in config.radii:
            rec[f"census_tv_r{r}"] = self.census_tv.get(r)
        d = config.degree_max
        for l in range(d + 1):
            for m in range(d + 1):
                rec[f"deg_frac_{l}_{m}"] = self.deg_frac.get((l, m), 0.0)
        rec["theory_zeta"] = self.theory_zeta
        rec["theory_scc_density"] = self.theory_scc_density
        rec["theory_edge_density"] = self.theory_edge_density
        return rec

    @classmethod
    def from_record(cls, rec, config):
        num = lambda x: None if x in ("", None) else float(x)
        row = cls(rec["model"], int(rec["n"]), int(rec["seed"]),
                  num(rec["lscc_frac"]), num(rec["second_frac"]), num(rec["kn_frac"]),
                  num(rec["alpha1"]), num(rec["giant_edge_frac"]),
                  num(rec["giant_half_degree_frac"]))
        for k in config.k_list:
            row.z_frac[k] = num(rec[f"z_frac_k{k}"])
            row.nk_frac[k] = num(rec[f"nk_frac_k{k}"])
            row.nk2_frac[k] = num(rec[f"nk2_frac_k{k}"])
            row.nk2_se[k] = num(rec[f"nk2_se_k{k}"])
        for r in config.radii:
            if num(rec[f"census_tv_r{r}"]) is not None:
                row.census_tv[r] = num(rec[f"census_tv_r{r}"])
        d = config.degree_max
        for l in range(d + 1):
            for m in range(d + 1):
                row.deg_frac[(l, m)] = num(rec[f"deg_frac_{l}_{m}"])
        row.theory_zeta = num(rec["theory_zeta"])
        row.theory_scc_density = num(rec["theory_scc_density"])
        row.theory_edge_density = num(rec["theory_edge_density"])
        return row


def run_replicate(config, model_index, n, seed_index):
    """Generate one graph and compute its :class:`ResultRow`."""
    start = time.perf_counter()
    model = config.models[model_index]
    seed = derive_seed(config.base_seed, seed_index)
    g, _ = generate(_generator_spec(model, n, seed))
    scc = scc_decompose(g)
    gs = giant_stats(g, scc)
    nn = float(g.n)
    row = ResultRow(model["name"], n, seed_index,
                    gs.size_lscc / nn, gs.size_second / nn, gs.k_n / nn,
                    gs.alpha1, gs.giant_edge_count / nn, 0.5 * gs.giant_degree_sum / nn)
    for k in config.k_list:
        cc = condition_counters(g, scc, k, config.pair_budget, seed=derive_seed(seed, 3))
        row.z_frac[k] = cc.z_geq_k / nn
        row.nk_frac[k] = cc.n_k / nn ** 2
        row.nk2_frac[k] = cc.n_k_2 / nn ** 2
        row.nk2_se[k] = cc.n_k_2_se / nn ** 2
    d = config.degree_max
    census_in = gs.degree_census_in_giant
    row.deg_frac = {(l, m): census_in.get((l, m), 0) / nn
                    for l in range(d + 1) for m in range(d + 1)}
    law = model_law(model)
    if law is not None:
        lim = solve_limits(law)
        row.theory_zeta = lim.zeta
        row.theory_scc_density = lim.scc_density_treelike
        row.theory_edge_density = lim.giant_edge_density
        for r in model.get("radii", config.radii):
            emp = census(g, r, config.census_sample, seed=derive_seed(seed, 1))
            lim_census = simulate_limit_census(law, r, config.census_reps, derive_seed(seed, 2))
            row.census_tv[r] = tv_distance(emp, lim_census)
    row.wall_time = time.perf_counter() - start
    return row


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def read_rows(config, path=None):
    """
    Rows of a sweep file.  A trailing line without its newline (a write cut
    short) and rows with the wrong number of fields are dropped.
    """
    path = path or os.path.join(config.out_dir, "sweep.csv")
    if not os.path.exists(path):
        return []
    with open(path, newline="") as fh:
        text = fh.read()
    lines = text.split("\n")[:-1]
    if len(lines) < 2:
        return []
    cols = config.columns()
    if next(csv.reader(lines[:1])) != cols:
        raise ValueError(f"{path}: columns do not match the config; remove it or fix out_dir")
    rows = []
    for rec in csv.reader(lines[1:]):
        if len(rec) != len(cols):
            log.warning("dropping malformed row in %s", path)
            continue
        rows.append(ResultRow.from_record(dict(zip(cols, rec)), config))
    return rows


def _write_all(config, path, rows):
    order = {m["name"]: i for i, m in enumerate(config.models)}
    rows = sorted(rows, key=lambda r: (order[r.model], r.n, r.seed))
    cols = config.columns()
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            rec = row.as_record(config)
            w.writerow([_fmt(rec[c]) for c in cols])
    os.replace(tmp, path)
    return rows


def run_sweep(config, resume=False):
    """
    Run every (model, n, seed) job and return the rows in output order.

    Rows are appended to ``sweep.csv`` as jobs finish, then the file is
    rewritten sorted.  With ``resume`` the rows already on disk are kept and
    their jobs skipped.
    """
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "sweep.csv")
    cols = config.columns()
    done = {}
    if resume:
        for row in read_rows(config, path):
            done[(row.model, row.n, row.seed)] = row
        if os.path.exists(path):
            # drop any half-written tail before appending again
            _write_all(config, path, list(done.values()))
    else:
        for stale in (path, os.path.join(config.out_dir, "timings.csv")):
            if os.path.exists(stale):
                os.remove(stale)
    pending = [job for job in config.jobs()
               if (config.models[job[0]]["name"], job[1], job[2]) not in done]

    fresh = not os.path.exists(path)
    fh = open(path, "a", newline="")
    writer = csv.writer(fh, lineterminator="\n")
    if fresh:
        writer.writerow(cols)
        fh.flush()
    timings = open(os.path.join(config.out_dir, "timings.csv"), "a", newline="")

    def record(row):
        rec = row.as_record(config)
        writer.writerow([_fmt(rec[c]) for c in cols])
        fh.flush()
        timings.write(f"{row.model},{row.n},{row.seed},{row.wall_time:.3f}\n")
        timings.flush()
        done[(row.model, row.n, row.seed)] = row

    try:
        threads = config.thread_budget()
        if threads == 1 or len(pending) <= 1:
            for job in pending:
                try:
                    record(run_replicate(config, *job))
                except OSError as exc:
                    log.error("job %s failed: %s", job, exc)
        else:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                futures = {pool.submit(run_replicate, config, *job): job for job in pending}
                for fut in as_completed(futures):
                    try:
                        record(fut.result())
                    except OSError as exc:
                        log.error("job %s failed: %s", futures[fut], exc)
    finally:
        fh.close()
        timings.close()
    return _write_all(config, path, list(done.values()))


@dataclass(frozen=True)
class CriterionResult:
    model: str
    n: int
    criterion: str
    value: float
    target: float
    tolerance: float
    margin: float
    passed: bool
    note: str = ""

    def line(self):
        status = "PASS" if self.passed else ("SKIP" if self.note else "FAIL")
        if self.note:
            return f"{status} {self.model} n={self.n} {self.criterion}: {self.note}"
        return (f"{status} {self.model} n={self.n} {self.criterion}: value={self.value:.6g} "
                f"target={self.target:.6g} tol={self.tolerance:g} margin={self.margin:+.6g}")


@dataclass
class VerifyReport:
    results: list

    @property
    def passed(self):
        return all(r.passed or r.note for r in self.results)

    def lines(self):
        return [r.line() for r in self.results]


def _within(model, n, name, value, target, tol):
    margin = tol - abs(value - target)
    return CriterionResult(model, n, name, value, target, tol, margin, margin >= 0)


def _below(model, n, name, value, bound):
    margin = bound - value
    return CriterionResult(model, n, name, value, bound, bound, margin, margin > 0)


def _evaluate(config, model, n, rows):
    name = model["name"]
    tol = config.tolerances_for(model)
    out = []
    theory = rows[0].theory_zeta
    lscc = np.array([r.lscc_frac for r in rows])

    def needs_theory(crit):
        out.append(CriterionResult(name, n, crit, math.nan, math.nan, tol[crit], math.nan,
                                   False, note="skipped: no limit theory for this model"))

    for crit in ("lscc_mean", "lscc_each", "kn_mean", "alpha1_mean", "degree_mean",
                 "edge_mean", "census_tv_max"):
        if crit in tol and theory is None:
            needs_theory(crit)
    if theory is not None:
        if "lscc_mean" in tol:
            out.append(_within(name, n, "lscc_mean", lscc.mean(), theory, tol["lscc_mean"]))
        if "lscc_each" in tol:
            worst = max(lscc, key=lambda x: abs(x - theory))
            out.append(_within(name, n, "lscc_each", worst, theory, tol["lscc_each"]))
        if "kn_mean" in tol:
            out.append(_within(name, n, "kn_mean", np.mean([r.kn_frac for r in rows]),
                               rows[0].theory_scc_density, tol["kn_mean"]))
        if "alpha1_mean" in tol:
            out.append(_within(name, n, "alpha1_mean", np.mean([r.alpha1 for r in rows]),
                               rows[0].theory_scc_density, tol["alpha1_mean"]))
        if "edge_mean" in tol:
            out.append(_within(name, n, "edge_mean", np.mean([r.giant_edge_frac for r in rows]),
                               rows[0].theory_edge_density, tol["edge_mean"]))
        if "degree_mean" in tol:
            lim = solve_limits(model_law(model))
            worst = None
            for l in range(config.degree_max + 1):
                for m in range(config.degree_max + 1):
                    emp = float(np.mean([r.deg_frac.get((l, m), 0.0) for r in rows]))
                    res = _within(name, n, f"degree_mean({l},{m})", emp,
                                  giant_degree_mass(lim, l, m), tol["degree_mean"])
                    if worst is None or res.margin < worst.margin:
                        worst = res
            out.append(worst)
        if "census_tv_max" in tol:
            for r in model.get("radii", config.radii):
                out.append(_below(name, n, f"census_tv_max(r={r})",
                                  max(row.census_tv[r] for row in rows),
                                  tol["census_tv_max"]))
    if "lscc_floor" in tol:
        low = float(lscc.min())
        out.append(CriterionResult(name, n, "lscc_floor", low, tol["lscc_floor"],
                                   tol["lscc_floor"], low - tol["lscc_floor"],
                                   low >= tol["lscc_floor"]))
    if "second_max" in tol:
        out.append(_below(name, n, "second_max", max(r.second_frac for r in rows),
                          tol["second_max"]))
    if config.k_list and "nk_last" in tol:
        k = config.k_list[-1]
        out.append(_below(name, n, f"nk_last(k={k})",
                          float(np.mean([r.nk_frac[k] for r in rows])), tol["nk_last"]))
    if config.k_list and tol.get("nk_nonincreasing"):
        means = [float(np.mean([r.nk_frac[k] for r in rows])) for k in config.k_list]
        steps = [a - b for a, b in zip(means, means[1:])]
        worst = min(steps) if steps else 0.0
        out.append(CriterionResult(name, n, "nk_nonincreasing", worst, 0.0, 0.0, worst,
                                   worst >= 0))
    return out


def verify(config, rows=None):
    """
    Evaluate the tolerance table of ``config`` against sweep rows (running
    the sweep, with resume, when ``rows`` is not given).
    """
    if rows is None:
        rows = run_sweep(config, resume=True)
    results = []
    for model in config.models:
        for n in model.get("n_ladder", config.n_ladder):
            group = [r for r in rows if r.model == model["name"] and r.n == n]
            if group:
                results.extend(_evaluate(config, model, n, group))
    return VerifyReport(results)
