"""Monte Carlo sweeps over SNR and dimension.

A sweep row is one ``(snr_db, n, phase)`` combination.  For every row the
stationary system is solved once, the resulting contraction parameters are
shared by all trials, and trial ``k`` uses seed ``base_seed + k``.  Trial
results are collected in index order before summation, so the output does not
depend on the number of workers.
"""

import csv
import dataclasses
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import engine, harness, rdt

log = logging.getLogger(__name__)

SWEEP_FIELDS = (
    "snr_db", "n", "alpha", "rho", "r_sc", "r_plt_used",
    "p_err_sim", "p_err_sim_ci_lo", "p_err_sim_ci_hi",
    "p_err_theory", "p_err_ideal_ml", "p_err_plt_sim",
    "c2_sim_mean", "c1_sim_mean", "r_over_sqrtn_sim_mean",
    "c2_theory", "c1_theory", "gamma1_sqrtn_theory",
    "iters_mean", "bits_total", "errors_total", "wall_seconds",
    "phase", "status",
)

PHASE_KEYS = ("r_sc", "r_norm", "gamma1_hat_scaled", "c2_hat", "i_max")

# instances measured to set r_plt when r_plt_mode is "empirical"
RPLT_PILOT = 5


@dataclass
class ExperimentConfig:
    alpha: float = 0.8
    snr_db_list: list = field(default_factory=lambda: [10.0])
    n_list: list = field(default_factory=lambda: [1000])
    trials: int = 100
    rho: float = 0.5
    # float, or {snr_db: float}
    r_sc: object = 1.55
    # "empirical", {"fixed": float}, or {"fixed": {snr_db: float}}
    r_plt_mode: object = "empirical"
    cq2_scale: float = 5.0
    i_max: int = 300
    delta_min: float = 0.0
    restarts: int = 3
    phases: list = None
    base_seed: int = 0
    out_path: str = None
    workers: int = 1
    variant: str = "limit"
    with_polytope_baseline: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.phases is not None:
            if not self.phases:
                raise ValueError("phases, when given, must be nonempty")
            for p in self.phases:
                bad = set(p) - set(PHASE_KEYS)
                if bad:
                    raise ValueError(f"unknown phase keys {sorted(bad)}; allowed {PHASE_KEYS}")

    @classmethod
    def from_json(cls, path):
        with open(path) as f:
            data = json.load(f)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        bad = set(data) - names
        if bad:
            raise ValueError(f"unknown config keys {sorted(bad)}")
        return cls(**data)

    def replace(self, **overrides):
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def r_sc_for(self, snr_db):
        return _lookup(self.r_sc, snr_db, "r_sc")

    def fixed_r_plt_for(self, snr_db):
        """Fixed normalized polytope radius, or ``None`` in empirical mode."""
        mode = self.r_plt_mode
        if mode == "empirical":
            return None
        if isinstance(mode, dict) and "fixed" in mode:
            return _lookup(mode["fixed"], snr_db, "r_plt")
        if isinstance(mode, (int, float)):
            return float(mode)
        raise ValueError(f"bad r_plt_mode {mode!r}")


def _lookup(value, snr_db, what):
    if isinstance(value, dict):
        for k, v in value.items():
            if float(k) == float(snr_db):
                return float(v)
        raise KeyError(f"no {what} given for snr_db={snr_db}")
    return float(value)


def wilson_interval(errors, total, alpha=0.05):
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(errors, total, alpha=alpha, method="wilson")
    return float(lo), float(hi)


@dataclass
class PlannedPhase:
    regime: rdt.RegimeParams
    point: object  # rdt.StationaryPoint or None when fully overridden
    params: engine.RunParams
    r_sc: float


def plan_phases(cfg, snr_db, n, r_plt):
    """Solve the stationary system for every phase of ``cfg`` at one ``(snr_db, n)``."""
    overrides = cfg.phases or [{}]
    planned = []
    for override in overrides:
        if override.get("r_norm") is not None:
            r_norm = float(override["r_norm"])
            r_sc = r_norm / r_plt
        else:
            r_sc = float(override["r_sc"]) if override.get("r_sc") is not None else cfg.r_sc_for(snr_db)
            r_norm = r_sc * r_plt
        rp = rdt.RegimeParams.from_snr_db(cfg.alpha, snr_db, cfg.rho, r_norm)
        g1 = override.get("gamma1_hat_scaled")
        c2 = override.get("c2_hat")
        try:
            points = rdt.solve_stationary(rp)
        except rdt.BoundaryHit as e:
            if not e.points:
                raise
            points = e.points
        except rdt.NoConvergence:
            if g1 is None or c2 is None:
                raise
            points = []
        if points:
            target = {k: v for k, v in (("gamma1", g1), ("c2", c2)) if v is not None}
            sp = rdt.closest_to(points, **target) if target else points[0]
        else:
            sp = None
        params = engine.RunParams(
            gamma1_hat=(g1 if g1 is not None else sp.gamma1) / math.sqrt(n),
            c2_hat=c2 if c2 is not None else sp.c2,
            r=r_norm * math.sqrt(n),
            cq2=cfg.cq2_scale * math.sqrt(n),
            i_max=int(override.get("i_max") or cfg.i_max),
            delta_min=cfg.delta_min,
            variant=cfg.variant,
        )
        planned.append(PlannedPhase(rp, sp, params, r_sc))
    return planned


def empirical_r_plt(cfg, snr_db, n):
    vals = [
        harness.polytope_relax(
            harness.gen_instance(n, cfg.alpha, snr_db, cfg.rho, cfg.base_seed + k)
        ).r_plt_emp
        for k in range(min(cfg.trials, RPLT_PILOT))
    ]
    return float(np.mean(vals))


def run_trial(job):
    """One Monte Carlo trial; returns per-phase TrialRecords and baseline errors."""
    n, alpha, snr_db, rho, seed, params, restarts, with_baseline = job
    inst = harness.gen_instance(n, alpha, snr_db, rho, seed)
    x0 = harness.random_start(n, seed)
    sched = engine.PhaseSchedule(params, restarts_per_phase=restarts)
    gram_op = inst.gram_op if any(p.variant == "limit" for p in params) else None
    out = engine.run(x0, sched, inst.A, inst.y, gram_op=gram_op)
    records = []
    for k in range(len(params)):
        segs = [s for s in out.trace.segments if s.phase == k]
        last = segs[-1]
        records.append(
            harness.score(last.x_clup, inst, last.x_final, sum(s.iterations for s in segs))
        )
    plt_errors = None
    if with_baseline:
        plt_errors = harness.polytope_relax(inst).bit_errors
    return records, plt_errors


def _map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(j) for j in jobs]


def _blank_row(cfg, snr_db, n):
    row = dict.fromkeys(SWEEP_FIELDS, math.nan)
    row.update(snr_db=float(snr_db), n=int(n), alpha=cfg.alpha, rho=cfg.rho,
               p_err_ideal_ml=rdt.ideal_ml_perr(cfg.alpha, snr_db), status="ok")
    return row


def sweep_rows(cfg, snr_db, n):
    """All phase rows for one ``(snr_db, n)``; failures go in the ``status`` field."""
    t0 = time.perf_counter()
    try:
        fixed = cfg.fixed_r_plt_for(snr_db)
        r_plt = fixed if fixed is not None else empirical_r_plt(cfg, snr_db, n)
        planned = plan_phases(cfg, snr_db, n, r_plt)
    except (rdt.NoConvergence, rdt.BoundaryHit, rdt.RDTDomainError, KeyError, ValueError) as e:
        row = _blank_row(cfg, snr_db, n)
        row.update(phase=0, status=f"error: {type(e).__name__}: {e}", wall_seconds=time.perf_counter() - t0)
        return [row]

    params = tuple(p.params for p in planned)
    jobs = [
        (n, cfg.alpha, snr_db, cfg.rho, cfg.base_seed + k, params, cfg.restarts, cfg.with_polytope_baseline)
        for k in range(cfg.trials)
    ]
    try:
        results = _map(run_trial, jobs, cfg.workers)
    except engine.DenominatorError as e:
        row = _blank_row(cfg, snr_db, n)
        row.update(phase=0, status=f"error: DenominatorError: {e}", wall_seconds=time.perf_counter() - t0)
        return [row]

    bits = n * cfg.trials
    plt_sim = math.nan
    if cfg.with_polytope_baseline:
        plt_sim = sum(r[1] for r in results) / bits
    wall = time.perf_counter() - t0
    rows = []
    for k, ph in enumerate(planned):
        recs = [r[0][k] for r in results]
        errors = sum(r.bit_errors for r in recs)
        lo, hi = wilson_interval(errors, bits)
        row = _blank_row(cfg, snr_db, n)
        sp = ph.point
        row.update(
            r_sc=ph.r_sc,
            r_plt_used=r_plt,
            p_err_sim=errors / bits,
            p_err_sim_ci_lo=lo,
            p_err_sim_ci_hi=hi,
            p_err_theory=sp.p_err_pred if sp else math.nan,
            p_err_plt_sim=plt_sim,
            c2_sim_mean=float(np.mean([r.c2 for r in recs])),
            c1_sim_mean=float(np.mean([r.c1 for r in recs])),
            r_over_sqrtn_sim_mean=float(np.mean([r.residual for r in recs])),
            c2_theory=sp.c2 if sp else math.nan,
            c1_theory=sp.c1 if sp else math.nan,
            gamma1_sqrtn_theory=sp.gamma1 if sp else math.nan,
            iters_mean=float(np.mean([r.iterations for r in recs])),
            bits_total=bits,
            errors_total=errors,
            wall_seconds=wall,
            phase=k,
        )
        rows.append(row)
    return rows


def write_csv(rows, path_or_file, fields=SWEEP_FIELDS):
    def _w(f):
        w = csv.DictWriter(f, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in fields})

    if hasattr(path_or_file, "write"):
        _w(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as f:
            _w(f)


def _json_row(row):
    # NaN is not valid JSON; missing values become null
    return {k: None if isinstance(v, float) and math.isnan(v) else v for k, v in row.items()}


def cmd_run(cfg):
    """Run the full sweep; write CSV (and a JSON summary next to it) if ``out_path`` is set."""
    rows = []
    for snr in cfg.snr_db_list:
        for n in cfg.n_list:
            log.info("row snr_db=%s n=%s", snr, n)
            rows.extend(sweep_rows(cfg, snr, n))
    if cfg.out_path:
        out = Path(cfg.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_csv(rows, out)
        summary = {"config": dataclasses.asdict(cfg), "rows": [_json_row(r) for r in rows]}
        out.with_suffix(".json").write_text(json.dumps(summary, indent=2, default=float, allow_nan=False))
    return rows
