"""Reproduce the reference tables and figure data, with per-cell deviations."""

import math
from dataclasses import dataclass

import numpy as np

from . import rdt, reference
from .experiments import ExperimentConfig, cmd_run

THEORY_RTOL = 5e-4
PERR_FORMULA_RTOL = 1e-2
# half-width of the 4-decimal rounding of the published radii
R_ROUNDING = 5e-5


@dataclass
class Cell:
    table: str
    row: str
    column: str
    reference: float
    computed: float
    tol: float
    kind: str = "theory"
    ci_lo: float = math.nan
    ci_hi: float = math.nan

    @property
    def rel_dev(self):
        return abs(self.computed - self.reference) / abs(self.reference)

    @property
    def ok(self):
        """Relative deviation within ``tol``, or for simulated cells with a CI, coverage."""
        if self.kind == "sim" and not math.isnan(self.ci_lo):
            return bool(self.ci_lo <= self.reference <= self.ci_hi)
        return bool(self.rel_dev <= self.tol)

    def as_dict(self):
        return {
            "table": self.table, "row": self.row, "column": self.column, "kind": self.kind,
            "reference": self.reference, "computed": self.computed,
            "rel_dev": self.rel_dev, "tol": self.tol,
            "ci_lo": self.ci_lo, "ci_hi": self.ci_hi, "ok": self.ok,
        }


CELL_FIELDS = ("table", "row", "column", "kind", "reference", "computed", "rel_dev", "tol",
               "ci_lo", "ci_hi", "ok")


def solve_row(snr_db, r_norm, alpha=reference.ALPHA, rho=reference.RHO):
    rp = rdt.RegimeParams.from_snr_db(alpha, snr_db, rho, r_norm)
    return rp, rdt.solve_stationary(rp)


def match_row(points, row):
    return rdt.closest_to(points, c2=row["c2"][0], c1=row["c1"][0])


def theory_cells(table, label, snr_db, row):
    """Compare the stationary point for ``row`` against its theory columns."""
    _, points = solve_row(snr_db, row["r_norm"][0])
    sp = match_row(points, row)
    return [
        Cell(table, label, "gamma1_sqrtn", row["gamma1_sqrtn"], sp.gamma1, THEORY_RTOL),
        Cell(table, label, "c2", row["c2"][0], sp.c2, THEORY_RTOL),
        Cell(table, label, "c1", row["c1"][0], sp.c1, THEORY_RTOL),
        Cell(table, label, "p_err", row["p_err"][0], sp.p_err_pred, THEORY_RTOL),
    ]


def rounding_consistency(snr_db, row, steps=41, alpha=reference.ALPHA, rho=reference.RHO):
    """Smallest achievable max relative deviation over radii that round to the published one.

    Scans ``r_norm`` across its rounding interval, tracking the matched root
    by continuation.  Returns ``(best_dev, best_r_norm)``.
    """
    r0 = row["r_norm"][0]
    rp, points = solve_row(snr_db, r0, alpha, rho)
    sp = match_row(points, row)
    z = np.array([sp.c1, sp.c2, sp.gamma])
    ref = np.array([row["gamma1_sqrtn"], row["c2"][0], row["c1"][0], row["p_err"][0]])
    settings = rdt.SolverSettings()
    best = (math.inf, r0)
    for r in np.linspace(r0 - R_ROUNDING, r0 + R_ROUNDING, steps):
        rpr = rdt.RegimeParams(rp.alpha, rp.sigma2, rp.rho, float(r))
        out = rdt.newton(rpr, z, settings)
        if out is None:
            continue
        sp = rdt._complete(rpr, out[0])
        vals = np.array([sp.gamma1, sp.c2, sp.c1, sp.p_err_pred])
        dev = float(np.max(np.abs(vals - ref) / np.abs(ref)))
        if dev < best[0]:
            best = (dev, float(r))
    return best


def t3_theory():
    cells = []
    for snr in reference.SNRS_DB:
        cells += theory_cells("t3", f"{snr}db", snr, reference.T3[snr])
    return cells


def perr_formula_cells():
    """``0.5 erfc(-nu/sqrt 2)`` at solved points against the published p_err (1 %)."""
    cells = []
    rows = [(f"t3/{s}db", s, reference.T3[s]) for s in reference.SNRS_DB]
    rows += [("t4/phase0", reference.T4["snr_db"], reference.T4["phases"][0])]
    rows += [("t5/phase0", reference.T5["snr_db"], reference.T5["phases"][0])]
    for label, snr, row in rows:
        rp, points = solve_row(snr, row["r_norm"][0])
        sp = match_row(points, row)
        computed = rdt.predict_perr(rdt.nu_of(rp, sp.c1, sp.c2))
        cells.append(Cell("perr", label, "p_err", row["p_err"][0], computed, PERR_FORMULA_RTOL))
    return cells


def phase_theory(table):
    ref = {"t4": reference.T4, "t5": reference.T5}[table]
    cells = []
    for k, row in enumerate(ref["phases"]):
        cells += theory_cells(table, f"{ref['snr_db']}db/phase{k}", ref["snr_db"], row)
    return cells


def schedule_config(snr_db, n_list, trials, **kw):
    """Experiment config that runs the reference phase schedule at ``snr_db``."""
    rows = reference.schedule_rows(snr_db)
    phases = [{"r_norm": r["r_norm"][0]} for r in rows]
    return ExperimentConfig(
        alpha=reference.ALPHA,
        snr_db_list=[snr_db],
        n_list=list(n_list),
        trials=trials,
        rho=reference.RHO,
        r_plt_mode={"fixed": reference.r_plt_theory(snr_db)},
        cq2_scale=reference.CQ2_SCALE,
        i_max=reference.I_MAX,
        phases=phases,
        **kw,
    )


def sim_cells(table, rows, ref_by_phase):
    """Simulated p_err against the reference; ``ok`` means the 95 % CI covers it."""
    cells = []
    for row in rows:
        key = (int(row["n"]), int(row["phase"]))
        if key not in ref_by_phase or row["status"] != "ok":
            continue
        cells.append(Cell(
            table, f"n={key[0]}/phase{key[1]}", "p_err", ref_by_phase[key], row["p_err_sim"],
            math.nan, kind="sim", ci_lo=row["p_err_sim_ci_lo"], ci_hi=row["p_err_sim_ci_hi"],
        ))
    return cells


def dimension_sweep(table, n_list=None, trials=100, **kw):
    ref = {"t6": reference.T6, "t7": reference.T7}[table]
    n_list = n_list or [n for n in ref["n"] if n <= 1000]
    cfg = schedule_config(ref["snr_db"], n_list, trials, **kw)
    rows = cmd_run(cfg)
    refs = {}
    for i, n in enumerate(ref["n"]):
        refs[(n, 0)] = ref["phase0"][i]
        refs[(n, 1)] = ref["phase1"][i]
    return rows, sim_cells(table, rows, refs)


def t3_sim(snrs=reference.SNRS_DB, n=2000, trials=10, **kw):
    rows_all, cells = [], []
    for snr in snrs:
        cfg = schedule_config(snr, [n], trials, **kw)
        rows = cmd_run(cfg)
        rows_all += rows
        last = rows[-1]
        ref = reference.T3[snr]
        if last["status"] != "ok":
            continue
        for col, key in (("c2", "c2_sim_mean"), ("c1", "c1_sim_mean"), ("r_norm", "r_over_sqrtn_sim_mean")):
            cells.append(Cell("t3", f"{snr}db", col, ref[col][1], last[key], 1e-2, kind="sim"))
        cells += sim_cells("t3", [last], {(n, last["phase"]): ref["p_err"][1]})
    return rows_all, cells


def fig2_series(sim_n=500, sim_trials=20, base_seed=0):
    """Figure-data rows ``(snr_db, series, p_err, reference)`` for the four curves."""
    from . import harness

    out = []
    for snr in reference.SNRS_DB:
        r_plt = reference.r_plt_theory(snr)
        for series, r_sc, refv in (
            ("clup_theory", reference.T1_RSC[snr], reference.T1_PERR[snr]),
            ("clup_theory_rsc_1.55", 1.55, math.nan),
        ):
            try:
                pts = solve_row(snr, r_sc * r_plt)[1]
                val = pts[0].p_err_pred
            except (rdt.NoConvergence, rdt.BoundaryHit):
                val = math.nan
            out.append({"snr_db": snr, "series": series, "p_err": val, "reference": refv})
        errors = 0
        for k in range(sim_trials):
            inst = harness.gen_instance(sim_n, reference.ALPHA, snr, reference.RHO, base_seed + k)
            errors += harness.polytope_relax(inst).bit_errors
        out.append({"snr_db": snr, "series": "polytope_sim", "p_err": errors / (sim_n * sim_trials),
                    "reference": math.nan})
        out.append({"snr_db": snr, "series": "ideal_ml", "p_err": rdt.ideal_ml_perr(reference.ALPHA, snr),
                    "reference": math.nan})
    return out
