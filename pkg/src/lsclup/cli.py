"""Command-line front end: ``solve``, ``run``, ``replicate``, ``ideal-ml``, ``baseline``."""

import argparse
import contextlib
import csv
import json
import logging
import math
import sys

import numpy as np

from . import experiments, harness, rdt, replicate

EXIT_NO_CONVERGENCE = 2
EXIT_BOUNDARY = 3


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _rsc(text):
    """``1.55`` or ``10:1.56,12:1.55``."""
    if ":" in text:
        return {float(k): float(v) for k, v in (item.split(":") for item in text.split(","))}
    return float(text)


def _rplt(text):
    if text == "empirical":
        return "empirical"
    if text.startswith("fixed:"):
        return {"fixed": float(text[len("fixed:"):])}
    raise argparse.ArgumentTypeError("expected 'empirical' or 'fixed:F'")


def _out(path):
    return open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)


def cmd_solve(args):
    if args.r_norm is None:
        if args.rsc is None or args.rplt is None:
            print("solve: give --r-norm, or both --rsc and --rplt", file=sys.stderr)
            return 1
        args.r_norm = args.rsc * args.rplt
    rp = rdt.RegimeParams.from_snr_db(args.alpha, args.snr_db, args.rho, args.r_norm)
    code = 0
    try:
        points = rdt.solve_stationary(rp)
    except rdt.NoConvergence as e:
        print(f"no convergence: {e}", file=sys.stderr)
        print("[]")
        return EXIT_NO_CONVERGENCE
    except rdt.BoundaryHit as e:
        print(f"boundary: {e}", file=sys.stderr)
        points = e.points + e.boundary
        code = EXIT_BOUNDARY
    print(f"{'c1':>10} {'c2':>10} {'gamma':>10} {'nu':>10} {'gamma1':>10} {'p_err':>12} {'xi':>10}",
          file=sys.stderr)
    for p in points:
        print(f"{p.c1:10.4f} {p.c2:10.4f} {p.gamma:10.4f} {p.nu:10.4f} {p.gamma1:10.4f} "
              f"{p.p_err_pred:12.4e} {p.xi_value:10.6f}", file=sys.stderr)
    print(json.dumps([p.as_dict() for p in points], indent=2))
    return code


def _config_from_args(args):
    cfg = experiments.ExperimentConfig.from_json(args.config) if args.config else experiments.ExperimentConfig()
    phases = None
    if args.phases:
        with open(args.phases) as f:
            phases = json.load(f)
    return cfg.replace(
        alpha=args.alpha,
        snr_db_list=args.snr_db,
        n_list=args.n,
        trials=args.trials,
        rho=args.rho,
        r_sc=args.rsc,
        r_plt_mode=args.rplt,
        cq2_scale=args.cq2_scale,
        i_max=args.imax,
        delta_min=args.delta_min,
        restarts=args.restarts,
        phases=phases,
        base_seed=args.seed,
        out_path=args.out,
        workers=args.workers,
        variant=args.variant,
        with_polytope_baseline=True if args.with_polytope_baseline else None,
    )


def cmd_run(args):
    cfg = _config_from_args(args)
    rows = experiments.cmd_run(cfg)
    if not cfg.out_path:
        experiments.write_csv(rows, sys.stdout)
    return 0


def _print_cells(cells, stream):
    for c in cells:
        mark = "PASS" if c.ok else "FAIL"
        if c.kind == "sim" and not math.isnan(c.ci_lo):
            detail = f"CI=[{c.ci_lo:.4g}, {c.ci_hi:.4g}]"
        else:
            detail = f"rel_dev={c.rel_dev:.2e} tol={c.tol:g}"
        print(f"{mark} {c.table:5s} {c.row:16s} {c.column:13s} ref={c.reference:<11.5g} "
              f"got={c.computed:<11.5g} {detail}", file=stream)


def cmd_replicate(args):
    sim_kw = dict(base_seed=args.seed, workers=args.workers, restarts=args.restarts)
    theory_cells, sim_cells, rows = [], [], None
    table = args.table
    if table == "t3":
        theory_cells = replicate.t3_theory()
        if not args.theory_only:
            rows, sim_cells = replicate.t3_sim(n=args.n[0] if args.n else 2000,
                                               trials=args.trials or 10, **sim_kw)
    elif table in ("t4", "t5"):
        theory_cells = replicate.phase_theory(table)
    elif table in ("t6", "t7"):
        if not args.theory_only:
            rows, sim_cells = replicate.dimension_sweep(table, n_list=args.n,
                                                        trials=args.trials or 100, **sim_kw)
    elif table == "fig2":
        series = replicate.fig2_series(sim_n=args.n[0] if args.n else 500,
                                       sim_trials=args.trials or 20, base_seed=args.seed)
        with _out(args.out) as f:
            w = csv.DictWriter(f, fieldnames=["snr_db", "series", "p_err", "reference"], lineterminator="\n")
            w.writeheader()
            w.writerows(series)
        return 0

    cells = theory_cells + sim_cells
    _print_cells(cells, sys.stderr)
    with _out(args.out) as f:
        w = csv.DictWriter(f, fieldnames=list(replicate.CELL_FIELDS), lineterminator="\n")
        w.writeheader()
        for c in cells:
            w.writerow(c.as_dict())
    if rows and args.rows_out:
        experiments.write_csv(rows, args.rows_out)
    failed = [c for c in theory_cells if not c.ok]
    if failed:
        print(f"{len(failed)} theoretical cell(s) outside tolerance", file=sys.stderr)
        return 1
    return 0


def cmd_ideal_ml(args):
    with _out(args.out) as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["alpha", "snr_db", "p_err_ideal_ml"])
        for snr in args.snr_db:
            w.writerow([args.alpha, snr, rdt.ideal_ml_perr(args.alpha, snr)])
    return 0


BASELINE_FIELDS = ("snr_db", "n", "alpha", "trials", "r_plt_mean", "r_plt_std",
                   "p_err_plt", "p_err_plt_ci_lo", "p_err_plt_ci_hi", "iterations_mean", "converged")


def cmd_baseline(args):
    rows = []
    for snr in args.snr_db:
        for n in args.n:
            res = [
                harness.polytope_relax(harness.gen_instance(n, args.alpha, snr, args.rho, args.seed + k))
                for k in range(args.trials)
            ]
            errors = sum(r.bit_errors for r in res)
            lo, hi = experiments.wilson_interval(errors, n * args.trials)
            r_plt = np.array([r.r_plt_emp for r in res])
            rows.append(dict(
                snr_db=snr, n=n, alpha=args.alpha, trials=args.trials,
                r_plt_mean=float(r_plt.mean()), r_plt_std=float(r_plt.std(ddof=1)) if len(res) > 1 else 0.0,
                p_err_plt=errors / (n * args.trials), p_err_plt_ci_lo=lo, p_err_plt_ci_hi=hi,
                iterations_mean=float(np.mean([r.iterations for r in res])),
                converged=all(r.converged for r in res),
            ))
    with _out(args.out) as f:
        experiments.write_csv(rows, f, BASELINE_FIELDS)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lsclup", description="Large-scale CLuP detector experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve the stationary system for one regime")
    s.add_argument("--alpha", type=float, default=0.8)
    s.add_argument("--snr-db", type=float, required=True)
    s.add_argument("--rho", type=float, default=0.5)
    s.add_argument("--r-norm", type=float)
    s.add_argument("--rsc", type=float)
    s.add_argument("--rplt", type=float, help="fixed normalized polytope radius")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("run", help="Monte Carlo sweep over SNR and n")
    r.add_argument("--config")
    r.add_argument("--alpha", type=float)
    r.add_argument("--snr-db", type=_floats)
    r.add_argument("--n", type=_ints)
    r.add_argument("--trials", type=int)
    r.add_argument("--rho", type=float)
    r.add_argument("--rsc", type=_rsc)
    r.add_argument("--rplt", type=_rplt)
    r.add_argument("--cq2-scale", type=float)
    r.add_argument("--imax", type=int)
    r.add_argument("--delta-min", type=float)
    r.add_argument("--restarts", type=int)
    r.add_argument("--phases", help="JSON file with a list of per-phase overrides")
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out")
    r.add_argument("--with-polytope-baseline", action="store_true")
    r.add_argument("--variant", choices=["exact", "limit"])
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("replicate", help="reproduce a reference table or figure")
    t.add_argument("table", choices=["t3", "t4", "t5", "t6", "t7", "fig2"])
    t.add_argument("--n", type=_ints)
    t.add_argument("--trials", type=int)
    t.add_argument("--restarts", type=int, default=3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--theory-only", action="store_true")
    t.add_argument("--out")
    t.add_argument("--rows-out", help="also write the underlying sweep rows here")
    t.set_defaults(func=cmd_replicate)

    i = sub.add_parser("ideal-ml", help="ideal matched-filter error probability")
    i.add_argument("--alpha", type=float, default=0.8)
    i.add_argument("--snr-db", type=_floats, default=[])
    i.add_argument("--out")
    i.set_defaults(func=cmd_ideal_ml)

    b = sub.add_parser("baseline", help="polytope-relaxation-only sweep")
    b.add_argument("--alpha", type=float, default=0.8)
    b.add_argument("--snr-db", type=_floats, required=True)
    b.add_argument("--n", type=_ints, required=True)
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--rho", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_baseline)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
