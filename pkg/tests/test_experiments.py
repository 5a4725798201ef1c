import csv
import io
import json
import math

import pytest

from lsclup import experiments as X
from lsclup import harness, rdt


def small(**kw):
    base = dict(snr_db_list=[10.0], n_list=[60], trials=6, i_max=40, restarts=1,
                r_plt_mode={"fixed": 0.1732}, r_sc=1.56)
    base.update(kw)
    return X.ExperimentConfig(**base)


def wilson_by_hand(k, n, z=1.959963984540054):
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    return centre - half, centre + half


@pytest.mark.parametrize("k,n", [(0, 1000), (3, 1000), (44, 10000), (500, 1000)])
def test_wilson_interval(k, n):
    lo, hi = X.wilson_interval(k, n)
    elo, ehi = wilson_by_hand(k, n)
    assert lo == pytest.approx(elo, abs=1e-12)
    assert hi == pytest.approx(ehi, abs=1e-12)


def test_config_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        X.ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        X.ExperimentConfig(phases=[])
    with pytest.raises(ValueError):
        X.ExperimentConfig(phases=[{"radius": 1}])
    with pytest.raises(ValueError):
        X.ExperimentConfig.from_dict({"alpha": 0.8, "bogus": 1})
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"alpha": 0.7, "snr_db_list": [9], "r_sc": {"9": 1.35}}))
    cfg = X.ExperimentConfig.from_json(p)
    assert cfg.alpha == 0.7 and cfg.r_sc_for(9) == 1.35
    assert cfg.replace(alpha=None, trials=5).alpha == 0.7
    with pytest.raises(KeyError):
        cfg.r_sc_for(10)


def test_r_plt_modes():
    assert small().fixed_r_plt_for(10) == 0.1732
    assert small(r_plt_mode="empirical").fixed_r_plt_for(10) is None
    assert small(r_plt_mode={"fixed": {10: 0.17}}).fixed_r_plt_for(10) == 0.17


def test_row_accounting():
    rows = X.cmd_run(small())
    assert len(rows) == 1
    r = rows[0]
    assert r["status"] == "ok"
    assert r["bits_total"] == 60 * 6
    assert r["p_err_sim"] == r["errors_total"] / r["bits_total"]
    assert r["p_err_sim_ci_lo"] <= r["p_err_sim"] <= r["p_err_sim_ci_hi"]
    assert r["p_err_ideal_ml"] == rdt.ideal_ml_perr(0.8, 10)
    assert r["r_over_sqrtn_sim_mean"] > 0


def test_errors_total_is_sum_of_trials():
    cfg = small()
    planned = X.plan_phases(cfg, 10.0, 60, 0.1732)
    params = tuple(p.params for p in planned)
    total = 0
    for k in range(cfg.trials):
        recs, _ = X.run_trial((60, 0.8, 10.0, 0.5, k, params, 1, False))
        total += recs[0].bit_errors
    assert X.cmd_run(cfg)[0]["errors_total"] == total


def test_theory_column_is_predict_perr():
    r = X.cmd_run(small())[0]
    rp = rdt.RegimeParams.from_snr_db(0.8, 10, 0.5, 1.56 * 0.1732)
    sp = rdt.solve_stationary(rp)[0]
    assert r["p_err_theory"] == rdt.predict_perr(sp.nu)
    assert r["c1_theory"] == sp.c1


def test_random_guess_without_iterations():
    r = X.cmd_run(small(n_list=[2000], trials=1, i_max=0))[0]
    assert r["p_err_sim"] == pytest.approx(0.5, abs=0.04)


def _csv_without_wall(rows):
    buf = io.StringIO()
    X.write_csv([dict(r, wall_seconds=0) for r in rows], buf)
    return buf.getvalue()


def test_worker_count_does_not_change_results():
    one = X.cmd_run(small(workers=1))
    two = X.cmd_run(small(workers=2))
    assert _csv_without_wall(one) == _csv_without_wall(two)


def test_phase_overrides():
    cfg = small(phases=[{"r_norm": 0.2079}, {"r_norm": 0.2702, "i_max": 10}])
    rows = X.cmd_run(cfg)
    assert [r["phase"] for r in rows] == [0, 1]
    assert rows[0]["c2_theory"] == pytest.approx(0.8937, rel=5e-4)
    assert rows[1]["r_sc"] == pytest.approx(0.2702 / 0.1732)
    cfg = small(phases=[{"r_sc": 1.2, "gamma1_hat_scaled": 0.9, "c2_hat": 0.95}])
    planned = X.plan_phases(cfg, 10.0, 100, 0.2)
    assert planned[0].params.gamma1_hat == pytest.approx(0.09)
    assert planned[0].params.c2_hat == 0.95
    assert planned[0].params.r == pytest.approx(1.2 * 0.2 * 10)


def test_error_row_recorded():
    rows = X.cmd_run(small(snr_db_list=[10.0, 11.0], r_sc={10.0: 1.56}))
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("error: KeyError")


def test_empirical_r_plt_pilot():
    cfg = small(r_plt_mode="empirical", trials=3)
    r = X.cmd_run(cfg)[0]
    expect = sum(harness.polytope_relax(harness.gen_instance(60, 0.8, 10, 0.5, k)).r_plt_emp for k in range(3)) / 3
    assert r["r_plt_used"] == pytest.approx(expect)


def test_csv_and_json_output(tmp_path):
    out = tmp_path / "sweep.csv"
    X.cmd_run(small(out_path=str(out), with_polytope_baseline=True))
    with open(out) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == X.SWEEP_FIELDS
    assert len(rows) == 2
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["rows"][0]["p_err_plt_sim"] is not None
    assert summary["config"]["trials"] == 6
