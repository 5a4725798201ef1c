# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
# ---

# %% [markdown]
# # A small Monte Carlo sweep
#
# `ExperimentConfig` describes a sweep.  Every `(snr, n)` pair produces one
# row per phase, with a 95% Wilson interval on the bit error rate.  Trial `k`
# uses seed `base_seed + k`, so the numbers do not depend on `workers`.

# %%
import sys

from lsclup import experiments, reference

cfg = experiments.ExperimentConfig(
    snr_db_list=[10.0],
    n_list=[200, 400],
    trials=20,
    r_plt_mode={"fixed": reference.r_plt_theory(10)},
    phases=[{"r_norm": 0.2079}, {"r_norm": 0.2702}],
    restarts=3,
)
rows = experiments.cmd_run(cfg)

# %%
for r in rows:
    print(f"n={r['n']:4d} phase={r['phase']}  p_err={r['p_err_sim']:.4f} "
          f"[{r['p_err_sim_ci_lo']:.4f}, {r['p_err_sim_ci_hi']:.4f}]  theory={r['p_err_theory']:.4f}")

# %% [markdown]
# The same rows as CSV, ready for plotting elsewhere.

# %%
experiments.write_csv(rows, sys.stdout)
