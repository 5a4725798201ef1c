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
# # Stationary points and predicted error rates
#
# The contraction needs two constants, the multiplier `gamma1` and the
# squared norm `c2`.  Both come from a root of a three-equation stationary
# system.  Here we solve it at 10 dB for two radii.  The smaller radius gives
# a "phase 0" point and the larger one gives the point used in the final phase.

# %%
import numpy as np

from lsclup import rdt, reference

alpha, snr_db = 0.8, 10

for r_norm in (0.2079, 0.2702):
    rp = rdt.RegimeParams.from_snr_db(alpha, snr_db, rho=0.5, r_norm=r_norm)
    for sp in rdt.solve_stationary(rp):
        print(f"r/sqrt(n)={r_norm}  c1={sp.c1:.4f}  c2={sp.c2:.4f}  "
              f"gamma1*sqrt(n)={sp.gamma1:.4f}  p_err={sp.p_err_pred:.3e}")

# %% [markdown]
# At a root the objective collapses to `-sqrt(c2)`, because the bracket that
# multiplies `gamma1` vanishes.  That is a cheap sanity check on any solution.

# %%
sp = rdt.solve_stationary(rp)[0]
print(sp.xi_value + np.sqrt(sp.c2))

# %% [markdown]
# ## How the prediction moves with SNR
#
# The ideal matched-filter bound is a single-channel formula.  Next to it we
# print the predicted error rate at the radius used in simulation.  Both the
# relaxation radius and its multiple change with SNR, so they are read from
# the bundled reference values.  A multiple that is too large at low SNR has
# no admissible root at all.

# %%
for snr in range(8, 15):
    r_norm = reference.T2_RSC[snr] * reference.r_plt_theory(snr)
    rp = rdt.RegimeParams.from_snr_db(alpha, snr, 0.5, r_norm)
    try:
        top = rdt.solve_stationary(rp)[0].p_err_pred
    except (rdt.NoConvergence, rdt.BoundaryHit):
        top = float("nan")
    print(f"{snr:2d} dB  predicted {top:.3e}   ideal {rdt.ideal_ml_perr(alpha, snr):.3e}")

# %% [markdown]
# ## Turning a point into run parameters
#
# Solutions live on an n-independent scale.  `run_params_from` unnormalizes
# them for a concrete dimension.

# %%
rp = rdt.RegimeParams.from_snr_db(alpha, 10, 0.5, 0.2702)
params = rdt.run_params_from(rdt.solve_stationary(rp)[0], rp, n=2000)
params
