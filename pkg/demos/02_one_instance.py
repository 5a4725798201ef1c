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
# # Detecting one instance
#
# We draw a 800 x 1000 system at 10 dB, run the two-phase contraction from a
# random sign vector and compare it with the box relaxation.

# %%
import numpy as np

from lsclup import engine, harness, rdt

n, alpha, snr_db = 1000, 0.8, 10
inst = harness.gen_instance(n, alpha, snr_db, rho=0.5, seed=7)
inst.A.shape, inst.sigma

# %% [markdown]
# ## Baseline: least squares over the box
#
# Its residual sets the radius scale for the detector.

# %%
base = harness.polytope_relax(inst)
print(f"relaxation residual/sqrt(n) = {base.r_plt_emp:.4f}, bit errors = {base.bit_errors}")

# %% [markdown]
# ## Two phases
#
# Phase 0 uses a tighter radius that pulls the iterate into a good region.
# Phase 1 then uses the larger radius.  Each phase is restarted three times
# from the discretized output of the previous run.

# %%
phases = []
for r_norm in (0.2079, 0.2702):
    rp = rdt.RegimeParams.from_snr_db(alpha, snr_db, 0.5, r_norm)
    phases.append(rdt.run_params_from(rdt.solve_stationary(rp)[0], rp, n))

out = engine.run(harness.random_start(n, 7), engine.PhaseSchedule(phases, restarts_per_phase=3),
                 gram_op=inst.gram_op)
for seg in out.trace.segments:
    errs = int(np.sum(seg.x_clup != inst.x_sol))
    print(f"phase {seg.phase} restart {seg.restart}: {seg.iterations} iterations, {errs} bit errors")

# %% [markdown]
# Every iteration costs one product with the precomputed Gram matrix.

# %%
print(out.trace.matvecs, len(out.trace.delta))

# %% [markdown]
# The residual trace should settle near the phase radius.

# %%
res = np.array(out.trace.residual) / np.sqrt(n)
print(res[[0, 299, 599, 899, 1199, 1499, -1]].round(4))
