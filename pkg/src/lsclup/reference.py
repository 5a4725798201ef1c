"""Published reference values used by the replication commands.

All values are for ``alpha = 0.8`` and ``rho = 0.5``; SNR is ``1/sigma^2`` in dB.
Each table is keyed as in the ``replicate`` subcommand.  Theoretical values are
predictions for ``n -> inf``; simulated values were obtained at the ``n``
noted alongside.
"""

ALPHA = 0.8
RHO = 0.5
SNRS_DB = (8, 9, 10, 11, 12, 13, 14)

# worst-case-optimal radius multiples and the resulting error probabilities
T1_RSC = {8: 1.10, 9: 1.41, 10: 1.56, 11: 1.611, 12: 1.627, 13: 1.632, 14: 1.633}
T1_PERR = {8: 6.98e-02, 9: 1.70e-02, 10: 3.69e-03, 11: 9.09e-04, 12: 1.97e-04, 13: 3.29e-05, 14: 3.70e-06}

# radius multiples actually used in simulation, with their theoretical error probabilities
T2_RSC = {8: 1.10, 9: 1.35, 10: 1.56, 11: 1.5, 12: 1.55, 13: 1.55, 14: 1.55}
T2_PERR = {8: 6.98e-02, 9: 1.79e-02, 10: 3.69e-03, 11: 1.19e-03, 12: 2.46e-04, 13: 4.35e-05, 14: 5.11e-06}

# t3: per-SNR (theory, simulated) pairs at n = 2000, i_max = 300, cq2 = 5 sqrt(n).
# gamma1_sqrtn has no simulated counterpart.
T3 = {
    8: dict(gamma1_sqrtn=1.8022, c2=(0.8325, 0.8335), c1=(0.8120, 0.8062), p_err=(6.9878e-02, 7.3373e-02), r_norm=(0.2401, 0.2401)),
    9: dict(gamma1_sqrtn=0.7916, c2=(0.9432, 0.9435), c1=(0.9437, 0.9398), p_err=(1.7933e-02, 2.0148e-02), r_norm=(0.2624, 0.2620)),
    10: dict(gamma1_sqrtn=0.4657, c2=(0.9910, 0.9912), c1=(0.9898, 0.9896), p_err=(3.6882e-03, 3.8263e-03), r_norm=(0.2702, 0.2701)),
    11: dict(gamma1_sqrtn=0.5816, c2=(0.9815, 0.9816), c1=(0.9871, 0.9872), p_err=(1.1872e-03, 1.1693e-03), r_norm=(0.2316, 0.2315)),
    12: dict(gamma1_sqrtn=0.5119, c2=(0.9905, 0.9905), c1=(0.9938, 0.9939), p_err=(2.4610e-04, 2.4485e-04), r_norm=(0.2132, 0.2129)),
    13: dict(gamma1_sqrtn=0.5243, c2=(0.9913, 0.9913), c1=(0.9947, 0.9948), p_err=(4.3485e-05, 3.8916e-05), r_norm=(0.1901, 0.1900)),
    14: dict(gamma1_sqrtn=0.5348, c2=(0.9920, 0.9920), c1=(0.9954, 0.9954), p_err=(5.1122e-06, 6.1052e-06), r_norm=(0.1694, 0.1693)),
}

# t4 / t5: two-phase ("rephasing") schedules at 9 dB and 10 dB, n = 2000.
# Phase 1 coincides with the t3 row of the same SNR.
T4 = {
    "snr_db": 9,
    "phases": [
        dict(gamma1_sqrtn=1.9024, c2=(0.8343, 0.8353), c1=(0.8586, 0.8588), p_err=(3.4801e-02, 3.5162e-02), r_norm=(0.2138, 0.2135)),
        dict(gamma1_sqrtn=0.7916, c2=(0.9432, 0.9435), c1=(0.9437, 0.9398), p_err=(1.7933e-02, 2.0148e-02), r_norm=(0.2624, 0.2620)),
    ],
}
T5 = {
    "snr_db": 10,
    "phases": [
        dict(gamma1_sqrtn=1.2949, c2=(0.8937, 0.8943), c1=(0.9218, 0.9223), p_err=(1.0500e-02, 1.0354e-02), r_norm=(0.2079, 0.2079)),
        dict(gamma1_sqrtn=0.4657, c2=(0.9910, 0.9912), c1=(0.9898, 0.9896), p_err=(3.6882e-03, 3.8263e-03), r_norm=(0.2702, 0.2701)),
    ],
}

# t6 / t7: simulated error probability versus n under the t4 / t5 schedules;
# the "limit" entry is the theoretical n -> inf value.
T6 = {
    "snr_db": 9,
    "n": (300, 500, 1000, 2000, 4000),
    "phase0": (0.0429, 0.0382, 0.0350, 0.0351, 0.0346),
    "phase1": (0.0355, 0.0292, 0.0226, 0.0201, 0.0185),
    "limit": (0.0348, 0.0179),
}
T7 = {
    "snr_db": 10,
    "n": (400, 500, 1000, 2000),
    "phase0": (0.0122, 0.0116, 0.0106, 0.0104),
    "phase1": (6.50e-3, 5.47e-3, 4.44e-3, 3.83e-3),
    "limit": (0.0105, 3.69e-3),
}

# suggested contraction constant scale: cq2 = CQ2_SCALE * sqrt(n)
CQ2_SCALE = 5.0
I_MAX = 300


def r_plt_theory(snr_db):
    """Normalized polytope radius implied by the simulated radius multiple and the t3 radius."""
    return T3[snr_db]["r_norm"][0] / T2_RSC[snr_db]


def schedule_rows(snr_db):
    """Theory rows defining the phase schedule used in simulation at ``snr_db``."""
    if snr_db == T4["snr_db"]:
        return T4["phases"]
    if snr_db == T5["snr_db"]:
        return T5["phases"]
    return [T3[snr_db]]
