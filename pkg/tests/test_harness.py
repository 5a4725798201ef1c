import math

import numpy as np
import pytest
from scipy.optimize import lsq_linear

from lsclup import harness as H
from lsclup.reference import SNRS_DB


def test_instance_shape_and_signal():
    inst = H.gen_instance(101, 0.8, 10, rho=0.3, seed=5)
    assert (inst.m, inst.n) == (81, 101)
    assert inst.sigma == pytest.approx(math.sqrt(0.1))
    assert np.linalg.norm(inst.x_sol) == pytest.approx(1.0)
    assert int(np.sum(inst.x_sol > 0)) == 30
    assert np.all(np.abs(np.abs(inst.x_sol) * math.sqrt(101) - 1) < 1e-15)


def test_instance_reproducible():
    a = H.gen_instance(50, 0.8, 9, seed=11)
    b = H.gen_instance(50, 0.8, 9, seed=11)
    c = H.gen_instance(50, 0.8, 9, seed=12)
    np.testing.assert_array_equal(a.A, b.A)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.A, c.A)


def test_all_positive():
    assert np.all(H.gen_instance(20, 0.8, 10, rho=1.0).x_sol > 0)


def test_instance_validation():
    for kw in (dict(n=1), dict(alpha=0), dict(rho=-0.1)):
        args = dict(n=10, alpha=0.8, snr_db=10, rho=0.5) | kw
        with pytest.raises(ValueError):
            H.gen_instance(**args)


def test_noise_moment():
    vals = []
    for k in range(200):
        inst = H.gen_instance(500, 0.8, 10, seed=k)
        r = inst.y - inst.A @ inst.x_sol
        vals.append(r @ r / inst.m)
    assert np.mean(vals) == pytest.approx(0.1, rel=0.05)


def test_random_start_streams():
    a = H.random_start(64, 3)
    assert np.all(np.abs(a) == 1 / 8)
    np.testing.assert_array_equal(a, H.random_start(64, 3))
    assert not np.array_equal(a, H.random_start(64, 3, index=1))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_polytope_matches_scipy(seed):
    inst = H.gen_instance(120, 0.8, 10, seed=seed)
    b = 1 / math.sqrt(inst.n)
    ref = lsq_linear(inst.A, inst.y, bounds=(-b, b), tol=1e-12)
    res = H.polytope_relax(inst, tol=1e-10, max_iters=200000)
    assert res.converged
    assert res.r_plt_emp == pytest.approx(np.linalg.norm(inst.y - inst.A @ ref.x) / math.sqrt(inst.n), rel=1e-9)
    np.testing.assert_allclose(res.x_plt, ref.x, atol=1e-6)


def test_polytope_noiseless():
    inst = H.gen_instance(40, 1.5, 10, seed=0)
    inst = H.Instance(A=inst.A, y=inst.A @ inst.x_sol, x_sol=inst.x_sol, sigma=0.0, seed=0)
    res = H.polytope_relax(inst, tol=1e-12, max_iters=200000)
    assert res.r_plt_emp < 1e-9
    assert res.bit_errors == 0


def test_polytope_residual_nonincreasing():
    hist = []
    H.polytope_relax(H.gen_instance(200, 0.8, 10, seed=4), history=hist)
    assert len(hist) > 10
    assert all(b <= a * (1 + 1e-12) for a, b in zip(hist, hist[1:]))


def test_polytope_strict():
    inst = H.gen_instance(200, 0.8, 10, seed=4)
    with pytest.raises(H.PolytopeNoConvergence) as ei:
        H.polytope_relax(inst, max_iters=3, strict=True)
    assert ei.value.result.iterations == 3
    assert not H.polytope_relax(inst, max_iters=3).converged


def test_polytope_far_worse_than_clup_level():
    errs = sum(H.polytope_relax(H.gen_instance(1000, 0.8, 10, seed=k)).bit_errors for k in range(5))
    assert errs / 5000 > 10 * 3.8e-3


def test_radius_from():
    inst = H.gen_instance(2000, 0.8, 10, seed=0)
    assert H.radius_from(inst, 1.56, 0.1732) / math.sqrt(2000) == pytest.approx(0.2702, abs=1e-4)
    r1 = H.radius_from(inst, 1.0)
    assert r1 == pytest.approx(H.polytope_relax(inst).r_plt_emp * math.sqrt(2000))
    with pytest.raises(ValueError):
        H.radius_from(inst, 0.0, 0.2)


@pytest.mark.slow
def test_radius_from_empirical_12db():
    vals = [H.radius_from(H.gen_instance(2000, 0.8, 12, seed=k), 1.55) / math.sqrt(2000) for k in range(10)]
    assert np.mean(vals) == pytest.approx(0.2129, rel=0.02)


def test_score():
    inst = H.gen_instance(100, 0.8, 10, seed=1)
    rec = H.score(inst.x_sol, inst)
    assert rec.bit_errors == 0
    assert rec.c1 == pytest.approx(1.0) and rec.c2 == pytest.approx(1.0)
    v = (inst.y - inst.A @ inst.x_sol) / inst.sigma
    assert rec.residual == pytest.approx(inst.sigma * np.linalg.norm(v) / 10)
    assert H.score(-inst.x_sol, inst).bit_errors == 100


def test_brute_force_two_by_two():
    A = np.array([[1.0, 0.2], [0.1, 1.0]])
    y = np.array([-0.6, 0.8])
    inst = H.Instance(A=A, y=y, x_sol=np.ones(2) / math.sqrt(2), sigma=0.1, seed=0)
    cands = [np.array([a, b]) / math.sqrt(2) for a in (-1, 1) for b in (-1, 1)]
    best = min(cands, key=lambda x: np.linalg.norm(y - A @ x))
    np.testing.assert_array_equal(H.brute_force_ml(inst, chunk=3), best)


def test_brute_force_noiseless():
    inst = H.gen_instance(10, 1.2, 10, seed=3)
    inst = H.Instance(A=inst.A, y=inst.A @ inst.x_sol, x_sol=inst.x_sol, sigma=0.0, seed=3)
    np.testing.assert_array_equal(H.brute_force_ml(inst), inst.x_sol)


def test_brute_force_guard():
    with pytest.raises(H.SizeGuard):
        H.brute_force_ml(H.gen_instance(25, 0.8, 10))


def test_best_of_starts_not_worse_than_single():
    from lsclup import engine

    inst = H.gen_instance(12, 0.8, 14, seed=5)
    p = engine.RunParams(0.5348 / math.sqrt(12), 0.992, 0.1694 * math.sqrt(12), 5 * math.sqrt(12))
    x8, r8 = H.best_of_starts(inst, [p], starts=8)
    x1, r1 = H.best_of_starts(inst, [p], starts=1)
    assert r8 <= r1
    assert r8 == pytest.approx(H.residual_norm(inst, x8))
    with pytest.raises(ValueError):
        H.best_of_starts(inst, [p], starts=0)


@pytest.mark.slow
def test_polytope_radius_concentration_every_snr():
    """Spread of the relaxation residual across instances, relative to its mean."""
    ratios = {}
    for snr in SNRS_DB:
        vals = np.array([H.polytope_relax(H.gen_instance(2000, 0.8, snr, seed=k)).r_plt_emp for k in range(20)])
        ratios[snr] = vals.std(ddof=1) / vals.mean()
        print(f"snr={snr} r_plt mean={vals.mean():.5f} std/mean={ratios[snr]:.4f}")
    bad = {k: round(v, 4) for k, v in ratios.items() if v > 0.02}
    assert not bad, f"std/mean above 0.02: {bad}"
