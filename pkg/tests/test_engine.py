import math

import numpy as np
import pytest

from lsclup import engine as E
from lsclup import harness


def params(n, **kw):
    base = dict(gamma1_hat=0.4657 / math.sqrt(n), c2_hat=0.991, r=0.2702 * math.sqrt(n),
                cq2=5 * math.sqrt(n), i_max=50)
    base.update(kw)
    return E.RunParams(**base)


def test_run_params_validation():
    with pytest.raises(ValueError):
        params(100, cq2=1.0)
    with pytest.raises(ValueError):
        params(100, c2_hat=1.5)
    with pytest.raises(ValueError):
        params(100, variant="fast")
    with pytest.raises(ValueError):
        params(100, delta_min=-1)
    with pytest.raises(ValueError):
        E.PhaseSchedule(())
    with pytest.raises(ValueError):
        E.PhaseSchedule((params(100),), restarts_per_phase=0)


def test_clamp_and_discretize():
    n = 4
    b = 1 / math.sqrt(n)
    x = np.array([2 * b, 0.0, -3 * b, 0.1])
    c = E.clamp(x)
    np.testing.assert_array_equal(c, [b, 0.0, -b, 0.1])
    np.testing.assert_array_equal(E.clamp(c), c)
    d = E.discretize(x)
    np.testing.assert_array_equal(d, [b, b, -b, b])
    assert np.linalg.norm(d) == pytest.approx(1.0)
    np.testing.assert_array_equal(E.discretize(d), d)


def test_zero_matrix_drives_to_boundary():
    n = 16
    rng = np.random.default_rng(3)
    x0 = rng.uniform(-0.5, 0.5, n) / math.sqrt(n)
    A = np.zeros((12, n))
    y = np.zeros(12)
    out = E.run(x0, E.PhaseSchedule((params(n, i_max=400),)), A, y)
    np.testing.assert_allclose(out.x_final, np.sign(x0) / math.sqrt(n))
    # the live residual is zero here, so the exact update factor is cq2 / cq2 = 1
    out = E.run(x0, E.PhaseSchedule((params(n, i_max=400, variant="exact"),)), A, y)
    np.testing.assert_array_equal(out.x_final, x0)


def test_box_invariance_and_trace():
    inst = harness.gen_instance(200, 0.8, 10, seed=1)
    p = params(200, i_max=30)
    out = E.run(harness.random_start(200, 1), E.PhaseSchedule((p,), 2), inst.A, inst.y)
    assert np.all(np.abs(out.x_final) <= 1 / math.sqrt(200) + 1e-15)
    assert len(out.trace.delta) == 60 == len(out.trace.norm_x) == len(out.trace.residual)
    assert [s.iterations for s in out.trace.segments] == [30, 30]
    assert all(0 <= d <= 2 for d in out.trace.delta)


def test_residual_trace_matches_direct():
    inst = harness.gen_instance(100, 0.8, 10, seed=2)
    x0 = harness.random_start(100, 2)
    out = E.run(x0, E.PhaseSchedule((params(100, i_max=1),)), inst.A, inst.y)
    assert out.trace.residual[0] == pytest.approx(np.linalg.norm(inst.y - inst.A @ x0), rel=1e-10)


def test_fixed_point_is_stationary():
    n = 30
    rng = np.random.default_rng(0)
    A = rng.standard_normal((24, n))
    y = 1e-3 * rng.standard_normal(24)
    p = params(n)
    ops = E.PrecomputedOperators.from_system(A, y, p)
    M = p.scale * (A.T @ A)
    x = np.linalg.solve(M - p.r * np.eye(n), ops.w)
    assert np.max(np.abs(x)) < 1 / math.sqrt(n)
    st = E.step_limit(E.EngineState(x=x), ops, p)
    np.testing.assert_allclose(st.x, x, atol=1e-12)
    stationarity = -x * p.r - p.scale * A.T @ y + p.scale * A.T @ (A @ x)
    assert np.linalg.norm(stationarity) <= 1e-10 * math.sqrt(n)


def test_exact_equals_limit_at_limit_norms():
    n = 20
    rng = np.random.default_rng(5)
    A = rng.standard_normal((16, n))
    x = E.clamp(rng.uniform(-1, 1, n) / math.sqrt(n))
    # choose y so that ||y - A x|| equals a prescribed r
    u = rng.standard_normal(16)
    r = 1.7
    y = A @ x + r * u / np.linalg.norm(u)
    p = params(n, c2_hat=float(x @ x), r=r, cq2=10.0)
    a = E.step_exact(E.EngineState(x=x), A, y, p)
    b = E.step_limit(E.EngineState(x=x), E.PrecomputedOperators.from_system(A, y, p), p)
    np.testing.assert_allclose(a.x, b.x, rtol=1e-12, atol=1e-14)


def test_exact_denominator_error():
    n = 10
    A = np.ones((8, n))
    y = 100 * np.ones(8)
    p = params(n, cq2=5.0, r=1.0, variant="exact")
    with pytest.raises(E.DenominatorError):
        E.step_exact(E.EngineState(x=np.zeros(n)), A, y, p)


def test_noiseless_start_at_solution():
    inst = harness.gen_instance(300, 0.8, 300, seed=4)
    out = E.run(inst.x_sol, E.PhaseSchedule((params(300, i_max=20),)), inst.A, inst.y)
    np.testing.assert_array_equal(out.x_clup, inst.x_sol)


def test_i_max_zero_returns_start():
    inst = harness.gen_instance(50, 0.8, 10, seed=0)
    x0 = harness.random_start(50, 0) * 0.5
    out = E.run(x0, E.PhaseSchedule((params(50, i_max=0),)), inst.A, inst.y)
    np.testing.assert_array_equal(out.x_final, x0)
    np.testing.assert_array_equal(out.x_clup, E.discretize(x0))
    assert out.trace.matvecs == 0


def test_delta_min_stops_on_unchanged_signs():
    inst = harness.gen_instance(400, 0.8, 12, seed=3)
    p = params(400, i_max=300, delta_min=0.5 / 400)
    out = E.run(harness.random_start(400, 3), E.PhaseSchedule((p,)), inst.A, inst.y)
    seg = out.trace.segments[0]
    assert seg.iterations < 300
    assert seg.delta == 0.0
    assert all(d > 0 for d in out.trace.delta[:-1])


def test_restarts_seed_from_discretized_output():
    inst = harness.gen_instance(100, 0.8, 10, seed=6)
    p = params(100, i_max=5)
    x0 = harness.random_start(100, 6)
    two = E.run(x0, E.PhaseSchedule((p,), 2), inst.A, inst.y)
    one = E.run(x0, E.PhaseSchedule((p,)), inst.A, inst.y)
    again = E.run(one.x_clup, E.PhaseSchedule((p,)), inst.A, inst.y)
    np.testing.assert_array_equal(two.x_final, again.x_final)
    cont = E.run(x0, E.PhaseSchedule((p,), 2), inst.A, inst.y, seed_continuous=True)
    ten = E.run(x0, E.PhaseSchedule((params(100, i_max=10),)), inst.A, inst.y)
    np.testing.assert_array_equal(cont.x_final, ten.x_final)


def test_one_matvec_per_iteration():
    inst = harness.gen_instance(150, 0.8, 10, seed=7)
    sched = E.PhaseSchedule((params(150, i_max=37), params(150, i_max=11, r=0.2 * math.sqrt(150))), 3)
    out = E.run(harness.random_start(150, 7), sched, inst.A, inst.y)
    assert out.trace.matvecs == 3 * (37 + 11) == len(out.trace.delta)


def test_exact_variant_counts_products():
    inst = harness.gen_instance(80, 0.8, 10, seed=8)
    out = E.run(harness.random_start(80, 8), E.PhaseSchedule((params(80, i_max=9, variant="exact"),)),
                inst.A, inst.y)
    assert out.trace.matvecs == 9


def test_deterministic():
    inst = harness.gen_instance(120, 0.8, 10, seed=9)
    sched = E.PhaseSchedule((params(120),), 2)
    a = E.run(harness.random_start(120, 9), sched, inst.A, inst.y)
    b = E.run(harness.random_start(120, 9), sched, gram_op=E.GramOperator(inst.A, inst.y))
    np.testing.assert_array_equal(a.x_final, b.x_final)


def test_start_outside_box_rejected():
    with pytest.raises(ValueError):
        E.run(np.ones(4), E.PhaseSchedule((params(4),)), np.eye(4), np.zeros(4))
