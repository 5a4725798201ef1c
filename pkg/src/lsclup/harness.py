"""Random MIMO instances, the box (polytope) relaxation baseline, and scoring."""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .engine import GramOperator, PhaseSchedule, run, signs

BRUTE_FORCE_MAX_N = 24


class SizeGuard(ValueError):
    """Exhaustive search requested for a dimension that is too large."""


class PolytopeNoConvergence(RuntimeError):
    """Projected gradient stopped at ``max_iters``; ``result`` holds the best iterate."""

    def __init__(self, msg, result):
        super().__init__(msg)
        self.result = result


@dataclass
class Instance:
    """One realization of ``y = A x_sol + sigma v``."""

    A: np.ndarray
    y: np.ndarray
    x_sol: np.ndarray
    sigma: float
    seed: int

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @cached_property
    def gram_op(self):
        """Shared ``A^T A`` precomputation (counter starts at zero)."""
        return GramOperator(self.A, self.y)


def gen_instance(n, alpha, snr_db, rho=0.5, seed=0):
    """Draw an instance with ``m = round(alpha * n)`` and ``sigma^2 = 10^(-snr_db/10)``.

    Exactly ``round(rho * n)`` entries of ``x_sol`` are ``+1/sqrt(n)``; their
    positions, ``A`` and the noise all come from one seeded generator.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    m = max(1, int(round(alpha * n)))
    sigma = math.sqrt(10.0 ** (-snr_db / 10.0))
    x_sol = np.full(n, -1.0 / math.sqrt(n))
    x_sol[rng.permutation(n)[: int(round(rho * n))]] = 1.0 / math.sqrt(n)
    A = rng.standard_normal((m, n))
    v = rng.standard_normal(m)
    y = A @ x_sol + sigma * v
    return Instance(A=A, y=y, x_sol=x_sol, sigma=sigma, seed=seed)


def random_start(n, seed, index=0):
    """Uniformly random point of ``{-1/sqrt(n), 1/sqrt(n)}^n``.

    Uses a stream separate from the instance generator so that the instance
    for a given seed does not depend on how the start is drawn.  ``index``
    selects further independent starts for the same seed.
    """
    rng = np.random.default_rng([seed, 1] if index == 0 else [seed, 1, index])
    return rng.choice([-1.0, 1.0], size=n) / math.sqrt(n)


@dataclass
class BaselineResult:
    x_plt: np.ndarray
    r_plt_emp: float
    iterations: int
    bit_errors: int
    converged: bool = True


def lipschitz_bound(gram, iters=50, inflate=1e-3):
    """``(1 + inflate) * sigma_max(A)^2`` from power iteration on ``A^T A``."""
    v = np.ones(gram.shape[0]) / math.sqrt(gram.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = gram @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            break
        v = w / lam
    return (1.0 + inflate) * lam


def polytope_relax(inst, tol=1e-6, max_iters=20000, strict=False, history=None):
    """Least squares over the box ``[-1/sqrt(n), 1/sqrt(n)]^n`` by projected gradient.

    Fixed step ``1/L`` on ``0.5 * ||y - A x||^2``; stops when the norm of the
    gradient mapping drops to ``tol * sqrt(n)``.

    If ``history`` is a list, the residual norm of every iterate is appended.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = inst.n
    b = 1.0 / math.sqrt(n)
    op = inst.gram_op
    gram, aty = op.gram, op.aty
    L = lipschitz_bound(gram)
    x = np.zeros(n)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        g = gram @ x - aty
        x_new = np.clip(x - g / L, -b, b)
        step = float(np.linalg.norm(x_new - x)) * L
        x = x_new
        if history is not None:
            history.append(residual_norm(inst, x))
        if step <= tol * math.sqrt(n):
            converged = True
            break
    res = BaselineResult(
        x_plt=x,
        r_plt_emp=residual_norm(inst, x) / math.sqrt(n),
        iterations=it,
        bit_errors=int(np.sum(signs(x) != signs(inst.x_sol))),
        converged=converged,
    )
    if strict and not converged:
        raise PolytopeNoConvergence(f"no convergence in {max_iters} iterations", res)
    return res


def residual_norm(inst, x):
    return float(np.linalg.norm(inst.y - inst.A @ x))


def radius_from(inst, r_sc, r_plt_mode="empirical", **relax_kw):
    """Absolute CLuP radius ``r_sc * r_plt * sqrt(n)``.

    ``r_plt_mode`` is ``"empirical"`` (measure on ``inst``) or a float giving
    a fixed normalized polytope radius.
    """
    if not r_sc > 0:
        raise ValueError("r_sc must be positive")
    if r_plt_mode == "empirical":
        r_plt = polytope_relax(inst, **relax_kw).r_plt_emp
    else:
        r_plt = float(r_plt_mode)
    return r_sc * r_plt * math.sqrt(inst.n)


@dataclass
class TrialRecord:
    bit_errors: int
    c2: float
    c1: float
    residual: float
    iterations: int = 0


def score(x_clup, inst, x_final=None, iterations=0):
    """Sign errors of ``x_clup`` against ``x_sol``, plus the order parameters of ``x_final``.

    ``c2 = ||x_final||^2``, ``c1 = x_sol . x_final`` and ``residual`` is
    ``||y - A x_final|| / sqrt(n)``; ``x_final`` defaults to ``x_clup``.
    """
    xf = x_clup if x_final is None else x_final
    return TrialRecord(
        bit_errors=int(np.sum(signs(x_clup) != signs(inst.x_sol))),
        c2=float(xf @ xf),
        c1=float(inst.x_sol @ xf),
        residual=residual_norm(inst, xf) / math.sqrt(inst.n),
        iterations=iterations,
    )


def brute_force_ml(inst, chunk=1 << 14):
    """Exact minimizer of ``||y - A x||`` over ``{-1/sqrt(n), 1/sqrt(n)}^n``."""
    n = inst.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeGuard(f"n={n} exceeds the exhaustive-search limit {BRUTE_FORCE_MAX_N}")
    scale = 1.0 / math.sqrt(n)
    best_val, best_x = math.inf, None
    patterns = itertools.product((-1.0, 1.0), repeat=n)
    while True:
        block = np.array(list(itertools.islice(patterns, chunk)))
        if block.size == 0:
            break
        res = inst.y[None, :] - (block * scale) @ inst.A.T
        vals = np.einsum("ij,ij->i", res, res)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_x = float(vals[k]), block[k] * scale
    return best_x


def best_of_starts(inst, phases, starts=8, restarts=3):
    """Run the contraction from ``starts`` random starts and keep the best output.

    "Best" is the smallest residual ``||y - A x||`` of the discretized
    output.  Ties keep the earliest start.  Returns ``(x_clup, residual)``.
    """
    if starts < 1:
        raise ValueError("starts must be at least 1")
    sched = PhaseSchedule(tuple(phases), restarts_per_phase=restarts)
    best = None
    for s in range(starts):
        out = run(random_start(inst.n, inst.seed, s), sched, inst.A, inst.y, gram_op=inst.gram_op)
        res = residual_norm(inst, out.x_clup)
        if best is None or res < best[1]:
            best = (out.x_clup, res)
    return best
