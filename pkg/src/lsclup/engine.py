"""Large-scale CLuP contraction.

Each iteration is a clamped linear map

    x <- clamp((cq2 * x + w - M x) / (cq2 - r))

with ``w = g * sqrt(c2) * A^T y`` and ``M = g * sqrt(c2) * A^T A`` where
``g`` and ``c2`` come from the stationary point.  ``A^T A`` is formed once per
instance so an iteration costs a single ``n x n`` matrix-vector product.

The ``exact`` variant replaces ``sqrt(c2)`` and ``r`` by the live values
``||x||`` and ``||y - A x||`` and is kept for diagnostics.
"""

import math
from dataclasses import dataclass, field

import numpy as np

VARIANTS = ("limit", "exact")
DELTA_INIT = 1e10


class DenominatorError(ArithmeticError):
    """``cq2 <= ||y - A x||``: the contraction constant was chosen too small."""


@dataclass(frozen=True)
class RunParams:
    """Parameters of one contraction phase, on the unnormalized scale.

    ``gamma1_hat`` is the multiplier divided by ``sqrt(n)``; ``r`` and ``cq2``
    are absolute (already multiplied by ``sqrt(n)``).
    """

    gamma1_hat: float
    c2_hat: float
    r: float
    cq2: float
    i_max: int = 300
    delta_min: float = 0.0
    variant: str = "limit"

    def __post_init__(self):
        if not self.gamma1_hat > 0:
            raise ValueError(f"gamma1_hat must be positive, got {self.gamma1_hat}")
        if not 0.0 < self.c2_hat <= 1.0:
            raise ValueError(f"c2_hat must lie in (0, 1], got {self.c2_hat}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not self.cq2 > self.r:
            raise ValueError(f"cq2={self.cq2} must exceed r={self.r}")
        if self.i_max < 0:
            raise ValueError("i_max must be nonnegative")
        if self.delta_min < 0:
            raise ValueError("delta_min must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def scale(self):
        return self.gamma1_hat * math.sqrt(self.c2_hat)


@dataclass(frozen=True)
class PhaseSchedule:
    phases: tuple
    restarts_per_phase: int = 1

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise ValueError("a schedule needs at least one phase")
        if self.restarts_per_phase < 1:
            raise ValueError("restarts_per_phase must be at least 1")


class GramOperator:
    """``A^T A`` and ``A^T y`` formed once; counts matrix applications."""

    def __init__(self, A, y):
        A = np.asarray(A, dtype=float)
        y = np.asarray(y, dtype=float)
        self.gram = A.T @ A
        self.aty = A.T @ y
        self.yty = float(y @ y)
        self.matvecs = 0

    @classmethod
    def from_parts(cls, gram, aty, yty):
        self = cls.__new__(cls)
        self.gram, self.aty, self.yty = gram, aty, float(yty)
        self.matvecs = 0
        return self

    def apply(self, x):
        self.matvecs += 1
        return self.gram @ x


class PrecomputedOperators:
    """Per-phase view of a :class:`GramOperator` scaled by ``gamma1_hat * sqrt(c2_hat)``."""

    def __init__(self, gram_op, rp):
        self.gram_op = gram_op
        self.scale = rp.scale
        self.w = self.scale * gram_op.aty
        self.last_residual = math.nan

    @classmethod
    def from_system(cls, A, y, rp):
        return cls(GramOperator(A, y), rp)

    @property
    def matvecs(self):
        return self.gram_op.matvecs

    def apply(self, x):
        gx = self.gram_op.apply(x)
        # residual of the input iterate comes for free from the same product
        r2 = self.gram_op.yty - 2.0 * (x @ self.gram_op.aty) + x @ gx
        self.last_residual = math.sqrt(max(r2, 0.0))
        return self.scale * gx


@dataclass
class EngineState:
    x: np.ndarray
    iter: int = 0
    delta: float = DELTA_INIT
    sign_prev: np.ndarray = None

    def __post_init__(self):
        if self.sign_prev is None:
            self.sign_prev = signs(self.x)


def signs(x):
    """Componentwise sign with ``sign(0) = +1``."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def clamp(xr):
    b = 1.0 / math.sqrt(len(xr))
    return np.clip(xr, -b, b)


def discretize(x):
    return signs(x) / math.sqrt(len(x))


def _advance(st, xr):
    x = clamp(xr)
    s = signs(x)
    delta = abs(1.0 - (st.sign_prev @ s) / len(x))
    return EngineState(x=x, iter=st.iter + 1, delta=delta, sign_prev=s)


def step_limit(st, ops, rp):
    """One iteration with ``||x||`` and ``||y - Ax||`` frozen at their limits."""
    xr = (rp.cq2 * st.x + ops.w - ops.apply(st.x)) / (rp.cq2 - rp.r)
    return _advance(st, xr)


def step_exact(st, A, y, rp):
    """One iteration with the live norms; one ``A`` and one ``A^T`` product."""
    res = y - A @ st.x
    rnorm = float(np.linalg.norm(res))
    if not rp.cq2 > rnorm:
        raise DenominatorError(f"cq2={rp.cq2} <= ||y - Ax||={rnorm}")
    xnorm = float(np.linalg.norm(st.x))
    xr = (rp.cq2 * st.x + rp.gamma1_hat * xnorm * (A.T @ res)) / (rp.cq2 - rnorm)
    return _advance(st, xr)


@dataclass
class Segment:
    """Outcome of one restart within one phase."""

    phase: int
    restart: int
    iterations: int
    delta: float
    x_final: np.ndarray
    x_clup: np.ndarray


@dataclass
class ConvergenceTrace:
    delta: list = field(default_factory=list)
    norm_x: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    matvecs: int = 0


@dataclass
class RunResult:
    x_final: np.ndarray
    x_clup: np.ndarray
    trace: ConvergenceTrace


def run(x0, schedule, A=None, y=None, *, gram_op=None, seed_continuous=False):
    """Run every phase of ``schedule`` starting from ``x0``.

    Each restart iterates while ``iter < i_max`` and ``delta >= delta_min``.
    The next restart (and the next phase) starts from the discretized output
    of the previous one, or from the continuous iterate if
    ``seed_continuous`` is set.

    Parameters
    ----------
    x0 : ndarray, shape (n,)
        Starting point inside the box ``[-1/sqrt(n), 1/sqrt(n)]^n``.
    schedule : PhaseSchedule
    A, y : ndarray, optional
        The system.  Required by the exact variant, and by the limit variant
        unless ``gram_op`` is supplied.
    gram_op : GramOperator, optional
        Precomputed ``A^T A`` / ``A^T y``, shareable across runs on the same
        instance.

    Returns
    -------
    RunResult
        Final continuous iterate, its discretization, and a trace with one
        entry per iteration plus one :class:`Segment` per restart.
    """
    x = np.asarray(x0, dtype=float).copy()
    n = len(x)
    if np.any(np.abs(x) > 1.0 / math.sqrt(n) * (1 + 1e-12)):
        raise ValueError("x0 must lie in the box [-1/sqrt(n), 1/sqrt(n)]^n")
    needs_gram = any(p.variant == "limit" for p in schedule.phases)
    if needs_gram and gram_op is None:
        if A is None or y is None:
            raise ValueError("the limit variant needs A and y, or gram_op")
        gram_op = GramOperator(A, y)
    start_matvecs = gram_op.matvecs if gram_op is not None else 0
    exact_products = 0

    trace = ConvergenceTrace()
    x_clup = discretize(x)
    for k, rp in enumerate(schedule.phases):
        ops = PrecomputedOperators(gram_op, rp) if rp.variant == "limit" else None
        for j in range(schedule.restarts_per_phase):
            st = EngineState(x=x)
            while st.iter < rp.i_max and st.delta >= rp.delta_min:
                if ops is not None:
                    st = step_limit(st, ops, rp)
                    trace.residual.append(ops.last_residual)
                else:
                    st = step_exact(st, A, y, rp)
                    exact_products += 1
                trace.delta.append(st.delta)
                trace.norm_x.append(float(np.linalg.norm(st.x)))
            x_clup = discretize(st.x)
            trace.segments.append(
                Segment(k, j, st.iter, st.delta, st.x.copy(), x_clup.copy())
            )
            x = st.x if seed_continuous else x_clup
    x_final = trace.segments[-1].x_final
    trace.matvecs = (gram_op.matvecs - start_matvecs if gram_op is not None else 0) + exact_products
    return RunResult(x_final=x_final, x_clup=x_clup, trace=trace)
