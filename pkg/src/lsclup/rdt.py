"""Random-dual objective and its stationary system.

All quantities are normalized by the problem dimension: the radius enters as
``r / sqrt(n)`` and the Lagrange multiplier as ``gamma1 * sqrt(n)``.  The
two closed-form stationarity conditions (for ``c1`` and ``c2``) eliminate
``nu`` and ``gamma1``, leaving three coupled equations in ``(c1, c2, gamma)``
that are solved by a damped Newton iteration from a grid of starts.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .engine import RunParams


class RDTDomainError(ValueError):
    """An argument lies outside the domain of the random-dual objective."""


class NoConvergence(RuntimeError):
    """No Newton start reached the residual tolerance."""


class BoundaryHit(RuntimeError):
    """A root was found with ``c2`` at the ``c2 = 1`` boundary.

    The system is not valid there without adjustment, so the root is reported
    rather than silently accepted.  The regular roots found alongside it are
    available as ``points``.
    """

    def __init__(self, msg, points=(), boundary=()):
        super().__init__(msg)
        self.points = list(points)
        self.boundary = list(boundary)


def sigma2_from_db(snr_db):
    """Noise variance for an SNR of ``1/sigma^2`` expressed in dB."""
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class RegimeParams:
    alpha: float
    sigma2: float
    rho: float
    r_norm: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise RDTDomainError(f"alpha must be positive, got {self.alpha}")
        if not self.sigma2 > 0:
            raise RDTDomainError(f"sigma2 must be positive, got {self.sigma2}")
        if not 0.0 <= self.rho <= 1.0:
            raise RDTDomainError(f"rho must lie in [0, 1], got {self.rho}")
        if not self.r_norm > 0:
            raise RDTDomainError(f"r_norm must be positive, got {self.r_norm}")

    @classmethod
    def from_snr_db(cls, alpha, snr_db, rho=0.5, r_norm=1.0):
        return cls(alpha, sigma2_from_db(snr_db), rho, r_norm)


@dataclass(frozen=True)
class StationaryPoint:
    """One root of the stationary system, with derived quantities filled in.

    ``gamma1`` is on the ``sqrt(n)``-scaled convention (the value an
    ``n``-independent table would report).
    """

    c1: float
    c2: float
    gamma: float
    nu: float
    gamma1: float
    p_err_pred: float
    xi_value: float

    def as_dict(self):
        return {
            "c1": self.c1,
            "c2": self.c2,
            "gamma": self.gamma,
            "nu": self.nu,
            "gamma1": self.gamma1,
            "p_err_pred": self.p_err_pred,
            "xi_value": self.xi_value,
        }


DEFAULT_C2_GRID = (0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.98, 0.99, 0.995)
DEFAULT_GAMMA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))


def default_starts():
    return tuple((0.98 * c2, c2, g) for c2 in DEFAULT_C2_GRID for g in DEFAULT_GAMMA_GRID)


@dataclass
class SolverSettings:
    residual_tol: float = 1e-10
    max_newton_iters: int = 200
    fd_step: float = 1e-7
    starts: tuple = field(default_factory=default_starts)
    cluster_tol: float = 1e-6
    max_halvings: int = 30

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if len(self.starts) == 0:
            raise ValueError("starts must be nonempty")


def _radicand(rp, c1, c2):
    q = 1.0 - 2.0 * c1 + c2 + rp.sigma2
    if not q > 0:
        raise RDTDomainError(f"1 - 2*c1 + c2 + sigma2 = {q} is not positive")
    return q


def nu_of(rp, c1, c2):
    """Closed-form ``nu`` from the ``c1``-stationarity condition (always negative)."""
    return -math.sqrt(rp.alpha) / math.sqrt(_radicand(rp, c1, c2))


def gamma1_of(c2, nu, gamma):
    """Closed-form ``gamma1`` from the ``c2``-stationarity condition."""
    if not c2 > 0:
        raise RDTDomainError(f"c2 must be positive, got {c2}")
    gap = -0.5 * nu - gamma
    if not gap > 0:
        raise RDTDomainError(f"gamma={gamma} violates gamma < -nu/2 = {-0.5 * nu}")
    return 1.0 / (2.0 * math.sqrt(c2) * gap)


def _bracket(rp, c1, c2, gamma, nu):
    # common sub-expression of the objective and of the gamma1-equation
    mix = kernels.mixture
    return (
        math.sqrt(rp.alpha) * math.sqrt(_radicand(rp, c1, c2))
        + mix(rp.rho, gamma, nu, "I22")
        - mix(rp.rho, gamma, nu, "I1")
        + mix(rp.rho, gamma, nu, "I21")
        - nu * c1
        - gamma * c2
        - rp.r_norm
    )


def xi_rd(rp, c2, c1, gamma, nu, gamma1):
    """Random-dual objective value (dimension-normalized)."""
    if not 0.0 < c2 < 1.0:
        raise RDTDomainError(f"c2 must lie in (0, 1), got {c2}")
    b = _bracket(rp, c1, c2, gamma, nu)
    return -math.sqrt(c2) + gamma1 * b


def residuals(rp, c1, c2, gamma):
    """Residuals ``(F_nu, F_gamma, F_gamma1)`` of the reduced stationary system.

    ``nu`` is eliminated through :func:`nu_of`; ``gamma1`` does not appear.
    """
    nu = nu_of(rp, c1, c2)
    f_nu = kernels.mixture(rp.rho, gamma, nu, "dI/dnu") - c1
    f_gamma = kernels.mixture(rp.rho, gamma, nu, "dI/dgamma") - c2
    f_gamma1 = _bracket(rp, c1, c2, gamma, nu)
    return np.array([f_nu, f_gamma, f_gamma1])


def predict_perr(nu):
    """Predicted bit-error probability ``0.5 * erfc(-nu / sqrt(2))``."""
    if not nu < 0:
        raise RDTDomainError(f"nu must be negative, got {nu}")
    return 0.5 * kernels.erfc_hp(-nu / math.sqrt(2.0))


def ideal_ml_perr(alpha, snr_db):
    """Single-channel matched-filter error probability at the rescaled SNR."""
    s2 = 10.0 ** (-snr_db / 10.0)
    return 0.5 * kernels.erfc_hp(math.sqrt(alpha / 2.0) / math.sqrt(s2))


def _safe_residuals(rp, z):
    try:
        f = residuals(rp, *z)
    except (RDTDomainError, kernels.KernelDomainError, OverflowError):
        return None
    if not np.all(np.isfinite(f)):
        return None
    return f


def _fd_jacobian(rp, z, f0, fd_step):
    jac = np.empty((3, 3))
    for j in range(3):
        h = fd_step * max(1.0, abs(z[j]))
        zp = z.copy()
        zm = z.copy()
        zp[j] += h
        zm[j] -= h
        fp = _safe_residuals(rp, zp)
        fm = _safe_residuals(rp, zm)
        if fp is not None and fm is not None:
            jac[:, j] = (fp - fm) / (2.0 * h)
        elif fp is not None:
            jac[:, j] = (fp - f0) / h
        elif fm is not None:
            jac[:, j] = (f0 - fm) / h
        else:
            return None
    return jac


# Newton is locally convergent well beyond this distance at the roots of interest
DUPLICATE_RADIUS = 1e-4


def newton(rp, z0, settings, known=()):
    """Damped Newton from one start.

    Returns ``(z, max_abs_residual)`` or ``None`` if the start fails.  If an
    iterate enters the ``DUPLICATE_RADIUS`` neighbourhood of a root in
    ``known``, that root is returned without further iterations.
    """
    z = np.asarray(z0, dtype=float).copy()
    f = _safe_residuals(rp, z)
    if f is None:
        return None
    for _ in range(settings.max_newton_iters):
        fmax = np.max(np.abs(f))
        if fmax <= settings.residual_tol:
            return z, fmax
        for r in known:
            if np.max(np.abs(z - r)) < DUPLICATE_RADIUS:
                return r, 0.0
        jac = _fd_jacobian(rp, z, f, settings.fd_step)
        if jac is None:
            return None
        try:
            dz = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        fnorm = np.linalg.norm(f)
        t = 1.0
        for _ in range(settings.max_halvings + 1):
            zt = z + t * dz
            ft = _safe_residuals(rp, zt)
            if ft is not None and np.linalg.norm(ft) < fnorm:
                break
            t *= 0.5
        else:
            return None
        z, f = zt, ft
    fmax = np.max(np.abs(f))
    return (z, fmax) if fmax <= settings.residual_tol else None


def _complete(rp, z):
    c1, c2, gamma = (float(v) for v in z)
    nu = nu_of(rp, c1, c2)
    g1 = gamma1_of(c2, nu, gamma)
    b = _bracket(rp, c1, c2, gamma, nu)
    return StationaryPoint(
        c1=c1,
        c2=c2,
        gamma=gamma,
        nu=nu,
        gamma1=g1,
        p_err_pred=predict_perr(nu),
        # evaluated directly so that c2 close to 1 does not trip the xi_rd domain check
        xi_value=-math.sqrt(c2) + g1 * b,
    )


def solve_stationary(rp, settings=None):
    """All distinct admissible roots of the stationary system.

    Roots are sorted by descending ``c1`` so the first entry is the one
    closest to the ML solution.  Roots with ``gamma >= -nu/2`` (negative
    ``gamma1``) or ``c1`` outside ``[0, sqrt(c2)]`` are not admissible and
    are dropped.

    Raises
    ------
    NoConvergence
        If no start converged to an admissible root.
    BoundaryHit
        If an admissible root has ``c2 > 1 - 1e-6``.
    """
    s = settings or SolverSettings()
    roots = []
    for start in s.starts:
        c1, c2, g = start
        try:
            if not g < -0.5 * nu_of(rp, c1, c2):
                continue
        except RDTDomainError:
            continue
        out = newton(rp, start, s, known=roots)
        if out is None:
            continue
        z = out[0]
        if any(np.max(np.abs(z - r)) <= s.cluster_tol for r in roots):
            continue
        roots.append(z)

    points, boundary = [], []
    for z in roots:
        c1, c2, g = z
        if not (c2 > 0 and 0.0 <= c1 <= math.sqrt(c2)):
            continue
        try:
            p = _complete(rp, z)
        except RDTDomainError:
            continue
        (boundary if c2 > 1.0 - 1e-6 else points).append(p)
    points.sort(key=lambda p: -p.c1)
    if boundary:
        raise BoundaryHit(
            f"{len(boundary)} root(s) at the c2=1 boundary", points=points, boundary=boundary
        )
    if not points:
        raise NoConvergence(f"none of {len(s.starts)} starts converged to an admissible root")
    return points


def closest_to(points, **target):
    """Point minimizing the max relative deviation from the given field values."""

    def dev(p):
        return max(abs(getattr(p, k) - v) / abs(v) for k, v in target.items())

    return min(points, key=dev)


def run_params_from(sp, rp, n, cq2_scale=5.0, i_max=300, delta_min=0.0, variant="limit"):
    """Unnormalize a stationary point into contraction parameters for dimension ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rn = math.sqrt(n)
    return RunParams(
        gamma1_hat=sp.gamma1 / rn,
        c2_hat=sp.c2,
        r=rp.r_norm * rn,
        cq2=cq2_scale * rn,
        i_max=i_max,
        delta_min=delta_min,
        variant=variant,
    )
