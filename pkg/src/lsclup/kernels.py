"""Scalar special-function kernels of the random-dual objective.

Every function here takes plain floats ``(gamma, nu)`` and returns a float.
The closed forms are written out term by term; derivatives are the analytic
expressions, not re-derived simplifications, so that finite-difference tests
can catch transcription slips.

The ``rho``-mixtures combine an evaluation at ``(gamma, nu)`` with one at
``(gamma, -nu)``; for the ``nu``-derivative the chain rule flips the sign of
the reflected term.
"""

import math

GAMMA_MIN = 1e-8

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_SQRT_PI_2 = math.sqrt(math.pi / 2.0)
_SQRT_2_PI = math.sqrt(2.0 / math.pi)

WHICH = ("I22", "I1", "I21", "I", "dI/dnu", "dI/dgamma")


class KernelDomainError(ValueError):
    """Raised when a kernel is evaluated at an unusable dual point."""


def erfc_hp(x):
    """Complementary error function.

    Backed by the C library ``erfc`` (``math.erfc``); accuracy is pinned by
    tests against an mpmath reference.
    """
    return math.erfc(x)


def erf_hp(x):
    return math.erf(x)


def _check(gamma):
    if not gamma >= GAMMA_MIN:
        raise KernelDomainError(f"gamma={gamma!r} below GAMMA_MIN={GAMMA_MIN}")


def i22(gamma, nu):
    _check(gamma)
    s = nu + 2.0 * gamma
    return 0.5 * (nu + gamma) * erfc_hp(s / _SQRT2) - math.exp(-0.5 * s * s) / _SQRT2PI


def i1(gamma, nu):
    _check(gamma)
    p = 2.0 * gamma + nu
    q = nu - 2.0 * gamma
    a = nu * nu + 1.0
    num = (
        _SQRT_PI_2 * a * erf_hp((2.0 * gamma - nu) / _SQRT2)
        + _SQRT_PI_2 * a * erf_hp(p / _SQRT2)
        + math.exp(-0.5 * p * p) * q
        - math.exp(-0.5 * q * q) * p
    )
    return num / (4.0 * _SQRT2PI * gamma)


def i21(gamma, nu):
    _check(gamma)
    q = nu - 2.0 * gamma
    # erf(q/sqrt2) + 1 written as erfc(-q/sqrt2): no cancellation for q << 0
    return -0.5 * (nu - gamma) * erfc_hp(-q / _SQRT2) - math.exp(-0.5 * q * q) / _SQRT2PI


def i_combined(gamma, nu):
    """``I = I22 - I1 + I21`` at a single point."""
    return i22(gamma, nu) - i1(gamma, nu) + i21(gamma, nu)


def _di22_dnu(gamma, nu):
    p = 2.0 * gamma + nu
    return gamma / _SQRT2PI * math.exp(-0.5 * p * p) + 0.5 * erfc_hp(p / _SQRT2)


def _di1_dnu(gamma, nu):
    p = 2.0 * gamma + nu
    q = nu - 2.0 * gamma
    a = nu * nu + 1.0
    ep = math.exp(-0.5 * p * p)
    eq = math.exp(-0.5 * q * q)
    num = (
        -_SQRT2PI * nu * erf_hp(q / _SQRT2)
        + _SQRT2PI * nu * erf_hp(p / _SQRT2)
        - a * eq
        + a * ep
        + eq * q * p
        - ep * q * p
        - math.exp(-0.5 * (2.0 * gamma - nu) ** 2)
        + ep
    )
    return num / (4.0 * _SQRT2PI * gamma)


def _di21_dnu(gamma, nu):
    q = nu - 2.0 * gamma
    return -gamma / _SQRT2PI * math.exp(-0.5 * q * q) - 0.5 * erfc_hp((2.0 * gamma - nu) / _SQRT2)


def di_dnu(gamma, nu):
    """Analytic ``dI/dnu`` at ``(gamma, nu)``."""
    _check(gamma)
    return _di22_dnu(gamma, nu) - _di1_dnu(gamma, nu) + _di21_dnu(gamma, nu)


def _di22_dgamma(gamma, nu):
    p = 2.0 * gamma + nu
    return gamma * _SQRT_2_PI * math.exp(-0.5 * p * p) + 0.5 * erfc_hp(p / _SQRT2)


def _di1_dgamma(gamma, nu):
    p = 2.0 * gamma + nu
    q = nu - 2.0 * gamma
    a = nu * nu + 1.0
    ep = math.exp(-0.5 * p * p)
    eq = math.exp(-0.5 * q * q)
    # (2*gamma - nu)**2 == q**2; kept separate to mirror the closed form
    em = math.exp(-0.5 * (2.0 * gamma - nu) ** 2)
    first = (
        2.0 * a * eq
        + 2.0 * a * ep
        - 2.0 * em * q * p
        - 2.0 * ep * q * p
        - 2.0 * em
        - 2.0 * ep
    ) / (4.0 * _SQRT2PI * gamma)
    second = (
        -_SQRT_PI_2 * a * erf_hp(q / _SQRT2)
        + _SQRT_PI_2 * a * erf_hp(p / _SQRT2)
        + ep * q
        - em * p
    ) / (4.0 * _SQRT2PI * gamma * gamma)
    return first - second


def _di21_dgamma(gamma, nu):
    q = nu - 2.0 * gamma
    return gamma * _SQRT_2_PI * math.exp(-0.5 * q * q) + 0.5 * erfc_hp((2.0 * gamma - nu) / _SQRT2)


def di_dgamma(gamma, nu):
    """Analytic ``dI/dgamma`` at ``(gamma, nu)``."""
    _check(gamma)
    return _di22_dgamma(gamma, nu) - _di1_dgamma(gamma, nu) + _di21_dgamma(gamma, nu)


def di_dnu_reflected(gamma, nu):
    """``d/dnu`` of ``I(gamma, -nu)``, i.e. ``-dI/dnu`` evaluated at ``-nu``."""
    return -di_dnu(gamma, -nu)


def di_dgamma_reflected(gamma, nu):
    """``d/dgamma`` of ``I(gamma, -nu)``, i.e. ``dI/dgamma`` evaluated at ``-nu``."""
    return di_dgamma(gamma, -nu)


_POINT = {
    "I22": i22,
    "I1": i1,
    "I21": i21,
    "I": i_combined,
    "dI/dnu": di_dnu,
    "dI/dgamma": di_dgamma,
}

_REFLECTED = {
    "I22": lambda g, v: i22(g, -v),
    "I1": lambda g, v: i1(g, -v),
    "I21": lambda g, v: i21(g, -v),
    "I": lambda g, v: i_combined(g, -v),
    "dI/dnu": di_dnu_reflected,
    "dI/dgamma": di_dgamma_reflected,
}


def mixture(rho, gamma, nu, which):
    """``rho * f(gamma, nu) + (1 - rho) * f_reflected(gamma, nu)``.

    Parameters
    ----------
    rho : float
        Fraction of positive entries in the transmitted vector, in [0, 1].
    gamma, nu : float
        Dual point.
    which : str
        One of ``"I22", "I1", "I21", "I", "dI/dnu", "dI/dgamma"``.
    """
    if not 0.0 <= rho <= 1.0:
        raise KernelDomainError(f"rho={rho!r} outside [0, 1]")
    try:
        f, g = _POINT[which], _REFLECTED[which]
    except KeyError:
        raise ValueError(f"unknown kernel {which!r}; expected one of {WHICH}") from None
    if rho == 1.0:
        return f(gamma, nu)
    if rho == 0.0:
        return g(gamma, nu)
    return rho * f(gamma, nu) + (1.0 - rho) * g(gamma, nu)
