"""Transcendental kernels used by every closed form.

erf/erfc are thin wrappers over scipy.special (with domain checks); the Dawson
function is evaluated here in three regimes so that each regime can be
checked against the others and against direct quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)

# Regime boundaries for the Dawson function.
DAWSON_SERIES_MAX = 1.0
DAWSON_ASYMPTOTIC_MIN = 10.0

_MACLAURIN_TERMS = 30
_KUMMER_TERMS = 260
_ASYMPTOTIC_TERMS = 40


def _as_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _ret(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def erf(x):
    """Error function, (2/sqrt(pi)) * int_0^x exp(-y^2) dy."""
    arr = _as_finite(x)
    return _ret(_sp.erf(arr), x)


def erfc(x):
    """Complementary error function 1 - erf(x), accurate in the far tail."""
    arr = _as_finite(x)
    return _ret(_sp.erfc(arr), x)


def _dawson_maclaurin(x):
    # sum_n (-1)^n 2^n x^(2n+1) / (2n+1)!!
    term = x.copy()
    total = x.copy()
    mx2 = -2.0 * x * x
    for n in range(1, _MACLAURIN_TERMS):
        term = term * mx2 / (2 * n + 1)
        total = total + term
    return total


def _dawson_kummer(x):
    # Kummer transform: daw(x) = x exp(-x^2) sum_n x^(2n) / (n! (2n+1)).
    # All terms positive, so no cancellation in the moderate range.
    x2 = x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for n in range(1, _KUMMER_TERMS):
        term = term * x2 * (2 * n - 1) / (n * (2 * n + 1))
        total = total + term
    return x * np.exp(-x2) * total


def _dawson_asymptotic(x):
    # daw(x) ~ sum_n a_n / x^(2n+1), a_0 = 1/2, a_n = a_(n-1) (2n-1)/2,
    # truncated before the smallest term.
    inv2 = 1.0 / (x * x)
    term = 0.5 / x
    total = term.copy()
    for n in range(1, _ASYMPTOTIC_TERMS):
        nxt = term * (2 * n - 1) * 0.5 * inv2
        keep = np.abs(nxt) < np.abs(term)
        term = np.where(keep, nxt, 0.0)
        total = total + term
    return total


def dawson(x):
    """Dawson function daw(x) = int_0^x exp(y^2 - x^2) dy (odd in x)."""
    arr = _as_finite(x)
    ax = np.atleast_1d(np.abs(arr))
    out = np.empty_like(ax)
    small = ax < DAWSON_SERIES_MAX
    large = ax > DAWSON_ASYMPTOTIC_MIN
    mid = ~(small | large)
    if small.any():
        out[small] = _dawson_maclaurin(ax[small])
    if mid.any():
        out[mid] = _dawson_kummer(ax[mid])
    if large.any():
        out[large] = _dawson_asymptotic(ax[large])
    out = np.copysign(out, np.atleast_1d(arr))
    return _ret(out.reshape(np.shape(arr)), x)


def dawson_small(x):
    """Leading Maclaurin behaviour daw(x) ~ x, valid for |x| <= 0.1."""
    arr = _as_finite(x)
    if np.any(np.abs(arr) > 0.1):
        raise DomainError("dawson_small requires |x| <= 0.1")
    return _ret(arr.copy(), x)


def dawson_large(x):
    """Two-term asymptote daw(x) ~ 1/(2x) + 1/(4x^3), valid for |x| >= 10."""
    arr = _as_finite(x)
    if np.any(np.abs(arr) < 10.0):
        raise DomainError("dawson_large requires |x| >= 10")
    return _ret(0.5 / arr + 0.25 / arr**3, x)


def dawson_asymptotic_coefficients(n_terms: int) -> list[float]:
    """Coefficients a_n of daw(x) = sum a_n / x^(2n+1), obtained by matching
    powers in daw' = 1 - 2 x daw.

    The x^0 coefficient gives 0 = 1 - 2 a_0; the x^(-2n) coefficient gives
    -(2n-1) a_(n-1) = -2 a_n for n >= 1.
    """
    coeffs = [0.5]
    for n in range(1, n_terms):
        coeffs.append(coeffs[-1] * (2 * n - 1) / 2)
    return coeffs


def nascent_delta_1d(x, eps):
    """exp(-x^2/eps^2) / (sqrt(pi) eps)."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    arr = _as_finite(x)
    return _ret(np.exp(-(arr / eps) ** 2) / (SQRT_PI * eps), x)


def nascent_delta_1d_prime(x, eps):
    """d/dx of nascent_delta_1d."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    arr = _as_finite(x)
    return _ret(-2.0 * arr / eps**2 * np.exp(-(arr / eps) ** 2) / (SQRT_PI * eps), x)


def nascent_delta_3d(r, eps):
    """exp(-r^2/eps^2) / (sqrt(pi) eps)^3 as a function of the radius r."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    arr = _as_finite(r, "r")
    if np.any(arr < 0):
        raise DomainError("r must be non-negative")
    return _ret(np.exp(-(arr / eps) ** 2) / (SQRT_PI * eps) ** 3, r)


def gamma_half(m: int) -> float:
    """Gamma((m+1)/2) for integer m >= 0 via Gamma(z+1) = z Gamma(z)."""
    m = int(m)
    if m < 0:
        raise DomainError("m must be a non-negative integer")
    if m % 2 == 0:
        z, val = 0.5, SQRT_PI
    else:
        z, val = 1.0, 1.0
    target = (m + 1) / 2
    while z < target:
        val *= z
        z += 1.0
    return val


def gaussian_moment(m: int) -> float:
    """int_0^inf x^m exp(-x^2/2) dx = 2^((m-1)/2) Gamma((m+1)/2)."""
    return 2.0 ** ((int(m) - 1) / 2) * gamma_half(m)


def hermite_table(y, n_max: int):
    """Physicists' Hermite polynomials H_0..H_n_max at y, stacked on axis 0."""
    y = np.asarray(y, dtype=float)
    out = np.empty((n_max + 1,) + y.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * y
    for n in range(1, n_max):
        out[n + 1] = 2.0 * y * out[n] - 2.0 * n * out[n - 1]
    return out
