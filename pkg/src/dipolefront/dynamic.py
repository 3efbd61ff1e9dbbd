"""Observables of the expanding field (current switched on at t = 0).

Closed forms are used for the Gaussian dipole; any SpectralWeight goes
through quadrature of the equivalent radial integral. Integrands are written
with sin^2(w t / 2) instead of 1 - cos(w t) so small times do not cancel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import singledispatch

import numpy as np
from scipy.optimize import brentq

from .config import Tolerance
from .current import DipoleCurrent, SpectralWeight
from .errors import DomainError, InconsistencyError
from .oracle import truncation_radius, weight_integral_fn
from .special import dawson, gamma_half
from .static import static_energy, static_photon_number

MAX_CUMULANT_ORDER = 4
ASYMPTOTIC_MIN_T = 10.0  # in units of eps


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise DomainError("the current is off before t = 0; t must be non-negative")


# --- single-mode amplitudes ------------------------------------------------

@dataclass(frozen=True)
class ModeAmplitude:
    alpha: complex
    phi: complex
    omega: float
    lambda_static: complex

    @property
    def occupation(self) -> float:
        return abs(self.alpha) ** 2


def mode_amplitude(lam: complex, omega: float, t: float) -> ModeAmplitude:
    """alpha = (e^{i w t} - 1) lambda and Phi = (1 + i w t - e^{i w t}) |lambda|^2."""
    _check_time(t)
    if not omega > 0:
        raise DomainError("omega must be positive")
    lam = complex(lam)
    ph = cmath.exp(1j * omega * t)
    # e^{ix} - 1 = 2i sin(x/2) e^{ix/2} avoids cancellation for small w t
    em1 = 2j * math.sin(0.5 * omega * t) * cmath.exp(0.5j * omega * t)
    alpha = em1 * lam
    phi = (1j * omega * t - em1) * abs(lam) ** 2
    return ModeAmplitude(alpha, phi, float(omega), lam)


def spectral_modes(w: SpectralWeight, n_modes: int = 400, tol: Tolerance | None = None):
    """Discretize W into (omega_j, |lambda_j|) with |lambda_j|^2 = W(w_j) dw_j / w_j^3.

    Gauss-Legendre nodes on [0, x_max / scale]; sums over these modes reproduce
    the weight integrals to quadrature accuracy.
    """
    tol = tol or Tolerance()
    x_max = truncation_radius(w.decay, tol) / w.scale
    x, wx = np.polynomial.legendre.leggauss(n_modes)
    om = 0.5 * x_max * (x + 1.0)
    dw = 0.5 * x_max * wx
    lam = np.sqrt(w(om) * dw / om**3)
    return om, lam


def overlap_static_expanding(n_tilde: float) -> float:
    """|<static|expanding(t)>| = exp(-N~/2), for every t."""
    if not (n_tilde >= 0 and math.isfinite(n_tilde)):
        raise DomainError("photon number must be non-negative and finite")
    return math.exp(-0.5 * n_tilde)


def log_overlap(n_tilde: float) -> float:
    """Natural log of the overlap; stays finite where the overlap itself underflows."""
    if not (n_tilde >= 0 and math.isfinite(n_tilde)):
        raise DomainError("photon number must be non-negative and finite")
    return -0.5 * n_tilde


def overlap_from_modes(omegas, lambdas, t: float, e_tilde: float | None = None) -> complex:
    """<static|expanding(t)> assembled mode by mode from alpha and Phi.

    Each mode contributes the coherent-state overlap of amplitude lambda with
    alpha e^{-i w t}, plus the phase Phi; the static state carries e^{i E~ t}.
    """
    _check_time(t)
    log_sum = []
    e_acc = []
    for om, lam in zip(np.asarray(omegas, float), np.asarray(lambdas, complex)):
        m = mode_amplitude(lam, om, t)
        gamma = m.alpha * cmath.exp(-1j * om * t)
        log_sum.append(1j * m.phi.imag - 0.5 * abs(lam) ** 2 - 0.5 * abs(gamma) ** 2
                       + lam.conjugate() * gamma)
        e_acc.append(-om * abs(lam) ** 2)
    if e_tilde is None:
        e_tilde = math.fsum(e_acc)
    re = math.fsum(z.real for z in log_sum)
    im = math.fsum([z.imag for z in log_sum] + [e_tilde * t])
    return cmath.exp(complex(re, im))


# --- energy split ----------------------------------------------------------

@singledispatch
def free_field_energy(src, t: float, tol: Tolerance | None = None) -> float:
    """<H0>(t) = -2 E~ - 2 int W cos(w t)/w^2 = 4 int W sin^2(w t/2)/w^2."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@free_field_energy.register
def _(src: DipoleCurrent, t, tol=None):
    _check_time(t)
    e = static_energy(src)
    y = np.asarray(t, dtype=float) / src.eps
    g = np.exp(-0.5 * y * y)
    # 1 - g + y^2 g; use expm1 so the small-t limit keeps full relative accuracy
    val = -2.0 * e * (-np.expm1(-0.5 * y * y) + y * y * g)
    return float(val) if np.ndim(t) == 0 else val


@free_field_energy.register
def _(src: SpectralWeight, t, tol=None):
    _check_time(t)
    if t == 0:
        return 0.0

    def fn(om):
        return 4.0 * np.sin(0.5 * om * t) ** 2 / om**2

    return weight_integral_fn(src, fn, t * src.scale, tol).value


def interaction_energy(src, t: float, tol: Tolerance | None = None) -> float:
    """<H1>(t) = -<H0>(t)."""
    return -free_field_energy(src, t, tol)


def total_energy(src, t: float, tol: Tolerance | None = None) -> float:
    h0 = free_field_energy(src, t, tol)
    return h0 + (-h0)


def free_field_energy_limit(e_tilde: float) -> float:
    return -2.0 * e_tilde


# --- cumulants and energy statistics ---------------------------------------

@dataclass
class CumulantSet:
    h: dict[int, float]

    def __post_init__(self):
        for n, v in self.h.items():
            if not math.isfinite(v):
                raise DomainError(f"h_{n} is not finite")

    def __getitem__(self, n: int) -> float:
        return self.h[n]


def _check_order(n_max):
    if not 2 <= n_max <= MAX_CUMULANT_ORDER:
        raise DomainError(f"n_max must lie in 2..{MAX_CUMULANT_ORDER}")


@singledispatch
def cumulants(src, n_max: int = 4, tol: Tolerance | None = None) -> CumulantSet:
    """h_n = int W w^{n-3}."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@cumulants.register
def _(src: DipoleCurrent, n_max=4, tol=None):
    _check_order(n_max)
    mu2, eps = src.mu_abs**2, src.eps
    # Gamma(1 + n/2) = gamma_half(n + 1)
    return CumulantSet({n: mu2 * 2 ** (n / 2) * gamma_half(n + 1) / (6 * math.pi**2 * eps ** (n + 2))
                        for n in range(2, n_max + 1)})


@cumulants.register
def _(src: SpectralWeight, n_max=4, tol=None):
    _check_order(n_max)
    out = {}
    for n in range(2, n_max + 1):
        out[n] = weight_integral_fn(src, lambda om, p=n - 3: om**p, 0.0, tol).value
    return CumulantSet(out)


@dataclass
class EnergyStats:
    mean: float
    variance: float
    sigma: float
    skewness: float
    excess_kurtosis: float
    moments: dict[int, float] = field(default_factory=dict)


def energy_stats(cs: CumulantSet) -> EnergyStats:
    h = cs.h
    h2 = h[2]
    h3, h4 = h.get(3), h.get(4)
    moments = {1: 0.0, 2: h2}
    if h3 is not None:
        moments[3] = h3
    if h4 is not None:
        moments[4] = h4 + 3 * h2 * h2
    if h2 == 0:
        if any(v != 0 for v in h.values()):
            raise InconsistencyError("zero variance with nonzero higher cumulants")
        raise InconsistencyError("skewness and kurtosis are undefined for zero variance")
    skew = h3 / h2**1.5 if h3 is not None else math.nan
    kurt = h4 / h2**2 if h4 is not None else math.nan
    return EnergyStats(0.0, h2, math.sqrt(h2), skew, kurt, moments)


# --- survival amplitude ----------------------------------------------------

def _x_minus_sin(x):
    x = np.asarray(x, dtype=float)
    out = x - np.sin(x)
    small = np.abs(x) < 0.5
    if np.any(small):
        xs = x[small]
        x2 = xs * xs
        term = xs * x2 / 6.0
        acc = term.copy()
        for k in range(1, 10):
            term = -term * x2 / ((2 * k + 2) * (2 * k + 3))
            acc = acc + term
        out[small] = acc
    return out


@singledispatch
def log_survival_amplitude(src, s: float, tol: Tolerance | None = None) -> complex:
    """log F(s), F(s) = exp(int W (e^{-i s w} - 1 + i s w)/w^3)."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@log_survival_amplitude.register
def _(src: DipoleCurrent, s, tol=None):
    n = static_photon_number(src)
    eps = src.eps
    s = np.asarray(s, dtype=float)
    u = s / (math.sqrt(2.0) * eps)
    re = -2.0 * n * u * dawson(u)
    im = n * math.sqrt(math.pi / 2) * (s / eps) * (-np.expm1(-0.5 * (s / eps) ** 2))
    out = re + 1j * im
    return complex(out) if out.ndim == 0 else out


@log_survival_amplitude.register
def _(src: SpectralWeight, s, tol=None):
    s = float(s)
    if s == 0:
        return 0j
    a = abs(s) * src.scale
    re = weight_integral_fn(src, lambda om: -2.0 * np.sin(0.5 * s * om) ** 2 / om**3, a, tol).value
    im = weight_integral_fn(src, lambda om: _x_minus_sin(s * om) / om**3, a, tol).value
    return complex(re, im)


def survival_amplitude(src, s, tol: Tolerance | None = None):
    out = np.exp(log_survival_amplitude(src, s, tol))
    return complex(out) if np.ndim(out) == 0 else out


_STENCILS = {
    1: (np.array([-2, -1, 0, 1, 2]), np.array([1, -8, 0, 8, -1]) / 12.0),
    2: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0),
    3: (np.arange(-3, 4), np.array([1, -8, 13, 0, -13, 8, -1]) / 8.0),
    4: (np.arange(-3, 4), np.array([-1, 12, -39, 56, -39, 12, -1]) / 6.0),
}


def hamiltonian_moments_fd(src, n_max: int = 4, step: float | None = None,
                           tol: Tolerance | None = None) -> dict[int, float]:
    """<H^n> = Re(i^n F^(n)(0)) from fourth-order central differences, Richardson extrapolated once."""
    if not 1 <= n_max <= 4:
        raise DomainError("finite-difference moments are available for n = 1..4")
    scale = 1.0 / src.eps if isinstance(src, DipoleCurrent) else src.scale
    h = step if step is not None else 0.05 / scale
    cache: dict[float, complex] = {}

    def f(s):
        if s not in cache:
            cache[s] = survival_amplitude(src, s, tol)
        return cache[s]

    def deriv(n, hh):
        offs, coef = _STENCILS[n]
        return sum(c * f(float(o * hh)) for o, c in zip(offs, coef) if c != 0) / hh**n

    out = {}
    for n in range(1, n_max + 1):
        d = (16.0 * deriv(n, 0.5 * h) - deriv(n, h)) / 15.0
        out[n] = float((1j**n * d).real)
    return out


# --- photon number ---------------------------------------------------------

@singledispatch
def photon_number(src, t: float, tol: Tolerance | None = None):
    """N(t) = 2 N~ - 2 int W cos(w t)/w^3 = 4 int W sin^2(w t/2)/w^3."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@photon_number.register
def _(src: DipoleCurrent, t, tol=None):
    _check_time(t)
    u = np.asarray(t, dtype=float) / (math.sqrt(2.0) * src.eps)
    val = 4.0 * static_photon_number(src) * u * dawson(u)
    return float(val) if np.ndim(t) == 0 else val


@photon_number.register
def _(src: SpectralWeight, t, tol=None):
    _check_time(t)
    if t == 0:
        return 0.0

    def fn(om):
        return 4.0 * np.sin(0.5 * om * t) ** 2 / om**3

    return weight_integral_fn(src, fn, t * src.scale, tol).value


def photon_sigma(n_t):
    """Coherent states stay Poissonian: sigma_N = sqrt(N)."""
    if np.any(np.asarray(n_t) < 0):
        raise DomainError("photon number must be non-negative")
    return np.sqrt(n_t) if np.ndim(n_t) else math.sqrt(n_t)


def photon_number_limit(n_tilde: float) -> float:
    return 2.0 * n_tilde


def photon_number_asymptotic(n_tilde: float, eps: float, t):
    """2 N~ (1 + (eps/t)^2), valid once the front has left the source (t >= 10 eps)."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    if np.any(np.asarray(t) < ASYMPTOTIC_MIN_T * eps):
        raise DomainError("asymptotic photon number requires t >= 10 eps")
    val = 2.0 * n_tilde * (1.0 + (eps / np.asarray(t, dtype=float)) ** 2)
    return float(val) if np.ndim(t) == 0 else val


def photon_peak(c: DipoleCurrent) -> tuple[float, float]:
    """(t_peak, N(t_peak)) of the photon-number overshoot.

    The maximum of u daw(u) satisfies daw(u) (1 - 2u^2) + u = 0; solve by brentq.
    """
    u = brentq(lambda x: dawson(x) * (1 - 2 * x * x) + x, 1.0, 2.0, xtol=1e-15)
    t = u * math.sqrt(2.0) * c.eps
    return t, photon_number(c, t)
