"""Static and expanding dipole fields A, B, E.

All fields are built from scalar radial coefficients that multiply the
fixed vector structures

    A = a(r, t) (mu x r_hat)
    B = b_rad (mu . r_hat) r_hat + b_tan (mu - (mu . r_hat) r_hat)
    E = e(r, t) (mu x r_hat)

so B = curl A gives b_rad = 2a/r and b_tan = a/r + da/dr. Near r = 0 the
closed forms are 0/0, and even power series in r are used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import Tolerance
from .current import DipoleCurrent
from .errors import DomainError, RegimeError
from .oracle import integrate_interval
from .special import SQRT_PI, erf, erfc, hermite_table, nascent_delta_1d, nascent_delta_1d_prime

SERIES_RADIUS = 0.1  # in units of eps
_SERIES_TERMS = 24
_GAUSS_CUTOFF = 40.0  # exp(-y^2) terms dropped beyond this y = t/eps
FRONT_MIN_T = 5.0
LOCALIZATION_MIN_T = 10.0
_FOUR_PI = 4 * math.pi


@dataclass
class RadialCoefficients:
    r: np.ndarray
    a: np.ndarray
    b_rad: np.ndarray
    b_tan: np.ndarray
    e: np.ndarray


def _series(z, y, eps, static):
    """Even power series of g = a/r, r g' and q = e/r about r = 0."""
    m = np.arange(1, _SERIES_TERMS + 1)
    fact = np.array([math.factorial(k) for k in range(2 * _SERIES_TERMS + 2)], dtype=float)
    c = 1.0 / (2 * SQRT_PI**3 * eps**3)
    zp = z[None, :] ** (2 * m[:, None] - 2)
    coef_s = ((-1.0) ** (m + 1) * 2 * m / (fact[m] * (2 * m + 1)))[:, None]
    g = c * np.sum(coef_s * zp, axis=0)
    rg = c * np.sum(coef_s * (2 * m[:, None] - 2) * zp, axis=0)
    q = np.zeros_like(z)
    if not static and y <= _GAUSS_CUTOFF:
        gy = math.exp(-y * y)
        h = hermite_table(y, 2 * _SERIES_TERMS + 1)
        ce = (h[2 * m] * 2 * m / fact[2 * m + 1])[:, None]
        g = g + c * gy * np.sum(ce * zp, axis=0)
        rg = rg + c * gy * np.sum(ce * (2 * m[:, None] - 2) * zp, axis=0)
        cq = (h[2 * m + 1] * 2 * m / fact[2 * m + 1])[:, None]
        q = gy / (2 * SQRT_PI**3 * eps**4) * np.sum(cq * zp, axis=0)
    return g, rg, q


def _direct(r, t, eps, static):
    z = r / eps
    d0 = nascent_delta_1d(r, eps)
    d0p = nascent_delta_1d_prime(r, eps)
    if static:
        s = erf(z)
        v = vp = w = wp = np.zeros_like(r)
    else:
        y = t / eps
        # erf(z) - (erf(z - y) + erf(z + y))/2 written with erfc: no cancellation beyond the front
        s = 0.5 * erfc(z - y) + 0.5 * erfc(z + y) - erfc(z)
        dm, dp = nascent_delta_1d(r - t, eps), nascent_delta_1d(r + t, eps)
        dmp, dpp = nascent_delta_1d_prime(r - t, eps), nascent_delta_1d_prime(r + t, eps)
        v, vp = dm + dp, dmp + dpp
        w, wp = dm - dp, dmp - dpp
    a = s / (_FOUR_PI * r**2) - d0 / (2 * math.pi * r) + v / (_FOUR_PI * r)
    # d/dr of a, using d/dr erf(r/eps) = 2 delta(r) and dS/dr = 2 delta(r) - v
    ap = (d0 / (math.pi * r**2) - v / (2 * math.pi * r**2) - s / (2 * math.pi * r**3)
          - d0p / (2 * math.pi * r) + vp / (_FOUR_PI * r))
    g = a / r
    e = (wp / r - w / r**2) / _FOUR_PI
    return a, 2 * g, g + ap, e


def radial_coefficients(eps: float, r, t: float | None = None) -> RadialCoefficients:
    """Radial coefficients per unit moment; t=None gives the static field."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    static = t is None
    if not static and t < 0:
        raise DomainError("t must be non-negative")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise DomainError("radii must be finite and non-negative")
    a = np.empty_like(r)
    br = np.empty_like(r)
    bt = np.empty_like(r)
    e = np.empty_like(r)
    near = r < SERIES_RADIUS * eps
    if near.any():
        rn = r[near]
        g, rg, q = _series(rn / eps, 0.0 if static else t / eps, eps, static)
        a[near], br[near], bt[near], e[near] = rn * g, 2 * g, 2 * g + rg, rn * q
    far = ~near
    if far.any():
        a[far], br[far], bt[far], e[far] = _direct(r[far], 0.0 if static else float(t), eps, static)
    return RadialCoefficients(r, a, br, bt, e)


def _geometry(c: DipoleCurrent, r):
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise DomainError("positions must be 3-vectors")
    rr = np.linalg.norm(r, axis=-1)
    safe = np.where(rr > 0, rr, 1.0)
    rhat = np.where((rr > 0)[..., None], r / safe[..., None], 0.0)
    return r, rr, rhat


def _assemble(c, r, t, which):
    r, rr, rhat = _geometry(c, r)
    co = radial_coefficients(c.eps, rr.ravel(), t)
    shape = rr.shape
    mu = c.mu_vec
    if which == "b":
        mdr = rhat @ mu
        br, bt = co.b_rad.reshape(shape), co.b_tan.reshape(shape)
        out = br[..., None] * mdr[..., None] * rhat + bt[..., None] * (mu - mdr[..., None] * rhat)
        # at r = 0 both coefficients coincide and B = b mu
        out = np.where((rr == 0)[..., None], br[..., None] * mu, out)
    else:
        coef = (co.a if which == "a" else co.e).reshape(shape)
        out = np.cross(mu, rhat) * coef[..., None]
    return out


def static_vector_field(c: DipoleCurrent, r) -> np.ndarray:
    return _assemble(c, r, None, "a")


def static_magnetic_field(c: DipoleCurrent, r) -> np.ndarray:
    return _assemble(c, r, None, "b")


def static_electric_field(c: DipoleCurrent, r) -> np.ndarray:
    return np.zeros(np.broadcast(np.asarray(r, float), c.mu_vec).shape)


def point_dipole_vector_field(c: DipoleCurrent, r) -> np.ndarray:
    """Long-distance form (mu x r_hat) / (4 pi r^2)."""
    r, rr, rhat = _geometry(c, r)
    if np.any(rr == 0):
        raise DomainError("point-dipole field is singular at r = 0")
    return np.cross(c.mu_vec, rhat) / (_FOUR_PI * rr**2)[..., None]


def static_magnetic_field_terms(c: DipoleCurrent, r) -> list[np.ndarray]:
    """The four terms of the static magnetic field in its explicit erf / delta form.

    [dipole term with erf, mu delta_3d, -(3(mu.r)r - mu) delta/(2 pi r^2),
     (mu.r)r delta'/(2 pi r)]. Requires r > 0.
    """
    r, rr, rhat = _geometry(c, r)
    if np.any(rr == 0):
        raise DomainError("term-wise form requires r > 0")
    eps = c.eps
    mu = c.mu_vec
    mdr = (rhat @ mu)[..., None]
    quad = 3 * mdr * rhat - mu
    d = np.asarray(nascent_delta_1d(rr, eps))[..., None]
    dp = np.asarray(nascent_delta_1d_prime(rr, eps))[..., None]
    d3 = (np.exp(-(rr / eps) ** 2) / (SQRT_PI * eps) ** 3)[..., None]
    rr_ = rr[..., None]
    return [
        quad / (_FOUR_PI * rr_**3) * erf(rr_ / eps),
        mu * d3,
        -quad / (2 * math.pi * rr_**2) * d,
        mdr * rhat / (2 * math.pi * rr_) * dp,
    ]


def _check_t(t):
    if t < 0:
        raise DomainError("t must be non-negative")


def expanding_vector_field(c: DipoleCurrent, t: float, r) -> np.ndarray:
    _check_t(t)
    return _assemble(c, r, float(t), "a")


def expanding_magnetic_field(c: DipoleCurrent, t: float, r) -> np.ndarray:
    _check_t(t)
    return _assemble(c, r, float(t), "b")


def expanding_electric_field(c: DipoleCurrent, t: float, r) -> np.ndarray:
    """E = -dA/dt = (mu x r_hat)/(4 pi) d/dr[(delta(r - t) - delta(r + t))/r]."""
    _check_t(t)
    return _assemble(c, r, float(t), "e")


@dataclass
class FieldSample:
    t: float | None
    r: np.ndarray
    a: np.ndarray
    b: np.ndarray
    e: np.ndarray


def field_sample(c: DipoleCurrent, r, t: float | None = None) -> FieldSample:
    """All three fields at r; t=None selects the static state (where E = 0)."""
    r = np.asarray(r, dtype=float)
    if t is None:
        return FieldSample(None, r, static_vector_field(c, r), static_magnetic_field(c, r),
                           static_electric_field(c, r))
    return FieldSample(t, r, expanding_vector_field(c, t, r), expanding_magnetic_field(c, t, r),
                       expanding_electric_field(c, t, r))


# --- radial profiles -------------------------------------------------------

PROFILE_COLUMNS = ("coeffA", "coeffB_rad", "coeffB_tan", "coeffE")


@dataclass
class RadialProfile:
    """Dimensionless coefficient scans: eps^2 a, eps^3 b_rad, eps^3 b_tan, eps^3 e."""

    t: float
    radii: np.ndarray
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        if self.radii.ndim != 1 or len(self.radii) == 0:
            raise DomainError("radii must be a non-empty 1D grid")
        if np.any(np.diff(self.radii) <= 0):
            raise DomainError("radii must be strictly increasing")
        for k, v in self.values.items():
            if not np.all(np.isfinite(v)):
                raise DomainError(f"profile column {k} is not finite")


def radial_profile(c: DipoleCurrent, t: float, radii, references: bool = True) -> RadialProfile:
    """Expanding coefficients on the grid, plus static and point-dipole A columns."""
    _check_t(t)
    eps = c.eps
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise DomainError("profile radii must be positive")
    co = radial_coefficients(eps, radii, float(t))
    vals = {
        "coeffA": co.a * eps**2,
        "coeffB_rad": co.b_rad * eps**3,
        "coeffB_tan": co.b_tan * eps**3,
        "coeffE": co.e * eps**3,
    }
    if references:
        st = radial_coefficients(eps, radii)
        vals["coeffA_static"] = st.a * eps**2
        vals["coeffA_point"] = eps**2 / (_FOUR_PI * radii**2)
    return RadialProfile(float(t), radii, vals)


# --- front location and energy localization --------------------------------

def _abs_e(c, t):
    def f(r):
        return np.abs(radial_coefficients(c.eps, np.atleast_1d(r), t).e)
    return f


def locate_front(c: DipoleCurrent, t: float) -> tuple[float, float]:
    """(r_front, width): argmax of |E| and the full width between its outermost half-maximum points."""
    eps = c.eps
    if t < FRONT_MIN_T * eps:
        raise RegimeError("the front is not separated from the source before t = 5 eps")
    f = _abs_e(c, t)
    grid = np.linspace(max(t - 8 * eps, 0.5 * t), t + 8 * eps, 3201)
    vals = f(grid)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: -f(x)[0], bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(t, eps)})
    r_peak = float(res.x)
    half = 0.5 * float(f(r_peak)[0])
    above = np.nonzero(vals >= half)[0]
    j0, j1 = above[0], above[-1]

    def g(x):
        return f(x)[0] - half

    left = brentq(g, grid[j0 - 1], grid[j0], xtol=1e-12 * eps) if j0 > 0 else grid[0]
    right = brentq(g, grid[j1], grid[j1 + 1], xtol=1e-12 * eps) if j1 < len(grid) - 1 else grid[-1]
    return r_peak, float(right - left)


def electric_support_fraction(c: DipoleCurrent, t: float, half_width: float | None = None) -> float:
    """Fraction of int |E|^2 d^3r lying in |r - t| <= half_width (default 2 eps)."""
    eps = c.eps
    hw = 2 * eps if half_width is None else half_width
    tol = Tolerance(1e-10, 0.0)

    def dens(r):
        return radial_coefficients(eps, r.ravel(), t).e.reshape(r.shape) ** 2 * r**2

    lo = max(t - 12 * eps, 0.0)
    inner = integrate_interval(dens, max(t - hw, 0.0), t + hw, tol, pieces=16).value
    total = (integrate_interval(dens, lo, max(t - hw, lo), tol, pieces=16).value if t - hw > lo else 0.0)
    total += inner + integrate_interval(dens, t + hw, t + 12 * eps, tol, pieces=16).value
    return inner / total


def energy_density_shell(c: DipoleCurrent, t: float, n_polar: int = 32):
    """Radial density int dOmega (|E|^2 + |B|^2 - |B_static|^2)/2 r^2.

    Uses the classical mean-field density of the expectation values; the
    static magnetic background is subtracted so the integral is the excess
    free-field energy.
    """
    u, wu = np.polynomial.legendre.leggauss(n_polar)
    cos2 = u * u
    sin2 = 1.0 - cos2
    mu2 = c.mu_abs**2
    eps = c.eps

    def dens(r):
        shape = np.shape(r)
        rr = np.ravel(r)
        ex = radial_coefficients(eps, rr, t)
        st = radial_coefficients(eps, rr)
        e2 = ex.e[:, None] ** 2 * sin2[None, :]
        b2 = ex.b_rad[:, None] ** 2 * cos2[None, :] + ex.b_tan[:, None] ** 2 * sin2[None, :]
        s2 = st.b_rad[:, None] ** 2 * cos2[None, :] + st.b_tan[:, None] ** 2 * sin2[None, :]
        ang = 2 * math.pi * ((e2 + b2 - s2) @ wu)
        return (0.5 * mu2 * ang * rr**2).reshape(shape)

    return dens


def energy_localization(c: DipoleCurrent, t: float, shell: tuple[float, float],
                        tol: Tolerance | None = None) -> float:
    """Excess free-field energy inside r_lo <= r <= r_hi."""
    eps = c.eps
    if t < LOCALIZATION_MIN_T * eps:
        raise RegimeError("energy localization requires t >= 10 eps")
    r_lo, r_hi = map(float, shell)
    if not 0 <= r_lo < r_hi:
        raise DomainError("shell must satisfy 0 <= r_lo < r_hi")
    tol = tol or Tolerance(1e-9, 1e-14 * c.mu_abs**2 / eps**3)
    dens = energy_density_shell(c, t)
    pieces = max(8, int(math.ceil((r_hi - r_lo) / eps)) * 2)
    bps = [t + k * eps for k in range(-6, 7)]
    return integrate_interval(dens, r_lo, r_hi, tol, pieces=pieces, breakpoints=bps).value
