"""Brute-force quadrature used as ground truth for every closed form.

The core is a vectorized globally adaptive Gauss-Kronrod (G7/K15) driver with
QUADPACK-style error estimates. Segment contributions are combined with
math.fsum so the result does not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import spherical_jn

from .config import Tolerance, default_tolerance
from .current import (
    DipoleCurrent,
    FourierCurrent,
    SpectralWeight,
    check_transverse,
    sphere_rule,
)
from .errors import DivergenceError, RegimeError

EVAL_BUDGET = 1_000_000
MAX_OSC_RATIO = 1.0e4
_EPS = np.finfo(float).eps
_MIN_WIDTH_FRACTION = 2.0**-100

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
])
_WK0 = 0.209482141084727828012999174891714
_WG_ODD = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
])
_WG0 = 0.417959183673469387755102040816327

_NODES = np.concatenate([-_XK, [0.0], _XK[::-1]])
_KW = np.concatenate([_WK, [_WK0], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG_ODD
_GW[[13, 11, 9]] = _WG_ODD
_GW[7] = _WG0


@dataclass
class QuadResult:
    value: float
    est_error: float
    evaluations: int
    converged: bool
    pieces: np.ndarray = field(default=None, repr=False)


def compensated_sum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float).reshape(x.shape)
    k = half * (fx @ _KW)
    g = half * (fx @ _GW)
    resabs = np.abs(half) * (np.abs(fx) @ _KW)
    mean = k / np.where(half == 0, 1.0, 2 * half)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ _KW)
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * diff / resasc) ** 1.5), diff)
    floor = 50 * _EPS * resabs
    err = np.maximum(scaled, floor)
    if not np.all(np.isfinite(k)):
        raise DivergenceError("integrand produced non-finite values")
    return k, err, scaled > floor


def integrate_segments(f, edges, tol: Tolerance | None = None, budget: int = EVAL_BUDGET) -> QuadResult:
    """Globally adaptive integration of vectorized ``f`` over the union of [edges[i], edges[i+1]]."""
    tol = tol or default_tolerance()
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1].copy(), edges[1:].copy()
    span = float(edges[-1] - edges[0])
    vals, errs, live = _gk15(f, a, b)
    neval = 15 * len(a)
    while True:
        total = compensated_sum(vals)
        err = compensated_sum(errs)
        target = tol.target(total)
        if err <= target:
            return QuadResult(total, err, neval, True, vals)
        share = target * (b - a) / span
        # segments already at their roundoff floor cannot improve by bisection
        pick = (errs > share) & live & ((b - a) > _MIN_WIDTH_FRACTION * span)
        n_pick = int(np.count_nonzero(pick))
        if n_pick == 0 or neval + 30 * n_pick > budget:
            return QuadResult(total, err, neval, False, vals)
        pa, pb = a[pick], b[pick]
        pm = 0.5 * (pa + pb)
        na = np.concatenate([pa, pm])
        nb = np.concatenate([pm, pb])
        nv, ne, nl = _gk15(f, na, nb)
        neval += 15 * len(na)
        keep = ~pick
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        live = np.concatenate([live[keep], nl])


def integrate_interval(f, lo: float, hi: float, tol: Tolerance | None = None, pieces: int = 8,
                       breakpoints=()) -> QuadResult:
    pts = set(np.linspace(lo, hi, pieces + 1).tolist())
    pts.update(p for p in breakpoints if lo < p < hi)
    return integrate_segments(f, sorted(pts), tol)


def truncation_radius(decay: str, tol: Tolerance) -> float:
    """Upper cutoff in units of the decay scale."""
    lnv = math.log(1.0 / tol.rel)
    if decay == "gaussian":
        return math.sqrt(2.0 * lnv) + 10.0
    if decay == "exponential":
        return lnv + 40.0
    raise ValueError(f"no finite truncation for decay class {decay!r}")


def integrate_decaying(f, decay: str = "gaussian", scale: float = 1.0,
                       tol: Tolerance | None = None, x_max: float | None = None) -> QuadResult:
    """int_0^inf f(x) dx for f decaying on the length scale 1/scale."""
    tol = tol or default_tolerance()
    if decay == "algebraic":
        # x = u / (1 - u) / scale maps [0, 1) onto [0, inf)
        def g(u):
            x = u / (1.0 - u) / scale
            return f(x) / ((1.0 - u) ** 2 * scale)

        return integrate_segments(g, np.linspace(0.0, 1.0, 17), tol)
    if x_max is None:
        x_max = truncation_radius(decay, tol) / scale
    return integrate_segments(f, np.linspace(0.0, x_max, 9), tol)


def oscillatory_edges(a: float, x_max: float) -> np.ndarray:
    seg = math.pi / max(a, 1.0)
    n = max(int(math.ceil(x_max / seg)), 1)
    return np.linspace(0.0, n * seg, n + 1)


def integrate_oscillatory(f_envelope, a: float, kind: str = "cos", tol: Tolerance | None = None,
                          x_max: float | None = None) -> QuadResult:
    """int_0^inf f_envelope(x) cos(a x) dx (or sin) for a Gaussian-decaying envelope.

    The range is cut into half-periods of length pi / max(a, 1).
    """
    tol = tol or default_tolerance()
    if a < 0:
        raise ValueError("a must be non-negative")
    if a > MAX_OSC_RATIO:
        raise RegimeError(f"frequency ratio {a:g} exceeds {MAX_OSC_RATIO:g}; use closed forms")
    trig = {"cos": np.cos, "sin": np.sin}[kind]
    if x_max is None:
        x_max = truncation_radius("gaussian", tol)

    def g(x):
        return f_envelope(x) * trig(a * x)

    return integrate_segments(g, oscillatory_edges(a, x_max), tol)


def integrate_oscillating(f, a: float, tol: Tolerance | None = None, x_max: float | None = None) -> QuadResult:
    """Like integrate_oscillatory but for an integrand with the oscillation already folded in."""
    tol = tol or default_tolerance()
    if a > MAX_OSC_RATIO:
        raise RegimeError(f"frequency ratio {a:g} exceeds {MAX_OSC_RATIO:g}; use closed forms")
    if x_max is None:
        x_max = truncation_radius("gaussian", tol)
    return integrate_segments(f, oscillatory_edges(a, x_max), tol)


# --- spectral-weight integrals ---------------------------------------------

def _weight_integrand(w: SpectralWeight, power: float, osc=None):
    sc = w.scale

    def g(x):
        om = sc * x
        val = w(om) / om**power
        if osc is not None:
            val = val * osc(x)
        return val

    return g


def weight_integral(w: SpectralWeight, power: float, t: float = 0.0, kind: str = "cos",
                    tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf dw W(w) w^-power {cos, sin}(w t), with a truncation-doubling divergence check.

    Raises DivergenceError when the integral does not converge.
    """
    tol = tol or default_tolerance()
    sc = w.scale
    a = abs(t) * sc
    trig = {"cos": np.cos, "sin": np.sin}[kind]
    osc = None if t == 0 and kind == "cos" else (lambda x: trig(a * x * math.copysign(1.0, t)))
    if t == 0 and kind == "sin":
        return QuadResult(0.0, 0.0, 0, True, np.zeros(1))
    g = _weight_integrand(w, power, osc)
    res = _integrate_weighted(g, w, a, tol)
    res = QuadResult(res.value * sc, res.est_error * sc, res.evaluations, res.converged, res.pieces)
    return res


def _integrate_weighted(g, w: SpectralWeight, a: float, tol: Tolerance) -> QuadResult:
    if a > MAX_OSC_RATIO:
        raise RegimeError(f"frequency ratio {a:g} exceeds {MAX_OSC_RATIO:g}; use closed forms")
    if w.decay == "algebraic":
        res = integrate_decaying(g, "algebraic", 1.0, tol)
        if not res.converged:
            raise DivergenceError(f"spectral integral failed to converge (est. error {res.est_error:.3e})")
        return res
    x_max = truncation_radius(w.decay, tol)
    res = integrate_segments(g, oscillatory_edges(a, x_max), tol)
    if not res.converged:
        raise DivergenceError(f"spectral integral failed to converge (est. error {res.est_error:.3e})")
    wider = integrate_segments(g, oscillatory_edges(a, 2 * x_max), tol)
    if abs(wider.value - res.value) > 10 * tol.rel * max(abs(res.value), 1e-300) + tol.abs:
        raise DivergenceError("spectral integral changes under truncation doubling (UV divergence)")
    return res


def weight_integral_fn(w: SpectralWeight, fn: Callable, a: float, tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf dw W(w) fn(w) where fn oscillates with frequency ratio ``a`` in x = w / scale."""
    tol = tol or default_tolerance()
    sc = w.scale

    def g(x):
        om = sc * x
        return w(om) * fn(om)

    res = _integrate_weighted(g, w, a, tol)
    return QuadResult(res.value * sc, res.est_error * sc, res.evaluations, res.converged, res.pieces)


@dataclass
class DecayReport:
    power: int
    times: np.ndarray
    values: np.ndarray
    i0: float
    tail_max: float
    decayed: bool


def riemann_lebesgue_check(w: SpectralWeight, p: int, t_grid, tail_fraction: float = 0.25,
                           threshold: float = 1e-6, tol: Tolerance | None = None) -> DecayReport:
    """Evaluate I(t) = int W/w^p cos(w t) on t_grid and report its late-time size."""
    if p not in (2, 3):
        raise ValueError("p must be 2 or 3")
    tol = tol or default_tolerance()
    t_grid = np.asarray(t_grid, dtype=float)
    i0 = weight_integral(w, p, 0.0, tol=tol).value
    # late-time values are ~0; measure them on the scale of I(0)
    late = Tolerance(tol.rel, max(tol.abs, tol.rel * abs(i0)))
    vals = np.array([weight_integral(w, p, float(t), tol=late).value for t in t_grid])
    n_tail = max(1, int(round(tail_fraction * len(t_grid))))
    tail_max = float(np.max(np.abs(vals[-n_tail:])))
    return DecayReport(p, t_grid, vals, i0, tail_max, tail_max <= threshold * abs(i0))


# --- closed-form integral families (for oracle comparisons) ----------------

def integral_I_quadrature(a: float, tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf exp(-x^2/4)/x sin(a x) dx."""
    def env(x):
        return np.exp(-x * x / 4.0) / x
    return integrate_oscillatory(env, a, "sin", tol, x_max=truncation_radius("gaussian", tol or default_tolerance()) * math.sqrt(2))


def integral_I1_quadrature(r: float, t: float, tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf exp(-x^2/4)/(2x) [sin(x (r-t)) + sin(x (r+t))] dx (r, t in units of eps)."""
    tol = tol or default_tolerance()

    def f(x):
        return np.exp(-x * x / 4.0) / (2 * x) * (np.sin(x * (r - t)) + np.sin(x * (r + t)))

    return integrate_oscillating(f, abs(r) + abs(t), tol, x_max=truncation_radius("gaussian", tol) * math.sqrt(2))


def integral_I2_quadrature(a: float, tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf x^2 exp(-x^2/2) cos(a x) dx."""
    return integrate_oscillatory(lambda x: x * x * np.exp(-x * x / 2.0), a, "cos", tol)


def integral_I3_quadrature(a: float, tol: Tolerance | None = None) -> QuadResult:
    """int_0^inf x exp(-x^2/2) cos(a x) dx."""
    return integrate_oscillatory(lambda x: x * np.exp(-x * x / 2.0), a, "cos", tol)


# --- angular reduction -----------------------------------------------------

def plane_wave_angular_average(kr):
    """int dOmega exp(i k.r) = 4 pi sin(kr)/(kr)."""
    return 4 * math.pi * np.sinc(np.asarray(kr, dtype=float) / math.pi)


def reduce_angular(jf: FourierCurrent, position, t: float = 0.0, expanding: bool = False,
                   angular_rule: tuple[int, int] = (96, 96)):
    """Radial integrand f(omega) (3-vector) with <A>(r) = int_0^inf f(omega) d omega.

    Static: f = (2 pi)^-3 int dOmega Re[J(omega k) exp(i omega k.r)].
    Expanding (current switched on at t = 0): the bracket gains a factor (1 - exp(-i omega t)).
    """
    r = np.asarray(position, dtype=float)
    dirs, wts = sphere_rule(*angular_rule)
    check_transverse(jf, dirs[None, :, :] * np.array([0.5, 2.0])[:, None, None])
    norm = 1.0 / (2 * math.pi) ** 3

    def f(omega):
        om = np.atleast_1d(np.asarray(omega, dtype=float))
        k = om[:, None, None] * dirs[None, :, :]
        phase = np.exp(1j * (k @ r))
        if expanding:
            phase = phase * (1.0 - np.exp(-1j * om * t))[:, None]
        j = jf(k) * phase[..., None]
        return norm * np.einsum("onc,n->oc", j.real, wts)

    return f


def dipole_radial_integrand(c: DipoleCurrent, r: float, t: float | None = None):
    """Coefficient of (mu x r_hat) in <A> as int_0^inf dk of this integrand.

    Obtained from the plane-wave angular average: -i (mu x k) exp(i k.r)
    averages to 4 pi k j1(k r) (mu x r_hat), j1 = -d/dx [sin x / x].
    """
    eps = c.eps

    def f(k):
        k = np.asarray(k, dtype=float)
        base = k * np.exp(-(eps * k) ** 2 / 4.0) * spherical_jn(1, k * r) / (2 * math.pi**2)
        if t is None:
            return base
        return base * (1.0 - np.cos(k * t))

    return f


def dipole_vector_coefficient_quadrature(c: DipoleCurrent, r: float, t: float | None = None,
                                         tol: Tolerance | None = None) -> QuadResult:
    tol = tol or default_tolerance()
    f = dipole_radial_integrand(c, r, t)
    a = (r + (t or 0.0)) * (1.0 / c.eps)
    x_max = math.sqrt(4 * math.log(1.0 / tol.rel)) + 12.0

    def g(x):
        return f(x / c.eps) / c.eps

    res = integrate_segments(g, oscillatory_edges(a, x_max), tol)
    return res


@dataclass
class MonteCarloResult:
    mean: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int


def monte_carlo_vector_field(c: DipoleCurrent, position, samples: int = 2_000_000,
                             seed: int = 20240515, t: float | None = None) -> MonteCarloResult:
    """3D Monte Carlo of int d^3k/(2 pi)^3 Re[J(k) exp(i k.r) (1 - e^{-i w t})] / w^2.

    k is drawn from the normalized Gaussian proportional to exp(-eps^2 k^2 / 4).
    """
    rng = np.random.default_rng(seed)
    r = np.asarray(position, dtype=float)
    sigma = math.sqrt(2.0) / c.eps
    norm = (2 * math.pi * sigma**2) ** 1.5  # int d^3k exp(-k^2/(2 sigma^2))
    acc = []
    chunk = 500_000
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        k = rng.normal(0.0, sigma, size=(n, 3))
        k2 = np.sum(k * k, axis=1)
        phase = k @ r
        # Re[-i (mu x k) e^{i phase}] = (mu x k) sin(phase)
        osc = np.sin(phase)
        if t is not None:
            w = np.sqrt(k2)
            # Re[-i e^{i phase} (1 - e^{-i w t})] = sin(phase) - sin(phase - w t)
            osc = osc - np.sin(phase - w * t)
        vals = np.cross(c.mu_vec, k) * (osc / k2)[:, None] * norm / (2 * math.pi) ** 3
        acc.append(vals)
        done += n
    allv = np.concatenate(acc)
    return MonteCarloResult(allv.mean(axis=0), allv.std(axis=0) / math.sqrt(samples), samples, seed)


# --- finite-difference field checks ----------------------------------------

def numerical_curl(field_fn, r, h: float) -> np.ndarray:
    """Central-difference curl of a vector field at the points r (..., 3)."""
    r = np.asarray(r, dtype=float)
    jac = np.empty(r.shape + (3,))  # jac[..., i, j] = d F_i / d x_j
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = h
        jac[..., :, j] = (field_fn(r + dx) - field_fn(r - dx)) / (2 * h)
    return np.stack([jac[..., 2, 1] - jac[..., 1, 2],
                     jac[..., 0, 2] - jac[..., 2, 0],
                     jac[..., 1, 0] - jac[..., 0, 1]], axis=-1)


def numerical_divergence(field_fn, r, h: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape[:-1])
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = h
        out = out + (field_fn(r + dx)[..., j] - field_fn(r - dx)[..., j]) / (2 * h)
    return out


def numerical_time_derivative(fn, t: float, h: float):
    """Fourth-order central difference of fn(t)."""
    return (fn(t - 2 * h) - 8 * fn(t - h) + 8 * fn(t + h) - fn(t + 2 * h)) / (12 * h)
