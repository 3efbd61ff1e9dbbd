"""Periodic-box mode sums that converge to the continuum spectral integrals.

Modes are k = 2 pi n / L for integer triples n != 0 with |k| <= cutoff. The
static amplitude of mode (k, sigma) is lambda = J(k).eta / (sqrt(2V) w^{3/2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .current import DipoleCurrent, dipole_j_fourier
from .errors import DomainError, RegimeError
from .static import static_energy, static_photon_number
from .dynamic import cumulants, photon_number

MIN_CUTOFF_EPS = 8.0
TARGETS = ("N_tilde", "E_tilde", "h2", "h3", "h4", "N_of_t")

# Leading error exponents in 1/L for each target. The summands are non-smooth
# only at k = 0, where w^n |lambda|^2 ~ |k|^(n-1) sin^2(theta). A homogeneous
# singularity of degree d gives errors L^-(3+d), L^-(5+d), ...; the n = 3
# summand is a polynomial there, so its error is exponentially small.
RICHARDSON_ORDERS = {"N_tilde": (2, 4), "E_tilde": (3, 5), "h2": (4, 6), "h3": (),
                     "h4": (6, 8), "N_of_t": (4, 6)}


@dataclass(frozen=True)
class BoxSpec:
    box_length: float
    k_cutoff: float

    def __post_init__(self):
        if not self.box_length > 0:
            raise DomainError("box length must be positive")
        if not self.k_cutoff > 2 * math.pi / self.box_length:
            raise DomainError("cutoff must exceed the smallest lattice wavenumber 2 pi / L")

    @property
    def volume(self) -> float:
        return self.box_length**3

    @property
    def n_max(self) -> int:
        return int(math.floor(self.k_cutoff * self.box_length / (2 * math.pi)))

    @classmethod
    def default(cls, eps: float = 1.0) -> BoxSpec:
        return cls(40.0 * eps, MIN_CUTOFF_EPS / eps)


@dataclass
class PolarizationBasis:
    eta1: np.ndarray
    eta2: np.ndarray

    def completeness(self) -> np.ndarray:
        return (self.eta1[..., :, None] * self.eta1[..., None, :]
                + self.eta2[..., :, None] * self.eta2[..., None, :])


def build_basis(k) -> PolarizationBasis:
    """Orthonormal transverse pair; eta1 is Gram-Schmidt of the least-aligned axis against k."""
    k = np.asarray(k, dtype=float)
    kn = np.linalg.norm(k, axis=-1, keepdims=True)
    if np.any(kn == 0):
        raise DomainError("polarization basis undefined at k = 0")
    khat = k / kn
    axis = np.argmin(np.abs(khat), axis=-1)
    e = np.eye(3)[axis]
    eta1 = e - np.sum(e * khat, axis=-1, keepdims=True) * khat
    eta1 /= np.linalg.norm(eta1, axis=-1, keepdims=True)
    eta2 = np.cross(khat, eta1)
    return PolarizationBasis(eta1, eta2)


def _slabs(spec: BoxSpec):
    """Yield lattice wavevectors slab by slab in n_x, excluding k = 0 and |k| > cutoff."""
    nm = spec.n_max
    rng = np.arange(-nm, nm + 1)
    ny, nz = np.meshgrid(rng, rng, indexing="ij")
    ny, nz = ny.ravel(), nz.ravel()
    dk = 2 * math.pi / spec.box_length
    for nx in rng:
        n2 = nx * nx + ny * ny + nz * nz
        keep = (n2 * dk * dk <= spec.k_cutoff**2) & (n2 > 0)
        if not keep.any():
            continue
        yield dk * np.stack([np.full(keep.sum(), nx), ny[keep], nz[keep]], axis=-1).astype(float)


def lambda_squared(spec: BoxSpec, c: DipoleCurrent, k, route: str = "completeness") -> np.ndarray:
    """sum_sigma |lambda_{k sigma}|^2 for each wavevector."""
    k = np.asarray(k, dtype=float)
    om = np.linalg.norm(k, axis=-1)
    j = dipole_j_fourier(c, k)
    if route == "polarization":
        b = build_basis(k)
        s = (np.abs(np.sum(j * b.eta1, axis=-1)) ** 2 + np.abs(np.sum(j * b.eta2, axis=-1)) ** 2)
    elif route == "completeness":
        khat = k / om[..., None]
        s = np.sum(np.abs(j) ** 2, axis=-1) - np.abs(np.sum(khat * j, axis=-1)) ** 2
    else:
        raise ValueError(f"unknown route {route!r}")
    return s / (2 * spec.volume * om**3)


def _summand(target, om, lam2, t):
    if target == "N_tilde":
        return lam2
    if target == "E_tilde":
        return -om * lam2
    if target in ("h2", "h3", "h4"):
        return om ** int(target[1]) * lam2
    if target == "N_of_t":
        return 4.0 * lam2 * np.sin(0.5 * om * t) ** 2
    raise ValueError(f"unknown target {target!r}; choose from {TARGETS}")


def lattice_sums(spec: BoxSpec, c: DipoleCurrent, targets, t: float | None = None,
                 route: str = "completeness") -> dict[str, float]:
    """Box-sum estimates of several observables in one pass over the lattice.

    Each sum runs in order of |k| through math.fsum.
    """
    if spec.k_cutoff * c.eps < MIN_CUTOFF_EPS:
        raise RegimeError("cutoff must be at least 8/eps for the Gaussian tail to be negligible")
    targets = list(targets)
    for tg in targets:
        if tg not in TARGETS:
            raise ValueError(f"unknown target {tg!r}; choose from {TARGETS}")
    if "N_of_t" in targets and (t is None or t < 0):
        raise DomainError("N_of_t needs a non-negative time")
    if c.mu_abs == 0:
        return {tg: 0.0 for tg in targets}
    oms = []
    vals = {tg: [] for tg in targets}
    for k in _slabs(spec):
        om = np.linalg.norm(k, axis=-1)
        lam2 = lambda_squared(spec, c, k, route)
        oms.append(om)
        for tg in targets:
            vals[tg].append(_summand(tg, om, lam2, t))
    order = np.argsort(np.concatenate(oms), kind="stable")
    return {tg: math.fsum(np.concatenate(v)[order].tolist()) for tg, v in vals.items()}


def lattice_sum_observable(spec: BoxSpec, c: DipoleCurrent, target: str, t: float | None = None,
                           route: str = "completeness") -> float:
    return lattice_sums(spec, c, [target], t, route)[target]


def continuum_value(c: DipoleCurrent, target: str, t: float | None = None) -> float:
    if target == "N_tilde":
        return static_photon_number(c)
    if target == "E_tilde":
        return static_energy(c)
    if target in ("h2", "h3", "h4"):
        return cumulants(c, 4)[int(target[1])]
    if target == "N_of_t":
        return photon_number(c, t)
    raise ValueError(f"unknown target {target!r}")


def route_discrepancy(spec: BoxSpec, c: DipoleCurrent, max_sites: int = 20000) -> float:
    """Largest site-wise relative gap between the polarization and completeness routes."""
    worst = 0.0
    seen = 0
    for k in _slabs(spec):
        a = lambda_squared(spec, c, k, "polarization")
        b = lambda_squared(spec, c, k, "completeness")
        scale = np.maximum(np.abs(b), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(a - b) / scale)))
        seen += len(k)
        if seen >= max_sites:
            break
    return worst


def mode_occupation_trace(spec: BoxSpec, c: DipoleCurrent, k_index, t_grid) -> np.ndarray:
    """2 |lambda|^2 (1 - cos w t) for the site n = k_index, summed over both polarizations."""
    n = np.asarray(k_index, dtype=float)
    if n.shape != (3,) or np.any(n != np.round(n)):
        raise DomainError("k_index must be an integer triple")
    if not np.any(n):
        raise DomainError("the k = 0 site is excluded")
    k = 2 * math.pi * n / spec.box_length
    if np.linalg.norm(k) > spec.k_cutoff:
        raise DomainError("site lies beyond the cutoff")
    om = float(np.linalg.norm(k))
    lam2 = float(lambda_squared(spec, c, k[None, :])[0])
    t = np.asarray(t_grid, dtype=float)
    return 4.0 * lam2 * np.sin(0.5 * om * t) ** 2


def richardson(values, lengths, orders) -> float:
    """Eliminate error terms L^-p for each p in ``orders`` (one per extra box size)."""
    vals = [float(v) for v in values]
    ls = [float(x) for x in lengths]
    if len(orders) > len(vals) - 1:
        raise DomainError("need one more box size than eliminated orders")
    if not orders:
        return vals[-1]
    for p in orders:
        nxt = []
        for i in range(len(vals) - 1):
            r = (ls[i + 1] / ls[i]) ** p
            nxt.append((r * vals[i + 1] - vals[i]) / (r - 1))
        vals = nxt
        ls = ls[1:]
    return vals[-1]


@dataclass
class ConvergenceRow:
    l_over_eps: float
    cutoff_eps: float
    lattice: float
    continuum: float

    @property
    def rel_err(self) -> float:
        return abs(self.lattice - self.continuum) / abs(self.continuum)


def convergence_study(c: DipoleCurrent, targets=("N_tilde",), lengths=(20.0, 40.0, 80.0),
                      cutoff_eps: float = MIN_CUTOFF_EPS, t: float | None = None):
    """Per target: rows for each L plus the Richardson-extrapolated value."""
    if isinstance(targets, str):
        targets = (targets,)
    sums = [lattice_sums(BoxSpec(L * c.eps, cutoff_eps / c.eps), c, targets, t) for L in lengths]
    out = {}
    for tg in targets:
        cont = continuum_value(c, tg, t)
        rows = [ConvergenceRow(L, cutoff_eps, s[tg], cont) for L, s in zip(lengths, sums)]
        orders = RICHARDSON_ORDERS[tg][: len(lengths) - 1]
        out[tg] = (rows, richardson([r.lattice for r in rows], lengths, orders))
    return out
