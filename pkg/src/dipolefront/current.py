"""External currents and their momentum-space / spectral representations.

Conventions: hbar = c = 1, Heaviside-Lorentz units. A current enters global
observables only through its spectral weight

    W(omega) = omega^2 / (2 (2 pi)^3) * int dOmega |J(omega k_hat)|^2,

so that, e.g., the static energy is -int W / omega^2 and the static photon
number is int W / omega^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidCurrentError
from .special import nascent_delta_3d

DECAY_CLASSES = ("gaussian", "exponential", "algebraic")


@dataclass(frozen=True)
class DipoleCurrent:
    """Gaussian-smeared magnetic dipole j(r) = (mu x r) (2/eps^2) delta_eps(r)."""

    mu: tuple[float, float, float]
    eps: float

    def __post_init__(self):
        mu = tuple(float(v) for v in np.broadcast_to(np.asarray(self.mu, float), (3,)))
        object.__setattr__(self, "mu", mu)
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise DomainError("eps must be positive and finite")
        if not all(math.isfinite(v) for v in mu):
            raise DomainError("mu must be finite")

    @classmethod
    def along_z(cls, mu: float, eps: float) -> DipoleCurrent:
        return cls((0.0, 0.0, float(mu)), eps)

    @property
    def mu_vec(self) -> np.ndarray:
        return np.array(self.mu)

    @property
    def mu_abs(self) -> float:
        return float(np.linalg.norm(self.mu))


@dataclass(frozen=True)
class SpectralWeight:
    """Non-negative radial weight W(omega) on (0, inf).

    ``scale`` is the frequency where the decay sets in (1/eps for the dipole);
    quadrature truncation radii are expressed in units of it. ``power`` is the
    tail exponent for the algebraic class (W ~ omega^-power).
    """

    func: Callable[[np.ndarray], np.ndarray]
    scale: float
    decay: str = "gaussian"
    power: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.decay not in DECAY_CLASSES:
            raise ValueError(f"unknown decay class {self.decay!r}")
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    def __call__(self, omega):
        return self.func(np.asarray(omega, dtype=float))


@dataclass(frozen=True)
class FourierCurrent:
    """J(k) = int d^3r j(r) exp(-i k.r); ``jk`` maps (..., 3) real to (..., 3) complex."""

    jk: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, k):
        return self.jk(np.asarray(k, dtype=float))


def dipole_j_position(c: DipoleCurrent, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    rr = np.linalg.norm(r, axis=-1)
    f = (2.0 / c.eps**2) * nascent_delta_3d(rr, c.eps)
    return np.cross(c.mu_vec, r) * np.asarray(f)[..., None]


def dipole_j_fourier(c: DipoleCurrent, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    k2 = np.sum(k * k, axis=-1)
    env = np.exp(-(c.eps**2) * k2 / 4.0)
    return -1j * np.cross(c.mu_vec, k) * env[..., None]


def dipole_fourier_current(c: DipoleCurrent) -> FourierCurrent:
    return FourierCurrent(lambda k: dipole_j_fourier(c, k), label="dipole")


def dipole_spectral_weight(c: DipoleCurrent) -> SpectralWeight:
    """W(omega) = mu^2 omega^4 exp(-eps^2 omega^2 / 2) / (6 pi^2)."""
    mu2 = c.mu_abs**2
    eps = c.eps

    def w(omega):
        return mu2 * omega**4 * np.exp(-0.5 * (eps * omega) ** 2) / (6 * math.pi**2)

    return SpectralWeight(w, scale=1.0 / eps, decay="gaussian", label="dipole")


def sphere_rule(n_theta: int = 32, n_phi: int = 64):
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta) x trapezoid in phi.

    Returns (directions (N, 3), weights (N,)) with weights summing to 4 pi.
    """
    if n_theta < 6 or n_phi < 6:
        raise ValueError("angular rule needs at least 6 points per dimension")
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - u**2)
    dirs = np.stack(
        [np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)), np.outer(u, np.ones(n_phi))],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(wu, np.full(n_phi, 2 * math.pi / n_phi)).reshape(-1)
    return dirs, weights


def transverse_projector(k) -> np.ndarray:
    """delta_ij - k_i k_j / |k|^2 (the polarization completeness sum)."""
    k = np.asarray(k, dtype=float)
    k2 = np.sum(k * k, axis=-1)
    if np.any(k2 == 0):
        raise DomainError("projector undefined at k = 0")
    return np.eye(3) - k[..., :, None] * k[..., None, :] / k2[..., None, None]


def check_transverse(jf: FourierCurrent, ks, rtol: float = 1e-8) -> None:
    ks = np.asarray(ks, dtype=float)
    j = jf(ks)
    khat = ks / np.linalg.norm(ks, axis=-1, keepdims=True)
    longitudinal = np.abs(np.sum(khat * j, axis=-1))
    scale = np.max(np.linalg.norm(j, axis=-1), initial=0.0)
    if scale == 0.0:
        return
    worst = float(np.max(longitudinal))
    if worst > rtol * scale:
        raise InvalidCurrentError(
            f"current is not transverse: max |k.J|/|k| = {worst:.3e} (scale {scale:.3e})"
        )


def general_spectral_weight(
    jf: FourierCurrent,
    scale: float,
    angular_rule: tuple[int, int] = (32, 64),
    decay: str = "gaussian",
    power: float | None = None,
) -> SpectralWeight:
    """Spectral weight of an arbitrary transverse current by angular quadrature."""
    dirs, wts = sphere_rule(*angular_rule)
    probe = np.array([0.1, 1.0, 3.0]) * scale
    check_transverse(jf, probe[:, None, None] * dirs[None, :, :])
    norm = 1.0 / (2 * (2 * math.pi) ** 3)

    def w(omega):
        om = np.atleast_1d(np.asarray(omega, dtype=float))
        j = jf(om[:, None, None] * dirs[None, :, :])
        ang = np.sum(np.sum(np.abs(j) ** 2, axis=-1) * wts[None, :], axis=-1)
        out = norm * om**2 * ang
        return out.reshape(np.shape(omega)) if np.ndim(omega) else float(out[0])

    return SpectralWeight(w, scale=scale, decay=decay, power=power, label=jf.label or "general")
