"""Ground-state (magnetostatic) observables.

Every function accepts either a DipoleCurrent (closed form) or a SpectralWeight
(quadrature of the corresponding radial integral).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import singledispatch

from .config import Tolerance
from .current import DipoleCurrent, SpectralWeight
from .errors import DomainError
from .oracle import weight_integral

_TWO_PI_32 = (2 * math.pi) ** 1.5


@singledispatch
def static_energy(src, tol: Tolerance | None = None) -> float:
    """E~ = -int W / omega^2."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@static_energy.register
def _(src: DipoleCurrent, tol=None) -> float:
    return -(src.mu_abs**2) / (3 * _TWO_PI_32 * src.eps**3)


@static_energy.register
def _(src: SpectralWeight, tol=None) -> float:
    return -weight_integral(src, 2, tol=tol).value


@singledispatch
def static_photon_number(src, tol: Tolerance | None = None) -> float:
    """N~ = int W / omega^3."""
    raise TypeError(f"unsupported source {type(src).__name__}")


@static_photon_number.register
def _(src: DipoleCurrent, tol=None) -> float:
    return src.mu_abs**2 / (6 * math.pi**2 * src.eps**2)


@static_photon_number.register
def _(src: SpectralWeight, tol=None) -> float:
    return weight_integral(src, 3, tol=tol).value


def static_sigma_photons(n_tilde: float) -> float:
    # coherent states are Poissonian
    if n_tilde < 0:
        raise DomainError("photon number must be non-negative")
    return math.sqrt(n_tilde)


def static_sigma_energy(*_args) -> float:
    """The static state is an energy eigenstate, so its energy spread vanishes."""
    return 0.0


def static_virial_split(e_tilde: float) -> tuple[float, float]:
    """(<H0>, <H1>) in the ground state: -E~ and 2 E~."""
    if e_tilde > 0:
        raise DomainError("ground-state energy must be non-positive")
    return -e_tilde, 2.0 * e_tilde


@dataclass
class OccupationList:
    """Excitation numbers n on top of the static ground state, one per mode frequency."""

    entries: list[tuple[float, int]] = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for omega, n in self.entries:
            if int(n) != n or n < 0:
                raise DomainError(f"occupation must be a non-negative integer, got {n!r}")
            if not omega > 0:
                raise DomainError("mode frequency must be positive")
            clean.append((float(omega), int(n)))
        self.entries = clean

    @property
    def excitation_energy(self) -> float:
        return math.fsum(w * n for w, n in self.entries)

    @property
    def is_excited(self) -> bool:
        return any(n > 0 for _, n in self.entries)


def excited_state_split(e_tilde: float, occ: OccupationList) -> tuple[float, float, float]:
    """(<H0>, <H1>, <H>) in an excited eigenstate; only the free part picks up sum n omega."""
    h0, h1 = static_virial_split(e_tilde)
    extra = occ.excitation_energy
    return h0 + extra, h1, e_tilde + extra


@dataclass
class StaticReport:
    energy_tilde: float
    photons_tilde: float
    sigma_n_tilde: float
    h0_expect: float
    h1_expect: float
    sigma_e_tilde: float = 0.0
    source: str = "closed-form"


def static_report(src, tol: Tolerance | None = None) -> StaticReport:
    e = static_energy(src, tol)
    n = static_photon_number(src, tol)
    h0, h1 = static_virial_split(min(e, 0.0))
    kind = "closed-form" if isinstance(src, DipoleCurrent) else "quadrature"
    return StaticReport(e, n, static_sigma_photons(max(n, 0.0)), h0, h1, 0.0, kind)
