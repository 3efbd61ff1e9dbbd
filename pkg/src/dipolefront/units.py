"""SI scenarios: mu = beta mu_B and eps in metres, mapped to natural units.

In Heaviside-Lorentz units mu_B = sqrt(4 pi alpha) / (2 m_e), so
mu / eps = beta sqrt(alpha / 4 pi) lambda_C / eps with lambda_C the
(non-reduced) Compton wavelength. Energies in natural units are inverse
lengths and convert to joules through hbar c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _sc

from .current import DipoleCurrent
from .dynamic import cumulants, energy_stats, photon_number_limit, photon_sigma
from .errors import DomainError
from .report import ObservableReport
from .static import static_energy, static_photon_number, static_sigma_photons

ENERGY_UNITS = ("electron-rest-energy", "joule")


@dataclass(frozen=True)
class PhysicalConstants:
    alpha: float
    compton_wavelength: float  # m
    hbar_c: float  # J m
    electron_rest_energy: float  # J
    label: str = "codata"

    def __post_init__(self):
        for name in ("alpha", "compton_wavelength", "hbar_c", "electron_rest_energy"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def bohr_magneton_natural(self) -> float:
        """mu_B in metres (natural units)."""
        return math.sqrt(self.alpha / (4 * math.pi)) * self.compton_wavelength

    @classmethod
    def codata(cls) -> PhysicalConstants:
        return cls(
            alpha=_sc.fine_structure,
            compton_wavelength=_sc.physical_constants["Compton wavelength"][0],
            hbar_c=_sc.hbar * _sc.c,
            electron_rest_energy=_sc.m_e * _sc.c**2,
            label="codata",
        )

    @classmethod
    def rounded(cls) -> PhysicalConstants:
        """The rounded alpha = 1/137 and lambda = 2.4e-12 m; hbar c and m_e c^2 stay exact."""
        base = cls.codata()
        return cls(1.0 / 137.0, 2.4e-12, base.hbar_c, base.electron_rest_energy, label="rounded")


@dataclass(frozen=True)
class Scenario:
    name: str
    beta: float
    eps_si: float
    energy_unit: str = "electron-rest-energy"

    def __post_init__(self):
        if not self.beta >= 0:
            raise DomainError("beta must be non-negative")
        if not self.eps_si > 0:
            raise DomainError("eps must be positive")
        if self.energy_unit not in ENERGY_UNITS:
            raise DomainError(f"energy unit must be one of {ENERGY_UNITS}")


IRON_DENSITY = 7874.0  # kg m^-3
IRON_SATURATION = 217.6  # J T^-1 kg^-1
IRON_RADIUS = 0.01  # m


def iron_ball_beta(radius: float = IRON_RADIUS, density: float = IRON_DENSITY,
                   saturation: float = IRON_SATURATION) -> float:
    """beta of a fully magnetized iron ball, mu / mu_B with mu in J/T."""
    mass = density * 4.0 / 3.0 * math.pi * radius**3
    return saturation * mass / _sc.physical_constants["Bohr magneton"][0]


SCENARIOS = {
    "microscopic": Scenario("microscopic", 1e-3, 1e-15, "electron-rest-energy"),
    "macroscopic": Scenario("macroscopic", 7.7e23, 0.01, "joule"),
}

# Rounded table entries, keyed by report quantity: (expanding, static).
REFERENCE_TABLES = {
    "microscopic": {
        "energy": (0.0, -2.8e-2),
        "sigma_energy": (4.2, 0.0),
        "photons": (1.2e-4, 5.8e-5),
        "sigma_photons": (1.1e-2, 7.6e-3),
        "overlap": (0.99997, 0.99997),
    },
    "macroscopic": {
        "energy": (0.0, -1.4),
        "sigma_energy": (2.6e-12, 0.0),
        "photons": (6.9e23, 3.4e23),
        "sigma_photons": (8.3e11, 5.9e11),
    },
}
# ln(overlap) for the macroscopic magnet is only quoted as "of the order of -1e23".
MACRO_LOG_OVERLAP_ORDER = -1e23


def mu_over_eps(s: Scenario, c: PhysicalConstants | None = None) -> float:
    c = c or PhysicalConstants.codata()
    return s.beta * c.bohr_magneton_natural / s.eps_si


def energy_scale(s: Scenario, c: PhysicalConstants) -> float:
    """Factor turning a natural-unit energy (in 1/m) into the scenario's unit."""
    f = c.hbar_c
    if s.energy_unit == "electron-rest-energy":
        f /= c.electron_rest_energy
    return f


def energy_to_si(e_natural: float, c: PhysicalConstants) -> float:
    return e_natural * c.hbar_c


def energy_from_si(e_joule: float, c: PhysicalConstants) -> float:
    return e_joule / c.hbar_c


def scenario_report(s: Scenario, c: PhysicalConstants | None = None) -> ObservableReport:
    """Table rows (quantity, expanding, static, unit) for one scenario.

    Expanding entries are the t -> infinity values.
    """
    c = c or PhysicalConstants.codata()
    me = mu_over_eps(s, c)
    dip = DipoleCurrent.along_z(me * s.eps_si, s.eps_si)
    unit = "m_e c^2" if s.energy_unit == "electron-rest-energy" else "J"
    k = energy_scale(s, c)
    e_t = static_energy(dip)
    n_t = static_photon_number(dip)
    sigma_e = energy_stats(cumulants(dip, 2)).sigma if me > 0 else 0.0
    n_inf = photon_number_limit(n_t)
    rep = ObservableReport(
        f"{s.name} magnet ({c.label} constants)",
        {"beta": s.beta, "eps_m": s.eps_si, "mu_over_eps": me},
    )
    rep.add("energy", 0.0, e_t * k, unit)
    rep.add("sigma_energy", sigma_e * k, 0.0, unit)
    rep.add("photons", n_inf, n_t, "")
    rep.add("sigma_photons", photon_sigma(n_inf), static_sigma_photons(n_t), "")
    log_ov = -0.5 * n_t
    ov = math.exp(log_ov)
    rep.add("overlap", ov, ov, "")
    rep.add("log_overlap", log_ov, log_ov, "")
    return rep


@dataclass
class CheckLine:
    quantity: str
    column: str
    value: float
    reference: float
    rel_diff: float
    passed: bool


def check_against_reference(rep: ObservableReport, scenario: str, rel: float = 0.05) -> list[CheckLine]:
    """Compare every nonzero rounded table entry at the given relative band."""
    ref = REFERENCE_TABLES[scenario]
    out = []
    for q, (exp_ref, st_ref) in ref.items():
        row = rep.row(q)
        for col, val, r in (("expanding", row.expanding, exp_ref), ("static", row.static, st_ref)):
            if r == 0:
                ok = val == 0
                d = abs(val)
            else:
                d = abs(val - r) / abs(r)
                ok = d <= rel
            out.append(CheckLine(q, col, val, r, d, ok))
    if scenario == "macroscopic":
        v = rep.row("log_overlap").static
        # same decade as -1e23
        ok = v < 0 and abs(math.log10(-v) - math.log10(-MACRO_LOG_OVERLAP_ORDER)) < 1.0
        out.append(CheckLine("log_overlap", "static", v, MACRO_LOG_OVERLAP_ORDER, math.nan, ok))
    return out
