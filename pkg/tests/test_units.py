import math

import pytest

from dipolefront.errors import DomainError
from dipolefront.units import (
    MACRO_LOG_OVERLAP_ORDER,
    REFERENCE_TABLES,
    SCENARIOS,
    PhysicalConstants,
    Scenario,
    check_against_reference,
    energy_from_si,
    energy_to_si,
    iron_ball_beta,
    mu_over_eps,
    scenario_report,
)


def test_constants():
    c = PhysicalConstants.codata()
    assert c.alpha == pytest.approx(1 / 137.036, rel=1e-6)
    assert c.compton_wavelength == pytest.approx(2.42631e-12, rel=1e-5)
    p = PhysicalConstants.rounded()
    assert p.alpha == 1 / 137 and p.compton_wavelength == 2.4e-12
    with pytest.raises(DomainError):
        PhysicalConstants(0.0, 1.0, 1.0, 1.0)


def test_scenario_validation():
    with pytest.raises(DomainError):
        Scenario("x", -1.0, 1e-15)
    with pytest.raises(DomainError):
        Scenario("x", 1.0, 0.0)
    with pytest.raises(DomainError):
        Scenario("x", 1.0, 1.0, "erg")


def test_energy_round_trip():
    c = PhysicalConstants.codata()
    assert energy_from_si(energy_to_si(3.7, c), c) == pytest.approx(3.7, rel=1e-15)


def test_iron_ball():
    assert iron_ball_beta() == pytest.approx(7.7e23, rel=0.01)
    assert iron_ball_beta(0.02) == pytest.approx(8 * iron_ball_beta(), rel=1e-12)


def test_mu_over_eps_scales():
    s = SCENARIOS["microscopic"]
    s2 = Scenario("m", 2 * s.beta, s.eps_si)
    assert mu_over_eps(s2) == pytest.approx(2 * mu_over_eps(s), rel=1e-15)


@pytest.mark.parametrize("name", ["microscopic", "macroscopic"])
def test_tables_codata_within_5_percent(name):
    rep = scenario_report(SCENARIOS[name])
    lines = check_against_reference(rep, name, 0.05)
    assert all(ln.passed for ln in lines), [(ln.quantity, ln.column, ln.rel_diff) for ln in lines if not ln.passed]
    n_ref = len([v for pair in REFERENCE_TABLES[name].values() for v in pair])
    assert len(lines) == n_ref + (1 if name == "macroscopic" else 0)


@pytest.mark.parametrize("name", ["microscopic", "macroscopic"])
def test_tables_rounded_constants_within_10_percent(name):
    rep = scenario_report(SCENARIOS[name], PhysicalConstants.rounded())
    assert all(ln.passed for ln in check_against_reference(rep, name, 0.10))


def test_report_structure():
    rep = scenario_report(SCENARIOS["microscopic"])
    assert [r.quantity for r in rep.rows] == ["energy", "sigma_energy", "photons", "sigma_photons",
                                             "overlap", "log_overlap"]
    assert rep.row("energy").expanding == 0.0
    assert rep.row("sigma_energy").static == 0.0
    assert rep.row("photons").expanding == pytest.approx(2 * rep.row("photons").static)
    ov = rep.row("overlap")
    assert ov.expanding == ov.static == pytest.approx(math.exp(rep.row("log_overlap").static))
    with pytest.raises(KeyError):
        rep.row("nothing")


def test_macroscopic_log_overlap():
    rep = scenario_report(SCENARIOS["macroscopic"])
    lo = rep.row("log_overlap").static
    assert lo < 0 and 0.1 < lo / MACRO_LOG_OVERLAP_ORDER < 10
    assert rep.row("overlap").static == 0.0  # underflows; the log stays finite
    assert math.isfinite(lo)


def test_zero_moment():
    rep = scenario_report(Scenario("off", 0.0, 1e-15))
    assert rep.row("photons").static == 0.0
    assert rep.row("sigma_energy").expanding == 0.0


@pytest.mark.parametrize("name", ["microscopic", "macroscopic"])
def test_photon_consistency(name):
    rep = scenario_report(SCENARIOS[name])
    p, s = rep.row("photons"), rep.row("sigma_photons")
    assert s.expanding**2 == pytest.approx(p.expanding, rel=1e-14)
    assert p.expanding == 2 * p.static
    assert rep.row("overlap").static == pytest.approx(math.exp(-p.static / 2), rel=1e-15)


def test_energy_round_trip_1e12():
    from dipolefront.current import DipoleCurrent
    from dipolefront.static import static_energy
    c = PhysicalConstants.codata()
    e = static_energy(DipoleCurrent.along_z(3e-13, 1e-15))
    assert energy_from_si(energy_to_si(e, c), c) == pytest.approx(e, rel=1e-12)
