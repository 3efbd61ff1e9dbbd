"""Closed form vs oracle checks, grouped into named suites for `dipolefront verify`."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dynamic, fields, integrals, lattice, oracle, static, units
from .config import Tolerance
from .current import DipoleCurrent, dipole_spectral_weight
from .errors import DipoleFrontError
from .special import dawson, erf


@dataclass
class CheckResult:
    suite: str
    name: str
    closed: float
    oracle: float
    rel_diff: float
    threshold: float
    converged: bool = True
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.converged and self.rel_diff <= self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else ("NOCONV" if not self.converged else "FAIL")
        return (f"{status:6s} {self.suite:18s} {self.name:34s} closed={self.closed: .10e} "
                f"oracle={self.oracle: .10e} rel={self.rel_diff:.2e} (<= {self.threshold:.0e})"
                + (f"  [{self.detail}]" if self.detail else ""))


def _rel(a, b, scale=None):
    s = max(abs(a), abs(b)) if scale is None else scale
    return abs(a - b) / s if s > 0 else abs(a - b)


def _threshold(tol: Tolerance, base: float = 1e-8) -> float:
    return max(base, 100 * tol.rel)


def _quad_tol(tol: Tolerance, scale: float) -> Tolerance:
    return Tolerance(tol.rel, max(tol.abs, min(tol.rel, 1e-14) * scale))


def check_special(tol: Tolerance):
    out = []
    for x in (0.05, 0.7, 1.0, 3.0, 9.9, 10.5, 40.0):
        q = oracle.integrate_interval(lambda y: np.exp((y - x) * (y + x)), 0.0, x, tol, pieces=8)
        out.append(CheckResult("special", f"dawson({x:g})", dawson(x), q.value,
                               _rel(dawson(x), q.value), _threshold(tol, 1e-10), q.converged))
    for x in (0.3, 1.0, 2.5):
        q = oracle.integrate_interval(lambda y: 2 / math.sqrt(math.pi) * np.exp(-y * y), 0.0, x, tol)
        out.append(CheckResult("special", f"erf({x:g})", erf(x), q.value,
                               _rel(erf(x), q.value), _threshold(tol, 1e-10), q.converged))
    return out


def check_families(tol: Tolerance):
    out = []
    cases = [
        ("I", (1.0,), integrals.integral_I, oracle.integral_I_quadrature, math.sqrt(math.pi)),
        ("I", (7.3,), integrals.integral_I, oracle.integral_I_quadrature, math.sqrt(math.pi)),
        ("I1", (2.0, 5.0), integrals.integral_I1, oracle.integral_I1_quadrature, math.sqrt(math.pi)),
        ("I2", (1.0,), integrals.integral_I2, oracle.integral_I2_quadrature, math.sqrt(math.pi / 2)),
        ("I2", (4.2,), integrals.integral_I2, oracle.integral_I2_quadrature, math.sqrt(math.pi / 2)),
        ("I3", (0.0,), integrals.integral_I3, oracle.integral_I3_quadrature, 1.0),
        ("I3", (25.0,), integrals.integral_I3, oracle.integral_I3_quadrature, 1.0),
    ]
    for name, args, closed, quad, scale in cases:
        c = closed(*args)
        q = quad(*args, tol=_quad_tol(tol, scale))
        # the integrals pass through zero, so compare on the scale of int |integrand|
        out.append(CheckResult("integral-families", f"{name}{args}", c, q.value,
                               _rel(c, q.value, max(abs(c), scale)), _threshold(tol), q.converged))
    return out


def check_static(tol: Tolerance):
    out = []
    for mu, eps in ((1.0, 1.0), (1e-3, 1.0), (1e3, 1.0), (0.3, 2.5)):
        c = DipoleCurrent.along_z(mu, eps)
        w = dipole_spectral_weight(c)
        for name, fn, p in (("E_tilde", static.static_energy, 2), ("N_tilde", static.static_photon_number, 3)):
            cl = fn(c)
            q = oracle.weight_integral(w, p, tol=tol)
            qv = -q.value if p == 2 else q.value
            out.append(CheckResult("static", f"{name} mu={mu:g} eps={eps:g}", cl, qv,
                                   _rel(cl, qv), _threshold(tol), q.converged))
    return out


def _guarded(suite, name, closed, fn, threshold, scale=None):
    try:
        val, conv = fn()
    except DipoleFrontError:
        return CheckResult(suite, name, closed, math.nan, math.inf, threshold, False)
    return CheckResult(suite, name, closed, val, _rel(closed, val, scale), threshold, conv)


def check_dynamic(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    w = dipole_spectral_weight(c)
    out = []
    thr = _threshold(tol)
    for t in (0.3, 1.0, 2.1, 7.0, 40.0):
        fn4 = lambda om, t=t: 4 * np.sin(0.5 * om * t) ** 2
        for name, closed_fn, p in (("H0", dynamic.free_field_energy, 2), ("N", dynamic.photon_number, 3)):
            def run(p=p, fn4=fn4, t=t):
                q = oracle.weight_integral_fn(w, lambda om: fn4(om) / om**p, t, tol)
                return q.value, q.converged
            out.append(_guarded("dynamic", f"{name}(t={t:g})", closed_fn(c, t), run, thr))
    cs = dynamic.cumulants(c, 4)
    for n in (2, 3, 4):
        def run(n=n):
            q = oracle.weight_integral_fn(w, lambda om: om ** (n - 3), 0.0, tol)
            return q.value, q.converged
        out.append(_guarded("dynamic", f"h{n}", cs[n], run, thr))
    return out


def check_fields(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    out = []
    thr = max(1e-7, 100 * tol.rel)
    for r, t in ((2.0, None), (0.05, None), (7.0, None), (0.5, 3.0), (9.5, 10.0), (3.0, 10.0), (12.0, 10.0)):
        closed = fields.radial_coefficients(1.0, [r], t).a[0]
        scale = abs(fields.radial_coefficients(1.0, [r]).a[0])
        q = oracle.dipole_vector_coefficient_quadrature(c, r, t, _quad_tol(tol, scale))
        label = f"A(r={r:g}{'' if t is None else f', t={t:g}'})"
        out.append(CheckResult("fields", label, closed, q.value, _rel(closed, q.value, max(abs(closed), scale)),
                               thr, q.converged))
    return out


def check_riemann_lebesgue(tol: Tolerance):
    w = dipole_spectral_weight(DipoleCurrent.along_z(1.0, 1.0))
    out = []
    # W/w^2 is smooth at w = 0, so its cosine transform dies like a Gaussian;
    # W/w^3 ~ w there and decays only like (eps/t)^2
    for p, thr in ((2, 1e-6), (3, 1e-4)):
        rep = oracle.riemann_lebesgue_check(w, p, [0.0, 10.0, 100.0, 1000.0], tail_fraction=0.25,
                                            threshold=thr, tol=tol)
        out.append(CheckResult("riemann-lebesgue", f"|I_{p}(1000)|/I_{p}(0)", 0.0, rep.tail_max,
                               rep.tail_max / abs(rep.i0), thr, True))
    return out


def check_survival(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    stats = dynamic.energy_stats(dynamic.cumulants(c, 4))
    fd = dynamic.hamiltonian_moments_fd(c, 4)
    out = [CheckResult("survival-moments", "<H> / sigma_E", 0.0, fd[1], abs(fd[1]) / stats.sigma, 1e-5)]
    for n in (2, 3, 4):
        out.append(CheckResult("survival-moments", f"<H^{n}>", stats.moments[n], fd[n],
                               _rel(stats.moments[n], fd[n]), 1e-5))
    return out


def check_conservation(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    w = dipole_spectral_weight(c)
    n = static.static_photon_number(c)
    om, lam = dynamic.spectral_modes(w)
    out = []
    for t in (0.1, 1.0, 10.0):
        ov = dynamic.overlap_from_modes(om, lam, t)
        ref = dynamic.overlap_static_expanding(float(np.sum(lam**2)))
        out.append(CheckResult("conservation", f"overlap from modes (t={t:g})", ref, abs(ov),
                               _rel(ref, abs(ov)), 1e-10))
    out.append(CheckResult("conservation", "overlap vs exp(-N/2)", math.exp(-n / 2),
                           dynamic.overlap_static_expanding(float(np.sum(lam**2))),
                           _rel(math.exp(-n / 2), dynamic.overlap_static_expanding(float(np.sum(lam**2)))),
                           1e-10))
    for t in (1000.0,):
        h0 = dynamic.free_field_energy(c, t)
        out.append(CheckResult("conservation", "H0(1000 eps) -> -2 E~", -2 * static.static_energy(c), h0,
                               _rel(-2 * static.static_energy(c), h0), 1e-4))
        nn = dynamic.photon_number(c, t)
        out.append(CheckResult("conservation", "N(1000 eps) -> 2 N~", 2 * n, nn, _rel(2 * n, nn), 1e-4))
    return out


def check_lattice(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    study = lattice.convergence_study(c, ("N_tilde", "E_tilde", "h2"))
    out = []
    for tg, (rows, extrap) in study.items():
        row40 = rows[1]
        out.append(CheckResult("lattice", f"{tg} L=40", row40.continuum, row40.lattice, row40.rel_err, 1e-2))
        out.append(CheckResult("lattice", f"{tg} Richardson 20/40/80", row40.continuum, extrap,
                               _rel(row40.continuum, extrap), 1e-4))
    return out


def check_tables(tol: Tolerance):
    out = []
    for name, sc in units.SCENARIOS.items():
        rep = units.scenario_report(sc)
        for line in units.check_against_reference(rep, name):
            rd = line.rel_diff if math.isfinite(line.rel_diff) else (0.0 if line.passed else math.inf)
            out.append(CheckResult("tables", f"{name} {line.quantity} ({line.column})", line.reference,
                                   line.value, rd if line.passed else max(rd, 1.0), 0.05))
    return out


def check_front(tol: Tolerance):
    c = DipoleCurrent.along_z(1.0, 1.0)
    e = abs(static.static_energy(c))
    out = []
    for t in (10.0, 100.0):
        r, width = fields.locate_front(c, t)
        out.append(CheckResult("front", f"front radius / t (t={t:g})", 1.0, r / t, abs(r - t) / t,
                               0.1 if t == 10.0 else 0.02))
    for t in (20.0, 40.0):
        s = fields.energy_localization(c, t, (t - 5, t + 5))
        out.append(CheckResult("front", f"shell energy / |E~| (t={t:g})", 1.0, s / e, max(0.0, 1 - s / e), 0.1))
    return out


SUITES: dict[str, Callable[[Tolerance], list[CheckResult]]] = {
    "special": check_special,
    "integral-families": check_families,
    "static": check_static,
    "dynamic": check_dynamic,
    "fields": check_fields,
    "riemann-lebesgue": check_riemann_lebesgue,
    "survival-moments": check_survival,
    "conservation": check_conservation,
    "lattice": check_lattice,
    "tables": check_tables,
    "front": check_front,
}


def run_suites(only=None, tol: Tolerance | None = None) -> list[CheckResult]:
    tol = tol or Tolerance()
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    out = []
    for n in names:
        try:
            out.extend(SUITES[n](tol))
        except DipoleFrontError as exc:
            out.append(CheckResult(n, f"suite aborted: {type(exc).__name__}", math.nan, math.nan,
                                   math.inf, 0.0, False, str(exc)))
    return out
