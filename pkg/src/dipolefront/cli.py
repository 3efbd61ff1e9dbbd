"""dipolefront command line: fields, observe, table, figure, verify.

Exit codes: 0 success, 1 numerical or check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys

import numpy as np

from . import dynamic, fields, static, units
from .config import TOL_ENV_VAR, Tolerance, default_tolerance
from .current import DipoleCurrent, dipole_spectral_weight
from .errors import DipoleFrontError, DomainError
from .report import ObservableReport, fmt, write_atomic
from .verification import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "mu": 1.0,
    "eps": 1.0,
    "t": "10",
    "rmin": 0.02,
    "rmax": 20.0,
    "n": 1000,
    "tmax": 30.0,
    "format": "text",
    "source": "closed-form",
    "constants": "codata",
    "check_rel": 0.05,
}

SPARK = " ▁▂▃▄▅▆▇█"


class UsageError(Exception):
    pass


def read_config(path: str) -> dict[str, str]:
    """Flat `key = value` file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{no}: expected 'key = value'")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _merge(args, parser):
    """Fill unset options from the config file, then from DEFAULTS."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for k, v in cfg.items():
        if not hasattr(args, k):
            raise UsageError(f"unknown config key {k!r} for this command")
        if getattr(args, k) is None:
            setattr(args, k, v)
    for k, v in DEFAULTS.items():
        if hasattr(args, k) and getattr(args, k) is None:
            setattr(args, k, v)
    return args


def _float(v, name):
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {v!r}") from None
    if not math.isfinite(x):
        raise UsageError(f"{name} must be finite")
    return x


def _times(v) -> list[float]:
    vals = [_float(x, "t") for x in str(v).replace(" ", "").split(",") if x]
    if not vals:
        raise UsageError("need at least one time")
    if any(x < 0 for x in vals):
        raise UsageError("times must be non-negative")
    return vals


def _tolerance(v) -> Tolerance:
    if v is None:
        return default_tolerance()
    x = _float(v, "tol")
    if x <= 0:
        raise UsageError("tol must be positive")
    return Tolerance(rel=x)


def _emit(text: str, out: str | None):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def sparkline(values, width: int = 60) -> str:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if len(v) == 0:
        return ""
    idx = np.linspace(0, len(v) - 1, min(width, len(v))).round().astype(int)
    s = v[idx]
    lo, hi = float(s.min()), float(s.max())
    if hi == lo:
        return SPARK[1] * len(s)
    levels = ((s - lo) / (hi - lo) * (len(SPARK) - 2)).round().astype(int) + 1
    return "".join(SPARK[i] for i in levels)


# --- fields ----------------------------------------------------------------

PROFILE_HEADER = "# t_over_eps, r_over_eps, coeffA, coeffB_rad, coeffB_tan, coeffE, coeffA_static, coeffA_point"


def profile_csv(times, rmin, rmax, n) -> str:
    if n < 2 or not 0 < rmin < rmax:
        raise UsageError("radial grid needs 0 < rmin < rmax and n >= 2")
    radii = np.linspace(rmin, rmax, int(n))
    c = DipoleCurrent.along_z(1.0, 1.0)  # coefficients are per unit moment and in units of eps
    buf = io.StringIO()
    buf.write(PROFILE_HEADER + "\n")
    cols = ("coeffA", "coeffB_rad", "coeffB_tan", "coeffE", "coeffA_static", "coeffA_point")
    for t in times:
        p = fields.radial_profile(c, t, radii)
        for i, r in enumerate(radii):
            buf.write(", ".join([fmt(float(t)), fmt(float(r))] + [fmt(float(p.values[k][i])) for k in cols]) + "\n")
    return buf.getvalue()


def cmd_fields(args) -> int:
    times = _times(args.t)
    n = int(_float(args.n, "n"))
    text = profile_csv(times, _float(args.rmin, "rmin"), _float(args.rmax, "rmax"), n)
    _emit(text, args.out)
    return EXIT_OK


# --- observe ---------------------------------------------------------------

def observe(mu: float, eps: float, times, source: str = "closed-form", tol: Tolerance | None = None):
    c = DipoleCurrent.along_z(mu, eps)
    src = c if source == "closed-form" else dipole_spectral_weight(c)
    st = static.static_report(src, tol)
    cs = dynamic.cumulants(src, 4, tol)
    head = {
        "mu": mu, "eps": eps,
        "E_tilde": st.energy_tilde, "N_tilde": st.photons_tilde, "sigma_N_tilde": st.sigma_n_tilde,
        "overlap": dynamic.overlap_static_expanding(st.photons_tilde),
        "h2": cs[2], "h3": cs[3], "h4": cs[4],
    }
    if cs[2] > 0:
        es = dynamic.energy_stats(cs)
        head.update(sigma_E=es.sigma, skewness=es.skewness, excess_kurtosis=es.excess_kurtosis)
    else:
        head.update(sigma_E=0.0, skewness=math.nan, excess_kurtosis=math.nan)
    rows = []
    for t in times:
        tt = t * eps
        h0 = dynamic.free_field_energy(src, tt, tol)
        n_t = dynamic.photon_number(src, tt, tol)
        rows.append((t, h0, -h0, h0 + (-h0), n_t, dynamic.photon_sigma(max(n_t, 0.0))))
    return head, rows


OBSERVE_COLUMNS = ("t_over_eps", "H0", "H1", "H_total", "N", "sigma_N")


def cmd_observe(args) -> int:
    mu, eps = _float(args.mu, "mu"), _float(args.eps, "eps")
    if eps <= 0:
        raise UsageError("eps must be positive")
    head, rows = observe(mu, eps, _times(args.t), args.source, _tolerance(args.tol))
    buf = io.StringIO()
    if args.format == "csv":
        for k, v in head.items():
            buf.write(f"# {k} = {fmt(float(v))}\n")
        buf.write(", ".join(OBSERVE_COLUMNS) + "\n")
        for r in rows:
            buf.write(", ".join(fmt(float(x)) for x in r) + "\n")
    else:
        w = max(len(k) for k in head)
        for k, v in head.items():
            buf.write(f"{k.ljust(w)}  {v + 0.0:.12g}\n")
        buf.write("\n" + "".join(c.rjust(20) for c in OBSERVE_COLUMNS) + "\n")
        for r in rows:
            buf.write("".join(f"{x + 0.0:20.12g}" for x in r) + "\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# --- table -----------------------------------------------------------------

def cmd_table(args) -> int:
    consts = {"codata": units.PhysicalConstants.codata,
              "rounded": units.PhysicalConstants.rounded}.get(args.constants)
    if consts is None:
        raise UsageError("constants must be 'codata' or 'rounded'")
    if args.scenario in units.SCENARIOS:
        sc = units.SCENARIOS[args.scenario]
        if args.beta is not None or args.eps_m is not None or args.unit is not None:
            sc = units.Scenario(sc.name,
                                sc.beta if args.beta is None else _float(args.beta, "beta"),
                                sc.eps_si if args.eps_m is None else _float(args.eps_m, "eps-m"),
                                sc.energy_unit if args.unit is None else args.unit)
    elif args.scenario == "custom":
        if args.beta is None:
            raise UsageError("custom scenario needs --beta")
        if args.check:
            raise UsageError("--check needs a scenario with reference values")
        sc = units.Scenario("custom", _float(args.beta, "beta"),
                            1e-15 if args.eps_m is None else _float(args.eps_m, "eps-m"),
                            args.unit or "electron-rest-energy")
    else:
        raise UsageError(f"unknown scenario {args.scenario!r}; choose microscopic, macroscopic or custom")
    rep = units.scenario_report(sc, consts())
    _emit(rep.to_csv() if args.format == "csv" else rep.to_text(), args.out)
    if args.check:
        lines = units.check_against_reference(rep, args.scenario, _float(args.check_rel, "check-rel"))
        bad = [ln for ln in lines if not ln.passed]
        for ln in lines:
            tag = "PASS" if ln.passed else "FAIL"
            print(f"{tag} {ln.quantity} ({ln.column}): {ln.value:.6g} vs {ln.reference:.2g}", file=sys.stderr)
        return EXIT_FAIL if bad else EXIT_OK
    return EXIT_OK


# --- figure ----------------------------------------------------------------

def fig2_csv(tmax: float, n: int) -> tuple[str, np.ndarray]:
    c = DipoleCurrent.along_z(1.0, 1.0)
    t = np.linspace(0.0, tmax, n)
    ratio = dynamic.photon_number(c, t) / static.static_photon_number(c)
    with np.errstate(divide="ignore"):
        asym = np.where(t > 0, 2.0 * (1.0 + 1.0 / np.where(t > 0, t, 1.0) ** 2), math.inf)
    buf = io.StringIO()
    buf.write("# t_over_eps, N_over_N_tilde, asymptote\n")
    for a, b, d in zip(t, ratio, asym):
        buf.write(f"{fmt(float(a))}, {fmt(float(b))}, {fmt(float(d))}\n")
    return buf.getvalue(), ratio


def cmd_figure(args) -> int:
    n = int(_float(args.n, "n"))
    if n < 2:
        raise UsageError("need at least 2 points")
    if args.which == "fig1":
        text = profile_csv([10.0], _float(args.rmin, "rmin"), _float(args.rmax, "rmax"), n)
        data = np.array([float(line.split(",")[2]) for line in text.splitlines()[1:]])
        label = "coeffA(r) at t = 10 eps"
    else:
        tmax = _float(args.tmax, "tmax")
        if tmax <= 0:
            raise UsageError("tmax must be positive")
        text, data = fig2_csv(tmax, n)
        label = "N(t) / N~"
    _emit(text, args.out)
    stream = sys.stdout if args.out else sys.stderr
    print(f"{label}: [{sparkline(data)}] min={np.min(data):.4g} max={np.max(data):.4g}", file=stream)
    return EXIT_OK


# --- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.list:
        print("\n".join(SUITES))
        return EXIT_OK
    only = None
    if args.only:
        only = [s for item in args.only for s in item.split(",") if s]
        unknown = [s for s in only if s not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s) {', '.join(unknown)}; see --list")
    results = run_suites(only, _tolerance(args.tol))
    buf = io.StringIO()
    buf.write("status suite              check                              values\n")
    for r in results:
        buf.write(r.line() + "\n")
    failed = [r for r in results if not r.passed]
    if failed:
        noconv = sum(not r.converged for r in failed)
        buf.write(f"{len(failed)} of {len(results)} checks failed ({noconv} did not converge): "
                  + ", ".join(f"{r.suite}/{r.name}" for r in failed[:10])
                  + (" ..." if len(failed) > 10 else "") + "\n")
    else:
        buf.write(f"all {len(results)} checks passed\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dipolefront",
        description="Static and expanding quantum magnetic dipole fields.",
        epilog=f"Default quadrature tolerance is rel=1e-12; override with --tol or ${TOL_ENV_VAR}.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat 'key = value' file; command-line flags take precedence")
        sp.add_argument("--out", help="output path (written atomically); default stdout")

    f = sub.add_parser("fields", help="radial profiles of A, B, E (CSV, units of eps)")
    common(f)
    f.add_argument("--t", help="comma-separated times / eps (default 10)")
    f.add_argument("--rmin", help="smallest radius / eps (default 0.02)")
    f.add_argument("--rmax", help="largest radius / eps (default 20)")
    f.add_argument("--n", help="number of radii (default 1000)")
    f.set_defaults(func=cmd_fields)

    o = sub.add_parser("observe", help="energies, cumulants and photon numbers")
    common(o)
    o.add_argument("--mu", help="dipole moment, natural units (default 1)")
    o.add_argument("--eps", help="smearing width (default 1)")
    o.add_argument("--t", help="comma-separated times / eps (default 10)")
    o.add_argument("--source", choices=("closed-form", "quadrature"),
                   help="closed forms or spectral-weight quadrature (default closed-form)")
    o.add_argument("--tol", help="relative quadrature tolerance (default 1e-12 or $DIPOLEFRONT_TOL)")
    o.add_argument("--format", choices=("text", "csv"), help="output format (default text)")
    o.set_defaults(func=cmd_observe)

    t = sub.add_parser("table", help="order-of-magnitude tables for SI scenarios")
    common(t)
    t.add_argument("scenario", help="microscopic, macroscopic or custom")
    t.add_argument("--beta", help="mu / mu_B (required for custom; overrides a named scenario)")
    t.add_argument("--eps-m", dest="eps_m", help="smearing width in metres (custom default 1e-15)")
    t.add_argument("--unit", choices=units.ENERGY_UNITS,
                   help="energy unit (default: scenario's own; electron-rest-energy for custom)")
    t.add_argument("--constants", help="codata (default) or rounded (alpha = 1/137, lambda = 2.4e-12 m)")
    t.add_argument("--check", action="store_true", help="compare with the rounded reference table")
    t.add_argument("--check-rel", dest="check_rel", help="relative band for --check (default 0.05)")
    t.add_argument("--format", choices=("text", "csv"), help="output format (default text)")
    t.set_defaults(func=cmd_table)

    g = sub.add_parser("figure", help="figure data: fig1 (field profiles) or fig2 (photon number)")
    common(g)
    g.add_argument("which", choices=("fig1", "fig2"))
    g.add_argument("--n", help="number of points (default 1000)")
    g.add_argument("--rmin", help="fig1 smallest radius / eps (default 0.02)")
    g.add_argument("--rmax", help="fig1 largest radius / eps (default 20)")
    g.add_argument("--tmax", help="fig2 largest time / eps (default 30)")
    g.set_defaults(func=cmd_figure)

    v = sub.add_parser("verify", help="closed forms vs quadrature, lattice and table checks")
    common(v)
    v.add_argument("--only", action="append", help="suite name(s), comma-separated or repeated")
    v.add_argument("--tol", help="relative quadrature tolerance (default 1e-12 or $DIPOLEFRONT_TOL)")
    v.add_argument("--list", action="store_true", help="list suite names")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge(args, parser)
        return args.func(args)
    except (UsageError, DomainError, OSError) as exc:
        print(f"dipolefront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DipoleFrontError as exc:
        print(f"dipolefront: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
