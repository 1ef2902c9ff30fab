"""Command line front end: sweeps, point reports, resonance tables, selfcheck.

All wavenumbers and couplings on this surface are in 2*pi/d units and are
converted once on entry; CSV output is deterministic (fixed column order,
floats at 15 significant digits) so identical configs produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from . import entangle, oracle, resonance, scattering
from .chanmath import TWO_PI, from_cycles

EXIT_OK = 0
EXIT_SELFCHECK_FAILED = 1
EXIT_BAD_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    """User-facing sweep configuration; every wavenumber/coupling in 2*pi/d units."""

    u11: float = 0.01
    u22: float = 0.01
    u12_re: float = 0.0
    u12_im: float = 0.0
    d: float = 1.0
    k1: float = 1.0
    dk: float = 0.0
    dk_min: float = 0.0
    dk_max: float = 2.0
    dk_steps: int = 2000
    k1_min: float = 0.6
    k1_max: float = 1.4
    k1_steps: int = 200
    k_lo: float = 0.1
    k_hi: float = 1.5
    out: str = ""

    @property
    def u12(self):
        return complex(self.u12_re, self.u12_im)

    @property
    def is_mixing(self):
        return self.u12 != 0

    def chain(self):
        return scattering.DeltaChain(
            u11=from_cycles(self.u11), u22=from_cycles(self.u22),
            u12=from_cycles(self.u12_re) + 1j * from_cycles(self.u12_im),
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_FIELDS = {"dk_steps", "k1_steps"}


def config_from_mapping(mapping):
    """Build a RunConfig from a key=value mapping, rejecting unknown keys."""
    kwargs = {}
    for key, raw in mapping.items():
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key: {key}")
        if key == "out":
            kwargs[key] = str(raw)
        elif key in _INT_FIELDS:
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    return RunConfig(**kwargs)


def parse_config_file(path):
    """Read a key=value config file ('#' starts a comment)."""
    mapping = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
    return mapping


def _fmt(x):
    """One float, 15 significant digits, deterministic."""
    return f"{float(x):.15g}"


def config_header_lines(cfg, command):
    lines = [f"# deltawire {__version__}", f"# command={command}"]
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if f.name == "out":
            lines.append(f"# out={value}")
        elif f.name in _INT_FIELDS:
            lines.append(f"# {f.name}={int(value)}")
        else:
            lines.append(f"# {f.name}={_fmt(value)}")
    return lines


def parse_header_config(lines):
    """Reparse a CSV header echo into a RunConfig (round-trip support)."""
    mapping = {}
    for line in lines:
        body = line.lstrip("#").strip()
        if "=" not in body:
            continue
        key, value = body.split("=", 1)
        if key in _FIELD_TYPES:
            mapping[key] = value
    return config_from_mapping(mapping)


def _validate_common(cfg):
    if cfg.d != 1.0:
        raise ValueError("d is fixed to 1; wavenumbers and couplings are in 2*pi/d units")
    if cfg.k1 <= 0:
        raise ValueError("k1 must be positive")


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- sweeps

def _eta_curve_no_mixing(cfg, k2_user):
    """Vectorized concurrence and same-channel transmissions along a k2 array."""
    k1_int = from_cycles(cfg.k1)
    k2_int = from_cycles(np.asarray(k2_user))
    a1 = scattering.double_delta_closed_form(from_cycles(cfg.u11), k1_int)
    a2 = scattering.double_delta_closed_form(from_cycles(cfg.u22), k2_int)
    eta = entangle.concurrence_closed(a1.r, a2.r, a1.t, a2.t)
    return eta, np.abs(a1.t) ** 2 * np.ones_like(k2_int), np.abs(a2.t) ** 2


def _eta_point_mixing(cfg, k2_user):
    s = scattering.double_delta_smatrix(
        cfg.chain(), from_cycles(cfg.k1), from_cycles(k2_user))
    rep = entangle.entanglement_report(s)
    eta = rep.eta_det if rep.eta_det is not None else float("nan")
    return eta, abs(s.t[0, 0]) ** 2, abs(s.t[1, 1]) ** 2


def fig2_rows(cfg):
    """(dk, eta, t11_sq, t22_sq) rows for the fixed-k1 sweep."""
    dks = np.linspace(cfg.dk_min, cfg.dk_max, cfg.dk_steps)
    if not cfg.is_mixing:
        eta, t1, t2 = _eta_curve_no_mixing(cfg, cfg.k1 + dks)
        return [(dks[i], eta[i], t1[i], t2[i]) for i in range(len(dks))]
    return [(dk,) + _eta_point_mixing(cfg, cfg.k1 + dk) for dk in dks]


def fig3_rows(cfg):
    """(k1, dk, eta) rows, row-major in k1."""
    k1s = np.linspace(cfg.k1_min, cfg.k1_max, cfg.k1_steps)
    dks = np.linspace(cfg.dk_min, cfg.dk_max, cfg.dk_steps)
    rows = []
    for k1 in k1s:
        sub = replace(cfg, k1=float(k1))
        if not cfg.is_mixing:
            eta, _, _ = _eta_curve_no_mixing(sub, k1 + dks)
            rows.extend((k1, dks[i], eta[i]) for i in range(len(dks)))
        else:
            rows.extend((k1, dk, _eta_point_mixing(sub, k1 + dk)[0]) for dk in dks)
    return rows


def resonance_rows(cfg):
    """(channel, k_res, peak, width) rows for both diagonal couplings."""
    rows = []
    for channel, u in ((1, cfg.u11), (2, cfg.u22)):
        table = resonance.find_resonances(
            from_cycles(u), 1.0, from_cycles(cfg.k_lo), from_cycles(cfg.k_hi),
            channel=channel,
        )
        rows.extend(
            (channel, e.k_res, e.transmission_at_peak, e.refinement_width)
            for e in table.entries
        )
    return rows


# ---------------------------------------------------------------- commands

def cmd_point(cfg):
    _validate_common(cfg)
    k2 = cfg.k1 + cfg.dk
    if k2 <= 0:
        raise ValueError("k2 = k1 + dk must be positive")
    s = scattering.double_delta_smatrix(
        cfg.chain(), from_cycles(cfg.k1), from_cycles(k2))
    rep = entangle.entanglement_report(s)
    defect = scattering.unitarity_defect(s)

    lines = []
    if rep.eta_det is None:
        lines.append("eta=undefined")
    else:
        lines.append(f"eta={rep.eta_det:.12f}")
    for name, value in (
        ("eta_closed", rep.eta_closed), ("eta_det", rep.eta_det), ("eta_w", rep.eta_w),
    ):
        lines.append(f"{name}={_fmt(value)}" if value is not None else f"{name}=undefined")
    lines.append(f"p_select={_fmt(rep.p_select)}")
    lines.append(f"p_both_left={_fmt(rep.p_both_left)}")
    lines.append(f"p_both_right={_fmt(rep.p_both_right)}")
    if rep.rho1 is not None:
        eigs = sorted(np.linalg.eigvalsh(rep.rho1).real, reverse=True)
        lines.append("rho1_eigenvalues=" + ",".join(_fmt(e) for e in eigs))
        lines.append(f"purity={_fmt(rep.purity)}")
    else:
        lines.append("rho1_eigenvalues=undefined")
        lines.append("purity=undefined")
    lines.append(f"full_state_eta={_fmt(rep.full_state_eta)}")
    lines.append(f"unitarity_defect={_fmt(defect)}")
    print("\n".join(lines))

    if cfg.out:
        eta = rep.eta_det if rep.eta_det is not None else float("nan")
        purity = rep.purity if rep.purity is not None else float("nan")
        csv = config_header_lines(cfg, "point")
        csv.append("k1,dk,eta,p_select,purity,full_state_eta")
        csv.append(",".join(_fmt(v) for v in (
            cfg.k1, cfg.dk, eta, rep.p_select, purity, rep.full_state_eta)))
        _emit(csv, cfg.out)
    return EXIT_OK


def _validate_sweep(cfg, two_dim):
    _validate_common(cfg)
    if cfg.dk_steps < 2:
        raise ValueError("dk_steps must be at least 2")
    if two_dim:
        if cfg.k1_steps < 2:
            raise ValueError("k1_steps must be at least 2")
        if cfg.k1_min <= 0 or cfg.k1_max < cfg.k1_min:
            raise ValueError("need 0 < k1_min <= k1_max")
        if cfg.k1_min + cfg.dk_min <= 0:
            raise ValueError("invalid range (k1 + dk_min <= 0 somewhere in the grid)")
    else:
        if cfg.k1 + cfg.dk_min <= 0:
            raise ValueError("invalid range (k1 + dk_min <= 0)")
    if cfg.dk_max < cfg.dk_min:
        raise ValueError("need dk_min <= dk_max")


def cmd_fig2(cfg):
    _validate_sweep(cfg, two_dim=False)
    lines = config_header_lines(cfg, "fig2")
    lines.append("dk,eta,t11_sq,t22_sq")
    lines.extend(",".join(_fmt(v) for v in row) for row in fig2_rows(cfg))
    _emit(lines, cfg.out)
    return EXIT_OK


def cmd_fig3(cfg):
    _validate_sweep(cfg, two_dim=True)
    lines = config_header_lines(cfg, "fig3")
    lines.append("k1,dk,eta")
    lines.extend(",".join(_fmt(v) for v in row) for row in fig3_rows(cfg))
    _emit(lines, cfg.out)
    return EXIT_OK


def cmd_resonances(cfg):
    _validate_common(cfg)
    if not (0 < cfg.k_lo < cfg.k_hi):
        raise ValueError("need 0 < k_lo < k_hi")
    lines = config_header_lines(cfg, "resonances")
    lines.append("channel,k_res,peak,width")
    lines.extend(
        f"{ch},{_fmt(k)},{_fmt(p)},{_fmt(w)}" for ch, k, p, w in resonance_rows(cfg)
    )
    _emit(lines, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------- selfcheck

def _selfcheck_draws(rng, n, with_mixing):
    for _ in range(n):
        u11, u22 = rng.uniform(0.0, 5.0, 2) * TWO_PI
        if with_mixing:
            u12 = rng.uniform(0.0, 2.0) * TWO_PI * np.exp(1j * rng.uniform(0, 2 * np.pi))
        else:
            u12 = 0.0
        k1, k2 = rng.uniform(0.05, 3.0, 2) * TWO_PI
        yield scattering.double_delta_smatrix(
            scattering.DeltaChain(u11, u22, u12), k1, k2)


def _suite_unitarity(rng):
    worst = 0.0
    for s in _selfcheck_draws(rng, 200, True):
        worst = max(worst, scattering.unitarity_defect(s))
    for s in _selfcheck_draws(rng, 200, False):
        worst = max(worst, scattering.unitarity_defect(s))
    return worst < 1e-12, f"worst defect {worst:.3e} over 400 draws"


def _suite_routes(rng):
    worst = 0.0
    for s in _selfcheck_draws(rng, 150, False):
        state = entangle.gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        e_closed = entangle.concurrence_closed(
            s.r[0, 0], s.r[1, 1], s.t[0, 0], s.t[1, 1])
        e_det = entangle.concurrence_det(state)
        e_w = entangle.concurrence_from_w(entangle.w_postselected(state))
        worst = max(worst, abs(e_closed - e_det), abs(e_det - e_w))
    for s in _selfcheck_draws(rng, 150, True):
        state = entangle.gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        e_det = entangle.concurrence_det(state)
        e_w = entangle.concurrence_from_w(entangle.w_postselected(state))
        worst = max(worst, abs(e_det - e_w))
    return worst < 1e-12, f"worst route split {worst:.3e} over 300 draws"


def _suite_budget(rng):
    worst = 0.0
    for s in _selfcheck_draws(rng, 300, True):
        p_co, p_ll, p_rr = entangle.probability_budget(s)
        worst = max(worst, abs(p_co + p_ll + p_rr - 1.0))
    return worst < 1e-12, f"worst budget defect {worst:.3e} over 300 draws"


def _suite_purity(rng):
    worst = 0.0
    for s in _selfcheck_draws(rng, 300, True):
        state = entangle.gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        eta = entangle.concurrence_det(state)
        _, purity = entangle.reduced_density(entangle.w_postselected(state))
        worst = max(worst, abs(purity - (2.0 - eta**2) / 4.0))
    return worst < 1e-12, f"worst purity split {worst:.3e} over 300 draws"


def _suite_full_state(rng):
    worst = 0.0
    for s in _selfcheck_draws(rng, 300, True):
        worst = max(worst, entangle.concurrence_from_w(entangle.w_full(s)))
    return worst < 1e-12, f"worst full-state concurrence {worst:.3e} over 300 draws"


def _suite_zero_alignment(_rng):
    cfg = RunConfig()
    table = resonance.find_resonances(
        from_cycles(cfg.u22), 1.0,
        from_cycles(cfg.k1), from_cycles(cfg.k1 + cfg.dk_max + 0.05), channel=2)
    dks = np.linspace(cfg.dk_min, cfg.dk_max, cfg.dk_steps)
    eta, _, _ = _eta_curve_no_mixing(cfg, cfg.k1 + dks)

    def eta_fn(dk):
        e, _, _ = _eta_curve_no_mixing(cfg, cfg.k1 + dk)
        return e

    report = resonance.zero_alignment(dks, eta, table, cfg.k1, eta_fn=eta_fn, tol=1e-8)
    n_zero = len(report.matches)
    if report.all_zero or n_zero == 0:
        return False, "no concurrence zeros located on the default slice"
    if report.unmatched:
        worst = max(m.distance for m in report.unmatched)
        return False, f"{len(report.unmatched)} unmatched zeros, worst distance {worst:.3e}"
    eta_at_res = max(eta_fn(e.k_res - cfg.k1) for e in table.entries)
    ok = eta_at_res < 1e-8
    return ok, (f"{n_zero} zeros all within 1e-8 of resonances, "
                f"worst eta at resonance {eta_at_res:.3e}")


def _suite_oracle(_rng):
    checks = [
        (scattering.DeltaChain(0.01 * TWO_PI, 0.01 * TWO_PI),
         1.0 * TWO_PI, 1.3 * TWO_PI, 1e-3, False),
        (scattering.DeltaChain(0.8, 1.7, 0.3 * TWO_PI),
         0.9 * TWO_PI, 1.6 * TWO_PI, 1e-5, True),
        (scattering.DeltaChain(1.2, 0.6, 0.25 * TWO_PI * np.exp(0.9j)),
         1.2 * TWO_PI, 0.8 * TWO_PI, 1e-5, True),
    ]
    worst = 0.0
    for chain, k1, k2, sigma, extrapolate in checks:
        cfg = oracle.OracleConfig(u=chain.coupling_matrix, k1=k1, k2=k2, sigma=sigma)
        run = oracle.fd_scatter_extrapolated if extrapolate else oracle.fd_scatter
        numeric = run(cfg)
        analytic = scattering.double_delta_smatrix(chain, k1, k2)
        worst = max(
            worst,
            np.abs(numeric.r - analytic.r).max(), np.abs(numeric.t - analytic.t).max(),
            np.abs(numeric.rp - analytic.rp).max(), np.abs(numeric.tp - analytic.tp).max(),
        )
    return worst < 1e-6, f"worst amplitude deviation {worst:.3e} over {len(checks)} configs"


def run_selfcheck(with_oracle=False):
    """Run every invariant suite; returns (report lines, all passed)."""
    suites = [
        ("unitarity_defect", _suite_unitarity),
        ("route_equivalence", _suite_routes),
        ("probability_budget", _suite_budget),
        ("purity_identity", _suite_purity),
        ("full_state_zero", _suite_full_state),
        ("zero_alignment", _suite_zero_alignment),
    ]
    if with_oracle:
        suites.append(("oracle_agreement", _suite_oracle))
    lines = []
    n_pass = 0
    for name, suite in suites:
        rng = np.random.default_rng(20240917)
        ok, detail = suite(rng)
        n_pass += ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    lines.append(f"{'PASS' if n_pass == len(suites) else 'FAIL'} {n_pass}/{len(suites)} suites")
    return lines, n_pass == len(suites)


def cmd_selfcheck(with_oracle):
    lines, ok = run_selfcheck(with_oracle)
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_SELFCHECK_FAILED


# ---------------------------------------------------------------- entry point

def build_parser():
    parser = argparse.ArgumentParser(
        prog="deltawire",
        description="Two-electron entanglement from a double delta barrier "
                    "in a two-channel wire (all inputs in 2*pi/d units)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "point": "single-configuration entanglement report",
        "fig2": "concurrence vs dk sweep at fixed k1 (CSV)",
        "fig3": "concurrence over a (k1, dk) grid (CSV)",
        "resonances": "transmission resonance table (CSV)",
        "selfcheck": "run the invariant suites",
    }
    float_flags = ["u11", "u22", "u12-re", "u12-im", "d", "k1", "dk",
                   "dk-min", "dk-max", "k1-min", "k1-max", "k-lo", "k-hi"]
    int_flags = ["dk-steps", "k1-steps"]
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        for flag in float_flags:
            p.add_argument(f"--{flag}", type=float, default=None)
        for flag in int_flags:
            p.add_argument(f"--{flag}", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--config", type=str, default=None)
        if name == "selfcheck":
            p.add_argument("--oracle", action="store_true")
    return parser


def _merge_config(args):
    mapping = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    for key in _FIELD_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value
    return config_from_mapping(mapping)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if args.command == "point":
            return cmd_point(cfg)
        if args.command == "fig2":
            return cmd_fig2(cfg)
        if args.command == "fig3":
            return cmd_fig3(cfg)
        if args.command == "resonances":
            return cmd_resonances(cfg)
        if args.command == "selfcheck":
            return cmd_selfcheck(args.oracle)
        parser.error(f"unknown command {args.command}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return EXIT_OK


def console_main():
    sys.exit(main())
