"""Command-line interface: ``rydvdw <subcommand> [options]``.

Subcommands write CSV (floats at six significant figures) or JSON (full
precision) to ``--output`` or standard output.  Exit status is 0 on success,
1 on a numerical failure and 2 on a usage error (bad state, channel or
species specification).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from typing import Any, Sequence

import numpy as np

__all__ = ["main", "build_parser", "UsageError"]


class UsageError(ValueError):
    """Malformed command-line input."""


# -- output ------------------------------------------------------------------------

def _fmt(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return " ".join(str(_fmt(x)) for x in v)
    return v


def _plain(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def render(rows: list[dict] | dict, fmt: str) -> str:
    """CSV for a list of flat rows, JSON for anything (sorted keys, fixed layout)."""
    if fmt == "json":
        return json.dumps(_plain(rows), indent=2, sort_keys=True) + "\n"
    if isinstance(rows, dict):
        raise UsageError("this result is a report; use --format json")
    buf = io.StringIO()
    if rows:
        fields = list(rows[0].keys())
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in fields})
    return buf.getvalue()


def _emit(args, payload) -> None:
    text = render(payload, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- helpers -----------------------------------------------------------------------

def _species(args):
    from .species import get_species
    return get_species(args.species_file if args.species_file else args.species)


def _state(args, sp):
    from .species import parse_state
    if not args.state:
        raise UsageError("--state is required (e.g. 70s1/2)")
    return parse_state(args.state, sp)


def _lj(text: str) -> tuple[int, int]:
    from .channels import parse_lj
    tl, tj = parse_lj(text)
    if tj is None:
        raise UsageError(f"fine-structure level required in {text!r}")
    return tl // 2, tj


# -- subcommands -------------------------------------------------------------------

def cmd_eigs(args) -> Any:
    from .channels import REFERENCE_TABLE, coupled_d_blocks, eigensystem, table_channel
    keys = [args.channel] if args.channel else list(REFERENCE_TABLE)
    rows = []
    for key in keys:
        spec = table_channel(key)
        if args.basis == "coupled":
            blocks: dict[int, np.ndarray] = {}
            for comp, w in spec.components:
                for tM, (b, _) in coupled_d_blocks(comp).items():
                    blocks[tM] = blocks.get(tM, 0) + w * b
            values = {tM: np.sort(np.linalg.eigvalsh(b))[::-1] for tM, b in blocks.items() if tM >= 0}
        else:
            values = eigensystem(spec.matrix()).values
        for tM in sorted(values, reverse=True):
            for k, v in enumerate(values[tM]):
                v = 0.0 if abs(v) < 1e-12 else float(v)
                rows.append({"channel": spec.key, "M": tM / 2 if tM % 2 else tM // 2,
                             "index": k, "D": v})
    return rows


def cmd_defects(args) -> Any:
    from .vdw import FAMILIES, case_study_tables
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    offsets = None
    if args.offsets:
        offsets = [tuple(int(x) for x in o.split(",")) for o in args.offsets]
    return case_study_tables(_species(args), args.family, _n_values(args), offsets)


def _n_values(args) -> list[int]:
    if args.n:
        return list(args.n)
    lo, hi = args.n_range
    return list(range(lo, hi + 1, args.n_step))


def cmd_radial(args) -> Any:
    from .radial import matrix_element_scan
    if "->" not in args.transition:
        raise UsageError("transition must look like 'd5/2->p3/2'")
    a, b = args.transition.split("->", 1)
    (l_i, tj_i), (l_f, tj_f) = _lj(a), _lj(b)
    if abs(l_i - l_f) != 1 or abs(tj_i - tj_f) > 2:
        raise UsageError(f"{args.transition} is not an electric-dipole transition")
    sp = _species(args)
    offsets = range(-args.max_dn, args.max_dn + 1)
    methods = ["numerov", "semiclassical"] if args.method == "both" else [args.method]
    rows = []
    for m in methods:
        for r in matrix_element_scan(sp, l_i, tj_i, l_f, tj_f, _n_values(args), offsets, m):
            rows.append({"method": m, **r})
    return rows


def cmd_c6(args) -> Any:
    from .vdw import channel_strengths, enumerate_channels
    sp = _species(args)
    st = _state(args, sp)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pairs = enumerate_channels(st, sp, args.n_window, args.defect_cap)
    rows = []
    for c in pairs[: args.top]:
        rows.append({"kind": "pair", "label": f"{c.s.label}+{c.t.label}", "channel": c.angular.label,
                     "defect_MHz": c.defect_ghz * 1e3, "C3_GHz_um3": c.c3, "C6_GHz_um6": c.c6,
                     "R_c_um": c.r_c, "resonant": c.resonant})
    for s in channel_strengths(st, sp, args.n_window, args.defect_cap):
        rows.append({"kind": "channel", "label": s.dominant.s.label + "+" + s.dominant.t.label,
                     "channel": s.angular.label, "defect_MHz": s.dominant.defect_ghz * 1e3,
                     "C3_GHz_um3": s.c3, "C6_GHz_um6": s.c6, "R_c_um": s.r_c, "resonant": False})
    return rows


def cmd_potential(args) -> Any:
    from .channels import eigensystem, table_channel
    from .species import parse_state
    from .vdw import forster_term, two_level_curves
    if args.c3 is not None or args.delta is not None:
        if args.c3 is None or args.delta is None or not args.channel:
            raise UsageError("--c3 and --delta (GHz units) need --channel as well")
        c3, delta, spec = args.c3, args.delta, table_channel(args.channel)
    else:
        sp = _species(args)
        st = _state(args, sp)
        if not args.pair or "+" not in args.pair:
            raise UsageError("--pair must name the intermediate levels, e.g. 60p1/2+56f5/2")
        s, t = (parse_state(x, sp) for x in args.pair.split("+", 1))
        term = forster_term(st, s, t, sp)
        c3, delta = term.c3, term.defect_ghz
        spec = table_channel(term.angular.label)
    es = eigensystem(spec.matrix())
    d_values = sorted({round(float(v), 10) for vals in es.values.values() for v in vals}, reverse=True)
    R = np.linspace(args.rmin, args.rmax, args.points)
    rows = []
    for k, d in enumerate(d_values):
        curves = two_level_curves(c3, delta, d, R)
        for r, vp, vm, vi in zip(R, curves.v_plus, curves.v_minus, curves.initial_branch):
            rows.append({"curve": k, "D": d, "R_um": r, "V_initial_MHz": vi * 1e3,
                         "V_plus_MHz": vp * 1e3, "V_minus_MHz": vm * 1e3})
    return rows


def _excitation(text: str, tj: int):
    from .blockade import ExcitationModel
    if text == "stretched":
        return ExcitationModel.stretched(tj)
    if text == "pi":
        return ExcitationModel.pi_from_clock_state(tj)
    if text.startswith("product:"):
        try:
            a, b = (int(round(2 * float(x))) for x in text[8:].split(","))
        except ValueError:
            raise UsageError(f"bad product ket {text!r}; use product:m_a,m_b") from None
        return ExcitationModel.product(tj, a, b)
    raise UsageError(f"unknown excitation {text!r} (stretched, pi or product:m_a,m_b)")


def cmd_blockade(args) -> Any:
    from .blockade import EnsembleGeometry, angular_scan, fixed_distance, fort_sigma, spatial_average
    from .vdw import VdwModel, channel_strengths
    sp = _species(args)
    st = _state(args, sp)
    strengths = channel_strengths(st, sp, args.n_window, args.defect_cap)
    if args.dominant_only:
        from dataclasses import replace
        strengths = [replace(s, c6=s.dominant.c6 * s.dominant.weight) for s in strengths]
    model = VdwModel.from_strengths(strengths)
    exc = _excitation(args.excitation, st.tj)
    exc.rabi = (args.rabi, args.rabi)
    sigma = args.sigma
    if args.fort:
        w, lam, trel = args.fort
        sigma = fort_sigma(w, lam, trel)
    thetas = np.radians(np.linspace(0.0, 180.0, args.theta_steps))
    if args.geometry == "pair":
        if args.R is None:
            raise UsageError("--R is required for --geometry pair")
        if args.format == "json":
            res = fixed_distance(model, exc, args.R, isotropic=True)
            return {"inputs": _inputs(args, sigma), **res.to_dict()}
        return angular_scan(model, exc, thetas, R=args.R)
    if sigma is None:
        raise UsageError("--sigma or --fort is required for Gaussian geometries")
    if args.geometry == "3d":
        res = spatial_average(EnsembleGeometry("gaussian3d", sigma), model, exc)
        return {"inputs": _inputs(args, sigma), **res.to_dict()}
    if args.format == "json":
        res = spatial_average(EnsembleGeometry("gaussian1d", sigma, math.radians(args.theta)), model, exc)
        return {"inputs": _inputs(args, sigma), **res.to_dict()}
    return angular_scan(model, exc, thetas, sigma=sigma)


def _inputs(args, sigma) -> dict:
    return {"species": args.species_file or args.species, "state": args.state,
            "excitation": args.excitation, "geometry": args.geometry, "sigma_um": sigma,
            "R_um": args.R, "theta_deg": args.theta, "rabi_MHz": args.rabi}


def cmd_dynamics(args) -> Any:
    from .dynamics import BlockadeODESystem, PulseSpec, compare_perturbative, integrate
    if args.n_atoms < 2:
        raise UsageError("--n-atoms must be at least 2")
    rabi = [1.0] * args.n_atoms
    omega_n = math.sqrt(args.n_atoms)
    shifts = {}
    for k in range(args.n_atoms):
        for l in range(k + 1, args.n_atoms):
            # atoms on a line: shifts fall off as the sixth power of the spacing
            shifts[(k, l)] = args.ratio * omega_n / (l - k) ** 6
    system = BlockadeODESystem.scalar(rabi, shifts)
    pulse = PulseSpec(2 * math.pi * args.cycles / omega_n, rtol=args.rtol, samples=args.samples)
    if args.format == "json":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return {"inputs": {"n_atoms": args.n_atoms, "Delta_over_Omega": args.ratio,
                               "cycles": args.cycles, "rtol": args.rtol},
                    **compare_perturbative(system, pulse)}
    return integrate(system, pulse, mode="full").rows()


def cmd_selftest(args) -> int:
    from .acceptance import run_all
    results = run_all(echo=lambda s: print(s, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} acceptance criteria passed")
    return 0 if not failed else 1


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--species", default="Rb", help="species name in the data directory (default Rb)")
    common.add_argument("--species-file", help="path to a species INI file (overrides --species)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="output file (default: standard output)")

    p = argparse.ArgumentParser(prog="rydvdw", description="Rydberg pair interactions and blockade.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eigs", parents=[common], help="angular channel eigenvalues D_phi")
    e.add_argument("--channel", help="e.g. 'p1/2->s1/2+s1/2' or 'd5/2->p3/2+f' (default: all table rows)")
    e.add_argument("--basis", choices=("product", "coupled"), default="product")
    e.set_defaults(func=cmd_eigs)

    def n_opts(q, default_range):
        q.add_argument("--n", type=int, nargs="+", help="explicit principal quantum numbers")
        q.add_argument("--n-range", type=int, nargs=2, default=default_range, metavar=("LO", "HI"))
        q.add_argument("--n-step", type=int, default=1)

    d = sub.add_parser("defects", parents=[common], help="Forster defects and C6 of a channel family")
    d.add_argument("--family", required=True, help="s->pp, p->ss, p->sd, p->dd, d->pp, d->pf or d->ff")
    d.add_argument("--offsets", nargs="+", help="(n_s - n, n_t - n) pairs as 'a,b'")
    n_opts(d, [40, 100])
    d.set_defaults(func=cmd_defects)

    r = sub.add_parser("radial", parents=[common], help="radial matrix element scans")
    r.add_argument("--transition", required=True, help="e.g. 'd5/2->p3/2'")
    r.add_argument("--method", choices=("numerov", "semiclassical", "both"), default="numerov")
    r.add_argument("--max-dn", type=int, default=4)
    n_opts(r, [30, 90])
    r.set_defaults(func=cmd_radial)

    def window(q):
        q.add_argument("--n-window", type=int, default=5)
        q.add_argument("--defect-cap", type=float, default=50.0, help="GHz")

    c = sub.add_parser("c6", parents=[common], help="C6 coefficients of a Rydberg level")
    c.add_argument("--state", required=True)
    c.add_argument("--top", type=int, default=10, help="number of strongest level pairs listed")
    window(c)
    c.set_defaults(func=cmd_c6)

    v = sub.add_parser("potential", parents=[common], help="two-level potential curves")
    v.add_argument("--state")
    v.add_argument("--pair", help="intermediate levels, e.g. 60p1/2+56f5/2")
    v.add_argument("--channel")
    v.add_argument("--c3", type=float, help="GHz um^3")
    v.add_argument("--delta", type=float, help="GHz")
    v.add_argument("--rmin", type=float, default=2.0)
    v.add_argument("--rmax", type=float, default=20.0)
    v.add_argument("--points", type=int, default=91)
    v.set_defaults(func=cmd_potential)

    b = sub.add_parser("blockade", parents=[common], help="blockade and resonance shifts")
    b.add_argument("--state", required=True)
    b.add_argument("--excitation", default="stretched", help="stretched, pi or product:m_a,m_b")
    b.add_argument("--geometry", choices=("pair", "1d", "3d"), default="1d")
    b.add_argument("--sigma", type=float, help="cloud rms width (um)")
    b.add_argument("--fort", type=float, nargs=3, metavar=("WAIST", "WAVELENGTH", "T_REL"))
    b.add_argument("--R", type=float, help="pair separation (um)")
    b.add_argument("--theta", type=float, default=0.0, help="1D tilt for JSON reports (deg)")
    b.add_argument("--theta-steps", type=int, default=37)
    b.add_argument("--rabi", type=float, default=1.0, help="single-atom Rabi frequency (MHz) for P2")
    b.add_argument("--dominant-only", action="store_true", help="use only the strongest pair per channel")
    window(b)
    b.set_defaults(func=cmd_blockade)

    y = sub.add_parser("dynamics", parents=[common], help="amplitude-equation simulation")
    y.add_argument("--n-atoms", type=int, default=2)
    y.add_argument("--ratio", type=float, default=20.0, help="nearest-pair Delta / Omega_N")
    y.add_argument("--cycles", type=float, default=2.0, help="pulse length in collective Rabi cycles")
    y.add_argument("--rtol", type=float, default=1e-9)
    y.add_argument("--samples", type=int, default=401)
    y.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    from .channels import SelectionRuleError
    from .species import SpeciesLoadError
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
        if args.command == "selftest":
            return result
        _emit(args, result)
        return 0
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (UsageError, SelectionRuleError, SpeciesLoadError, KeyError, ValueError) as exc:
        print(f"rydvdw {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"rydvdw {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
