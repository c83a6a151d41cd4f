"""End-to-end acceptance checks shared by the test-suite and ``selftest``.

Each ``criterion_*`` function returns a :class:`CriterionResult` carrying a
pass/fail verdict, the numbers behind it, and the wall-clock time.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = ["CriterionResult", "CRITERIA", "run_all", "format_result"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _timed(number: int, title: str, limit: float | None = None):
    def wrap(fn: Callable[[], tuple[bool, str]]):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ok, detail = fn()
            dt = time.perf_counter() - t0
            if limit is not None and dt > limit:
                ok = False
                detail += f"; runtime {dt:.1f} s exceeds {limit:g} s"
            return CriterionResult(number, title, ok, detail, dt)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _table_tolerance(value: float) -> float:
    """Half a unit in the last printed digit (three significant figures), at least 1e-3."""
    if value == 0:
        return 1e-3
    last = 10.0 ** (math.floor(math.log10(abs(value))) - 2)
    return max(1e-3, 0.5 * last + 1e-12)


@_timed(1, "Channel-table eigenvalues", limit=5.0)
def criterion_1() -> tuple[bool, str]:
    from .channels import AngularChannel, REFERENCE_TABLE, eigensystem, single_assignment_gram, table_channel
    worst, where, bad = 0.0, "", []
    for key, blocks in REFERENCE_TABLE.items():
        es = eigensystem(table_channel(key).matrix())
        for m, ref in blocks.items():
            got = np.sort(es.values[2 * m])[::-1]
            ref = np.sort(np.asarray(ref, dtype=float))[::-1]
            if got.size != ref.size:
                bad.append(f"{key} M={m}: {got.size} values vs {ref.size}")
                continue
            for g, r in zip(got, ref):
                err = abs(g - r)
                if err > _table_tolerance(r):
                    bad.append(f"{key} M={m}: {g:.5f} vs {r}")
                if err > worst:
                    worst, where = err, f"{key} M={m}"
    # analytic anchors (single atom assignment of the intermediate levels)
    gram = single_assignment_gram(AngularChannel.make(1, 0.5, 0, 0.5, 0, 0.5))
    block = gram[0]
    m0 = np.sort(np.linalg.eigvalsh(block))
    anchors = (np.allclose(np.abs(block), 8 / 81, rtol=0, atol=1e-14)
               and abs(m0[0]) < 1e-14 and abs(m0[1] - 16 / 81) < 1e-14)
    if not anchors:
        bad.append(f"anchors {block.tolist()} / {m0.tolist()}")
    ok = not bad
    return ok, (f"23 channels; worst |diff| {worst:.2e} at {where}; M=0 anchor (8/81)[[1,1],[1,1]] -> {{0,16/81}} "
                f"{'exact' if anchors else 'FAILED'}" + ("" if ok else "; " + "; ".join(bad[:4])))


@_timed(2, "Forster-zero census", limit=5.0)
def criterion_2() -> tuple[bool, str]:
    from .channels import EXACT_ZERO, REFERENCE_TABLE, WEAK_ZERO, eigensystem, table_channel
    exact, weak = [], []
    for key in REFERENCE_TABLE:
        lo = eigensystem(table_channel(key).matrix()).min_value()
        if lo < EXACT_ZERO:
            exact.append(key)
        elif lo < WEAK_ZERO:
            weak.append(key)
    ok = len(exact) == 9 and len(weak) == 7
    return ok, f"exact zeros {len(exact)} (expected 9), weak {len(weak)} (expected 7); weak: {', '.join(weak)}"


@_timed(3, "Coupled-basis equivalence")
def criterion_3() -> tuple[bool, str]:
    from .channels import REFERENCE_TABLE, coupled_d_blocks, eigensystem, table_channel
    worst = 0.0
    for key in REFERENCE_TABLE:
        spec = table_channel(key)
        es = eigensystem(spec.matrix())
        coupled: dict[int, np.ndarray] = {}
        for comp, weight in spec.components:
            for tM, (block, _) in coupled_d_blocks(comp).items():
                coupled[tM] = coupled.get(tM, 0) + weight * block
        for tM, block in coupled.items():
            if tM < 0:
                continue
            a = np.sort(np.linalg.eigvalsh(block))
            b = np.sort(es.values[tM])
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst < 1e-12, f"max spectral difference {worst:.1e} (limit 1e-12)"


SEMICLASSICAL_TRANSITIONS = [(0, 1, 1, 1), (0, 1, 1, 3), (1, 1, 2, 3), (1, 3, 2, 5),
                             (1, 3, 0, 1), (2, 5, 3, 7), (2, 3, 1, 1)]


@_timed(4, "Radial matrix elements", limit=60.0)
def criterion_4() -> tuple[bool, str]:
    from .hydrogen import gordon_integral, numerov_phase
    from .radial import radial_matrix_element, semiclassical_radial_me
    from .species import StateLabel, get_species
    h = get_species("H")
    worst_h = 0.0
    for n in range(2, 21):
        for l in range(1, min(n, 4)):
            for n1 in range(l, 21):
                ref = gordon_integral(n, l, n1) * numerov_phase(n, l) * numerov_phase(n1, l - 1)
                got = radial_matrix_element(StateLabel("H", n, l, 2 * l + 1),
                                            StateLabel("H", n1, l - 1, 2 * l - 1), h).value
                worst_h = max(worst_h, abs(got - ref) / abs(ref))
    worst_sc, worst_big, abs_dev = 0.0, 0.0, 0.0
    n_total = n_within = 0
    for name in ("Rb", "Cs"):
        sp = get_species(name)
        for l_i, tj_i, l_f, tj_f in SEMICLASSICAL_TRANSITIONS:
            for n in range(30, 91, 10):
                a = StateLabel(sp.name, n, l_i, tj_i)
                for dn in range(-4, 5):
                    b = StateLabel(sp.name, n + dn, l_f, tj_f)
                    num = radial_matrix_element(a, b, sp).value
                    sc = semiclassical_radial_me(a, b, sp).value
                    rel = abs(sc - num) / abs(num)
                    worst_sc = max(worst_sc, rel)
                    n_total += 1
                    n_within += rel < 0.01
                    abs_dev = max(abs_dev, abs(sc - num) / n ** 2)
                    if abs(num) >= 0.01 * n ** 2:
                        worst_big = max(worst_big, rel)
    ok = worst_h < 1e-5 and worst_sc < 0.01
    return ok, (f"hydrogen vs Gordon max rel {worst_h:.1e} (limit 1e-5); semiclassical max rel "
                f"{worst_sc:.3g} over all elements (limit 0.01; {n_within}/{n_total} within), "
                f"{worst_big:.2%} where |ME| >= 0.01 n^2, "
                f"max |diff|/n^2 {abs_dev:.1e}")


@_timed(5, "C6 case studies")
def criterion_5() -> tuple[bool, str]:
    from .radial import radial_matrix_element
    from .species import get_species
    from .vdw import forster_term
    checks = []

    def add(label, got, ref, tol):
        checks.append((label, got, ref, tol, abs(got - ref) / abs(ref) <= tol))

    for name, refs in (("Rb", (799, 543, 589, 437)), ("Cs", (716, 315, 381, 227))):
        sp = get_species(name)
        i = sp.state(70, 0, 0.5)
        pairs = [(sp.state(70, 1, 1.5), sp.state(69, 1, 1.5)), (sp.state(70, 1, 1.5), sp.state(69, 1, 0.5)),
                 (sp.state(69, 1, 1.5), sp.state(70, 1, 0.5)), (sp.state(70, 1, 0.5), sp.state(69, 1, 0.5))]
        for (s, t), ref in zip(pairs, refs):
            add(f"{name} 70s {s.label}+{t.label}", forster_term(i, s, t, sp).c6, ref, 0.05)
    rb = get_species("Rb")
    i43 = rb.state(43, 2, 2.5)
    add("Rb 43d C61", forster_term(i43, rb.state(45, 1, 1.5), rb.state(41, 3, 3.5), rb).c6, 391, 0.10)
    add("Rb 43d C62", forster_term(i43, rb.state(45, 1, 1.5), rb.state(41, 3, 2.5), rb).c6, 539, 0.10)
    add("Rb 58d C6(d4,60,56)",
        forster_term(rb.state(58, 2, 1.5), rb.state(60, 1, 0.5), rb.state(56, 3, 2.5), rb).c6, 6090, 0.15)
    cs = get_species("Cs")
    add("Cs |<69d|r|68p>|", abs(radial_matrix_element(cs.state(68, 1, 1.5), cs.state(69, 2, 2.5), cs).value),
        352, 0.02)
    add("Cs |<65d|r|68p>|", abs(radial_matrix_element(cs.state(68, 1, 1.5), cs.state(65, 2, 2.5), cs).value),
        553, 0.02)
    ok = all(c[4] for c in checks)
    worst = max(checks, key=lambda c: abs(c[1] - c[2]) / abs(c[2]) / c[3])
    return ok, (f"{sum(c[4] for c in checks)}/{len(checks)} within tolerance; "
                f"tightest {worst[0]} = {worst[1]:.1f} vs {worst[2]}")


@_timed(6, "Crossover radius")
def criterion_6() -> tuple[bool, str]:
    from .species import get_species
    from .vdw import crossover_radius, forster_term
    direct = crossover_radius(1.98, -7.4e-3)
    cs = get_species("Cs")
    t_cs = forster_term(cs.state(68, 1, 1.5), cs.state(69, 2, 2.5), cs.state(65, 2, 2.5), cs)
    rb = get_species("Rb")
    t_rb = forster_term(rb.state(58, 2, 1.5), rb.state(60, 1, 0.5), rb.state(56, 3, 2.5), rb)
    ok = (f"{direct:.2g}" == "8.1" and abs(t_cs.r_c / 8.7 - 1) <= 0.10 and abs(t_rb.r_c / 11.8 - 1) <= 0.10)
    return ok, (f"direct r_c {direct:.3f} um (8.1); Cs 68p r_c {t_cs.r_c:.2f} um (8.7); "
                f"Rb 58d r_c {t_rb.r_c:.2f} um (11.8)")


def _model_43d():
    from .species import get_species
    from .vdw import VdwModel, forster_term
    rb = get_species("Rb")
    i = rb.state(43, 2, 2.5)
    t1 = forster_term(i, rb.state(45, 1, 1.5), rb.state(41, 3, 3.5), rb)
    t2 = forster_term(i, rb.state(45, 1, 1.5), rb.state(41, 3, 2.5), rb)
    return VdwModel(5, [(t1.angular, t1.c6), (t2.angular, t2.c6)])


def _model_58d():
    from .species import get_species
    from .vdw import VdwModel, forster_term
    rb = get_species("Rb")
    t = forster_term(rb.state(58, 2, 1.5), rb.state(60, 1, 0.5), rb.state(56, 3, 2.5), rb)
    return VdwModel(3, [(t.angular, t.c6)])


def _model_70s(species: str = "Rb"):
    from .species import get_species
    from .vdw import VdwModel, channel_strengths
    sp = get_species(species)
    return VdwModel.from_strengths(channel_strengths(sp.state(70, 0, 0.5), sp))


def psi_f_coefficients() -> np.ndarray:
    """``|<m,-m|psi_F>|`` for ``m = -5/2 .. 5/2`` of the weakest M = 0 state."""
    from .channels import eigensystem, table_channel
    es = eigensystem(table_channel("d5/2->p3/2+f").matrix())
    vals, vecs, kets = es.values[0], es.vectors[0], es.kets[0]
    v = vecs[:, int(np.argmin(vals))]
    order = sorted(range(len(kets)), key=lambda k: kets[k][0])
    return np.abs(v[order])


@_timed(7, "Blockade figures")
def criterion_7() -> tuple[bool, str]:
    from .blockade import ExcitationModel, angular_scan, fixed_distance
    parts, ok = [], True
    m70 = _model_70s()
    up = ExcitationModel.stretched(1)
    worst = max(abs(fixed_distance(m70, up, R).B / (9.77 / R) ** 6 - 1) for R in np.linspace(6, 12, 13))
    ok &= worst <= 0.10
    parts.append(f"70s B(R) max dev {worst:.1%}")
    m43 = _model_43d()
    scan = angular_scan(m43, ExcitationModel.pi_from_clock_state(5), np.radians(np.arange(0, 181, 1.0)), sigma=3.0)
    b_pi = max(r["B_MHz"] for r in scan)
    ok &= abs(b_pi / 0.065 - 1) <= 0.15
    b43 = angular_scan(m43, ExcitationModel.stretched(5), [0.0], sigma=3.0)[0]["B_MHz"]
    b58 = angular_scan(_model_58d(), ExcitationModel.stretched(3), [0.0], sigma=3.0)[0]["B_MHz"]
    ok &= abs(b43 / 0.25 - 1) <= 0.15 and abs(b58 / 2.9 - 1) <= 0.15
    parts.append(f"43d pi max {b_pi * 1e3:.1f} kHz (65); 43d |5/2,5/2> {b43:.3f} MHz (0.25); "
                 f"58d |3/2,3/2> {b58:.2f} MHz (2.9)")
    ev = np.sort(m70.eigen6()[0])[::-1]
    ref = np.array([891, 862, 862, 853])
    dev = float(np.max(np.abs(ev / ref - 1)))
    ok &= dev <= 0.05
    parts.append(f"70s eigenvalues {np.round(ev, 1).tolist()} (max dev {dev:.1%})")
    coeffs = psi_f_coefficients()
    cdev = float(np.max(np.abs(coeffs - np.array([0.67, 0.20, 0.08, 0.08, 0.20, 0.67]))))
    ok &= cdev <= 0.01
    parts.append(f"psi_F |c| {np.round(coeffs, 3).tolist()} (max dev {cdev:.3f})")
    return ok, "; ".join(parts)


@_timed(8, "Spatial-averaging constants")
def criterion_8() -> tuple[bool, str]:
    from .blockade import GAUSSIAN_1D_FACTOR, GAUSSIAN_3D_FACTOR, fort_sigma, gaussian_moment, monte_carlo_moment
    c3 = f"{GAUSSIAN_3D_FACTOR:.3f}" == "3.785"
    c1 = f"{GAUSSIAN_1D_FACTOR:.4f}" == "3.0567"
    mc3 = monte_carlo_moment(3, samples=1_000_000, seed=1) / gaussian_moment(12, 3) - 1
    mc1 = monte_carlo_moment(1, samples=1_000_000, seed=1) / gaussian_moment(12, 1) - 1
    sigma = fort_sigma(2.5, 1.03, 2.5)
    fort_ok = f"{sigma:.1f}" == "3.0"
    ok = c3 and c1 and abs(mc3) <= 0.01 and abs(mc1) <= 0.01 and fort_ok
    return ok, (f"3D {GAUSSIAN_3D_FACTOR:.4f}, 1D {GAUSSIAN_1D_FACTOR:.5f}; Monte Carlo dev 3D {mc3:+.2%}, "
                f"1D {mc1:+.2%}; FORT sigma {sigma:.2f} um (3.0)")


@_timed(9, "Dynamics validation", limit=30.0)
def criterion_9() -> tuple[bool, str]:
    from .dynamics import BlockadeODESystem, PulseSpec, compare_perturbative, integrate
    big = BlockadeODESystem.scalar([1.0, 1.0], {(0, 1): 1e9})
    tr = integrate(big, PulseSpec(4 * math.pi / big.omega_n, samples=801), drop_doubles=True)
    w = big.omega_n
    lim = max(float(np.max(np.abs(tr.c_g - np.cos(w * tr.t / 2)))),
              float(np.max(np.abs(tr.c_s + 1j * np.sin(w * tr.t / 2)))))
    errs, norm = [], 0.0
    for ratio in (5, 10, 20, 40):
        s = BlockadeODESystem.scalar([1.0, 1.0], {(0, 1): ratio * math.sqrt(2.0)})
        rep = compare_perturbative(s)
        errs.append(abs(rep["P2_sim"] / rep["P2_formula"] - 1))
        norm = max(norm, rep["max_norm_error"])
    mono = all(a > b for a, b in zip(errs, errs[1:]))
    ok = lim < 1e-6 and errs[2] <= 0.10 and mono and norm < 1e-8
    return ok, (f"perfect-blockade dev {lim:.1e}; P2 rel err at D/W=5,10,20,40: "
                + ", ".join(f"{e:.2%}" for e in errs) + f"; norm err {norm:.1e}")


@_timed(10, "Quadrupole dominance distance")
def criterion_10() -> tuple[bool, str]:
    from .vdw import qq_dominance_estimate
    d = qq_dominance_estimate(1.0)
    return abs(d / 350 - 1) <= 0.05, f"e^2/delta at 1 GHz = {d:.1f} um (~350)"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def format_result(r: CriterionResult) -> str:
    return f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d}. {r.title} ({r.seconds:.1f} s): {r.detail}"


def run_all(echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        r = fn()
        if echo:
            echo(format_result(r))
        out.append(r)
    return out
