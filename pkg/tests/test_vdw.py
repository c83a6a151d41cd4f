"""Forster channels, C6 coefficients, pair Hamiltonians and two-level curves."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydvdw.channels import AngularChannel, build_m_operator, table_channel
from rydvdw.species import get_species
from rydvdw.vdw import (ResonantChannelError, VdwModel, c6_total, case_study_tables, channel_strengths,
                        crossover_radius, enumerate_channels, family_term, forster_term,
                        qq_dominance_estimate, two_level_curves, vdw_hamiltonian)

S_PP_70 = [(1, 70, 69), (2, 70, 69), (2, 69, 70), (3, 70, 69)]


@pytest.mark.parametrize("name,ref", [("Rb", [799, 543, 589, 437]), ("Cs", [716, 315, 381, 227])])
def test_70s_channel_c6(name, ref):
    got = [family_term(name, "s->pp", k, 70, a, b).c6 for k, a, b in S_PP_70]
    assert np.allclose(got, ref, rtol=0.05)


def test_rb_70s_channel_ordering():
    rb = get_species("Rb")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ch = enumerate_channels(rb.state(70, 0, 0.5), rb, n_window=3)
    top = ch[:4]
    assert all({c.s.n, c.t.n} == {69, 70} for c in top)
    strength = [c.radial_product ** 2 / abs(c.defect_ghz) for c in ch]
    assert strength == sorted(strength, reverse=True)
    # the delta_1(71,68) pair is orders of magnitude weaker
    weak = family_term("Rb", "s->pp", 1, 70, 71, 68)
    assert abs(weak.c6) < 1e-2 * abs(top[0].c6)


def test_hydrogen_resonant_flagged():
    h = get_species("H")
    with pytest.warns(UserWarning, match="resonant"):
        ch = enumerate_channels(h.state(10, 0, 0.5), h, n_window=2)
    assert any(c.resonant for c in ch)
    with pytest.raises(ResonantChannelError):
        c6_total(h.state(10, 0, 0.5), AngularChannel.make(0, 0.5, 1, 1.5, 1, 1.5), h, n_window=2)


def test_43d_smallest_defect_pair():
    rb = get_species("Rb")
    ch = enumerate_channels(rb.state(43, 2, 2.5), rb, n_window=4)
    best = min(ch, key=lambda c: abs(c.defect_ghz))
    assert (best.s.n, best.s.l, best.s.tj, best.t.n, best.t.l) == (45, 1, 3, 41, 3)
    assert abs(best.defect_ghz) < 0.010


def test_43d_published_c6():
    rb = get_species("Rb")
    i = rb.state(43, 2, 2.5)
    c61 = forster_term(i, rb.state(45, 1, 1.5), rb.state(41, 3, 3.5), rb).c6
    c62 = forster_term(i, rb.state(45, 1, 1.5), rb.state(41, 3, 2.5), rb).c6
    assert c61 == pytest.approx(391, rel=0.10)
    assert c62 == pytest.approx(539, rel=0.10)


def test_single_term_sign():
    for k, a, b in S_PP_70:
        t = family_term("Rb", "s->pp", k, 70, a, b)
        assert np.sign(t.c6) == -np.sign(t.defect_ghz)
        assert t.r_c == pytest.approx((4 * t.c3 ** 2 / t.defect_ghz ** 2) ** (1 / 6))


def test_70s_spin_basis_hamiltonian():
    rb = get_species("Rb")
    strengths = channel_strengths(rb.state(70, 0, 0.5), rb)
    model = VdwModel.from_strengths(strengths)
    s2 = 1 / math.sqrt(2)
    u = np.array([[1, 0, 0, 0], [0, s2, s2, 0], [0, s2, -s2, 0], [0, 0, 0, 1]])
    c = {}
    for s in strengths:
        key = tuple(sorted((s.angular.tjs, s.angular.tjt)))
        c[key] = c.get(key, 0.0) + s.c6
    expect = (c[(3, 3)] * np.diag([44, 68, 36, 44]) + c[(1, 3)] * np.diag([28, 4, 36, 28])
              + c[(1, 1)] * np.diag([8, 32, 0, 8])) / 81
    assert np.allclose(u @ model.h6_full() @ u.T, expect, atol=1e-9 * np.abs(expect).max())
    ev = np.sort(model.eigen6()[0])[::-1]
    assert np.allclose(ev, [891, 862, 862, 853], rtol=0.05)
    # eigenvalues at a given R follow 1/R^6
    es = vdw_hamiltonian(model, 9.2)
    assert np.allclose(np.sort(es.values), np.sort(ev) / 9.2 ** 6)


def test_single_channel_eigenvalues_exact():
    ch = AngularChannel.make(2, 2.5, 1, 1.5, 3, 3.5)
    model = VdwModel(5, [(ch, 391.0)])
    es = vdw_hamiltonian(model, 10.0)
    d = build_m_operator(ch)
    for tM, vals in es.by_block().items():
        ref = np.sort(np.linalg.eigvalsh(d.d_blocks[tM]))[::-1] * 391.0 / 1e6
        assert np.allclose(vals, ref, atol=1e-15)


def test_empty_model_rejected():
    with pytest.raises(ValueError):
        vdw_hamiltonian([], 5.0)


def test_validity_floor_warning():
    model = VdwModel(1, [(AngularChannel.make(0, 0.5, 1, 1.5, 1, 1.5), 1.0)])
    with pytest.warns(UserWarning):
        vdw_hamiltonian(model, 0.1)


def test_fig3_crossover_radius():
    assert crossover_radius(1.98, -7.4e-3) == pytest.approx(8.1, abs=0.05)


@given(st.floats(0.1, 50), st.floats(-1, 1).filter(lambda x: abs(x) > 1e-4),
       st.floats(0, 1), st.floats(1, 30))
def test_two_level_identities(c3, delta, d_phi, R):
    cur = two_level_curves(c3, delta, d_phi, R)
    vp, vm = cur.v_plus[0], cur.v_minus[0]
    scale = max(abs(vp), abs(vm), abs(delta)) ** 2
    assert abs(vp * vm + c3 ** 2 * d_phi / R ** 6) <= 1e-12 * scale
    assert abs(vp + vm - delta) <= 1e-12 * max(abs(vp), abs(vm), abs(delta))
    # b+b -> a+a curves are the a+a -> b+b ones mirrored about delta/2
    rev = two_level_curves(c3, -delta, d_phi, R)
    assert rev.v_plus[0] + delta == pytest.approx(delta - vm, abs=1e-12 * max(1, abs(vp)))
    assert rev.v_minus[0] + delta == pytest.approx(delta - vp, abs=1e-12 * max(1, abs(vp)))


def test_two_level_resonant_limit():
    cur = two_level_curves(2.0, 0.0, 0.5, np.array([3.0, 6.0]))
    assert np.allclose(cur.v_plus, 2.0 * math.sqrt(0.5) / cur.R ** 3)
    assert np.allclose(cur.v_minus, -2.0 * math.sqrt(0.5) / cur.R ** 3)


def test_two_level_large_defect_limit():
    c3, d_phi, R = 2.0, 0.8, 5.0
    for delta in (1.0, 10.0, 100.0):
        v = two_level_curves(c3, delta, d_phi, R).initial_branch[0]
        pert = -c3 ** 2 * d_phi / (delta * R ** 6)
        assert abs(v - pert) <= 2 * abs(pert) ** 2 / abs(delta)


@pytest.mark.parametrize("d_phi", [0.05, 0.4, 1.0])
def test_perturbative_beyond_three_rc(d_phi):
    c3, delta = 1.98, -7.4e-3
    rc = crossover_radius(c3, delta)
    R = np.linspace(3 * rc, 10 * rc, 50)
    v = two_level_curves(c3, delta, d_phi, R).initial_branch
    c6 = c3 ** 2 / -delta
    assert np.max(np.abs(v - c6 * d_phi / R ** 6) / np.abs(v)) < 0.01


def test_qq_estimate():
    assert qq_dominance_estimate(1.0) == pytest.approx(350, rel=0.02)
    assert qq_dominance_estimate(2.0) == pytest.approx(qq_dominance_estimate(1.0) / 2)
    assert qq_dominance_estimate(-0.1) == pytest.approx(qq_dominance_estimate(1.0) * 10)
    with pytest.raises(ValueError):
        qq_dominance_estimate(0.0)


def test_n11_scaling():
    ns = np.arange(60, 81)
    c6 = [abs(family_term("Rb", "s->pp", 1, int(n), int(n), int(n) - 1).c6) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(c6), 1)[0]
    assert 10 <= slope <= 12


def test_case_study_quoted_values():
    assert family_term("Rb", "d->pf", 1, 70, 71, 69).c6 == pytest.approx(-2530, rel=0.10)
    t = family_term("Rb", "d->pf", 4, 58, 60, 56)
    assert t.c6 == pytest.approx(6090, rel=0.15)
    assert t.r_c == pytest.approx(11.8, rel=0.15)
    rows = case_study_tables("Cs", "p->dd", [68])
    near = min(rows, key=lambda r: abs(r["defect_MHz"]))
    assert near["C6_GHz_um6"] == pytest.approx(-63.5, rel=0.15)
    assert near["R_c_um"] == pytest.approx(8.7, rel=0.15)


def test_case_study_rejects_unknown_family():
    with pytest.raises(ValueError):
        case_study_tables("Rb", "x->yy", [70])


def test_forster_term_selection_rule():
    rb = get_species("Rb")
    with pytest.raises(ValueError):
        forster_term(rb.state(70, 0, 0.5), rb.state(70, 2, 2.5), rb.state(69, 1, 1.5), rb)


def test_table_channel_matches_single_pair_operator():
    t = family_term("Rb", "s->pp", 1, 70, 70, 69)
    assert np.allclose(build_m_operator(t.angular).full_d(), table_channel("s1/2->p3/2+p3/2").matrix().full_d())
