"""Angular channel operators: published eigenvalues, structure and invariants."""

import math

import numpy as np
import pytest

from rydvdw.channels import (EXACT_ZERO, REFERENCE_TABLE, AngularChannel, SelectionRuleError, build_m_operator,
                             coupled_d_blocks, eigensystem, exchange_matrix, find_forster_zeros,
                             forster_pair_state, pair_basis, parse_channel, single_assignment_gram,
                             sum_channels, table_channel)


def printed_precision(value):
    """Half a unit in the third significant figure, never below 1e-3."""
    if value == 0:
        return 1e-3
    return max(1e-3, 0.5 * 10.0 ** (math.floor(math.log10(abs(value))) - 2) + 1e-12)


@pytest.mark.parametrize("key", list(REFERENCE_TABLE))
def test_table_eigenvalues(key):
    es = eigensystem(table_channel(key).matrix())
    for m, ref in REFERENCE_TABLE[key].items():
        got = np.sort(es.values[2 * m])[::-1]
        ref = np.sort(ref)[::-1]
        assert got.size == len(ref)
        for g, r in zip(got, ref):
            assert abs(g - r) <= printed_precision(r), (key, m, g, r)


def test_table_has_23_rows():
    assert len(REFERENCE_TABLE) == 23


def test_p_to_ss_analytic_block():
    gram = single_assignment_gram(AngularChannel.make(1, 0.5, 0, 0.5, 0, 0.5))
    assert np.allclose(gram[0], 8 / 81 * np.ones((2, 2)), atol=1e-15)
    vals, vecs = np.linalg.eigh(gram[0])
    assert vals[0] == pytest.approx(0, abs=1e-15)
    assert vals[1] == pytest.approx(16 / 81, abs=1e-15)
    # the zero state is the singlet |1/2,-1/2> - |-1/2,1/2>
    assert abs(vecs[0, 0] + vecs[1, 0]) < 1e-14


def test_s_state_spin_basis_fractions():
    # (uu, (ud+du)/sqrt2, (ud-du)/sqrt2, dd) on the basis ordering of pair_basis
    s2 = 1 / math.sqrt(2)
    u = np.array([[1, 0, 0, 0], [0, s2, s2, 0], [0, s2, -s2, 0], [0, 0, 0, 1]])
    expect = {"s1/2->p3/2+p3/2": [44, 68, 36, 44], "s1/2->p1/2+p3/2": [28, 4, 36, 28],
              "s1/2->p1/2+p1/2": [8, 32, 0, 8]}
    for key, diag in expect.items():
        d = u @ table_channel(key).matrix().full_d() @ u.T
        assert np.allclose(d, np.diag(diag) / 81, atol=1e-14), key


@pytest.mark.parametrize("key", list(REFERENCE_TABLE))
def test_plus_minus_m_symmetry(key):
    es = eigensystem(table_channel(key).matrix())
    for tM, vals in es.values_signed.items():
        assert np.allclose(np.sort(vals), np.sort(es.values_signed[-tM]), atol=1e-13)


@pytest.mark.parametrize("key", list(REFERENCE_TABLE))
def test_positive_semidefinite(key):
    es = eigensystem(table_channel(key).matrix())
    assert min(v.min() for v in es.values_signed.values()) >= -1e-12


SINGLE = [k for k in REFERENCE_TABLE if len(table_channel(k).components) == 1]


@pytest.mark.parametrize("key", SINGLE)
def test_single_channel_bounded_by_one(key):
    es = eigensystem(table_channel(key).matrix())
    assert max(v.max() for v in es.values_signed.values()) <= 1 + 1e-9


@pytest.mark.parametrize("key", SINGLE)
def test_zero_counting_rule(key):
    ch = table_channel(key).components[0][0]
    if min(ch.tjs, ch.tjt) < ch.tj:
        es = eigensystem(table_channel(key).matrix())
        assert es.values[0].min() < EXACT_ZERO


@pytest.mark.parametrize("key", list(REFERENCE_TABLE))
def test_coupled_basis_spectra(key):
    spec = table_channel(key)
    es = eigensystem(spec.matrix())
    blocks = {}
    for comp, w in spec.components:
        for tM, (b, _) in coupled_d_blocks(comp).items():
            blocks[tM] = blocks.get(tM, 0) + w * b
    for tM, b in blocks.items():
        assert np.allclose(np.sort(np.linalg.eigvalsh(b)), np.sort(es.values_signed[tM]), atol=1e-12, rtol=0)


@pytest.mark.parametrize("key", list(REFERENCE_TABLE))
def test_exchange_symmetry(key):
    mat = table_channel(key).matrix()
    p = exchange_matrix(mat.tj)
    d = mat.full_d()
    assert np.allclose(p @ d @ p.T, d, atol=1e-14)


def test_forster_zero_vector_of_d52_channel():
    es = eigensystem(table_channel("d5/2->p3/2+f").matrix())
    vals, vecs, kets = es.values[0], es.vectors[0], es.kets[0]
    v = vecs[:, int(np.argmin(vals))]
    by_m = {k[0]: abs(c) for k, c in zip(kets, v)}
    got = [by_m[t] for t in (-5, -3, -1, 1, 3, 5)]
    assert np.allclose(got, [0.67, 0.20, 0.08, 0.08, 0.20, 0.67], atol=0.01)
    # interchange symmetric
    comp = dict(zip(kets, v))
    assert all(abs(comp[(a, b)] - comp[(b, a)]) < 1e-10 for a, b in kets)


def test_forster_zero_report_and_partner_state():
    mat = table_channel("p1/2->s1/2+s1/2").matrix()
    es = eigensystem(mat)
    rep = find_forster_zeros(es)
    assert rep.count == 1 and rep.zero_states[0][0] == 0
    k = int(np.argmax(es.values[0]))
    chi, root = forster_pair_state(mat, 0, es.vectors[0][:, k])
    assert np.linalg.norm(chi) == pytest.approx(1.0)
    assert root ** 2 == pytest.approx(es.values[0][k])
    with pytest.raises(ValueError):
        forster_pair_state(mat, 0, rep.zero_states[0][2])


def test_sum_channels_is_linear():
    a = build_m_operator(AngularChannel.make(0, 0.5, 1, 1.5, 1, 1.5))
    b = build_m_operator(AngularChannel.make(0, 0.5, 1, 0.5, 1, 1.5))
    s = sum_channels([(a, 2.0), (b, -0.5)])
    for tM in a.d_blocks:
        assert np.allclose(s.d_blocks[tM], 2.0 * a.d_blocks[tM] - 0.5 * b.d_blocks[tM])


def test_pair_basis_ordering():
    assert pair_basis(1) == [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    assert pair_basis(3, 0) == [(3, -3), (1, -1), (-1, 1), (-3, 3)]


@pytest.mark.parametrize("text", ["junk", "s1/2->s1/2+s1/2", "p1/2->d5/2+d5/2", "s1/2->p1/2"])
def test_bad_channels_rejected(text):
    with pytest.raises((ValueError, SelectionRuleError)):
        parse_channel(text).matrix()


def test_fine_structure_summed_channel_parses():
    spec = parse_channel("p3/2->d+d")
    assert len(spec.components) == 3
    assert table_channel("s1/2->p+p").matrix().full_d().shape == (4, 4)
