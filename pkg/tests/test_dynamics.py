"""Direct integration of the amplitude equations versus the perturbative formulas."""

import math
import warnings

import numpy as np
import pytest

from rydvdw.acceptance import _model_43d
from rydvdw.blockade import pair_rotation
from rydvdw.dynamics import (BlockadeODESystem, PairShifts, PulseSpec, compare_perturbative, integrate,
                             rabi_two_level)


def two_atoms(ratio):
    # kappa = 1 for two equal atoms, so Delta/Omega_N = ratio
    return BlockadeODESystem.scalar([1.0, 1.0], {(0, 1): ratio * math.sqrt(2.0)})


def test_single_atom_rabi():
    sysm = BlockadeODESystem.scalar([1.3], {})
    pulse = PulseSpec(3 * math.pi / 1.3, samples=301)
    tr = integrate(sysm, pulse)
    cg, cs = rabi_two_level(1.3, 0.0, tr.t)
    assert np.allclose(tr.c_g, cg, atol=1e-8) and np.allclose(tr.c_s, cs, atol=1e-8)


def test_detuned_single_atom():
    sysm = BlockadeODESystem.scalar([1.0], {})
    tr = integrate(sysm, PulseSpec(10.0, detuning=0.4, samples=101))
    cg, cs = rabi_two_level(1.0, -0.4, tr.t)
    assert np.allclose(np.abs(tr.c_s) ** 2, np.abs(cs) ** 2, atol=1e-8)


def test_perfect_blockade_collective_rabi():
    sysm = two_atoms(1e9)
    tr = integrate(sysm, PulseSpec(4 * math.pi / sysm.omega_n, samples=401), drop_doubles=True)
    w = sysm.omega_n
    assert np.allclose(tr.c_g, np.cos(w * tr.t / 2), atol=1e-8)
    assert np.allclose(tr.c_s, -1j * np.sin(w * tr.t / 2), atol=1e-8)


def test_p2_at_ratio_20():
    rep = compare_perturbative(two_atoms(20))
    assert rep["P2_sim"] == pytest.approx(rep["P2_formula"], rel=0.10)
    assert rep["delta_nu_sim"] == pytest.approx(rep["delta_nu_formula"], rel=0.10)


def test_agreement_improves_with_ratio():
    errs = []
    for ratio in (5, 10, 20, 40):
        rep = compare_perturbative(two_atoms(ratio))
        errs.append(abs(rep["P2_sim"] / rep["P2_formula"] - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("mode", ["collective", "full"])
def test_norm_conserved(mode):
    sysm = BlockadeODESystem.scalar([1.0, 0.7, 1.2], {(0, 1): 8.0, (0, 2): 15.0, (1, 2): 9.0})
    cycles = 3
    tr = integrate(sysm, PulseSpec(cycles * 2 * math.pi / sysm.omega_n), mode)
    assert np.max(np.abs(tr.norm - 1)) < 1e-8 * cycles


def test_tolerance_convergence():
    sysm = two_atoms(10)
    pulse = PulseSpec(4 * math.pi / sysm.omega_n)
    a = integrate(sysm, pulse).p2
    b = integrate(sysm, PulseSpec(pulse.duration, rtol=pulse.rtol / 2)).p2
    assert np.max(np.abs(a - b)) < 1e-6


def test_adiabatic_amplitude_mid_pulse():
    sysm = two_atoms(20)
    delta = sysm.pairs[(0, 1)].deltas[0]
    kap = sysm.kappas()[(0, 1)][0]
    T = 2 * math.pi / sysm.omega_n
    tr = integrate(sysm, PulseSpec(T, samples=401))
    mid = 200
    c_phi = tr.c_double[0, mid]
    adiab = -(sysm.omega_n * kap / (sysm.n_atoms * delta)) * tr.c_s[mid]
    assert abs(c_phi - adiab) < 0.1 * abs(c_phi)


def test_three_atoms_weak_pair_dominates():
    # atoms 1-2-3 on a line: the outer pair is twice as far apart, 64x weaker shift
    shift = 40.0
    sysm = BlockadeODESystem.scalar([1.0, 1.0, 1.0], {(0, 1): shift, (1, 2): shift, (0, 2): shift / 64})
    tr = integrate(sysm, PulseSpec(2 * math.pi / sysm.omega_n, samples=201))
    outer = np.mean(tr.pair_population((0, 2)))
    inner = np.mean(tr.pair_population((0, 1)) + tr.pair_population((1, 2)))
    assert outer > 10 * inner


def test_p1_prime_comparable_to_p2():
    model = _model_43d()
    vals, vecs, _ = model.eigen6()
    R, theta = 4.0, 1.0
    lab = pair_rotation(5, theta).conj().T @ vecs
    deltas = vals / R ** 6 * 1e3
    gamma = np.zeros(6)
    gamma[0] = 1.0
    probe = BlockadeODESystem([1.0, 1.0], gamma, {(0, 1): PairShifts(deltas, lab)})
    kap = probe.kappas()[(0, 1)]
    dmin = np.min(np.abs(deltas[np.abs(kap) > 1e-12]))
    om = dmin / 20 / math.sqrt(2)
    rep = compare_perturbative(BlockadeODESystem([om, om], gamma, {(0, 1): PairShifts(deltas, lab)}))
    assert rep["Delta_over_Omega"] == pytest.approx(20)
    assert 0.3 <= rep["P1_prime_sim"] / rep["P2_sim"] <= 3
    assert rep["P2_sim"] == pytest.approx(rep["P2_formula"], rel=0.10)


def test_full_mode_matches_collective_for_scalar_levels():
    sysm = two_atoms(10)
    pulse = PulseSpec(4 * math.pi / sysm.omega_n, samples=101)
    a = integrate(sysm, pulse, "collective")
    b = integrate(sysm, pulse, "full")
    assert np.allclose(a.p2, b.p2, atol=1e-8)
    assert np.max(b.p1_perp) < 1e-12


def test_hamiltonians_hermitian():
    sysm = BlockadeODESystem.scalar([1.0, 0.5, 0.8], {(0, 1): 3.0, (0, 2): -4.0, (1, 2): 7.0})
    for h in (sysm.collective_hamiltonian(), sysm.full_hamiltonian()):
        assert np.allclose(h, h.conj().T)


def test_regime_warning():
    with pytest.warns(UserWarning, match="perturbative"):
        compare_perturbative(two_atoms(2))


def test_validation():
    with pytest.raises(ValueError):
        PulseSpec(0.0)
    with pytest.raises(ValueError):
        BlockadeODESystem.scalar([1.0, 1.0], {})
    with pytest.raises(ValueError):
        integrate(two_atoms(10), PulseSpec(1.0), mode="bogus")
    with pytest.raises(ValueError):
        PairShifts([1.0, 2.0], np.eye(3))
