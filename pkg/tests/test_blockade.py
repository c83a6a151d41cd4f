"""Overlap factors, blockade/resonance shifts and ensemble averages."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gaussian_moment_12
from rydvdw.acceptance import _model_43d, _model_70s
from rydvdw.blockade import (GAUSSIAN_1D_FACTOR, GAUSSIAN_3D_FACTOR, EnsembleGeometry, ExcitationModel,
                             angular_scan, blockade_shift, double_excitation_probability,
                             explicit_positions, fixed_distance, fort_sigma, frequency_shift,
                             gaussian_moment, monte_carlo_moment, orientation_average, overlap_factors,
                             pair_rotation, pair_sums, resonance_shift, spatial_average)
from rydvdw.channels import table_channel
from rydvdw.vdw import VdwModel

angles = st.floats(0, math.pi)


def table_model(key, c6=1.0):
    spec = table_channel(key)
    return VdwModel(spec.components[0][0].tj, [(ch, c6 * w) for ch, w in spec.components])


def random_ket(tj, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(tj + 1) ** 2) + 1j * rng.normal(size=(tj + 1) ** 2)
    return v / np.linalg.norm(v)


def test_gaussian_constants():
    assert GAUSSIAN_3D_FACTOR ** 12 == pytest.approx(8648640, rel=1e-14)
    assert GAUSSIAN_1D_FACTOR ** 12 == pytest.approx(665280, rel=1e-14)
    assert round(GAUSSIAN_3D_FACTOR, 3) == 3.785
    assert round(GAUSSIAN_1D_FACTOR, 4) == 3.0567


@pytest.mark.parametrize("dim", [1, 3])
def test_moment_matches_symbolic_integral(dim):
    assert gaussian_moment(12, dim, 1.7) == pytest.approx(gaussian_moment_12(dim) * 1.7 ** 12, rel=1e-12)


@pytest.mark.parametrize("dim", [1, 3])
def test_monte_carlo_moment(dim):
    mc = monte_carlo_moment(dim, 2.0, samples=1_000_000, seed=7)
    assert mc == pytest.approx(gaussian_moment(12, dim, 2.0), rel=0.01)


def test_moment_rejects_odd_power():
    with pytest.raises(ValueError):
        gaussian_moment(5, 3)


def test_fort_formula():
    w, lam, t = 2.5, 1.03, 2.5
    assert fort_sigma(w, lam, t) == pytest.approx(math.pi * w ** 2 * math.sqrt(t) / (math.sqrt(2) * lam))
    with pytest.raises(ValueError):
        fort_sigma(0, lam, t)


def test_fort_published_example():
    sigma = fort_sigma(2.5, 1.03, 2.5)
    assert sigma == pytest.approx(3.0, rel=0.05)
    assert GAUSSIAN_1D_FACTOR * sigma == pytest.approx(9.2, rel=0.05)


@given(angles, st.floats(0, 2 * math.pi), st.integers(0, 10 ** 6), st.sampled_from([1, 3, 5]))
def test_kappa_unitarity(theta, azimuth, seed, tj):
    vals, vecs, _ = table_model({1: "p1/2->s1/2+s1/2", 3: "d3/2->p+f", 5: "d5/2->p+f"}[tj]).eigen6()
    kap = overlap_factors(vecs, random_ket(tj, seed), theta, azimuth)
    assert sum(abs(k.kappa) ** 2 for k in kap) == pytest.approx(1.0, abs=1e-12)


def test_kappa_at_zero_angle_is_orthonormal():
    vals, vecs, _ = table_model("d5/2->p3/2+f").eigen6()
    for j in range(vecs.shape[1]):
        kap = np.array([k.kappa for k in overlap_factors(vecs, vecs[:, j], 0.0)])
        expect = np.zeros(len(kap))
        expect[j] = 1
        assert np.allclose(np.abs(kap), expect, atol=1e-12)


@given(angles, st.floats(-math.pi, math.pi), st.integers(0, 10 ** 6))
def test_frame_invariance(theta, alpha, seed):
    model = _model_43d()
    ket = random_ket(5, seed)
    turned = pair_rotation(5, -alpha) @ ket  # rotate the polarisation by alpha
    e1 = ExcitationModel(5, [ket], [1.0])
    e2 = ExcitationModel(5, [turned], [1.0])
    a = fixed_distance(model, e1, 5.0, isotropic=False, theta=theta)
    b = fixed_distance(model, e2, 5.0, isotropic=False, theta=theta + alpha)
    assert b.B == pytest.approx(a.B, rel=1e-10)
    assert b.D == pytest.approx(a.D, rel=1e-10)


@given(st.lists(st.floats(0.1, 10), min_size=2, max_size=8), st.integers(0, 10 ** 6))
def test_blockade_is_weighted_mean(deltas, seed):
    rng = np.random.default_rng(seed)
    k = rng.normal(size=len(deltas)) + 1j * rng.normal(size=len(deltas))
    k /= np.linalg.norm(k)
    d = np.asarray(deltas) * rng.choice([-1, 1], len(deltas))
    s = pair_sums(d, k)
    b = blockade_shift([s.inv_sq], 2)
    assert np.min(np.abs(d)) * (1 - 1e-12) <= b <= np.max(np.abs(d)) * (1 + 1e-12)
    assert b <= s.bounds[0] * (1 + 1e-12)


def test_single_term_shifts():
    s = pair_sums(np.array([-3.0]), np.array([0.5]))
    assert blockade_shift([s.inv_sq], 2) == pytest.approx(3.0 / 0.5)
    assert resonance_shift([s.inv], 2) == pytest.approx(-3.0 / 0.25)


def test_zero_over_zero_dropped():
    s = pair_sums(np.array([0.0, 2.0]), np.array([0.0, 1.0]))
    assert not s.unblockaded and s.inv_sq == pytest.approx(0.25)


def test_probability_and_frequency_formulas():
    assert double_excitation_probability(2.0, 10.0, 5) == pytest.approx(4 * 4.0 / (10 * 100))
    assert frequency_shift(2.0, -10.0, 2) == pytest.approx(4.0 / (4 * -10.0))
    with pytest.raises(ValueError):
        blockade_shift([1.0], 1)


def test_s_channel_isotropic_ratio():
    model = table_model("s1/2->p+p")
    a, _, bad, _ = orientation_average(model, ExcitationModel.stretched(1))
    assert not bad and a == pytest.approx(9 / 16, rel=1e-12)
    res = spatial_average(EnsembleGeometry("gaussian3d", 2.0), table_model("s1/2->p+p", 500.0),
                          ExcitationModel.stretched(1))
    expect = 500.0 / (0.75 * (GAUSSIAN_3D_FACTOR * 2.0) ** 6) * 1e3
    assert res.B == pytest.approx(expect, rel=1e-10)


def test_forster_zero_excitation_unblockaded():
    model = table_model("d5/2->p3/2+f")
    vals, vecs, labels = model.eigen6()
    zero = np.flatnonzero(labels == 0)[np.argmin(np.abs(vals[labels == 0]))]
    assert abs(vals[zero]) < 0.01 * np.abs(vals).max()
    res = fixed_distance(model, ExcitationModel(5, [vecs[:, zero]], [1.0]), 5.0, isotropic=False)
    assert res.unblockaded and res.near_zero_weight == pytest.approx(1.0)
    assert res.to_dict()["flags"] == ["unblockaded channel"]
    # an exactly unshifted state forces B = 0
    p_model = table_model("p1/2->s1/2+s1/2")
    vals, vecs, _ = p_model.eigen6()
    exact = fixed_distance(p_model, ExcitationModel(1, [vecs[:, int(np.argmin(np.abs(vals)))]], [1.0]), 5.0,
                           isotropic=False)
    assert exact.unblockaded and exact.B == 0


def test_rb_70s_pair_blockade():
    model = _model_70s("Rb")
    exc = ExcitationModel.stretched(1)
    for R in np.linspace(6, 12, 7):
        res = fixed_distance(model, exc, R)
        assert res.B == pytest.approx((9.77 / R) ** 6, rel=0.10)
        assert res.D == pytest.approx(res.B, rel=0.10)


def test_70s_near_isotropic_rb_flatter_than_cs():
    spread = {}
    for name in ("Rb", "Cs"):
        rows = angular_scan(_model_70s(name), ExcitationModel.stretched(1), np.radians(np.arange(0, 181, 5)), R=9.2)
        b = np.array([r["B_MHz"] for r in rows])
        spread[name] = (b.max() - b.min()) / b.mean()
    assert spread["Rb"] < spread["Cs"] < 0.5


def test_43d_resonance_exceeds_blockade():
    rows = angular_scan(_model_43d(), ExcitationModel.pi_from_clock_state(5),
                        np.radians(np.arange(0, 181, 10)), sigma=3.0)
    assert all(abs(r["D_MHz"]) > r["B_MHz"] for r in rows)


def test_explicit_positions_match_fixed_tilt():
    model = _model_43d()
    exc = ExcitationModel.stretched(5)
    along_z = explicit_positions(np.array([[0, 0, 0], [0, 0, 6.0]]), model, exc)
    assert along_z.B == pytest.approx(fixed_distance(model, exc, 6.0, isotropic=False, theta=0).B, rel=1e-12)
    along_x = explicit_positions(np.array([[0, 0, 0], [6.0, 0, 0]]), model, exc)
    assert along_x.B == pytest.approx(fixed_distance(model, exc, 6.0, isotropic=False, theta=math.pi / 2).B,
                                      rel=1e-12)


def test_explicit_positions_three_atoms():
    model = _model_70s("Rb")
    pos = np.array([[0, 0, 0], [0, 0, 8.0], [0, 0, 16.0]])
    res = spatial_average(EnsembleGeometry("positions", positions=pos), model, ExcitationModel.stretched(1))
    assert len(res.per_pair) == 3 and res.n_atoms == 3
    inv = sum(1 / p["B_MHz"] ** 2 for p in res.per_pair) / 3
    assert res.B == pytest.approx(inv ** -0.5, rel=1e-10)
    with pytest.raises(ValueError):
        explicit_positions(np.array([[0, 0, 0], [0, 0, 0.0]]), model, ExcitationModel.stretched(1))


def test_geometry_validation():
    with pytest.raises(ValueError):
        EnsembleGeometry("gaussian2d", 1.0)
    with pytest.raises(ValueError):
        EnsembleGeometry("gaussian3d", 0.0)
    with pytest.raises(ValueError):
        EnsembleGeometry("positions", positions=np.zeros((1, 3)))
    assert EnsembleGeometry("gaussian1d", 1.0, n_atoms=4).prefactor == pytest.approx(4 / 3)


def test_excitation_model_invariants():
    exc = ExcitationModel(1, [np.ones(4)], [1.0], rabi=(1.0, 2.0, 2.0))
    assert exc.omega_n == pytest.approx(3.0)
    assert exc.omega_n == pytest.approx(math.sqrt(3) * exc.omega_0)
    assert np.linalg.norm(exc.kets[0]) == pytest.approx(1.0)
    pi = ExcitationModel.pi_from_clock_state(5)
    assert len(pi.kets) == 4 and np.allclose(pi.weights, 0.25)
    with pytest.raises(ValueError):
        ExcitationModel(1, [np.ones(5)], [1.0])
    with pytest.raises(ValueError):
        ExcitationModel.product(1, 3, 1)


def test_angular_scan_needs_one_geometry():
    with pytest.raises(ValueError):
        angular_scan(_model_43d(), ExcitationModel.stretched(5), [0.0])
