"""Overlap factors, blockade and resonance shifts, and ensemble averages.

A pair of atoms separated by ``R`` along an axis tilted by ``theta`` from the
light's quantization axis is excited into the lab-frame two-atom ket
``|gamma gamma>``.  Rotating that ket into the molecular frame and projecting
on the van der Waals eigenstates ``|phi>`` gives the overlap factors
``kappa_phi``; the blockade shift then follows from

    1/B^2 = 2/(N(N-1)) sum_{k<l} sum_phi |kappa_phi|^2 / Delta_phi^2

and the resonance shift ``D`` from the same sum with ``Delta`` to the first
power.  Shifts are reported in MHz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .angular import HalfInt, wigner_d_matrix
from .channels import WEAK_ZERO, pair_basis
from .vdw import VdwModel

__all__ = [
    "GAUSSIAN_3D_FACTOR",
    "GAUSSIAN_1D_FACTOR",
    "UNBLOCKADED_TOL",
    "ExcitationModel",
    "OverlapFactor",
    "EnsembleGeometry",
    "BlockadeResult",
    "gaussian_moment",
    "pair_rotation",
    "overlap_factors",
    "pair_sums",
    "blockade_shift",
    "resonance_shift",
    "fort_sigma",
    "spatial_average",
    "explicit_positions",
    "angular_scan",
    "monte_carlo_moment",
    "double_excitation_probability",
    "frequency_shift",
    "fixed_distance",
    "orientation_average",
    "PairSums",
]

#: Relative eigenvalue below which an eigenstate counts as unshifted.
UNBLOCKADED_TOL = 1e-9


def gaussian_moment(power: int, dim: int, sigma: float = 1.0) -> float:
    """``<|r - r'|^power>`` for two independent isotropic Gaussians of width ``sigma``.

    The difference vector is Gaussian with variance ``2 sigma^2`` per axis, so
    for even ``power = 2p`` the moment is ``2^p sigma^(2p) prod_{k<p} (dim + 2k)``.
    """
    if power % 2 or power < 0:
        raise ValueError("power must be a non-negative even integer")
    p = power // 2
    return 2.0 ** p * sigma ** power * math.prod(dim + 2 * k for k in range(p))


#: ``<|r - r'|^12>^(1/12) / sigma`` for a 3D and a 1D Gaussian cloud.
GAUSSIAN_3D_FACTOR = gaussian_moment(12, 3) ** (1.0 / 12.0)
GAUSSIAN_1D_FACTOR = gaussian_moment(12, 1) ** (1.0 / 12.0)


# -- excitation --------------------------------------------------------------------

@dataclass
class ExcitationModel:
    """Lab-frame two-atom Rydberg ket(s) prepared by the excitation light.

    Spectator nuclear-spin labels split the excitation into independent
    electronic kets; their ``1/B^2`` (and ``1/D``) are averaged with the
    given weights.

    Parameters
    ----------
    tj : int
        Doubled ``j`` of the Rydberg level.
    kets : list of ndarray
        Normalised complex vectors on :func:`rydvdw.channels.pair_basis`.
    weights : list of float
        Averaging weights (normalised to one).
    rabi : sequence of float
        Per-atom Rabi amplitudes ``Omega_gamma_k`` (MHz).
    """

    tj: int
    kets: list[np.ndarray]
    weights: list[float]
    rabi: Sequence[float] = (1.0, 1.0)
    label: str = ""

    def __post_init__(self) -> None:
        dim = (self.tj + 1) ** 2
        kets = []
        for k in self.kets:
            v = np.asarray(k, dtype=complex).reshape(-1)
            if v.size != dim:
                raise ValueError(f"ket has {v.size} components, expected {dim}")
            nrm = np.linalg.norm(v)
            if nrm == 0:
                raise ValueError("zero excitation ket")
            kets.append(v / nrm)
        if len(kets) != len(self.weights):
            raise ValueError("one weight per ket required")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be non-negative and not all zero")
        self.kets = kets
        self.weights = list(w / w.sum())

    @property
    def omega_n(self) -> float:
        """Collective Rabi frequency ``sqrt(sum |Omega_k|^2)``."""
        return float(np.sqrt(np.sum(np.abs(np.asarray(self.rabi)) ** 2)))

    @property
    def omega_0(self) -> float:
        """RMS single-atom Rabi frequency ``Omega_N / sqrt(N)``."""
        return self.omega_n / math.sqrt(len(self.rabi))

    @property
    def pair_weight(self) -> float:
        """``Omega_k Omega_l / Omega_0^2`` for the first pair (uniform illumination -> 1)."""
        return abs(self.rabi[0] * self.rabi[1]) / self.omega_0 ** 2

    @classmethod
    def product(cls, tj: int, tma: int, tmb: int, **kw) -> "ExcitationModel":
        """Single product ket ``|m_A, m_B>`` (doubled projections)."""
        kets = pair_basis(tj)
        v = np.zeros(len(kets), dtype=complex)
        try:
            v[kets.index((tma, tmb))] = 1.0
        except ValueError:
            raise ValueError(f"|{tma}/2, {tmb}/2> is not a state of j = {tj}/2") from None
        kw.setdefault("label", f"|{tma}/2,{tmb}/2>")
        return cls(tj, [v], [1.0], **kw)

    @classmethod
    def stretched(cls, tj: int, **kw) -> "ExcitationModel":
        """Both atoms in ``m = +j``."""
        return cls.product(tj, tj, tj, **kw)

    @classmethod
    def spectator_average(cls, tj: int, pairs: Iterable[tuple[int, int]], **kw) -> "ExcitationModel":
        """Equal-weight average over electronic product kets distinguished by spectator labels."""
        pairs = list(pairs)
        basis = pair_basis(tj)
        kets = []
        for a, b in pairs:
            v = np.zeros(len(basis), dtype=complex)
            v[basis.index((a, b))] = 1.0
            kets.append(v)
        kw.setdefault("label", "spectator average of " + ", ".join(f"|{a}/2,{b}/2>" for a, b in pairs))
        return cls(tj, kets, [1.0] * len(kets), **kw)

    @classmethod
    def pi_from_clock_state(cls, tj: int, **kw) -> "ExcitationModel":
        """pi-polarised excitation from an ``m_f = 0`` hyperfine ground state.

        The two-atom ket is an equal superposition of the electronic kets
        ``|+-1/2, +-1/2>`` each tagged by different nuclear-spin projections,
        so the four electronic kets are averaged with weight 1/4.
        """
        return cls.spectator_average(tj, [(1, 1), (1, -1), (-1, 1), (-1, -1)], **kw)


# -- overlap factors -----------------------------------------------------------------

@dataclass(frozen=True)
class OverlapFactor:
    phi: int
    pair: tuple[int, int]
    kappa: complex
    delta: float  # eigen-shift, GHz (or GHz um^6 when R-scaled)


def pair_rotation(tj: int, theta: float, azimuth: float = 0.0) -> np.ndarray:
    """Two-atom rotation taking lab-frame kets to the molecular frame.

    The molecular axis has polar angle ``theta`` and azimuth ``azimuth``; the
    single-atom matrix is ``d^j(-theta) exp(i m azimuth)`` on the descending
    ``m`` basis.
    """
    d = wigner_d_matrix(HalfInt(tj), -theta).astype(complex)
    if azimuth:
        ms = np.arange(tj, -tj - 1, -2) / 2.0
        d = d * np.exp(1j * ms * azimuth)[None, :]
    return np.kron(d, d)


def overlap_factors(vectors: np.ndarray, ket: np.ndarray, theta: float, azimuth: float = 0.0,
                    values: np.ndarray | None = None, pair: tuple[int, int] = (0, 1),
                    pair_weight: float = 1.0) -> list[OverlapFactor]:
    """``kappa_phi = w <phi| R(theta) |gamma gamma>`` for every eigenvector column."""
    tj = int(round(math.sqrt(len(ket)))) - 1
    rotated = pair_rotation(tj, theta, azimuth) @ np.asarray(ket, dtype=complex)
    kap = pair_weight * (vectors.conj().T @ rotated)
    vals = values if values is not None else np.full(len(kap), np.nan)
    return [OverlapFactor(i, pair, complex(k), float(v)) for i, (k, v) in enumerate(zip(kap, vals))]


@dataclass
class PairSums:
    """``sum |kappa|^2/lambda^2`` and ``sum |kappa|^2/lambda`` with failure flags."""

    inv_sq: float
    inv: float
    unblockaded: bool = False
    bounds: tuple[float, float] = (math.nan, math.nan)
    near_zero_weight: float = 0.0


def pair_sums(values: np.ndarray, kappas: np.ndarray, scale: float | None = None) -> PairSums:
    """Sum ``|kappa|^2 / lambda^p`` over eigenstates, dropping ``0/0`` terms.

    A state with ``lambda = 0`` but ``kappa != 0`` is not blockaded; the sums
    are then infinite and the result is flagged.  ``near_zero_weight`` is the
    share of ``sum |kappa|^2`` on states with ``|lambda|`` below
    ``WEAK_ZERO * scale`` (weak-channel states that barely shift).
    """
    values = np.asarray(values, dtype=float)
    k2 = np.abs(np.asarray(kappas)) ** 2
    scale = scale if scale is not None else max(np.max(np.abs(values)), 1e-300)
    zero = np.abs(values) <= UNBLOCKADED_TOL * scale
    live_k = k2 > 1e-20
    total = float(np.sum(k2))
    near = float(np.sum(k2[np.abs(values) < WEAK_ZERO * scale]) / total) if total > 0 else 0.0
    if np.any(zero & live_k):
        return PairSums(math.inf, math.inf, True, (0.0, 0.0), near)
    use = ~zero & live_k
    if not np.any(use):
        return PairSums(0.0, 0.0, False)
    ratio = np.abs(values[use]) / np.sqrt(k2[use])
    return PairSums(float(np.sum(k2[use] / values[use] ** 2)), float(np.sum(k2[use] / values[use])),
                    False, (float(ratio.min()), float(ratio.max())), near)


def _from_inv_sq(inv_sq: float) -> float:
    if inv_sq == 0:
        return math.inf
    return 1.0 / math.sqrt(inv_sq) if math.isfinite(inv_sq) else 0.0


def blockade_shift(inv_sq_per_pair: Sequence[float], n_atoms: int) -> float:
    """``B`` from per-pair ``sum_phi |kappa|^2/Delta^2`` (same units as ``Delta``)."""
    if n_atoms < 2:
        raise ValueError("need at least two atoms")
    total = 2.0 / (n_atoms * (n_atoms - 1)) * math.fsum(inv_sq_per_pair)
    return _from_inv_sq(total)


def resonance_shift(inv_per_pair: Sequence[float], n_atoms: int) -> float:
    """Signed ``D`` from per-pair ``sum_phi |kappa|^2/Delta``."""
    if n_atoms < 2:
        raise ValueError("need at least two atoms")
    total = 2.0 / (n_atoms * (n_atoms - 1)) * math.fsum(inv_per_pair)
    if not math.isfinite(total):
        return 0.0
    return math.inf if total == 0 else 1.0 / total


def double_excitation_probability(omega_n: float, b: float, n_atoms: int) -> float:
    """``P2 = (N-1) Omega_N^2 / (2 N B^2)``."""
    if b == 0:
        return math.inf
    return (n_atoms - 1) * omega_n ** 2 / (2.0 * n_atoms * b ** 2)


def frequency_shift(omega_n: float, d: float, n_atoms: int) -> float:
    """``delta_nu = (N-1) Omega_N^2 / (2 N D)``."""
    if d == 0:
        return math.inf
    return (n_atoms - 1) * omega_n ** 2 / (2.0 * n_atoms * d)


# -- geometry and results ------------------------------------------------------------

def fort_sigma(waist: float, wavelength: float, t_rel: float) -> float:
    """Axial rms width ``pi w^2 sqrt(T_rel) / (sqrt(2) lambda)`` of a single-beam FORT (um)."""
    if waist <= 0 or wavelength <= 0 or t_rel <= 0:
        raise ValueError("waist, wavelength and T_rel must be positive")
    return math.pi * waist ** 2 * math.sqrt(t_rel) / (math.sqrt(2.0) * wavelength)


@dataclass
class EnsembleGeometry:
    """Atom distribution: explicit positions or a 3D / 1D Gaussian cloud.

    ``kind`` is ``"positions"``, ``"gaussian3d"`` or ``"gaussian1d"``;
    ``theta`` is the tilt of a 1D cloud from the quantization axis.
    ``n_atoms = None`` takes the many-atom limit of the ``N/(N-1)`` factor.
    """

    kind: str
    sigma: float = 0.0
    theta: float = 0.0
    positions: np.ndarray | None = None
    n_atoms: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("positions", "gaussian3d", "gaussian1d"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "positions":
            if self.positions is None or len(self.positions) < 2:
                raise ValueError("explicit geometry needs at least two positions")
            self.positions = np.asarray(self.positions, dtype=float)
            self.n_atoms = len(self.positions)
        elif self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @classmethod
    def from_fort(cls, waist: float, wavelength: float, t_rel: float, theta: float = 0.0,
                  n_atoms: int | None = None) -> "EnsembleGeometry":
        return cls("gaussian1d", fort_sigma(waist, wavelength, t_rel), theta, n_atoms=n_atoms)

    @property
    def prefactor(self) -> float:
        """``N/(N-1)`` (1 in the many-atom limit)."""
        return 1.0 if self.n_atoms is None else self.n_atoms / (self.n_atoms - 1.0)


@dataclass
class BlockadeResult:
    """Blockade shift ``B`` and resonance shift ``D`` in MHz, plus error estimates.

    ``unblockaded`` is set when an exactly unshifted state is excited (then
    ``B = D = 0``) or when more than half of the excitation weight lies on
    near-zero states (``near_zero_weight > 0.5``; ``B`` is still reported).
    """

    B: float
    D: float
    P2: float
    P1_prime_estimate: float
    n_atoms: int | None
    unblockaded: bool = False
    per_pair: list[dict] = field(default_factory=list)
    near_zero_weight: float = 0.0

    def to_dict(self) -> dict:
        return {"B_MHz": self.B, "D_MHz": self.D, "P2": self.P2,
                "P1_prime_estimate": self.P1_prime_estimate, "n_atoms": self.n_atoms,
                "flags": ["unblockaded channel"] if self.unblockaded else [],
                "near_zero_weight": self.near_zero_weight, "per_pair": self.per_pair}


_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _needs_azimuth(model: VdwModel, exc: ExcitationModel) -> bool:
    kets = pair_basis(model.tj)
    tms = np.array([a + b for a, b in kets])
    for v in exc.kets:
        if len(set(tms[np.abs(v) > 1e-14].tolist())) > 1:
            return True
    return False


def _orientation_sums(model: VdwModel, exc: ExcitationModel, theta: float,
                      azimuth: float = 0.0) -> tuple[float, float, bool, float]:
    """Weighted ``<|kappa|^2/lambda^2>``, ``<|kappa|^2/lambda>``, failure flag, near-zero weight."""
    vals, vecs, _ = model.eigen6()
    scale = float(np.max(np.abs(vals)))
    inv_sq = inv = near = 0.0
    bad = False
    rot = pair_rotation(model.tj, theta, azimuth)
    for w, ket in zip(exc.weights, exc.kets):
        kap = exc.pair_weight * (vecs.T @ (rot @ ket))
        s = pair_sums(vals, kap, scale)
        bad |= s.unblockaded
        inv_sq += w * s.inv_sq
        inv += w * s.inv
        near += w * s.near_zero_weight
    return inv_sq, inv, bad, near


def orientation_average(model: VdwModel, exc: ExcitationModel) -> tuple[float, float, bool, float]:
    """Isotropic mean of the orientation sums (64-point Gauss-Legendre in ``cos theta``)."""
    phis = np.linspace(0, 2 * np.pi, 16, endpoint=False) if _needs_azimuth(model, exc) else [0.0]
    a = b = near = 0.0
    bad = False
    for x, w in zip(_GL_X, _GL_W):
        for ph in phis:
            s2, s1, f, nz = _orientation_sums(model, exc, math.acos(x), ph)
            a += 0.5 * w * s2 / len(phis)
            b += 0.5 * w * s1 / len(phis)
            near += 0.5 * w * nz / len(phis)
            bad |= f
    return a, b, bad, near


def _result(inv_sq_ghz: float, inv_ghz: float, bad: bool, near: float, exc: ExcitationModel,
            n_atoms: int | None, per_pair=None) -> BlockadeResult:
    # sums are in 1/GHz^2 and 1/GHz; convert shifts to MHz
    b = 0.0 if bad else _from_inv_sq(inv_sq_ghz) * 1e3
    d = 0.0 if bad or inv_ghz == 0 else 1e3 / inv_ghz
    n_eff = n_atoms if n_atoms is not None else len(exc.rabi)
    p2 = double_excitation_probability(exc.omega_n, b, n_eff) if b else math.inf
    return BlockadeResult(b, d, p2, p2, n_atoms, bad or near > 0.5, per_pair or [], near)


def spatial_average(geometry: EnsembleGeometry, model: VdwModel, excitation: ExcitationModel) -> BlockadeResult:
    """Blockade and resonance shifts of an ensemble.

    Gaussian clouds use the closed-form pair-distance moments
    ``<|r-r'|^12>`` (for ``1/B^2``) and ``<|r-r'|^6>`` (for ``1/D``) times
    the angular factor: the isotropic mean for a 3D cloud, the value at the
    tilt angle for a 1D cloud.  Explicit positions sum over all pairs.
    """
    if geometry.kind == "positions":
        return explicit_positions(geometry.positions, model, excitation)
    if geometry.kind == "gaussian3d":
        a, b, bad, near = orientation_average(model, excitation)
        dim = 3
    else:
        a, b, bad, near = _orientation_sums(model, excitation, geometry.theta)
        dim = 1
    pre = geometry.prefactor
    inv_sq = pre * a * gaussian_moment(12, dim, geometry.sigma)
    inv = pre * b * gaussian_moment(6, dim, geometry.sigma)
    return _result(inv_sq, inv, bad, near, excitation, geometry.n_atoms)


def explicit_positions(positions: np.ndarray, model: VdwModel, excitation: ExcitationModel) -> BlockadeResult:
    """Exact pairwise sums for atoms at ``positions`` (um, shape ``(N, 3)``)."""
    pos = np.asarray(positions, dtype=float)
    n = len(pos)
    if n < 2:
        raise ValueError("need at least two atoms")
    inv_sq, inv, bad, near, per = [], [], False, 0.0, []
    for k in range(n):
        for l in range(k + 1, n):
            r = pos[l] - pos[k]
            R = float(np.linalg.norm(r))
            if R == 0:
                raise ValueError(f"atoms {k} and {l} coincide")
            theta = math.acos(max(-1.0, min(1.0, r[2] / R)))
            azimuth = math.atan2(r[1], r[0])
            s2, s1, f, nz = _orientation_sums(model, excitation, theta, azimuth)
            bad |= f
            near = max(near, nz)
            inv_sq.append(s2 * R ** 12)
            inv.append(s1 * R ** 6)
            per.append({"pair": [k, l], "R_um": R, "theta_rad": theta,
                        "B_MHz": 0.0 if f else _from_inv_sq(s2 * R ** 12) * 1e3})
    norm = 2.0 / (n * (n - 1))
    return _result(norm * math.fsum(inv_sq), norm * math.fsum(inv), bad, near, excitation, n, per)


def angular_scan(model: VdwModel, excitation: ExcitationModel, thetas: Iterable[float],
                 sigma: float | None = None, R: float | None = None,
                 n_atoms: int | None = None) -> list[dict]:
    """``B`` and ``D`` versus tilt ``theta`` for a 1D cloud of width ``sigma`` or fixed ``R``."""
    if (sigma is None) == (R is None):
        raise ValueError("give exactly one of sigma or R")
    rows = []
    for th in thetas:
        if sigma is not None:
            res = spatial_average(EnsembleGeometry("gaussian1d", sigma, th, n_atoms=n_atoms), model, excitation)
        else:
            s2, s1, bad, near = _orientation_sums(model, excitation, th)
            res = _result(s2 * R ** 12, s1 * R ** 6, bad, near, excitation, 2)
        rows.append({"theta_deg": math.degrees(th), "B_MHz": res.B, "D_MHz": res.D,
                     "unblockaded": res.unblockaded})
    return rows


def fixed_distance(model: VdwModel, excitation: ExcitationModel, R: float,
                   isotropic: bool = True, theta: float = 0.0) -> BlockadeResult:
    """Two atoms at distance ``R``: orientation-averaged ``1/B^2`` or a fixed tilt."""
    if isotropic:
        a, b, bad, near = orientation_average(model, excitation)
    else:
        a, b, bad, near = _orientation_sums(model, excitation, theta)
    return _result(a * R ** 12, b * R ** 6, bad, near, excitation, 2)


def monte_carlo_moment(dim: int, sigma: float = 1.0, samples: int = 1_000_000,
                       power: int = 12, seed: int = 0, proposal_scale: float = 1.8) -> float:
    """Sampled ``<|r - r'|^power>`` for two Gaussian clouds (checks :func:`gaussian_moment`).

    High moments are dominated by rare, widely separated pairs, so both
    positions are drawn from a Gaussian ``proposal_scale`` times wider and
    reweighted by the exact density ratio (importance sampling; an unbiased
    estimate of the same integral).  ``proposal_scale = 1`` is plain sampling.
    """
    if proposal_scale <= 0:
        raise ValueError("proposal_scale must be positive")
    rng = np.random.default_rng(seed)
    s = proposal_scale
    a = rng.normal(0.0, s * sigma, (samples, dim))
    b = rng.normal(0.0, s * sigma, (samples, dim))
    r2 = (np.sum(a * a, axis=1) + np.sum(b * b, axis=1)) / sigma ** 2
    log_w = -0.5 * r2 * (1.0 - 1.0 / s ** 2) + 2 * dim * math.log(s)
    d2 = np.sum((a - b) ** 2, axis=1)
    return float(np.mean(d2 ** (power // 2) * np.exp(log_w)))
