"""Förster channels, C6 strengths and the degenerate van der Waals Hamiltonian.

Conventions
-----------
* Förster defect ``delta = E(s) + E(t) - 2 E(i)`` (GHz, ``E/h``).
* ``C3 = e^2 <i|r|s><i|r|t> / (4 pi eps0 h)`` in GHz um^3 and, per level
  pair, ``C6 = C3^2 / (-delta)`` in GHz um^6.  A positive C6 multiplies a
  non-negative ``D_phi`` to give a repulsive shift; negative defects
  therefore repel.
* The second-order Hamiltonian sums every *unordered* intermediate level pair
  ``{s, t}`` once:  ``H R^6 = sum C6(s,t) w(s,t) D(l_s j_s, l_t j_t)``.  The
  channel operator ``D`` counts both assignments of the levels to the atoms,
  so ``w = 1`` for distinct levels and ``w = 1/2`` when ``s`` and ``t`` are
  the same level (the pair state then exists only once).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .angular import HalfInt, twice, wigner_d_matrix
from .channels import (AngularChannel, AngularChannelMatrix, L_LETTERS, build_m_operator,
                       diagonalize_blocks, pair_basis)
from .constants import COULOMB_GHZ_UM, DIPOLE_DIPOLE_GHZ_UM3
from .radial import radial_matrix_element
from .species import SpeciesModel, StateLabel, energy, get_species

__all__ = [
    "RESONANCE_FLOOR_GHZ",
    "DEFAULT_N_WINDOW",
    "DEFAULT_DEFECT_CAP_GHZ",
    "ResonantChannelError",
    "ForsterChannel",
    "ChannelStrength",
    "PairEigensystem",
    "VdwModel",
    "enumerate_channels",
    "c6_total",
    "channel_strengths",
    "vdw_hamiltonian",
    "two_level_curves",
    "crossover_radius",
    "qq_dominance_estimate",
    "FAMILIES",
    "case_study_tables",
    "forster_term",
]

RESONANCE_FLOOR_GHZ = 1e-6
DEFAULT_N_WINDOW = 5
DEFAULT_DEFECT_CAP_GHZ = 50.0
VALIDITY_FLOOR_UM = 0.5


class ResonantChannelError(RuntimeError):
    """The dominant term of a channel is resonant; use the two-level treatment."""


def _canonical(s: StateLabel, t: StateLabel) -> tuple[StateLabel, StateLabel]:
    # lower l first; within equal l the higher j, then the higher n
    key = lambda x: (x.l, -x.tj, -x.n)
    return (s, t) if key(s) <= key(t) else (t, s)


@dataclass(frozen=True)
class ForsterChannel:
    """One intermediate level pair ``{s, t}`` reachable from ``initial + initial``."""

    initial: StateLabel
    s: StateLabel
    t: StateLabel
    defect_ghz: float
    radial_product: float
    resonant: bool = False

    @property
    def c3(self) -> float:
        """Resonant coupling in GHz um^3."""
        return DIPOLE_DIPOLE_GHZ_UM3 * self.radial_product

    @property
    def c6(self) -> float:
        """``C3^2 / (-delta)`` in GHz um^6 (``nan`` for resonant pairs)."""
        if self.resonant:
            return math.nan
        return self.c3 ** 2 / (-self.defect_ghz)

    @property
    def identical(self) -> bool:
        return self.s == self.t

    @property
    def weight(self) -> float:
        """Multiplicity of this pair relative to the channel operator ``D``."""
        return 0.5 if self.identical else 1.0

    @property
    def angular(self) -> AngularChannel:
        i = self.initial
        return AngularChannel(2 * i.l, i.tj, 2 * self.s.l, self.s.tj, 2 * self.t.l, self.t.tj)

    @property
    def r_c(self) -> float:
        return crossover_radius(self.c3, self.defect_ghz)

    @property
    def label(self) -> str:
        return f"{self.initial.label}+{self.initial.label}->{self.s.label}+{self.t.label}"


def forster_term(initial: StateLabel, s: StateLabel, t: StateLabel,
                 species: SpeciesModel | str | None = None,
                 resonance_floor: float = RESONANCE_FLOOR_GHZ) -> ForsterChannel:
    """Defect and radial product of a single level pair."""
    sp = get_species(species if species is not None else initial.species)
    for x in (s, t):
        if abs(x.l - initial.l) != 1 or abs(x.tj - initial.tj) > 2:
            raise ValueError(f"{x.label} is not dipole-coupled to {initial.label}")
    s, t = _canonical(s, t)
    d = energy(s, sp) + energy(t, sp) - 2.0 * energy(initial, sp)
    rp = (radial_matrix_element(initial, s, sp).value
          * radial_matrix_element(initial, t, sp).value)
    return ForsterChannel(initial, s, t, d, rp, abs(d) < resonance_floor)


def _neighbours(initial: StateLabel, n_window: int) -> list[StateLabel]:
    out = []
    for l in (initial.l - 1, initial.l + 1):
        if l < 0:
            continue
        for tj in (2 * l - 1, 2 * l + 1):
            if tj < 1 or abs(tj - initial.tj) > 2:
                continue
            for n in range(initial.n - n_window, initial.n + n_window + 1):
                if n > l:
                    out.append(StateLabel(initial.species, n, l, tj))
    return out


def enumerate_channels(initial: StateLabel, species: SpeciesModel | str | None = None,
                       n_window: int = DEFAULT_N_WINDOW,
                       defect_cap: float = DEFAULT_DEFECT_CAP_GHZ,
                       resonance_floor: float = RESONANCE_FLOOR_GHZ) -> list[ForsterChannel]:
    """All dipole-allowed level pairs near ``initial``, strongest first.

    Pairs with ``|delta| > defect_cap`` are dropped; pairs with
    ``|delta| < resonance_floor`` are kept but flagged ``resonant`` (and a
    warning is issued) because second-order perturbation theory does not
    apply to them.  Sorting is by ``|radial_product^2 / delta|``.
    """
    sp = get_species(species if species is not None else initial.species)
    levels = _neighbours(initial, n_window)
    e = {x: energy(x, sp) for x in levels}
    e0 = energy(initial, sp)
    found: list[ForsterChannel] = []
    for a_i, a in enumerate(levels):
        for b in levels[a_i:]:
            d = e[a] + e[b] - 2.0 * e0
            if abs(d) > defect_cap:
                continue
            found.append(forster_term(initial, a, b, sp, resonance_floor))
    resonant = [c for c in found if c.resonant]
    if resonant:
        warnings.warn(f"{len(resonant)} resonant pair(s) for {initial} excluded from C6 "
                      f"(|delta| < {resonance_floor} GHz)", stacklevel=2)

    def strength(c: ForsterChannel) -> float:
        return math.inf if c.resonant else c.radial_product ** 2 / abs(c.defect_ghz)

    found.sort(key=lambda c: (-strength(c), c.s, c.t))
    return found


@dataclass(frozen=True)
class ChannelStrength:
    """Summed strength of one angular channel.

    ``c6`` multiplies the channel operator ``D`` (identical-level pairs enter
    with weight 1/2); ``dominant`` is the single pair with the largest
    ``|C6|``, whose ``c3`` and ``r_c`` are also reported.
    """

    angular: AngularChannel
    c6: float
    dominant: ForsterChannel
    terms: tuple[ForsterChannel, ...] = ()

    @property
    def c3(self) -> float:
        return self.dominant.c3

    @property
    def r_c(self) -> float:
        return self.dominant.r_c


def _same_angular(a: AngularChannel, b: AngularChannel) -> bool:
    return a == b or a == b.swapped


def c6_total(initial: StateLabel, angular: AngularChannel, species: SpeciesModel | str | None = None,
             n_window: int = DEFAULT_N_WINDOW, defect_cap: float = DEFAULT_DEFECT_CAP_GHZ,
             channels: Sequence[ForsterChannel] | None = None) -> ChannelStrength:
    """Signed C6 of one angular channel summed over principal quantum numbers.

    Raises
    ------
    ResonantChannelError
        When the strongest pair of the channel is resonant.
    ValueError
        When no pair of the channel lies within the window.
    """
    if channels is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            channels = enumerate_channels(initial, species, n_window, defect_cap)
    terms = [c for c in channels if _same_angular(c.angular, angular)]
    if not terms:
        raise ValueError(f"no level pairs for channel {angular} within the window")
    if terms[0].resonant:
        raise ResonantChannelError(
            f"dominant pair {terms[0].label} is resonant (delta = {terms[0].defect_ghz:.3g} GHz); "
            "use two_level_curves instead")
    usable = [c for c in terms if not c.resonant]
    total = math.fsum(c.c6 * c.weight for c in usable)
    dominant = max(usable, key=lambda c: abs(c.c6))
    return ChannelStrength(terms[0].angular, total, dominant, tuple(usable))


def channel_strengths(initial: StateLabel, species: SpeciesModel | str | None = None,
                      n_window: int = DEFAULT_N_WINDOW,
                      defect_cap: float = DEFAULT_DEFECT_CAP_GHZ) -> list[ChannelStrength]:
    """:func:`c6_total` for every angular channel reachable from ``initial``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        chans = enumerate_channels(initial, species, n_window, defect_cap)
    seen: list[AngularChannel] = []
    for c in chans:
        if not c.resonant and not any(_same_angular(c.angular, a) for a in seen):
            seen.append(c.angular)
    return [c6_total(initial, a, species, n_window, defect_cap, chans) for a in seen]


@lru_cache(maxsize=256)
def _d_matrix(angular: AngularChannel) -> AngularChannelMatrix:
    return build_m_operator(angular)


@dataclass
class PairEigensystem:
    """Eigenstates of the pair Hamiltonian at separation ``R``.

    ``values`` (GHz) and the columns of ``vectors`` refer to the full two-atom
    basis ``kets`` (ordering of :func:`pair_basis`), grouped by total M.
    """

    R: float
    values: np.ndarray
    vectors: np.ndarray
    kets: list[tuple[int, int]]
    block_of: np.ndarray
    regime: str = "vdw"

    def by_block(self) -> dict[int, np.ndarray]:
        return {int(tM): np.sort(self.values[self.block_of == tM])[::-1]
                for tM in sorted(set(self.block_of.tolist()), reverse=True)}


@dataclass
class VdwModel:
    """``H R^6 = sum_k c6_k D_k`` for one initial level; R-independent part.

    Parameters
    ----------
    tj : int
        Doubled ``j`` of the initial level.
    terms : list of (AngularChannel, float)
        Channel operators and the effective C6 multiplying each (GHz um^6).
    """

    tj: int
    terms: list[tuple[AngularChannel, float]]
    r_c: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_strengths(cls, strengths: Iterable[ChannelStrength]) -> "VdwModel":
        strengths = list(strengths)
        if not strengths:
            raise ValueError("no channel strengths given")
        tj = strengths[0].angular.tj
        r_c = max(s.r_c for s in strengths)
        return cls(tj, [(s.angular, s.c6) for s in strengths], r_c)

    def h6_blocks(self) -> dict[int, np.ndarray]:
        """``H R^6`` per doubled total M (GHz um^6)."""
        if "h6" not in self._cache:
            blocks: dict[int, np.ndarray] = {}
            for ch, c6 in self.terms:
                if ch.tj != self.tj:
                    raise ValueError("all channels must share the initial level")
                for tM, d in _d_matrix(ch).d_blocks.items():
                    blocks[tM] = blocks.get(tM, 0.0) + c6 * d
            self._cache["h6"] = blocks
        return self._cache["h6"]

    def h6_full(self) -> np.ndarray:
        kets = pair_basis(self.tj)
        idx = {k: i for i, k in enumerate(kets)}
        out = np.zeros((len(kets), len(kets)))
        for tM, block in self.h6_blocks().items():
            ii = [idx[k] for k in pair_basis(self.tj, tM)]
            out[np.ix_(ii, ii)] = block
        return out

    def eigen6(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Eigenvalues of ``H R^6`` (GHz um^6), eigenvectors on the full basis, M labels."""
        if "eig" not in self._cache:
            kets = pair_basis(self.tj)
            idx = {k: i for i, k in enumerate(kets)}
            vals, vecs = diagonalize_blocks(self.h6_blocks())
            all_v, cols, labels = [], [], []
            for tM in sorted(vals, reverse=True):
                ii = [idx[k] for k in pair_basis(self.tj, tM)]
                for k in range(len(vals[tM])):
                    col = np.zeros(len(kets))
                    col[ii] = vecs[tM][:, k]
                    all_v.append(vals[tM][k])
                    cols.append(col)
                    labels.append(tM)
            self._cache["eig"] = (np.array(all_v), np.array(cols).T, np.array(labels))
        return self._cache["eig"]

    def at(self, R: float) -> PairEigensystem:
        return vdw_hamiltonian(self, R)


def vdw_hamiltonian(model: VdwModel | Sequence[ChannelStrength], R: float) -> PairEigensystem:
    """Diagonalise ``H = sum_k C6_k D_k / R^6`` at separation ``R`` (um)."""
    if not isinstance(model, VdwModel):
        model = VdwModel.from_strengths(model)
    if not model.terms:
        raise ValueError("empty channel list")
    if R < VALIDITY_FLOOR_UM:
        warnings.warn(f"R = {R} um is below the {VALIDITY_FLOOR_UM} um validity floor", stacklevel=2)
    vals6, vecs, labels = model.eigen6()
    if model.r_c and R < model.r_c:
        regime = "resonant"
    elif model.r_c and R < 3 * model.r_c:
        regime = "crossover"
    else:
        regime = "vdw"
    return PairEigensystem(R, vals6 / R ** 6, vecs, pair_basis(model.tj), labels, regime)


def crossover_radius(c3: float, delta: float) -> float:
    """``R_c = (4 C3^2 / delta^2)^(1/6)`` in um."""
    return (4.0 * c3 ** 2 / delta ** 2) ** (1.0 / 6.0)


@dataclass(frozen=True)
class TwoLevelCurves:
    R: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    theta: np.ndarray

    @property
    def initial_branch(self) -> np.ndarray:
        """Branch that tends to zero (the initial pair) at large R."""
        return np.where(np.abs(self.v_plus) < np.abs(self.v_minus), self.v_plus, self.v_minus)


def two_level_curves(c3: float, delta: float, d_phi: float, R: np.ndarray | float) -> TwoLevelCurves:
    """Potentials of the closed pair ``{|phi>, |chi_phi>}``.

    The initial pair state sits at 0 and the coupled pair at ``delta`` with
    coupling ``C3 sqrt(D_phi) / R^3``, so
    ``V_pm = delta/2 pm (1/2) sqrt(delta^2 + 4 C3^2 D_phi / R^6)`` and
    ``tan 2 theta = -2 C3 sqrt(D_phi) / (delta R^3)``.
    """
    R = np.atleast_1d(np.asarray(R, dtype=float))
    coupling = c3 * math.sqrt(max(d_phi, 0.0)) / R ** 3
    root = np.sqrt(delta ** 2 + 4.0 * coupling ** 2)
    theta = 0.5 * np.arctan2(-2.0 * coupling, delta)
    return TwoLevelCurves(R, 0.5 * delta + 0.5 * root, 0.5 * delta - 0.5 * root, theta)


def qq_dominance_estimate(delta: float) -> float:
    """Distance ``e^2/delta`` (um) beyond which quadrupole-quadrupole could compete."""
    if delta == 0:
        raise ValueError("delta must be non-zero")
    return COULOMB_GHZ_UM / abs(delta)


# -- case-study tables ----------------------------------------------------------

#: Defect channels per family: ``(initial (l, 2j), s (l, 2j), t (l, 2j))`` for
#: delta_1, delta_2, ...
FAMILIES: dict[str, list[tuple[tuple[int, int], tuple[int, int], tuple[int, int]]]] = {
    "s->pp": [((0, 1), (1, 3), (1, 3)), ((0, 1), (1, 3), (1, 1)), ((0, 1), (1, 1), (1, 1))],
    "p->ss": [((1, 3), (0, 1), (0, 1)), ((1, 1), (0, 1), (0, 1))],
    "p->sd": [((1, 3), (0, 1), (2, 5)), ((1, 3), (0, 1), (2, 3)), ((1, 1), (0, 1), (2, 3))],
    "p->dd": [((1, 3), (2, 5), (2, 5)), ((1, 3), (2, 5), (2, 3)), ((1, 3), (2, 3), (2, 3)),
              ((1, 1), (2, 3), (2, 3))],
    "d->pp": [((2, 5), (1, 3), (1, 3)), ((2, 3), (1, 3), (1, 3)), ((2, 3), (1, 3), (1, 1)),
              ((2, 3), (1, 1), (1, 1))],
    "d->pf": [((2, 5), (1, 3), (3, 7)), ((2, 5), (1, 3), (3, 5)), ((2, 3), (1, 3), (3, 5)),
              ((2, 3), (1, 1), (3, 5))],
    "d->ff": [((2, 5), (3, 7), (3, 7)), ((2, 5), (3, 7), (3, 5)), ((2, 5), (3, 5), (3, 5)),
              ((2, 3), (3, 5), (3, 5))],
}

#: ``(n_s - n, n_t - n)`` offsets dominating each family at high n.
FAMILY_OFFSETS: dict[str, list[tuple[int, int]]] = {
    "s->pp": [(0, -1), (-1, 0), (1, -2)],
    "p->ss": [(1, 0), (0, 1), (2, -1)],
    "p->sd": [(0, -1), (1, -2), (1, -1)],
    "p->dd": [(-1, -1), (-2, -1), (1, -3)],
    "d->pp": [(1, 1), (1, 2)],
    "d->pf": [(1, -1), (2, -2), (1, -3), (1, -2)],
    "d->ff": [(-2, -2), (-2, -1), (-1, -1), (-3, -3), (-3, -2)],
}


def family_term(species: SpeciesModel | str, family: str, delta_id: int, n: int,
                n_s: int, n_t: int) -> ForsterChannel:
    """Level pair ``delta_k(n_s, n_t)`` of a family at initial principal number ``n``."""
    sp = get_species(species)
    try:
        (l, tj), (ls, tjs), (lt, tjt) = FAMILIES[family][delta_id - 1]
    except (KeyError, IndexError):
        raise ValueError(f"unknown channel delta_{delta_id} of family {family!r}") from None
    i = StateLabel(sp.name, n, l, tj)
    s = StateLabel(sp.name, n_s, ls, tjs)
    t = StateLabel(sp.name, n_t, lt, tjt)
    return forster_term(i, s, t, sp)


def case_study_tables(species: SpeciesModel | str, family: str, n_values: Iterable[int],
                      offsets: Sequence[tuple[int, int]] | None = None) -> list[dict]:
    """Defects and C6 of every ``delta_k(n_s, n_t)`` of a family across ``n``.

    Rows carry ``n``, ``delta_id``, ``n_s``, ``n_t``, ``defect_MHz``,
    ``C6_GHz_um6``, ``C3_GHz_um3`` and ``R_c_um``; ``n_s``/``n_t`` keep the
    family's leg order (``s`` is the first intermediate level listed).
    Offsets naming the same level pair twice give a single row.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    offsets = list(offsets) if offsets is not None else FAMILY_OFFSETS[family]
    rows = []
    for n in n_values:
        for k in range(1, len(FAMILIES[family]) + 1):
            seen = set()
            for ds, dt in offsets:
                try:
                    term = family_term(species, family, k, n, n + ds, n + dt)
                except ValueError:
                    continue
                # identical legs make (a, b) and (b, a) the same level pair
                if (term.s, term.t) in seen:
                    continue
                seen.add((term.s, term.t))
                rows.append({
                    "n": n, "delta_id": k, "n_s": n + ds, "n_t": n + dt,
                    "defect_MHz": term.defect_ghz * 1e3,
                    "C6_GHz_um6": term.c6,
                    "C3_GHz_um3": term.c3,
                    "R_c_um": term.r_c,
                })
    return rows
