"""Angular dipole-dipole operator for Zeeman-degenerate pair states.

Two identical atoms in ``(l, j)`` are coupled by the dipole-dipole interaction
(quantisation axis along the interatomic axis) to a pair of intermediate
levels ``(l_s, j_s)`` on atom A and ``(l_t, j_t)`` on atom B.  The angular part
of that coupling is the rectangular operator ``M``; its Gram matrix
``D = M^T M`` carries every Zeeman effect of the second-order interaction and
is diagonalised block by block in the total projection ``M_A + M_B``.

Operator normalisation
----------------------
The intermediate pair can be realised with atom A in s and atom B in t, or
the other way round.  Both assignments are counted, so the ``M`` blocks stack
``M_st`` and its atom-exchanged copy and ``D = M_st^T M_st + P M_st^T M_st P``
(``P`` swaps the atoms).  This is the normalisation of the published channel
table.  ``single_assignment_gram`` returns ``M_st^T M_st`` alone, which is the
form quoted for hand-worked examples such as ``p1/2 -> s1/2 + s1/2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .angular import HalfInt, clebsch_gordan, m_values, twice, wigner_6j, wigner_9j

L_LETTERS = "spdfghik"

EXACT_ZERO = 1e-10
WEAK_ZERO = 0.05


class SelectionRuleError(ValueError):
    """Raised for a channel forbidden by the electric-dipole selection rules."""


def _lj_label(tl: int, tj: int) -> str:
    return f"{L_LETTERS[tl // 2]}{tj}/2"


@dataclass(frozen=True)
class AngularChannel:
    """``l j + l j -> l_s j_s + l_t j_t``; all fields are doubled integers."""

    tl: int
    tj: int
    tls: int
    tjs: int
    tlt: int
    tjt: int

    @classmethod
    def make(cls, l, j, ls, js, lt, jt) -> "AngularChannel":
        ch = cls(*(twice(x) for x in (l, j, ls, js, lt, jt)))
        ch.validate()
        return ch

    def validate(self) -> None:
        for tl, tj, name in ((self.tl, self.tj, "initial"), (self.tls, self.tjs, "s"),
                             (self.tlt, self.tjt, "t")):
            if tl % 2 or tl < 0:
                raise SelectionRuleError(f"{name}: l must be a non-negative integer")
            if tj % 2 != 1 or abs(tj - tl) != 1:
                raise SelectionRuleError(f"{name}: j must equal l +- 1/2")
        for tl, tj, name in ((self.tls, self.tjs, "s"), (self.tlt, self.tjt, "t")):
            if abs(tl - self.tl) != 2:
                raise SelectionRuleError(
                    f"parity rule violated: |l_{name} - l| must be 1 "
                    f"(got l={self.tl // 2}, l_{name}={tl // 2})")
            if abs(tj - self.tj) > 2:
                raise SelectionRuleError(f"|j_{name} - j| must be <= 1")

    @property
    def same_intermediate(self) -> bool:
        return (self.tls, self.tjs) == (self.tlt, self.tjt)

    @property
    def swapped(self) -> "AngularChannel":
        return AngularChannel(self.tl, self.tj, self.tlt, self.tjt, self.tls, self.tjs)

    @property
    def initial_label(self) -> str:
        return _lj_label(self.tl, self.tj)

    @property
    def label(self) -> str:
        return (f"{self.initial_label}->{_lj_label(self.tls, self.tjs)}"
                f"+{_lj_label(self.tlt, self.tjt)}")

    def __str__(self) -> str:
        return self.label


def pair_basis(tj: int, tM: int | None = None) -> list[tuple[int, int]]:
    """Two-atom kets ``(2 m_A, 2 m_B)`` sorted by ``m_A`` then ``m_B`` descending."""
    ms = [m.twice_value for m in m_values(HalfInt(tj))]
    kets = [(a, b) for a in ms for b in ms]
    if tM is not None:
        kets = [k for k in kets if k[0] + k[1] == tM]
    return kets


def _product_basis(tja: int, tjb: int) -> list[tuple[int, int]]:
    ma = [m.twice_value for m in m_values(HalfInt(tja))]
    mb = [m.twice_value for m in m_values(HalfInt(tjb))]
    return [(a, b) for a in ma for b in mb]


def m_operator_full(ch: AngularChannel) -> tuple[np.ndarray, list, list]:
    """Dense ``<m_s m_t| M |m_A m_B>`` over the full product bases."""
    l, j = ch.tl / 2, ch.tj / 2
    pref = ((-1) ** (ch.tj + 1)
            * clebsch_gordan(l, 0, 1, 0, ch.tls // 2, 0)
            * clebsch_gordan(l, 0, 1, 0, ch.tlt // 2, 0)
            * math.sqrt(6) * (2 * l + 1) * (2 * j + 1)
            * wigner_6j(l, 0.5, j, ch.tjs / 2, 1, ch.tls // 2)
            * wigner_6j(l, 0.5, j, ch.tjt / 2, 1, ch.tlt // 2))
    init = pair_basis(ch.tj)
    inter = _product_basis(ch.tjs, ch.tjt)
    mat = np.zeros((len(inter), len(init)))
    row = {k: i for i, k in enumerate(inter)}
    for c, (ta, tb) in enumerate(init):
        for p in (-1, 0, 1):
            tms, tmt = ta + 2 * p, tb - 2 * p
            r = row.get((tms, tmt))
            if r is None:
                continue
            mat[r, c] += (clebsch_gordan(1, p, 1, -p, 2, 0)
                          * clebsch_gordan(HalfInt(ch.tj), HalfInt(ta), 1, p, HalfInt(ch.tjs), HalfInt(tms))
                          * clebsch_gordan(HalfInt(ch.tj), HalfInt(tb), 1, -p, HalfInt(ch.tjt), HalfInt(tmt)))
    return pref * mat, inter, init


def exchange_matrix(tj: int) -> np.ndarray:
    """Permutation swapping atoms A and B on the two-atom basis of ``pair_basis``."""
    kets = pair_basis(tj)
    idx = {k: i for i, k in enumerate(kets)}
    P = np.zeros((len(kets), len(kets)))
    for i, (a, b) in enumerate(kets):
        P[idx[(b, a)], i] = 1.0
    return P


def _blocks_by_M(kets: Sequence[tuple[int, int]]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, (a, b) in enumerate(kets):
        out.setdefault(a + b, []).append(i)
    return dict(sorted(out.items(), reverse=True))


@dataclass
class AngularChannelMatrix:
    """``M`` blocks and ``D`` blocks of one channel, keyed by doubled total M.

    ``m_blocks[2M]`` maps the initial kets of that block onto the intermediate
    kets (both orderings stacked when the intermediate levels differ), so that
    ``d_blocks[2M] == m_blocks[2M].T @ m_blocks[2M]`` always holds.
    """

    channel: AngularChannel | None
    tj: int
    m_blocks: dict[int, np.ndarray]
    d_blocks: dict[int, np.ndarray]
    kets: dict[int, list[tuple[int, int]]]
    inter_kets: dict[int, list[tuple]] = field(default_factory=dict)

    def full_d(self) -> np.ndarray:
        """``D`` assembled on the complete ``pair_basis`` ordering."""
        basis = pair_basis(self.tj)
        idx = {k: i for i, k in enumerate(basis)}
        out = np.zeros((len(basis), len(basis)))
        for tM, block in self.d_blocks.items():
            ii = [idx[k] for k in self.kets[tM]]
            out[np.ix_(ii, ii)] = block
        return out


def build_m_operator(ch: AngularChannel) -> AngularChannelMatrix:
    """Assemble the ``M`` operator of a channel and its ``D = M^T M`` blocks."""
    ch.validate()
    mat, inter, init = m_operator_full(ch)
    # M_ts == Q M_st P (Q, P swap the atoms): the t-on-A assignment is M_st
    # acting on exchanged initial kets, with relabelled rows
    P = exchange_matrix(ch.tj)
    parts = [(mat, [("st",) + k for k in inter]),
             (mat @ P, [("ts",) + (k[1], k[0]) for k in inter])]
    init_blocks = _blocks_by_M(init)
    m_blocks, d_blocks, kets, inter_kets = {}, {}, {}, {}
    for tM, cols in init_blocks.items():
        rows_all, labels = [], []
        for m, labs in parts:
            for r, lab in enumerate(labs):
                if lab[1] + lab[2] == tM:
                    rows_all.append(m[r, cols])
                    labels.append(lab)
        block = np.array(rows_all) if rows_all else np.zeros((0, len(cols)))
        m_blocks[tM] = block
        d_blocks[tM] = block.T @ block
        kets[tM] = [init[c] for c in cols]
        inter_kets[tM] = labels
    return AngularChannelMatrix(ch, ch.tj, m_blocks, d_blocks, kets, inter_kets)


def single_assignment_gram(ch: AngularChannel) -> dict[int, np.ndarray]:
    """``M_st^T M_st`` blocks (atom A in s, atom B in t only), keyed by doubled M."""
    mat, _, init = m_operator_full(ch)
    gram = mat.T @ mat
    return {tM: gram[np.ix_(cols, cols)] for tM, cols in _blocks_by_M(init).items()}


@dataclass
class ChannelEigensystem:
    """Eigenpairs of ``D`` per block, eigenvalues sorted descending.

    ``values``/``vectors``/``kets`` are keyed by doubled ``|M|`` (the
    non-negative blocks); ``values_signed``/``vectors_signed`` keep every
    block including negative M.
    """

    tj: int
    values: dict[int, np.ndarray]
    vectors: dict[int, np.ndarray]
    kets: dict[int, list[tuple[int, int]]]
    label: str = ""
    values_signed: dict[int, np.ndarray] = field(default_factory=dict)
    vectors_signed: dict[int, np.ndarray] = field(default_factory=dict)

    def all_values(self) -> np.ndarray:
        return np.concatenate([self.values_signed[k] for k in sorted(self.values_signed)])

    def min_value(self) -> float:
        return min(float(v.min()) for v in self.values.values() if len(v))


def _fix_sign(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        i = int(np.argmax(np.abs(col) - 1e-12 * np.arange(len(col))))
        if col[i] < 0:
            out[:, k] = -col
    return out


def diagonalize_blocks(blocks: dict[int, np.ndarray]) -> tuple[dict, dict]:
    values, vectors = {}, {}
    for tM, block in blocks.items():
        w, v = np.linalg.eigh(block)
        order = np.argsort(-w, kind="stable")
        values[tM] = w[order]
        vectors[tM] = _fix_sign(v[:, order])
    return values, vectors


def eigensystem(matrix: AngularChannelMatrix) -> ChannelEigensystem:
    """Sorted eigenvalues ``D_phi`` and orthonormal eigenvectors per |M|."""
    values, vectors = diagonalize_blocks(matrix.d_blocks)
    label = matrix.channel.label if matrix.channel is not None else ""
    abs_vals = {tM: values[tM] for tM in values if tM >= 0}
    abs_vecs = {tM: vectors[tM] for tM in vectors if tM >= 0}
    return ChannelEigensystem(matrix.tj, abs_vals, abs_vecs,
                              {tM: matrix.kets[tM] for tM in abs_vals}, label,
                              values_signed=values, vectors_signed=vectors)


def sum_channels(weighted: Iterable[tuple[AngularChannelMatrix, float]]) -> AngularChannelMatrix:
    """Weighted sum ``sum_c w_c D_c`` of channels sharing the same initial state.

    The result carries no ``M`` blocks (they do not combine linearly).
    """
    weighted = list(weighted)
    if not weighted:
        raise ValueError("no channels to sum")
    tj = weighted[0][0].tj
    tl = weighted[0][0].channel.tl if weighted[0][0].channel else None
    d_blocks: dict[int, np.ndarray] = {}
    kets: dict[int, list] = {}
    for mat, w in weighted:
        ch_tl = mat.channel.tl if mat.channel else None
        if mat.tj != tj or (tl is not None and ch_tl is not None and ch_tl != tl):
            raise ValueError("channels to sum must share the initial (l, j)")
        for tM, block in mat.d_blocks.items():
            if tM in d_blocks:
                d_blocks[tM] = d_blocks[tM] + w * block
            else:
                d_blocks[tM] = w * block
                kets[tM] = mat.kets[tM]
    return AngularChannelMatrix(None, tj, {}, d_blocks, kets)


@dataclass
class ForsterZeroReport:
    label: str
    threshold: float
    zero_states: list[tuple[int, float, np.ndarray]]

    @property
    def count(self) -> int:
        return len(self.zero_states)


def find_forster_zeros(es: ChannelEigensystem, threshold: float = EXACT_ZERO) -> ForsterZeroReport:
    """All eigenpairs of non-negative M blocks with ``D_phi < threshold``."""
    found = []
    for tM in sorted(es.values, reverse=True):
        for k, val in enumerate(es.values[tM]):
            if val < threshold:
                found.append((tM, float(val), es.vectors[tM][:, k]))
    return ForsterZeroReport(es.label, threshold, found)


def forster_pair_state(matrix: AngularChannelMatrix, tM: int, phi: np.ndarray) -> tuple[np.ndarray, float]:
    """Partner ``|chi> = M|phi>/sqrt(D_phi)`` of a van der Waals eigenvector."""
    m = matrix.m_blocks[tM]
    image = m @ phi
    d_phi = float(image @ image)
    if d_phi < EXACT_ZERO:
        raise ValueError("Forster-zero state has no partner")
    root = math.sqrt(d_phi)
    return image / root, root


# -- coupled basis --------------------------------------------------------

def coupled_transform(tj: int, tM: int, kets: Sequence[tuple[int, int]]) -> tuple[np.ndarray, list[int]]:
    """Unitary ``U[J, (m_A, m_B)] = <j m_A j m_B | J M>`` for one M block."""
    Js = [tJ for tJ in range(abs(tM), 2 * tj + 1, 2)]
    U = np.array([[clebsch_gordan(HalfInt(tj), HalfInt(a), HalfInt(tj), HalfInt(b), HalfInt(tJ), HalfInt(tM))
                   for (a, b) in kets] for tJ in Js])
    return U, Js


def to_coupled_basis(matrix: AngularChannelMatrix) -> dict[int, tuple[np.ndarray, list[int]]]:
    """``D`` blocks rotated into the coupled ``|j j J M>`` basis."""
    out = {}
    for tM, block in matrix.d_blocks.items():
        U, Js = coupled_transform(matrix.tj, tM, matrix.kets[tM])
        out[tM] = (U @ block @ U.T, Js)
    return out


def coupled_m_operator(ch: AngularChannel, tM: int) -> tuple[np.ndarray, list[int], list[int]]:
    """``M`` between coupled kets ``|j_s j_t K M>`` and ``|j j J M>`` via 9j recoupling.

    Only the single-assignment operator ``M_st`` is returned.  The radial and
    overall angular factors are those of the product-basis operator.
    """
    l, j = ch.tl / 2, ch.tj / 2
    pref = ((-1) ** (ch.tj + 1)
            * clebsch_gordan(l, 0, 1, 0, ch.tls // 2, 0)
            * clebsch_gordan(l, 0, 1, 0, ch.tlt // 2, 0)
            * math.sqrt(6) * (2 * l + 1) * (2 * j + 1)
            * wigner_6j(l, 0.5, j, ch.tjs / 2, 1, ch.tls // 2)
            * wigner_6j(l, 0.5, j, ch.tjt / 2, 1, ch.tlt // 2))
    # <j_s m_s| T^1_p |j m> = C^{j_s m_s}_{j m 1 p}; the rank-2 coupling of two
    # such unit tensors between coupled states follows from the 9j recoupling.
    Js = [tJ for tJ in range(abs(tM), 2 * ch.tj + 1, 2)]
    Ks = [tK for tK in range(max(abs(tM), abs(ch.tjs - ch.tjt)), ch.tjs + ch.tjt + 1, 2)]
    out = np.zeros((len(Ks), len(Js)))
    js, jt = ch.tjs / 2, ch.tjt / 2
    for a, tK in enumerate(Ks):
        for b, tJ in enumerate(Js):
            K, J = tK / 2, tJ / 2
            # reduced element of [u^1(A) x u^1(B)]^2 with <j_s||u^1||j> = sqrt(2 j_s + 1)
            red = (math.sqrt((2 * J + 1) * (2 * K + 1) * 5)
                   * math.sqrt(2 * js + 1) * math.sqrt(2 * jt + 1)
                   * wigner_9j(j, 1, js, j, 1, jt, J, 2, K))
            out[a, b] = red * clebsch_gordan(J, tM / 2, 2, 0, K, tM / 2) / math.sqrt(2 * K + 1)
    return pref * out, Ks, Js


def coupled_d_blocks(ch: AngularChannel) -> dict[int, tuple[np.ndarray, list[int]]]:
    """``D`` in the coupled ``|j j J M>`` basis, built directly from 9j recoupling.

    Exchanging the two identical atoms multiplies ``|j j J M>`` by
    ``(-1)^(2j - J)``, so the atom-exchanged assignment contributes
    ``P M^T M P`` with a diagonal ``P``.
    """
    out = {}
    for tM in range(2 * ch.tj, -2 * ch.tj - 1, -2):
        m, _, Js = coupled_m_operator(ch, tM)
        gram = m.T @ m
        phase = np.array([(-1) ** ((2 * ch.tj - tJ) // 2) for tJ in Js], dtype=float)
        out[tM] = (gram + phase[:, None] * gram * phase[None, :], Js)
    return out


# -- reference channel table ----------------------------------------------------

_LJ_RE = re.compile(r"^\s*(?:(\d+)\s*)?([spdfgh])\s*(?:(\d+)\s*/\s*2)?\s*$")


def parse_lj(token: str) -> tuple[int, int | None]:
    """``'p3/2' -> (2, 3)`` in doubled units; ``'p' -> (2, None)``."""
    m = _LJ_RE.match(token)
    if not m or m.group(1):
        raise ValueError(f"cannot parse angular state {token!r}")
    tl = 2 * L_LETTERS.index(m.group(2))
    tj = int(m.group(3)) if m.group(3) else None
    return tl, tj


@dataclass(frozen=True)
class ChannelSpec:
    """A table row: one angular channel, or a fine-structure-summed family.

    ``components`` lists ``(channel, weight)``; the weight counts how many
    distinct intermediate level pairs share that angular structure.
    """

    key: str
    components: tuple[tuple[AngularChannel, float], ...]

    @property
    def initial(self) -> tuple[int, int]:
        ch = self.components[0][0]
        return ch.tl, ch.tj

    def matrix(self) -> AngularChannelMatrix:
        if len(self.components) == 1 and self.components[0][1] == 1.0:
            return build_m_operator(self.components[0][0])
        return sum_channels((build_m_operator(ch), w) for ch, w in self.components)


def _fs_options(tl_from: int, tj_from: int, tl_to: int) -> list[int]:
    return [tj for tj in (tl_to - 1, tl_to + 1) if tj > 0 and abs(tj - tj_from) <= 2]


def parse_channel(text: str) -> ChannelSpec:
    """Parse ``'p1/2->s1/2+s1/2'`` or the fine-structure-summed ``'s1/2->p+p'``.

    Summed families count every distinct intermediate level pair once, with
    the two atoms' levels taken from different principal quantum numbers when
    both legs have the same ``l`` (the case of the dominant ``s -> p + p``
    channels) unless the legs are written with an ``=`` (``'p3/2->d=d'``), which
    denotes both intermediate atoms in the same principal manifold.
    """
    try:
        lhs, rhs = text.replace(" ", "").split("->")
        same_n = "=" in rhs
        s_tok, t_tok = re.split(r"[+=]", rhs)
    except ValueError:
        raise ValueError(f"cannot parse channel {text!r}; expected e.g. 'p1/2->s1/2+s1/2'") from None
    tl, tj = parse_lj(lhs)
    if tj is None:
        raise ValueError("initial state needs j, e.g. 'd5/2'")
    tls, tjs = parse_lj(s_tok)
    tlt, tjt = parse_lj(t_tok)
    if tjs is not None and tjt is not None:
        ch = AngularChannel(tl, tj, tls, tjs, tlt, tjt)
        ch.validate()
        return ChannelSpec(text, ((ch, 1.0),))
    js_opts = [tjs] if tjs is not None else _fs_options(tl, tj, tls)
    jt_opts = [tjt] if tjt is not None else _fs_options(tl, tj, tlt)
    comps: dict[AngularChannel, float] = {}
    for a in js_opts:
        for b in jt_opts:
            if tls == tlt and not same_n:
                # levels (n1, a) + (n2, b) with n1 != n2: each ordered j assignment is its own pair
                key = AngularChannel(tl, tj, tls, min(a, b), tlt, max(a, b))
                comps[key] = comps.get(key, 0.0) + 1.0
            elif tls == tlt:
                key = AngularChannel(tl, tj, tls, min(a, b), tlt, max(a, b))
                comps[key] = 1.0
            else:
                comps[AngularChannel(tl, tj, tls, a, tlt, b)] = 1.0
    for ch in comps:
        ch.validate()
    return ChannelSpec(text, tuple(comps.items()))


# -- published channel table ----------------------------------------------------

#: Parse spec for each row of the published channel table.  Rows whose two
#: intermediate atoms share ``l`` with unspecified ``j`` use different
#: principal quantum numbers for ``s -> p + p`` and the same manifold for
#: ``p3/2 -> d + d`` and ``d5/2 -> f + f``, which is what the tabulated
#: eigenvalues correspond to.
TABLE_SPECS: dict[str, str] = {
    "s1/2->p+p": "s1/2->p+p",
    "s1/2->p1/2+p1/2": "s1/2->p1/2+p1/2",
    "s1/2->p1/2+p3/2": "s1/2->p1/2+p3/2",
    "s1/2->p3/2+p3/2": "s1/2->p3/2+p3/2",
    "p1/2->s1/2+s1/2": "p1/2->s1/2+s1/2",
    "p1/2->s1/2+d3/2": "p1/2->s1/2+d3/2",
    "p1/2->d3/2+d3/2": "p1/2->d3/2+d3/2",
    "p3/2->s1/2+s1/2": "p3/2->s1/2+s1/2",
    "p3/2->s1/2+d3/2": "p3/2->s1/2+d3/2",
    "p3/2->s1/2+d5/2": "p3/2->s1/2+d5/2",
    "p3/2->d3/2+d3/2": "p3/2->d3/2+d3/2",
    "p3/2->d3/2+d5/2": "p3/2->d3/2+d5/2",
    "p3/2->d5/2+d5/2": "p3/2->d5/2+d5/2",
    "p3/2->d+d": "p3/2->d=d",
    "d3/2->p1/2+p1/2": "d3/2->p1/2+p1/2",
    "d3/2->p1/2+p3/2": "d3/2->p1/2+p3/2",
    "d3/2->p3/2+p3/2": "d3/2->p3/2+p3/2",
    "d3/2->p1/2+f5/2": "d3/2->p1/2+f5/2",
    "d3/2->p3/2+f5/2": "d3/2->p3/2+f5/2",
    "d3/2->f5/2+f5/2": "d3/2->f5/2+f5/2",
    "d5/2->p3/2+p3/2": "d5/2->p3/2+p3/2",
    "d5/2->p3/2+f": "d5/2->p3/2+f",
    "d5/2->f+f": "d5/2->f=f",
}

_S_PP = {1: [1.33], 0: [1.33, 1.33]}
_PSS = {1: [0.0988], 0: [0.395, 0]}
_P_MIX = {1: [0.346], 0: [0.444, 0.0494]}
_P_33 = {1: [0.543], 0: [0.84, 0.444]}
_J32_ZERO = {3: [0], 2: [0, 0], 1: [0.543, 0, 0], 0: [0.84, 0.444, 0, 0]}
_J32_SD3 = {3: [0], 2: [0.08, 0.00889], 1: [0.0622, 0.0491, 0.00322],
            0: [0.0494, 0.0178, 0, 0]}
_J32_SD5 = {3: [0.267], 2: [0.48, 0.0533], 1: [0.64, 0.16, 0.0533],
            0: [0.693, 0.267, 0, 0]}
_J32_DD33 = {3: [0.0128], 2: [0.00569, 0], 1: [0.00626, 0.00291, 0.00142],
             0: [0.0178, 0.0149, 0.00217, 0.00182]}
_J32_DD35 = {3: [0.0725], 2: [0.0672, 0.0587], 1: [0.0654, 0.0608, 0.0189],
             0: [0.0675, 0.0657, 0.0328, 0.000416]}
_J32_DD55 = {3: [0.269], 2: [0.576, 0.269], 1: [0.831, 0.499, 0.264],
             0: [0.935, 0.649, 0.428, 0.253]}

#: Published eigenvalues ``D_phi`` per ``|M|`` (three significant figures).
REFERENCE_TABLE: dict[str, dict[int, list[float]]] = {
    "s1/2->p+p": _S_PP,
    "s1/2->p1/2+p1/2": _PSS,
    "s1/2->p1/2+p3/2": _P_MIX,
    "s1/2->p3/2+p3/2": _P_33,
    "p1/2->s1/2+s1/2": _PSS,
    "p1/2->s1/2+d3/2": _P_MIX,
    "p1/2->d3/2+d3/2": _P_33,
    "p3/2->s1/2+s1/2": _J32_ZERO,
    "p3/2->s1/2+d3/2": _J32_SD3,
    "p3/2->s1/2+d5/2": _J32_SD5,
    "p3/2->d3/2+d3/2": _J32_DD33,
    "p3/2->d3/2+d5/2": _J32_DD35,
    "p3/2->d5/2+d5/2": _J32_DD55,
    "p3/2->d+d": {3: [0.354], 2: [0.635, 0.342], 1: [0.857, 0.561, 0.33],
                  0: [0.948, 0.699, 0.501, 0.321]},
    "d3/2->p1/2+p1/2": _J32_ZERO,
    "d3/2->p1/2+p3/2": _J32_SD3,
    "d3/2->p3/2+p3/2": _J32_DD33,
    "d3/2->p1/2+f5/2": _J32_SD5,
    "d3/2->p3/2+f5/2": _J32_DD35,
    "d3/2->f5/2+f5/2": _J32_DD55,
    "d5/2->p3/2+p3/2": {5: [0], 4: [0, 0], 3: [0.269, 0, 0], 2: [0.576, 0.269, 0, 0],
                        1: [0.831, 0.499, 0.264, 0, 0],
                        0: [0.935, 0.649, 0.428, 0.253, 0, 0]},
    "d5/2->p3/2+f": {5: [0.343], 4: [0.503, 0.137], 3: [0.642, 0.263, 0.0702],
                     2: [0.747, 0.373, 0.145, 0.0659],
                     1: [0.814, 0.442, 0.229, 0.0764, 0.0594],
                     0: [0.836, 0.466, 0.243, 0.152, 0.00304, 0.00239]},
    "d5/2->f+f": {5: [0.185], 4: [0.397, 0.193], 3: [0.619, 0.375, 0.201],
                  2: [0.809, 0.561, 0.353, 0.206], 1: [0.938, 0.703, 0.505, 0.332, 0.208],
                  0: [0.985, 0.763, 0.597, 0.458, 0.317, 0.207]},
}


def table_channel(key: str) -> ChannelSpec:
    """Channel spec for a table row key, or a parsed free-form channel string."""
    compact = key.replace(" ", "")
    if compact in TABLE_SPECS:
        return ChannelSpec(compact, parse_channel(TABLE_SPECS[compact]).components)
    return parse_channel(compact)
