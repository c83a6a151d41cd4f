"""Angular momentum coupling coefficients and rotation matrices.

All quantum numbers are handled internally as *twice* their value so that
half-integers are plain Python ints.  Racah sums are evaluated with exact
big-integer rationals and only the final square root is taken in floating
point, which keeps the results at double precision for any j used here.

Phase convention is Condon-Shortley throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "HalfInt",
    "twice",
    "clebsch_gordan",
    "wigner_3j",
    "wigner_6j",
    "wigner_9j",
    "wigner_small_d",
    "wigner_d_matrix",
    "m_values",
]


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer quantum number stored as ``2*j``."""

    twice_value: int

    @classmethod
    def of(cls, value: "Number") -> "HalfInt":
        return cls(twice(value))

    def __float__(self) -> float:
        return self.twice_value / 2

    def __add__(self, other: "Number") -> "HalfInt":
        return HalfInt(self.twice_value + twice(other))

    def __sub__(self, other: "Number") -> "HalfInt":
        return HalfInt(self.twice_value - twice(other))

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __str__(self) -> str:
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


Number = Union[int, float, Fraction, HalfInt, str]


def twice(value: Number) -> int:
    """Return ``2*value`` as an int, rejecting anything that is not a half-integer."""
    if isinstance(value, HalfInt):
        return value.twice_value
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, bool):
        raise ValueError("boolean is not a quantum number")
    if isinstance(value, int):
        return 2 * value
    doubled = 2 * value
    as_int = int(round(doubled))
    if abs(doubled - as_int) > 1e-9:
        raise ValueError(f"{value!r} is not an integer or half-integer")
    return as_int


def m_values(j: Number) -> list[HalfInt]:
    """Projections of ``j`` in descending order ``j, j-1, ..., -j``."""
    tj = twice(j)
    return [HalfInt(tm) for tm in range(tj, -tj - 1, -2)]


def _fact(n: int) -> int:
    return math.factorial(n)


def _check_jm(tj: int, tm: int) -> None:
    if tj < 0:
        raise ValueError(f"negative angular momentum j={tj}/2")
    if (tj + tm) % 2:
        raise ValueError(f"j+m not integer for j={tj}/2, m={tm}/2")


def _triangle(ta: int, tb: int, tc: int) -> bool:
    """Triangle rule plus integer perimeter, on doubled arguments."""
    if (ta + tb + tc) % 2:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    a, b, c = (ta + tb - tc) // 2, (ta - tb + tc) // 2, (-ta + tb + tc) // 2
    s = (ta + tb + tc) // 2
    return Fraction(_fact(a) * _fact(b) * _fact(c), _fact(s + 1))


def _signed_sqrt(s: Fraction, sq: Fraction) -> float:
    """Return ``s * sqrt(sq)`` rounded once."""
    if s == 0 or sq == 0:
        return 0.0
    mag = math.sqrt(s * s * sq)
    return mag if s > 0 else -mag


@lru_cache(maxsize=None)
def _cg2(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tJ:
        return 0.0
    if not _triangle(tj1, tj2, tJ):
        return 0.0
    j1m1p, j1m1m = (tj1 + tm1) // 2, (tj1 - tm1) // 2
    j2m2p, j2m2m = (tj2 + tm2) // 2, (tj2 - tm2) // 2
    JMp, JMm = (tJ + tM) // 2, (tJ - tM) // 2
    a = (tj1 + tj2 - tJ) // 2
    sq = Fraction((tJ + 1) * _fact((tJ + tj1 - tj2) // 2) * _fact((tJ - tj1 + tj2) // 2) * _fact(a),
                  _fact((tj1 + tj2 + tJ) // 2 + 1))
    sq *= _fact(JMp) * _fact(JMm) * _fact(j1m1m) * _fact(j1m1p) * _fact(j2m2m) * _fact(j2m2p)
    b = (tJ - tj2 + tm1) // 2
    c = (tJ - tj1 - tm2) // 2
    kmin = max(0, -b, -c)
    kmax = min(a, j1m1m, j2m2p)
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (_fact(k) * _fact(a - k) * _fact(j1m1m - k) * _fact(j2m2p - k)
               * _fact(b + k) * _fact(c + k))
        s += Fraction(-1 if k % 2 else 1, den)
    return _signed_sqrt(s, sq)


def clebsch_gordan(j1: Number, m1: Number, j2: Number, m2: Number, J: Number, M: Number) -> float:
    """Clebsch-Gordan coefficient ``<j1 m1 j2 m2 | J M>``."""
    args = [twice(x) for x in (j1, m1, j2, m2, J, M)]
    for tj, tm in ((args[0], args[1]), (args[2], args[3]), (args[4], args[5])):
        _check_jm(tj, tm)
    return _cg2(*args)


def wigner_3j(j1: Number, j2: Number, j3: Number, m1: Number, m2: Number, m3: Number) -> float:
    tj1, tj2, tj3 = twice(j1), twice(j2), twice(j3)
    tm1, tm2, tm3 = twice(m1), twice(m2), twice(m3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        _check_jm(tj, tm)
    cg = _cg2(tj1, tm1, tj2, tm2, tj3, -tm3)
    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    return phase * cg / math.sqrt(tj3 + 1)


@lru_cache(maxsize=None)
def _sixj2(ta: int, tb: int, tc: int, td: int, te: int, tf: int) -> float:
    triads = ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc))
    if not all(_triangle(*t) for t in triads):
        return 0.0
    sq = Fraction(1)
    for t in triads:
        sq *= _delta_sq(*t)
    sums = [sum(t) // 2 for t in triads]
    p1 = (ta + tb + td + te) // 2
    p2 = (ta + tc + td + tf) // 2
    p3 = (tb + tc + te + tf) // 2
    s = Fraction(0)
    for t in range(max(sums), min(p1, p2, p3) + 1):
        den = _fact(p1 - t) * _fact(p2 - t) * _fact(p3 - t)
        for x in sums:
            den *= _fact(t - x)
        s += Fraction((-1 if t % 2 else 1) * _fact(t + 1), den)
    return _signed_sqrt(s, sq)


def wigner_6j(j1: Number, j2: Number, j3: Number, j4: Number, j5: Number, j6: Number) -> float:
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}``."""
    args = [twice(x) for x in (j1, j2, j3, j4, j5, j6)]
    if any(a < 0 for a in args):
        raise ValueError("6j arguments must be non-negative")
    return _sixj2(*args)


@lru_cache(maxsize=None)
def _ninej2(ta, tb, tc, td, te, tf, tg, th, ti) -> float:
    rows = ((ta, tb, tc), (td, te, tf), (tg, th, ti))
    cols = ((ta, td, tg), (tb, te, th), (tc, tf, ti))
    if not all(_triangle(*t) for t in rows + cols):
        return 0.0
    lo = max(abs(th - td), abs(tb - tf), abs(ta - ti))
    hi = min(th + td, tb + tf, ta + ti)
    terms = []
    for tx in range(lo, hi + 1, 2):
        term = (_sixj2(ta, tb, tc, tf, ti, tx) * _sixj2(td, te, tf, tb, tx, th)
                * _sixj2(tg, th, ti, tx, ta, td))
        if term:
            terms.append((tx + 1) * (-term if tx % 2 else term))
    return math.fsum(terms)


def wigner_9j(j1, j2, j3, j4, j5, j6, j7, j8, j9) -> float:
    """Wigner 9j symbol with rows ``(j1 j2 j3), (j4 j5 j6), (j7 j8 j9)``."""
    args = [twice(x) for x in (j1, j2, j3, j4, j5, j6, j7, j8, j9)]
    if any(a < 0 for a in args):
        raise ValueError("9j arguments must be non-negative")
    return _ninej2(*args)


def wigner_small_d(j: Number, mp: Number, m: Number, theta: float) -> float:
    """Rotation matrix element ``d^j_{mp, m}(theta) = <j mp| exp(-i theta J_y) |j m>``."""
    tj, tmp, tm = twice(j), twice(mp), twice(m)
    _check_jm(tj, tmp)
    _check_jm(tj, tm)
    if abs(tmp) > tj or abs(tm) > tj:
        raise ValueError("|m| exceeds j")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _small_d_sum(tj, tmp, tm, c, s)


def _small_d_sum(tj: int, tmp: int, tm: int, c: float, s: float) -> float:
    dm = (tmp - tm) // 2
    jmmp = (tj - tmp) // 2
    jpm = (tj + tm) // 2
    root = math.sqrt(_fact((tj + tmp) // 2) * _fact(jmmp) * _fact(jpm) * _fact((tj - tm) // 2))
    total = 0.0
    for k in range(max(0, -dm), min(jpm, jmmp) + 1):
        den = _fact(jpm - k) * _fact(k) * _fact(jmmp - k) * _fact(k + dm)
        sign = -1 if (k + dm) % 2 else 1
        total += sign * (root / den) * c ** (tj - 2 * k - dm) * s ** (2 * k + dm)
    return total


def wigner_d_matrix(j: Number, theta: float) -> np.ndarray:
    """Full ``d^j(theta)`` with rows ``mp`` and columns ``m``, both in descending order."""
    tj = twice(j)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ms = range(tj, -tj - 1, -2)
    return np.array([[_small_d_sum(tj, tmp, tm, c, s) for tm in ms] for tmp in ms])
