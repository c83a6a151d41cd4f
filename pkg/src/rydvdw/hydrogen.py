"""Closed-form hydrogen radial dipole integrals (reference values).

Gordon's formula for ``int R_{n,l} R_{n',l-1} r^3 dr`` evaluated in exact
rational arithmetic; radial functions carry the textbook phase (positive at
the origin).
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import factorial

__all__ = ["gordon_integral", "numerov_phase"]


def _hyp2f1(a: int, b: int, c: int, z: Fraction) -> Fraction:
    total = term = Fraction(1)
    k = 0
    while (a + k) * (b + k) != 0:
        term = term * (a + k) * (b + k) * z / ((c + k) * (k + 1))
        total += term
        k += 1
    return total


def gordon_integral(n: int, l: int, n1: int) -> float:
    """``int R_{n l} R_{n1, l-1} r^3 dr`` in units of ``a0`` (``l >= 1``)."""
    if l < 1 or n <= l or n1 < l:
        raise ValueError("need l >= 1, n > l and n1 > l - 1")
    if n == n1:
        return -1.5 * n * math.sqrt(n * n - l * l)
    z = Fraction(-4 * n * n1, (n - n1) ** 2)
    f1 = _hyp2f1(-(n - l - 1), -(n1 - l), 2 * l, z)
    f2 = _hyp2f1(-(n - l - 1) - 2, -(n1 - l), 2 * l, z)
    bracket = f1 - Fraction(n - n1, n + n1) ** 2 * f2
    value = (Fraction(4 * n * n1) ** (l + 1) * Fraction(n - n1) ** (n + n1 - 2 * l - 2)
             / Fraction(n + n1) ** (n + n1) * bracket / (4 * factorial(2 * l - 1)))
    root = math.sqrt(Fraction(factorial(n + l) * factorial(n1 + l - 1),
                              factorial(n - l - 1) * factorial(n1 - l)))
    return (-1 if (n1 - l) % 2 else 1) * float(value) * root


def numerov_phase(n: int, l: int) -> int:
    """Sign relating the textbook phase to the outer-lobe-positive convention."""
    return -1 if (n - l - 1) % 2 else 1
