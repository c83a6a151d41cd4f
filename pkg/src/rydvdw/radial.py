"""Quantum-defect radial wavefunctions and radial dipole integrals.

Wavefunctions are Coulomb solutions at the quantum-defect energy
``E = -1/(2 n*^2)`` (atomic units), obtained by Numerov integration inward
from ``r = 2n(n+15)`` on a grid uniform in ``x = sqrt(r)``.  With
``P(r) = x^{1/2} y(x)`` the radial equation becomes

    y'' = [ (2l + 1/2)(2l + 3/2)/x^2 + 8 x^2 (V(r) - E) ] y,   V = -1/r,

which is free of first derivatives and so suits Numerov's method.

Phase convention: ``P(r) > 0`` in the outermost lobe.  Hydrogen functions
with the textbook convention (positive at the origin) differ from these by
``(-1)^(n-l-1)``.

Inner truncation: for non-integer ``n*`` the inward solution picks up the
irregular Coulomb function, which grows towards the origin.  Integration stops
at the first point inside the innermost classical turning point where ``|y|``
grows inward, or at the species' inner cutoff radius, whichever is reached
first; the wavefunction is zero inside.  For hydrogen neither condition
triggers and the integration runs to the first grid point.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy import integrate

from ._accel import NUMBA_ENABLED, njit
from .channels import L_LETTERS
from .species import SpeciesModel, StateLabel, get_species

__all__ = [
    "DEFAULT_STEP",
    "RadialWavefunction",
    "RadialME",
    "RadialIntegrationError",
    "radial_wavefunction",
    "radial_matrix_element",
    "semiclassical_radial_me",
    "anger_j",
    "matrix_element_scan",
    "numerov_inward",
    "numerov_inward_py",
    "numerov_inputs",
]

DEFAULT_STEP = 0.01


class RadialIntegrationError(RuntimeError):
    """Numerov integration produced an unusable wavefunction."""


def numerov_inward_py(g: np.ndarray, h: float, y_last: float, y_prev: float,
                      i_turn: int, i_stop: int) -> tuple[np.ndarray, int]:
    """Pure-Python reference kernel for ``y'' = g y`` integrated inward.

    Parameters
    ----------
    g : ndarray
        ``g(x_i)`` on the uniform grid.
    h : float
        Grid step.
    y_last, y_prev : float
        Starting values at the last two grid points.
    i_turn : int
        Index of the innermost classical turning point; divergence checks
        apply only below it.
    i_stop : int
        Lowest index that may be reached (inner cutoff).

    Returns
    -------
    y : ndarray
        Solution, zero below the truncation index.
    i_min : int
        First index holding a retained value.
    """
    n = g.shape[0]
    y = np.zeros(n)
    y[n - 1] = y_last
    y[n - 2] = y_prev
    c = h * h / 12.0
    i_min = i_stop
    for i in range(n - 3, i_stop - 1, -1):
        a = 1.0 - c * g[i]
        y[i] = ((2.0 + 10.0 * c * g[i + 1]) * y[i + 1] - (1.0 - c * g[i + 2]) * y[i + 2]) / a
        if i < i_turn and abs(y[i]) > abs(y[i + 1]):
            y[i] = 0.0
            i_min = i + 1
            break
    return y, i_min


numerov_inward = njit(cache=False)(numerov_inward_py)


def _kernel():
    # resolved at call time so tests can compare both paths in one process
    if os.environ.get("RYDVDW_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}:
        return numerov_inward_py
    return numerov_inward


@dataclass(frozen=True)
class RadialWavefunction:
    """Sampled ``P(r)`` normalised to ``int P^2 dr = 1``.

    ``k0`` is the integer grid offset: ``x_i = (k0 + i) * step``, so functions
    computed with the same step share grid points and can be overlapped by
    index arithmetic.
    """

    state: StateLabel
    n_star: float
    step: float
    k0: int
    y: np.ndarray
    norm_check: float

    @property
    def x(self) -> np.ndarray:
        return (self.k0 + np.arange(len(self.y))) * self.step

    @property
    def grid(self) -> np.ndarray:
        """Radii in a0 (non-uniform)."""
        return self.x ** 2

    @property
    def values(self) -> np.ndarray:
        """``P(r)`` on :attr:`grid`."""
        return np.sqrt(self.x) * self.y

    @property
    def node_count(self) -> int:
        # ignore the round-off tail near the origin, where inward integration
        # leaves sign flips at the 1e-8 level of the peak
        p = self.values
        v = p[np.abs(p) > 1e-6 * np.abs(p).max()]
        return int(np.count_nonzero(np.diff(np.sign(v)) != 0))


@dataclass(frozen=True)
class RadialME:
    """Signed radial integral ``<a| r |b>`` in a0."""

    bra: StateLabel
    ket: StateLabel
    value: float
    method: str


def _turning_point(n_star: float, l: int) -> float:
    """Innermost classical turning point of ``l(l+1)/2r^2 - 1/r - E = 0``."""
    disc = 1.0 - l * (l + 1) / n_star ** 2
    if disc <= 0:
        return n_star ** 2
    return n_star ** 2 * (1.0 - math.sqrt(disc))


def numerov_inputs(n: int, l: int, n_star: float, inner_cutoff: float,
                   step: float = DEFAULT_STEP) -> tuple[np.ndarray, tuple]:
    """Grid ``x`` and the argument tuple of :func:`numerov_inward` for one level.

    The sweep starts at ``r = 2n(n+15)`` deep in the decaying tail, seeded
    with the local WKB growth ratio.
    """
    r_out = 2.0 * n * (n + 15)
    k_max = int(math.ceil(math.sqrt(r_out) / step))
    k_stop = max(1, int(math.ceil(math.sqrt(inner_cutoff) / step)))
    x = np.arange(0, k_max + 1) * step
    x[0] = step  # placeholder, never used
    energy = -0.5 / n_star ** 2
    g = (2 * l + 0.5) * (2 * l + 1.5) / x ** 2 + 8.0 * x ** 2 * (-1.0 / x ** 2 - energy)
    k_turn = int(math.floor(math.sqrt(_turning_point(n_star, l)) / step))
    kappa = math.sqrt(max(g[-1], 1e-300))
    y_last = 1e-30
    y_prev = y_last * math.exp(kappa * step)
    return x, (g, step, y_last, y_prev, k_turn, k_stop)


@lru_cache(maxsize=4096)
def _wavefunction(n: int, l: int, n_star: float, inner_cutoff: float, step: float,
                  use_py: bool) -> tuple[int, np.ndarray, float]:
    x, args = numerov_inputs(n, l, n_star, inner_cutoff, step)
    kern = numerov_inward_py if use_py else _kernel()
    y, k_min = kern(*args)
    y = np.asarray(y)[k_min:]
    xs = x[k_min:]
    norm = 2.0 * _simpson(y * y * xs * xs, step)
    if not np.isfinite(norm) or norm <= 0:
        raise RadialIntegrationError(f"norm {norm} for n={n}, l={l}, n*={n_star}")
    y = y / math.sqrt(norm)
    check = 2.0 * _simpson(y * y * xs * xs, step)
    return k_min, y, check


def _simpson(f: np.ndarray, h: float) -> float:
    return float(integrate.simpson(f, dx=h))


def radial_wavefunction(state: StateLabel, species: SpeciesModel | str | None = None,
                        step: float = DEFAULT_STEP, accelerated: bool | None = None) -> RadialWavefunction:
    """Quantum-defect radial wavefunction of ``state``.

    Parameters
    ----------
    state : StateLabel
        Level to compute.
    species : SpeciesModel or str, optional
        Defaults to the bundled species named by ``state.species``.
    step : float
        Grid step in ``x = sqrt(r)`` (units of sqrt(a0)).
    accelerated : bool, optional
        Force the compiled (True) or pure-Python (False) kernel.
    """
    sp = get_species(species if species is not None else state.species)
    n_star = sp.n_star(state.n, state.l, state.tj)
    use_py = (accelerated is False) or (accelerated is None and not _numba_active())
    k0, y, check = _wavefunction(state.n, state.l, round(n_star, 12), sp.inner_cutoff_radius,
                                 step, use_py)
    if abs(check - 1.0) > 1e-6:
        raise RadialIntegrationError(f"norm check {check} for {state}")
    return RadialWavefunction(state, n_star, step, k0, y, check)


def _numba_active() -> bool:
    return NUMBA_ENABLED and _kernel() is numerov_inward


def _overlap_r(a: RadialWavefunction, b: RadialWavefunction) -> float:
    if a.step != b.step:
        raise ValueError("wavefunctions on different grids")
    lo = max(a.k0, b.k0)
    hi = min(a.k0 + len(a.y), b.k0 + len(b.y))
    if hi - lo < 3:
        return 0.0
    ya = a.y[lo - a.k0:hi - a.k0]
    yb = b.y[lo - b.k0:hi - b.k0]
    x = (lo + np.arange(hi - lo)) * a.step
    # int P_a P_b r dr with P = x^{1/2} y, r = x^2, dr = 2x dx
    return 2.0 * _simpson(ya * yb * x ** 4, a.step)


def radial_matrix_element(a: StateLabel, b: StateLabel, species: SpeciesModel | str | None = None,
                          step: float = DEFAULT_STEP) -> RadialME:
    """Signed ``int P_a(r) r P_b(r) dr`` in a0 from quantum-defect wavefunctions."""
    if abs(a.l - b.l) != 1:
        raise ValueError(f"radial dipole integral needs |l_a - l_b| = 1, got {a.l} and {b.l}")
    sp = get_species(species if species is not None else a.species)
    value = _cached_me(a, b, sp, step)
    return RadialME(a, b, value, "numerov")


@lru_cache(maxsize=65536)
def _cached_me(a: StateLabel, b: StateLabel, sp: SpeciesModel, step: float) -> float:
    if b < a:
        return _cached_me(b, a, sp, step)
    wa = radial_wavefunction(a, sp, step)
    wb = radial_wavefunction(b, sp, step)
    return _overlap_r(wa, wb)


def anger_j(nu: float, z: float) -> float:
    """Anger function ``J_nu(z) = (1/pi) int_0^pi cos(nu t - z sin t) dt``."""
    val, _ = integrate.quad(lambda t: math.cos(nu * t - z * math.sin(t)), 0.0, math.pi,
                            limit=200, epsabs=1e-13, epsrel=1e-12)
    return val / math.pi


def semiclassical_radial_me(a: StateLabel, b: StateLabel,
                            species: SpeciesModel | str | None = None) -> RadialME:
    """Semiclassical (Kaulakys) estimate of the radial integral, in a0.

    Uses the effective quantum numbers only, so it is independent of the
    numerical wavefunctions and serves as a cross-check for them.  The sign
    convention matches :func:`radial_matrix_element`.
    """
    if abs(a.l - b.l) != 1:
        raise ValueError(f"radial dipole integral needs |l_a - l_b| = 1, got {a.l} and {b.l}")
    sp = get_species(species if species is not None else a.species)
    nu = sp.n_star(a.n, a.l, a.tj)
    nu1 = sp.n_star(b.n, b.l, b.tj)
    l_c = (a.l + b.l + 1) / 2.0
    nu_c = math.sqrt(nu * nu1)
    d_nu = nu - nu1
    d_l = b.l - a.l
    gamma = d_l * l_c / nu_c
    if abs(d_nu) < 1e-12:
        g0, g1, g2, g3 = 1.0, 0.0, 0.0, 0.0
    else:
        jm = anger_j(d_nu - 1.0, -d_nu)
        jp = anger_j(d_nu + 1.0, -d_nu)
        g0 = (jm - jp) / (3.0 * d_nu)
        g1 = -(jm + jp) / (3.0 * d_nu)
        g2 = g0 - math.sin(math.pi * d_nu) / (math.pi * d_nu)
        g3 = 0.5 * d_nu * g0 + g1
    value = 1.5 * nu_c ** 2 * math.sqrt(max(0.0, 1.0 - (l_c / nu_c) ** 2)) * (
        g0 + gamma * g1 + gamma ** 2 * g2 + gamma ** 3 * g3)
    return RadialME(a, b, value, "semiclassical")


def matrix_element_scan(species: SpeciesModel | str, l_i: int, tj_i: int, l_f: int, tj_f: int,
                        n_values: Iterable[int], offsets: Iterable[int] = range(-4, 5),
                        method: str = "numerov") -> list[dict]:
    """Scaled radial integrals ``<n l_i j_i | r | (n+dn) l_f j_f> / n^2`` over ``n``.

    Returns one row per ``(n, dn)`` with keys ``n``, ``n_f``, ``me_a0`` and
    ``scaled``.
    """
    sp = get_species(species)
    fn = radial_matrix_element if method == "numerov" else semiclassical_radial_me
    rows = []
    for n in n_values:
        a = StateLabel(sp.name, n, l_i, tj_i)
        for dn in offsets:
            nf = n + dn
            if nf <= l_f:
                continue
            b = StateLabel(sp.name, nf, l_f, tj_f)
            v = fn(a, b, sp).value
            rows.append({"n": n, "n_f": nf, "me_a0": v, "scaled": v / n ** 2})
    return rows


def transition_label(l_i: int, tj_i: int, l_f: int, tj_f: int) -> str:
    return f"{L_LETTERS[l_i]}{tj_i}/2->{L_LETTERS[l_f]}{tj_f}/2"
