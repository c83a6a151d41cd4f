"""Direct integration of the collective excitation amplitude equations.

Two levels of truncation are offered:

``mode="collective"``
    Ground state ``|g>``, the symmetric singly-excited state ``|s>`` and the
    doubly-excited pair eigenstates ``|phi kl>``::

        i dc_g/dt   = (Omega_N/2) c_s
        i dc_s/dt   = (Omega_N/2) c_g + sum (Omega_N/N) kappa*_{phi kl} c_{phi kl}
        i dc_phi/dt = Delta_{phi kl} c_{phi kl} + (Omega_N/N) kappa_{phi kl} c_s

``mode="full"``
    Every state with at most two Rydberg excitations: singly-excited
    states orthogonal to ``|s>`` are then populated through the
    doubly-excited states, which gives the loss ``P1'`` out of the
    ``{|g>, |s>}`` subspace.

Frequencies are angular (rad/us) and times are in us; any consistent pair of
units works because only ``Omega t`` and ``Delta t`` enter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.optimize import minimize_scalar

__all__ = [
    "DEFAULT_RTOL",
    "IntegrationError",
    "PairShifts",
    "BlockadeODESystem",
    "PulseSpec",
    "Trajectory",
    "integrate",
    "compare_perturbative",
    "rabi_two_level",
]

DEFAULT_RTOL = 1e-9


class IntegrationError(RuntimeError):
    """The ODE integrator failed to reach the requested tolerance."""


@dataclass
class PairShifts:
    """Eigen-shifts of one atom pair and its eigenvectors in the lab frame.

    ``vectors[:, phi]`` is ``|phi>`` on the two-atom product basis of
    Rydberg sublevels (atom ``k`` index major).
    """

    deltas: np.ndarray
    vectors: np.ndarray

    def __post_init__(self) -> None:
        self.deltas = np.asarray(self.deltas, dtype=float).reshape(-1)
        self.vectors = np.asarray(self.vectors, dtype=complex)
        if self.vectors.shape != (self.deltas.size, self.deltas.size):
            raise ValueError("vectors must be square with one column per shift")


@dataclass
class BlockadeODESystem:
    """Atoms driven from ``|g>`` to a single-atom Rydberg ket ``gamma``.

    Parameters
    ----------
    rabi : sequence of float
        Per-atom Rabi frequencies ``Omega_gamma_k``.
    gamma : ndarray
        Normalised single-atom Rydberg ket (length ``d``).
    pairs : dict
        ``(k, l) -> PairShifts`` for every ``k < l``.
    """

    rabi: Sequence[float]
    gamma: np.ndarray
    pairs: dict[tuple[int, int], PairShifts]

    def __post_init__(self) -> None:
        self.rabi = np.asarray(self.rabi, dtype=float)
        g = np.asarray(self.gamma, dtype=complex).reshape(-1)
        self.gamma = g / np.linalg.norm(g)
        n = self.n_atoms
        if n < 1:
            raise ValueError("need at least one atom")
        want = set(combinations(range(n), 2))
        if set(self.pairs) != want:
            raise ValueError(f"pair shifts required for exactly the pairs {sorted(want)}")
        d = self.gamma.size
        for p in self.pairs.values():
            if p.deltas.size != d * d:
                raise ValueError("pair space dimension must be d^2")

    @classmethod
    def scalar(cls, rabi: Sequence[float], shifts: dict[tuple[int, int], float]) -> "BlockadeODESystem":
        """One Rydberg sublevel per atom; ``shifts[(k, l)]`` is the pair shift."""
        return cls(rabi, np.ones(1), {kl: PairShifts([v], np.ones((1, 1))) for kl, v in shifts.items()})

    @property
    def n_atoms(self) -> int:
        return len(self.rabi)

    @property
    def dim(self) -> int:
        return self.gamma.size

    @property
    def omega_n(self) -> float:
        return float(np.sqrt(np.sum(self.rabi ** 2)))

    @property
    def omega_0(self) -> float:
        return self.omega_n / math.sqrt(self.n_atoms)

    def kappas(self) -> dict[tuple[int, int], np.ndarray]:
        """``kappa_phi kl = (Omega_k Omega_l / Omega_0^2) <phi|gamma gamma>``."""
        gg = np.kron(self.gamma, self.gamma)
        return {(k, l): self.rabi[k] * self.rabi[l] / self.omega_0 ** 2 * (p.vectors.conj().T @ gg)
                for (k, l), p in self.pairs.items()}

    def perturbative_p2(self) -> float:
        """``(Omega_N^2/N^2) sum |kappa/Delta|^2`` (adiabatic double-excitation probability)."""
        tot = 0.0
        for kl, kap in self.kappas().items():
            dl = self.pairs[kl].deltas
            use = np.abs(kap) > 1e-14
            tot += float(np.sum(np.abs(kap[use] / dl[use]) ** 2))
        return self.omega_n ** 2 / self.n_atoms ** 2 * tot

    def perturbative_shift(self) -> float:
        """``delta_nu = (Omega_N^2/N^2) sum |kappa|^2/Delta``."""
        tot = 0.0
        for kl, kap in self.kappas().items():
            dl = self.pairs[kl].deltas
            use = np.abs(kap) > 1e-14
            tot += float(np.sum(np.abs(kap[use]) ** 2 / dl[use]))
        return self.omega_n ** 2 / self.n_atoms ** 2 * tot

    # -- Hamiltonians --------------------------------------------------------------

    def _pair_offsets(self) -> tuple[dict, int]:
        off, pos = {}, 0
        for kl in sorted(self.pairs):
            off[kl] = pos
            pos += self.dim ** 2
        return off, pos

    def collective_hamiltonian(self) -> np.ndarray:
        """Hamiltonian on ``(g, s, phi_kl ...)``."""
        off, nd = self._pair_offsets()
        h = np.zeros((2 + nd, 2 + nd), dtype=complex)
        on, n = self.omega_n, self.n_atoms
        h[0, 1] = h[1, 0] = on / 2
        for kl, kap in self.kappas().items():
            sl = slice(2 + off[kl], 2 + off[kl] + self.dim ** 2)
            h[sl, sl] = np.diag(self.pairs[kl].deltas)
            h[sl, 1] = on / n * kap
            h[1, sl] = on / n * kap.conj()
        return h

    def full_hamiltonian(self) -> np.ndarray:
        """Hamiltonian on ``g``, all single excitations ``|u_k>`` and pair eigenstates."""
        d, n = self.dim, self.n_atoms
        off, nd = self._pair_offsets()
        n1 = 1 + n * d
        h = np.zeros((n1 + nd, n1 + nd), dtype=complex)
        for k in range(n):
            h[1 + k * d:1 + (k + 1) * d, 0] = self.rabi[k] / 2 * self.gamma
        eye = np.eye(d)
        shifts = np.zeros(n1 + nd)
        for (k, l), p in self.pairs.items():
            base = n1 + off[(k, l)]
            vh = p.vectors.conj().T
            shifts[base:base + d * d] = p.deltas
            # exciting atom l on top of |u_k>, and atom k on top of |u_l>
            up_l = vh @ np.kron(eye, self.gamma[:, None]) * (self.rabi[l] / 2)
            up_k = vh @ np.kron(self.gamma[:, None], eye) * (self.rabi[k] / 2)
            h[base:base + d * d, 1 + k * d:1 + (k + 1) * d] += up_l
            h[base:base + d * d, 1 + l * d:1 + (l + 1) * d] += up_k
        return h + h.conj().T + np.diag(shifts)

    def symmetric_state(self) -> np.ndarray:
        """``|s>`` on the single-excitation block of the full basis."""
        d = self.dim
        v = np.zeros(self.n_atoms * d, dtype=complex)
        for k in range(self.n_atoms):
            v[k * d:(k + 1) * d] = self.rabi[k] / self.omega_n * self.gamma
        return v


@dataclass(frozen=True)
class PulseSpec:
    """Resonant (or detuned) square pulse of duration ``T``."""

    duration: float
    detuning: float = 0.0
    rtol: float = DEFAULT_RTOL
    samples: int = 401

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("pulse duration must be positive")
        if self.samples < 2:
            raise ValueError("need at least two output samples")


@dataclass
class Trajectory:
    """Sampled amplitudes: ``c_g``, ``c_s``, doubly-excited amplitudes, and ``P1_perp``."""

    t: np.ndarray
    c_g: np.ndarray
    c_s: np.ndarray
    c_double: np.ndarray
    p1_perp: np.ndarray
    pair_slices: dict = field(default_factory=dict)
    mode: str = "collective"

    @property
    def p2(self) -> np.ndarray:
        return np.sum(np.abs(self.c_double) ** 2, axis=0)

    @property
    def norm(self) -> np.ndarray:
        return np.abs(self.c_g) ** 2 + np.abs(self.c_s) ** 2 + self.p2 + self.p1_perp

    def pair_population(self, kl: tuple[int, int]) -> np.ndarray:
        return np.sum(np.abs(self.c_double[self.pair_slices[kl]]) ** 2, axis=0)

    def rows(self) -> list[dict]:
        return [{"t_us": float(t), "pop_g": float(abs(g) ** 2), "pop_s": float(abs(s) ** 2),
                 "P2": float(p2), "P1_perp": float(pp)}
                for t, g, s, p2, pp in zip(self.t, self.c_g, self.c_s, self.p2, self.p1_perp)]


def integrate(system: BlockadeODESystem, pulse: PulseSpec, mode: str = "collective",
              drop_doubles: bool = False) -> Trajectory:
    """Integrate from ``c_g = 1`` over the pulse with an adaptive 8th-order Runge-Kutta."""
    if mode not in ("collective", "full"):
        raise ValueError("mode must be 'collective' or 'full'")
    d2 = system.dim ** 2
    off, nd = system._pair_offsets()
    if mode == "collective":
        h = system.collective_hamiltonian()
        first_double = 2
    else:
        h = system.full_hamiltonian()
        first_double = 1 + system.n_atoms * system.dim
    # detuning shifts every excitation by -detuning per Rydberg atom
    nexc = np.zeros(h.shape[0])
    if mode == "collective":
        nexc[1] = 1
    else:
        nexc[1:first_double] = 1
    nexc[first_double:] = 2
    h = h - pulse.detuning * np.diag(nexc)
    if drop_doubles:
        h = h[:first_double, :first_double]
    y0 = np.zeros(h.shape[0], dtype=complex)
    y0[0] = 1.0
    t_eval = np.linspace(0.0, pulse.duration, pulse.samples)
    sol = solve_ivp(lambda t, y: -1j * (h @ y), (0.0, pulse.duration), y0, method="DOP853",
                    t_eval=t_eval, rtol=pulse.rtol, atol=pulse.rtol * 1e-3)
    if not sol.success:
        raise IntegrationError(f"integration failed after {sol.t.size} steps at t = {sol.t[-1]:.6g}: "
                               f"{sol.message}")
    y = sol.y
    slices = {kl: slice(o, o + d2) for kl, o in off.items()}
    doubles = y[first_double:] if not drop_doubles else np.zeros((0, y.shape[1]), dtype=complex)
    if mode == "collective":
        c_s = y[1]
        perp = np.zeros(y.shape[1])
    else:
        sv = system.symmetric_state()
        singles = y[1:first_double]
        c_s = sv.conj() @ singles
        perp = np.maximum(np.sum(np.abs(singles) ** 2, axis=0) - np.abs(c_s) ** 2, 0.0)
    return Trajectory(sol.t, y[0], c_s, doubles, perp, slices, mode)


def rabi_two_level(omega: float, detuning: float, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``c_g, c_s`` of ``i dc_g = (W/2) c_s, i dc_s = (W/2) c_g + detuning c_s``."""
    w = math.hypot(omega, detuning)
    ph = np.exp(-0.5j * detuning * t)
    c_g = ph * (np.cos(w * t / 2) + 1j * detuning / w * np.sin(w * t / 2))
    c_s = ph * (-1j * omega / w * np.sin(w * t / 2))
    return c_g, c_s


def compare_perturbative(system: BlockadeODESystem, pulse: PulseSpec | None = None) -> dict:
    """Simulated versus perturbative double excitation, resonance shift and ``P1'``.

    ``P2_sim`` is the time-averaged doubly-excited population divided by the
    time-averaged ``|c_s|^2`` (the adiabatic amplitudes scale with ``c_s``);
    ``delta_nu_sim`` is the detuning of the best-fitting two-level Rabi
    oscillation of ``c_g``.
    """
    omega = system.omega_n
    kap = system.kappas()
    dmin = min(float(np.min(np.abs(p.deltas[np.abs(kap[kl]) > 1e-12]), initial=np.inf))
               for kl, p in system.pairs.items())
    ratio = dmin / omega
    if ratio < 5:
        warnings.warn(f"Delta/Omega_N = {ratio:.3g} is outside the perturbative regime (>= 5)", stacklevel=2)
    if pulse is None:
        pulse = PulseSpec(4 * math.pi / omega, samples=2001)
    tr = integrate(system, pulse, "collective")
    pop_s = np.abs(tr.c_s) ** 2
    p2_sim = float(trapezoid(tr.p2, tr.t) / trapezoid(pop_s, tr.t))

    def misfit(det: float) -> float:
        cg, _ = rabi_two_level(omega, det, tr.t)
        return float(np.sum(np.abs(cg - tr.c_g) ** 2))

    span = max(4 * abs(system.perturbative_shift()), 0.1 * omega)
    fit = minimize_scalar(misfit, bounds=(-span, span), method="bounded",
                          options={"xatol": 1e-12 * omega})
    full = integrate(system, pulse, "full")
    p1_sim = float(trapezoid(full.p1_perp, full.t) / trapezoid(np.abs(full.c_s) ** 2, full.t))
    return {
        "Delta_over_Omega": ratio,
        "P2_sim": p2_sim,
        "P2_formula": system.perturbative_p2(),
        "delta_nu_sim": -float(fit.x),
        "delta_nu_formula": system.perturbative_shift(),
        "P1_prime_sim": p1_sim,
        "max_norm_error": float(np.max(np.abs(tr.norm - 1.0))),
    }
