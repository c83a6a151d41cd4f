"""Physical constants and unit conversions (CODATA via :mod:`scipy.constants`).

Energies are expressed as frequencies ``E/h`` in GHz, lengths in Bohr radii
for atomic quantities and in micrometres for interatomic distances.
"""

from __future__ import annotations

from scipy import constants as _sc

#: Bohr radius in micrometres.
A0_UM: float = _sc.physical_constants["Bohr radius"][0] * 1e6

#: Hartree energy as a frequency in GHz.
HARTREE_GHZ: float = _sc.physical_constants["hartree-hertz relationship"][0] * 1e-9

#: Wavenumber to frequency: 1 cm^-1 in GHz.
INV_CM_GHZ: float = _sc.c * 100.0 * 1e-9

#: ``e^2 a0^2 / (4 pi eps0 h)`` in GHz um^3: converts a product of two radial
#: integrals (in a0^2) into a resonant dipole-dipole strength C3.
DIPOLE_DIPOLE_GHZ_UM3: float = HARTREE_GHZ * A0_UM ** 3

#: ``e^2 / (4 pi eps0 h)`` in GHz um: Coulomb energy at one micrometre.
COULOMB_GHZ_UM: float = HARTREE_GHZ * A0_UM


def c3_from_radial(r_s: float, r_t: float) -> float:
    """C3 in GHz um^3 for radial integrals ``r_s``, ``r_t`` given in a0."""
    return DIPOLE_DIPOLE_GHZ_UM3 * r_s * r_t
