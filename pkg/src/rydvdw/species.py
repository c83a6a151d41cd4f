"""Species data, state labels and quantum-defect energies.

Species files are INI-style text with one ``[species]`` section and one
section per fine-structure series named like ``[p3/2]``::

    [species]
    name = Rb
    rydberg_constant_ghz = 3289820.6546
    inner_cutoff_radius = 2.085
    citation = ...

    [p3/2]
    delta0 = 2.6416737
    delta2 = 0.2950
    delta4 = 0.0        ; optional, as are higher even orders
    citation = ...

Bundled files live in the package ``data`` directory; the environment variable
``RYDVDW_DATA_DIR`` points the loader at another directory.
"""

from __future__ import annotations

import configparser
import os
import re
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .channels import L_LETTERS, parse_lj

__all__ = [
    "SpeciesLoadError",
    "SpeciesModel",
    "StateLabel",
    "DATA_DIR_ENV",
    "REQUIRED_SERIES",
    "data_dir",
    "load_species",
    "get_species",
    "parse_state",
    "energy",
]

DATA_DIR_ENV = "RYDVDW_DATA_DIR"
_BUNDLED = Path(__file__).resolve().parent / "data"

#: ``(l, 2j)`` series every species file must provide.
REQUIRED_SERIES: tuple[tuple[int, int], ...] = ((0, 1), (1, 1), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7))

_MAX_N = 200


class SpeciesLoadError(ValueError):
    """A species data file is missing, incomplete or malformed."""


@dataclass(frozen=True, eq=False)
class SpeciesModel:
    """Quantum-defect description of one alkali species.

    Attributes
    ----------
    name : str
        Element symbol used in state specs and output.
    rydberg_constant_ghz : float
        Mass-corrected Rydberg constant as a frequency.
    defects : dict
        ``(l, 2j) -> (delta0, delta2, delta4, ...)`` Rydberg-Ritz coefficients.
    inner_cutoff_radius : float
        Radius (a0) inside which quantum-defect wavefunctions are not used.
    provenance : dict
        Citation strings keyed by ``"species"`` and by series label.
    """

    name: str
    rydberg_constant_ghz: float
    defects: dict[tuple[int, int], tuple[float, ...]]
    inner_cutoff_radius: float = 0.0
    provenance: dict[str, str] = field(default_factory=dict)

    def quantum_defect(self, n: int, l: int, tj: int) -> float:
        """Rydberg-Ritz ``delta(n) = d0 + d2/(n-d0)^2 + d4/(n-d0)^4 + ...``."""
        try:
            coeffs = self.defects[(l, tj)]
        except KeyError:
            raise ValueError(f"{self.name} has no quantum defects for {L_LETTERS[l]}{tj}/2") from None
        d0 = coeffs[0]
        x = 1.0 / (n - d0) ** 2
        return d0 + sum(c * x ** (k + 1) for k, c in enumerate(coeffs[1:]))

    def n_star(self, n: int, l: int, tj: int) -> float:
        return n - self.quantum_defect(n, l, tj)

    def state(self, n: int, l: int, j: float | int | str) -> "StateLabel":
        from .angular import twice
        return StateLabel(self.name, n, l, twice(j))


@dataclass(frozen=True, order=True)
class StateLabel:
    """A fine-structure level ``n l_j`` of a species; ``tj`` stores ``2j``."""

    species: str
    n: int
    l: int
    tj: int

    def __post_init__(self) -> None:
        if self.l < 0 or self.n <= self.l:
            raise ValueError(f"need n > l >= 0, got n={self.n}, l={self.l}")
        if self.n > _MAX_N:
            raise ValueError(f"n={self.n} exceeds the supported maximum {_MAX_N}")
        if self.tj not in (2 * self.l - 1, 2 * self.l + 1) or self.tj < 1:
            raise ValueError(f"j={self.tj}/2 incompatible with l={self.l}")

    @property
    def j(self) -> float:
        return self.tj / 2

    @property
    def lj(self) -> tuple[int, int]:
        return (self.l, self.tj)

    @property
    def label(self) -> str:
        return f"{self.n}{L_LETTERS[self.l]}{self.tj}/2"

    def __str__(self) -> str:
        return f"{self.species} {self.label}"


def data_dir() -> Path:
    """Directory searched for ``<name>.ini`` species files."""
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else _BUNDLED


def _parse_float(section: str, key: str, raw: str, path: Path) -> float:
    try:
        return float(raw)
    except ValueError:
        raise SpeciesLoadError(f"{path}: [{section}] {key} = {raw!r} is not a number") from None


def load_species(path: str | os.PathLike) -> SpeciesModel:
    """Read and validate a species data file.

    Raises
    ------
    SpeciesLoadError
        If the file is unreadable, lacks a required series, or holds
        malformed numbers.
    """
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise SpeciesLoadError(f"cannot read species file {path}: {exc}") from None
    except configparser.Error as exc:
        raise SpeciesLoadError(f"{path}: malformed species file: {exc}") from None
    if not cp.has_section("species"):
        raise SpeciesLoadError(f"{path}: missing [species] section")
    head = cp["species"]
    for key in ("name", "rydberg_constant_ghz"):
        if key not in head:
            raise SpeciesLoadError(f"{path}: [species] lacks '{key}'")
    ry = _parse_float("species", "rydberg_constant_ghz", head["rydberg_constant_ghz"], path)
    if ry <= 0:
        raise SpeciesLoadError(f"{path}: rydberg_constant_ghz must be positive")
    cutoff = _parse_float("species", "inner_cutoff_radius", head.get("inner_cutoff_radius", "0"), path)
    provenance = {"species": head.get("citation", "")}
    defects: dict[tuple[int, int], tuple[float, ...]] = {}
    for sec in cp.sections():
        if sec == "species":
            continue
        try:
            l2, tj = parse_lj(sec)
        except ValueError:
            raise SpeciesLoadError(f"{path}: section [{sec}] is not a series label like 'p3/2'") from None
        if tj is None:
            raise SpeciesLoadError(f"{path}: section [{sec}] needs an explicit j")
        body = cp[sec]
        if "delta0" not in body:
            raise SpeciesLoadError(f"{path}: [{sec}] lacks delta0")
        coeffs = [_parse_float(sec, "delta0", body["delta0"], path)]
        order = 2
        while f"delta{order}" in body:
            coeffs.append(_parse_float(sec, f"delta{order}", body[f"delta{order}"], path))
            order += 2
        unknown = [k for k in body if re.fullmatch(r"delta\d+", k) and int(k[5:]) >= order]
        if unknown:
            raise SpeciesLoadError(f"{path}: [{sec}] has {unknown[0]} without all lower even orders")
        defects[(l2 // 2, tj)] = tuple(coeffs)
        provenance[sec] = body.get("citation", provenance["species"])
    missing = [f"{L_LETTERS[l]}{tj}/2" for l, tj in REQUIRED_SERIES if (l, tj) not in defects]
    if missing:
        raise SpeciesLoadError(f"{path}: missing quantum-defect series {', '.join(missing)}")
    model = SpeciesModel(head["name"].strip(), ry, defects, cutoff, provenance)
    d0 = [model.defects[lj][0] for lj in ((0, 1), (1, 1), (2, 3), (3, 5))]
    if any(b > a for a, b in zip(d0, d0[1:])):
        warnings.warn(f"{path}: delta0 does not decrease with l", stacklevel=2)
    return model


@lru_cache(maxsize=None)
def _cached(path: str, mtime: float) -> SpeciesModel:
    return load_species(path)


def get_species(name_or_path: str | os.PathLike | SpeciesModel) -> SpeciesModel:
    """Species by bundled name (``'Rb'``, ``'Cs'``, ``'H'``) or by file path."""
    if isinstance(name_or_path, SpeciesModel):
        return name_or_path
    p = Path(name_or_path)
    if not p.suffix:
        p = data_dir() / f"{str(name_or_path).lower()}.ini"
    if not p.exists():
        raise SpeciesLoadError(f"unknown species {str(name_or_path)!r} (looked for {p})")
    return _cached(str(p.resolve()), p.stat().st_mtime)


_STATE_RE = re.compile(r"^\s*(\d+)\s*([spdfghik])\s*(\d+)\s*/\s*2\s*$")


def parse_state(text: str, species: SpeciesModel | str) -> StateLabel:
    """Parse ``'70s1/2'``/``'43d5/2'`` into a :class:`StateLabel`."""
    m = _STATE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse state {text!r}; expected e.g. '43d5/2'")
    name = species.name if isinstance(species, SpeciesModel) else str(species)
    return StateLabel(name, int(m.group(1)), L_LETTERS.index(m.group(2)), int(m.group(3)))


def energy(state: StateLabel, species: SpeciesModel) -> float:
    """Level energy ``E/h`` in GHz below the ionisation limit (negative)."""
    if state.n <= state.l:
        raise ValueError("n must exceed l")
    return -species.rydberg_constant_ghz / species.n_star(state.n, state.l, state.tj) ** 2
