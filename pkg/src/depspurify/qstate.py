"""Basis states, pure states and density operators for two photons.

Each photon carries a polarization qubit (H < V) and a frequency qubit.
Photon a carries omega_s < omega_s'; photon b carries omega_i < omega_i'.

DEPS sector (16 dimensions), flat index::

    index = 8 * pol_a + 4 * freq_a + 2 * pol_b + freq_b

Bell sector (4 dimensions, polarization only, after wavelength conversion)::

    index = 2 * pol_a + pol_b

The two-pair sector (16 dimensions) holds two Bell-sector pairs side by side,
qubits ordered (a1, b1, a2, b2), i.e. ``np.kron(pair1, pair2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

ATOL = 1e-12
EIG_ATOL = 1e-10

H, V = 0, 1
POLARIZATIONS = {"H": H, "V": V}


class Sector(str, enum.Enum):
    DEPS = "deps"
    BELL = "bell"
    TWO_PAIR = "two_pair"

    @property
    def dim(self) -> int:
        return 4 if self is Sector.BELL else 16


class SectorError(ValueError):
    """Raised when an operation receives a state from the wrong sector."""


def deps_index(pol_a: int, freq_a: int, pol_b: int, freq_b: int) -> int:
    return 8 * pol_a + 4 * freq_a + 2 * pol_b + freq_b


class DepsClass(enum.Enum):
    """The eight labelled DEPS basis states.

    The value is ``(family, sign)``; each family fixes which photons carry
    a polarization flip relative to Phi.
    """

    PHI_PLUS = ("Phi", +1)
    PHI_MINUS = ("Phi", -1)
    PSI_PLUS = ("Psi", +1)
    PSI_MINUS = ("Psi", -1)
    GAMMA_PLUS = ("Gamma", +1)
    GAMMA_MINUS = ("Gamma", -1)
    UPSILON_PLUS = ("Upsilon", +1)
    UPSILON_MINUS = ("Upsilon", -1)

    @property
    def family(self) -> str:
        return self.value[0]

    @property
    def sign(self) -> int:
        return self.value[1]

    @property
    def flips(self) -> tuple[int, int]:
        """Polarization flip (0/1) on photon a and photon b."""
        return _FAMILY_FLIPS[self.family]

    @property
    def label(self) -> str:
        return self.family + ("+" if self.sign > 0 else "-")

    @property
    def port_signature(self) -> tuple[int, int]:
        return PORT_TABLE[self.family]

    @classmethod
    def from_label(cls, label: str) -> "DepsClass":
        for member in cls:
            if member.label == label:
                return member
        raise ValueError(f"unknown DEPS class label {label!r}")

    def __str__(self) -> str:
        return self.label


_FAMILY_FLIPS = {"Phi": (0, 0), "Psi": (0, 1), "Gamma": (1, 0), "Upsilon": (1, 1)}

# Triggered ports for each family (photon a, photon b).
PORT_TABLE = {"Phi": (1, 2), "Psi": (1, 4), "Gamma": (3, 2), "Upsilon": (3, 4)}

TARGET = DepsClass.PHI_PLUS
ERROR_CLASSES = tuple(c for c in DepsClass if c is not TARGET)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    sector: Sector = Sector.DEPS

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        sector = Sector(self.sector)
        if amps.shape != (sector.dim,):
            raise SectorError(
                f"{sector.value} state needs {sector.dim} amplitudes, got {amps.shape[0]}"
            )
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "sector", sector)

    def projector(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.sector)

    def overlap(self, other: "PureState") -> complex:
        _check_same_sector(self.sector, other.sector)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    sector: Sector = Sector.DEPS

    def __post_init__(self):
        rho = _frozen(self.matrix)
        sector = Sector(self.sector)
        if rho.shape != (sector.dim, sector.dim):
            raise SectorError(
                f"{sector.value} density operator must be {sector.dim}x{sector.dim}, got {rho.shape}"
            )
        if np.max(np.abs(rho - rho.conj().T)) > ATOL:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(rho) - 1.0) > ATOL:
            raise ValueError(f"density operator trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -EIG_ATOL:
            raise ValueError("density operator is not positive semidefinite")
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "sector", sector)

    @classmethod
    def from_unnormalized(cls, matrix: np.ndarray, sector: Sector) -> tuple[float, "DensityOperator"]:
        """Renormalize a positive operator; returns ``(trace, state)``."""
        matrix = np.asarray(matrix, dtype=complex)
        weight = float(np.trace(matrix).real)
        if weight <= 0:
            raise ValueError("cannot renormalize an operator with zero trace")
        matrix = matrix / weight
        # absorb round-off asymmetry before validation
        matrix = 0.5 * (matrix + matrix.conj().T)
        return weight, cls(matrix, sector)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _check_same_sector(a: Sector, b: Sector) -> None:
    if a is not b:
        raise SectorError(f"sector mismatch: {a.value} vs {b.value}")


def make_basis_state(cls: DepsClass) -> PureState:
    """Return one of the eight DEPS basis states.

    Every class is ``(|x, s; y, i> +/- |x', s'; y', i'>) / sqrt(2)`` where the
    first term has polarizations (flip_a, flip_b) on the unprimed
    frequencies and the second term carries the complementary polarizations
    on the primed frequencies.
    """
    cls = DepsClass(cls)
    flip_a, flip_b = cls.flips
    amps = np.zeros(16, dtype=complex)
    amps[deps_index(flip_a, 0, flip_b, 0)] = 1 / np.sqrt(2)
    amps[deps_index(1 - flip_a, 1, 1 - flip_b, 1)] = cls.sign / np.sqrt(2)
    return PureState(amps, Sector.DEPS)


BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")


def bell_state(label: str) -> PureState:
    """Polarization Bell state in the 4-dim sector, e.g. ``bell_state("Phi+")``."""
    if label not in BELL_LABELS:
        raise ValueError(f"unknown Bell state {label!r}; expected one of {BELL_LABELS}")
    amps = np.zeros(4, dtype=complex)
    sign = 1 if label.endswith("+") else -1
    if label.startswith("Phi"):
        amps[2 * H + H], amps[2 * V + V] = 1, sign
    else:
        amps[2 * H + V], amps[2 * V + H] = 1, sign
    return PureState(amps / np.sqrt(2), Sector.BELL)


def werner_state(F: float) -> DensityOperator:
    """Werner mixture: weight F on Phi+, (1 - F)/7 on each error class."""
    check_probability(F, "F")
    components = [(F, make_basis_state(TARGET))]
    components += [((1 - F) / 7, make_basis_state(c)) for c in ERROR_CLASSES]
    return mix(components)


def bell_diagonal(weights: dict[str, float]) -> DensityOperator:
    """Bell-sector mixture from ``{label: weight}``."""
    return mix([(w, bell_state(label)) for label, w in weights.items()])


def mix(components: Iterable[tuple[float, PureState]]) -> DensityOperator:
    """Convex combination of pure-state projectors."""
    components = list(components)
    if not components:
        raise ValueError("mix needs at least one component")
    sector = components[0][1].sector
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0):
        raise ValueError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > ATOL:
        raise ValueError(f"mixture weights sum to {weights.sum()!r}, expected 1")
    rho = np.zeros((sector.dim, sector.dim), dtype=complex)
    for w, psi in components:
        _check_same_sector(sector, psi.sector)
        rho += w * np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityOperator(rho, sector)


def fidelity(rho: DensityOperator, target: PureState) -> float:
    """<target| rho |target>."""
    _check_same_sector(rho.sector, target.sector)
    psi = target.amplitudes
    return float(np.vdot(psi, rho.matrix @ psi).real)


def check_probability(value: float, name: str = "value") -> float:
    if not 0.0 <= value <= 1.0 or np.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)
