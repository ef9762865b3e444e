"""Optical elements and measurements as explicit maps on states.

Step 1 (bit-flip correction) acts on the 16-dim DEPS sector: a WDM + PBS per
photon routes it to one of two ports, and a half-wave plate on the lower
port (3 for photon a, 4 for photon b) flips its polarization. Step 2 acts on
polarization-only Bell pairs after wavelength conversion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .qstate import (
    EIG_ATOL,
    POLARIZATIONS,
    H,
    V,
    DensityOperator,
    PureState,
    Sector,
    SectorError,
    deps_index,
    make_basis_state,
)

State = Union[PureState, DensityOperator]

UPPER_PORTS = {"a": 1, "b": 2}
LOWER_PORTS = {"a": 3, "b": 4}
FREQUENCIES = {"a": ("s", "s'"), "b": ("i", "i'")}


def port_of(photon: str, pol: Union[str, int], freq: str) -> int:
    """Output port of one photon after its WDM and PBS.

    ``freq`` is the photon's own frequency label: ``"s"``/``"s'"`` for photon
    a, ``"i"``/``"i'"`` for photon b. The photon leaves the upper port when
    its polarization bit equals its frequency bit (H with the unprimed
    frequency, V with the primed one).
    """
    if photon not in FREQUENCIES:
        raise ValueError(f"photon must be 'a' or 'b', got {photon!r}")
    pol_bit = _pol_bit(pol)
    try:
        freq_bit = FREQUENCIES[photon].index(freq.lstrip("w").replace("ω", ""))
    except ValueError:
        raise ValueError(f"frequency {freq!r} does not belong to photon {photon}") from None
    return UPPER_PORTS[photon] if pol_bit == freq_bit else LOWER_PORTS[photon]


def _pol_bit(pol: Union[str, int]) -> int:
    if isinstance(pol, str) and pol in POLARIZATIONS:
        return POLARIZATIONS[pol]
    if not isinstance(pol, (bool, str)) and pol in (H, V):
        return int(pol)
    raise ValueError(f"polarization must be H or V, got {pol!r}")


def port_signature(cls) -> tuple[int, int]:
    """Ports triggered by a DEPS class, computed by routing both of its terms."""
    amps = make_basis_state(cls).amplitudes
    signatures = set()
    for index in np.flatnonzero(np.abs(amps) > 0):
        pa, fa, pb, fb = (index >> 3) & 1, (index >> 2) & 1, (index >> 1) & 1, index & 1
        signatures.add(
            (port_of("a", pa, FREQUENCIES["a"][fa]), port_of("b", pb, FREQUENCIES["b"][fb]))
        )
    if len(signatures) != 1:
        raise RuntimeError(f"{cls} routes to several port pairs: {sorted(signatures)}")
    return signatures.pop()


# Local single-photon space: index 2 * pol + freq.
_LOCAL_UPPER = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
_LOCAL_LOWER = np.eye(4, dtype=complex) - _LOCAL_UPPER
_LOCAL_POL_FLIP = np.kron(np.array([[0, 1], [1, 0]], dtype=complex), np.eye(2))


def port_projector(photon: str, port: int) -> np.ndarray:
    """16x16 projector onto the (pol, freq) states of one photon routed to ``port``."""
    if port == UPPER_PORTS.get(photon):
        local = _LOCAL_UPPER
    elif port == LOWER_PORTS.get(photon):
        local = _LOCAL_LOWER
    else:
        raise ValueError(f"photon {photon!r} never leaves port {port}")
    return np.kron(local, np.eye(4)) if photon == "a" else np.kron(np.eye(4), local)


def port_pair_projector(ports: tuple[int, int]) -> np.ndarray:
    return port_projector("a", ports[0]) @ port_projector("b", ports[1])


PORT_PAIRS = ((1, 2), (1, 4), (3, 2), (3, 4))


def _hwp_kraus() -> dict[tuple[int, int], np.ndarray]:
    local = {
        "a": {1: _LOCAL_UPPER, 3: _LOCAL_POL_FLIP @ _LOCAL_LOWER},
        "b": {2: _LOCAL_UPPER, 4: _LOCAL_POL_FLIP @ _LOCAL_LOWER},
    }
    return {(pa, pb): np.kron(local["a"][pa], local["b"][pb]) for pa, pb in PORT_PAIRS}


HWP_KRAUS = _hwp_kraus()


def port_probabilities(rho: DensityOperator) -> dict[tuple[int, int], float]:
    _require(rho, Sector.DEPS)
    return {
        ports: float(np.trace(port_pair_projector(ports) @ rho.matrix).real)
        for ports in PORT_PAIRS
    }


def apply_conditional_hwp(state: State) -> State:
    """Flip H<->V on photons found in the lower ports, then merge the ports.

    Port detection records which port pair fired, so a density operator is
    mapped by the channel ``sum_k K_k rho K_k^dagger`` over the four port
    pairs. A pure state must lie inside a single port pair.
    """
    _require(state, Sector.DEPS)
    if isinstance(state, PureState):
        psi = state.amplitudes
        branches = [K @ psi for K in HWP_KRAUS.values()]
        occupied = [b for b in branches if np.vdot(b, b).real > EIG_ATOL]
        if len(occupied) != 1:
            raise ValueError(
                "pure state spans several port pairs; pass a DensityOperator instead"
            )
        return PureState(occupied[0], Sector.DEPS)
    rho = sum(K @ state.matrix @ K.conj().T for K in HWP_KRAUS.values())
    return DensityOperator(rho, Sector.DEPS)


# Wavelength conversion: |H, s> -> |H, w>, |V, s'> -> |V, w> (and likewise for b).
_CONVERSION = np.zeros((4, 16), dtype=complex)
for _pa in (H, V):
    for _pb in (H, V):
        _CONVERSION[2 * _pa + _pb, deps_index(_pa, _pa, _pb, _pb)] = 1.0


def wavelength_convert(state: DensityOperator, eta: float = 1.0) -> tuple[DensityOperator, float]:
    """Map a DEPS-sector state onto the polarization Bell sector.

    Only defined on the correlated subspace (each photon's polarization bit
    equals its frequency bit). Returns the converted state and the success
    probability ``eta**2``, one conversion per photon.
    """
    _require(state, Sector.DEPS)
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"conversion efficiency must lie in (0, 1], got {eta!r}")
    converted = _CONVERSION @ state.matrix @ _CONVERSION.conj().T
    support = np.trace(converted).real
    if support < 1.0 - EIG_ATOL:
        raise ValueError(
            f"state has weight {1 - support:.3e} outside the correlated subspace; "
            "wavelength conversion is only valid after bit-flip correction"
        )
    _, bell = DensityOperator.from_unnormalized(converted, Sector.BELL)
    return bell, eta**2


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_FLIP = np.diag([1, -1]).astype(complex)


def _on_photon(op: np.ndarray, photon: str) -> np.ndarray:
    if photon == "a":
        return np.kron(op, np.eye(2))
    if photon == "b":
        return np.kron(np.eye(2), op)
    raise ValueError(f"photon must be 'a' or 'b', got {photon!r}")


def _apply_unitary(state: State, U: np.ndarray) -> State:
    if isinstance(state, PureState):
        return PureState(U @ state.amplitudes, state.sector)
    return DensityOperator(U @ state.matrix @ U.conj().T, state.sector)


def apply_hadamard(state: State, photon: str) -> State:
    _require(state, Sector.BELL)
    return _apply_unitary(state, _on_photon(HADAMARD, photon))


def apply_bilateral_hadamard(state: State) -> State:
    return apply_hadamard(apply_hadamard(state, "a"), "b")


def apply_phase_flip(state: State, photon: str) -> State:
    _require(state, Sector.BELL)
    return _apply_unitary(state, _on_photon(PHASE_FLIP, photon))


def as_density(state: State) -> DensityOperator:
    return state.projector() if isinstance(state, PureState) else state


@dataclass(frozen=True)
class ParityCheckResult:
    pass_probability: float
    kept_state: Optional[DensityOperator]


def _parity_projector() -> np.ndarray:
    keep = np.zeros(16)
    for a in (H, V):
        for b in (H, V):
            keep[8 * a + 4 * b + 2 * a + b] = 1.0
    return np.diag(keep).astype(complex)


PARITY_PROJECTOR = _parity_projector()


def parity_check_postselect(pair1: State, pair2: State) -> ParityCheckResult:
    """Four-mode post-selection behind one PBS per party.

    Keeps the components where a1, a2 share a polarization and b1, b2 share a
    polarization. The kept state lives in the two-pair sector with qubit
    order (a1, b1, a2, b2).
    """
    rho1, rho2 = as_density(pair1), as_density(pair2)
    _require(rho1, Sector.BELL)
    _require(rho2, Sector.BELL)
    joint = np.kron(rho1.matrix, rho2.matrix)
    kept = PARITY_PROJECTOR @ joint @ PARITY_PROJECTOR
    probability = float(np.trace(kept).real)
    if probability <= EIG_ATOL:
        return ParityCheckResult(max(probability, 0.0), None)
    _, state = DensityOperator.from_unnormalized(kept, Sector.TWO_PAIR)
    return ParityCheckResult(probability, state)


@dataclass(frozen=True)
class MeasurementOutcome:
    """sigma_x outcomes (+1 for |+x>, -1 for |-x>) on photons a2 and b2."""

    a: int
    b: int

    @property
    def parallel(self) -> bool:
        return self.a == self.b

    def __str__(self) -> str:
        return f"({'+' if self.a > 0 else '-'}x, {'+' if self.b > 0 else '-'}x)"


@dataclass(frozen=True)
class SigmaXBranch:
    outcome: MeasurementOutcome
    probability: float
    kept: Optional[DensityOperator]


X_KETS = {+1: np.array([1, 1], dtype=complex) / np.sqrt(2), -1: np.array([1, -1], dtype=complex) / np.sqrt(2)}
OUTCOMES = tuple(MeasurementOutcome(a, b) for a in (+1, -1) for b in (+1, -1))


def sigma_x_branches(state: DensityOperator) -> list[SigmaXBranch]:
    """Enumerate all four sigma_x outcomes on (a2, b2) with corrected kept pairs."""
    _require(state, Sector.TWO_PAIR)
    rho = state.matrix.reshape((2,) * 8)
    branches = []
    for outcome in OUTCOMES:
        xa, xb = X_KETS[outcome.a], X_KETS[outcome.b]
        kept = np.einsum(
            "m,n,abmncdpq,p,q->abcd", xa.conj(), xb.conj(), rho, xa, xb
        ).reshape(4, 4)
        probability = float(np.trace(kept).real)
        if probability <= EIG_ATOL:
            branches.append(SigmaXBranch(outcome, max(probability, 0.0), None))
            continue
        _, pair = DensityOperator.from_unnormalized(kept, Sector.BELL)
        if not outcome.parallel:
            pair = apply_phase_flip(pair, "a")
        branches.append(SigmaXBranch(outcome, probability, pair))
    return branches


def measure_sigma_x_and_correct(
    state: DensityOperator, rng: np.random.Generator
) -> tuple[MeasurementOutcome, DensityOperator]:
    """Sample one sigma_x outcome pair; antiparallel outcomes get a phase flip on a1."""
    branches = [b for b in sigma_x_branches(state) if b.kept is not None]
    probs = np.array([b.probability for b in branches])
    chosen = branches[rng.choice(len(branches), p=probs / probs.sum())]
    return chosen.outcome, chosen.kept


def _require(state: State, sector: Sector) -> None:
    if state.sector is not sector:
        raise SectorError(f"expected a {sector.value}-sector state, got {state.sector.value}")
