"""The two-step purification protocol, its closed forms, and the discard baseline."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import optics
from .qstate import (
    EIG_ATOL,
    DensityOperator,
    Sector,
    SectorError,
    TARGET,
    DepsClass,
    bell_state,
    check_probability,
    fidelity,
    make_basis_state,
    werner_state,
)

# 1/8: the Werner fidelity at which the post-step-1 weight on Phi+ is exactly 1/2.
THRESHOLD = 0.125

PHI_PLUS_BELL = bell_state("Phi+")
PHI_MINUS_BELL = bell_state("Phi-")


@dataclass(frozen=True)
class Step1Result:
    state: DensityOperator
    yield_: float

    @property
    def weights(self) -> tuple[float, float]:
        """Weights on (Phi+, Phi-) of the DEPS output."""
        return (
            fidelity(self.state, make_basis_state(DepsClass.PHI_PLUS)),
            fidelity(self.state, make_basis_state(DepsClass.PHI_MINUS)),
        )


@dataclass(frozen=True)
class Step2Result:
    state: DensityOperator
    pass_probability: float
    output_fidelity: float


@dataclass(frozen=True)
class RoundRecord:
    round: int
    fidelity: float
    pass_probability: float
    cumulative_yield: float


@dataclass
class PurificationTrace:
    f0: float
    eta: float
    rounds: list[RoundRecord] = field(default_factory=list)

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([r.fidelity for r in self.rounds])

    @property
    def yields(self) -> np.ndarray:
        return np.array([r.cumulative_yield for r in self.rounds])

    def __len__(self) -> int:
        return len(self.rounds)

    def __getitem__(self, k: int) -> RoundRecord:
        return self.rounds[k]


def _require_deps(rho: DensityOperator) -> None:
    if rho.sector is not Sector.DEPS:
        raise SectorError(f"expected a deps-sector state, got {rho.sector.value}")


def step1_correct(rho: DensityOperator) -> Step1Result:
    """Bit-flip correction: port detection, HWPs on ports 3/4, lossless merge.

    Every port pair is kept, so the yield is 1.
    """
    _require_deps(rho)
    return Step1Result(optics.apply_conditional_hwp(rho), 1.0)


def xiao_step1_baseline(rho: DensityOperator) -> Step1Result:
    """Discarding variant of step 1: keep only coincidences on ports (1, 2)."""
    _require_deps(rho)
    P = optics.port_pair_projector((1, 2))
    kept = P @ rho.matrix @ P
    probability = float(np.trace(kept).real)
    if probability <= EIG_ATOL:
        raise ValueError("no weight survives on ports (1, 2)")
    _, state = DensityOperator.from_unnormalized(kept, Sector.DEPS)
    return Step1Result(state, probability)


def step2_purify(rho: DensityOperator) -> Step2Result:
    """One purification round on two copies of a Bell-sector pair.

    Bilateral Hadamards, four-mode parity check, sigma_x measurement with a
    phase flip on antiparallel outcomes, then bilateral Hadamards again so
    the output stays in the {Phi+, Phi-} sector. The kept state averages the
    four measurement branches.
    """
    if rho.sector is not Sector.BELL:
        raise SectorError(f"expected a bell-sector state, got {rho.sector.value}")
    support = fidelity(rho, PHI_PLUS_BELL) + fidelity(rho, PHI_MINUS_BELL)
    if support < 1.0 - EIG_ATOL:
        raise ValueError(
            f"input has weight {1 - support:.3e} outside span{{Phi+, Phi-}}"
        )
    rotated = optics.apply_bilateral_hadamard(rho)
    check = optics.parity_check_postselect(rotated, rotated)
    if check.kept_state is None:
        raise ValueError("parity check never passes for this input")
    kept = np.zeros((4, 4), dtype=complex)
    for branch in optics.sigma_x_branches(check.kept_state):
        if branch.kept is not None:
            kept += branch.probability * branch.kept.matrix
    _, out = DensityOperator.from_unnormalized(kept, Sector.BELL)
    out = optics.apply_bilateral_hadamard(out)
    return Step2Result(out, check.pass_probability, fidelity(out, PHI_PLUS_BELL))


def sector_fidelity(F: float) -> float:
    """Weight on Phi+ after step 1 for a Werner input of fidelity F."""
    check_probability(F, "F")
    return (4 * F + 3) / 7


def fidelity_recursion(F: float) -> float:
    """Output fidelity of one full protocol pass on a Werner input of fidelity F."""
    check_probability(F, "F")
    return (4 * F + 3) ** 2 / (32 * F**2 - 8 * F + 25)


def sector_recursion(p: float) -> float:
    """Per-round fidelity map on the {Phi+, Phi-} sector."""
    check_probability(p, "p")
    return p**2 / (p**2 + (1 - p) ** 2)


def sector_pass_probability(p: float) -> float:
    check_probability(p, "p")
    return (p**2 + (1 - p) ** 2) / 2


def threshold_verdict(F: float, atol: float = 1e-12) -> str:
    if abs(F - THRESHOLD) <= atol:
        return "at threshold"
    return "above threshold" if F > THRESHOLD else "below threshold"


def iterate(F0: float, rounds: int, eta: float = 1.0) -> PurificationTrace:
    """Run step 1, conversion, and ``rounds`` purification rounds exactly.

    Round 0 records the converted state (pass probability eta**2). Each later
    round consumes two pairs, so the cumulative yield picks up a factor
    ``pass_probability / 2``.
    """
    if rounds < 0:
        raise ValueError(f"rounds must be >= 0, got {rounds}")
    step1 = step1_correct(werner_state(F0))
    state, success = optics.wavelength_convert(step1.state, eta)
    cumulative = step1.yield_ * success
    trace = PurificationTrace(F0, eta)
    trace.rounds.append(RoundRecord(0, fidelity(state, PHI_PLUS_BELL), success, cumulative))
    for k in range(1, rounds + 1):
        result = step2_purify(state)
        state = result.state
        cumulative *= result.pass_probability / 2
        trace.rounds.append(
            RoundRecord(k, result.output_fidelity, result.pass_probability, cumulative)
        )
    return trace


@dataclass(frozen=True)
class SchemeComparison:
    f0: float
    modified_yield: float
    modified_fidelity: float
    baseline_yield: float
    baseline_fidelity: float


def compare_schemes(F0: float) -> SchemeComparison:
    """Step-1 yield and fidelity of the correcting scheme vs the discarding baseline."""
    rho = werner_state(F0)
    modified = step1_correct(rho)
    baseline = xiao_step1_baseline(rho)
    target = make_basis_state(TARGET)
    return SchemeComparison(
        f0=F0,
        modified_yield=modified.yield_,
        modified_fidelity=fidelity(modified.state, target),
        baseline_yield=baseline.yield_,
        baseline_fidelity=fidelity(baseline.state, target),
    )
