"""Trajectory sampling of the protocol.

The Werner input and every intermediate ensemble are diagonal in the class
basis, so a trajectory only tracks class labels. The label-level transition
tables are built once from exact enumerations in :mod:`depspurify.optics`.

Randomness is counter based: round ``r`` of a run keyed by master seed ``s``
uses a Philox stream keyed by ``(s, r)``, and unit ``i`` of that round reads
block ``i`` (four doubles) of the stream. Any split of the units across
workers therefore reads the same numbers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import optics
from .qstate import (
    DepsClass,
    PureState,
    bell_state,
    check_probability,
    make_basis_state,
)

CLASSES = tuple(DepsClass)
KEPT_CLASSES = (DepsClass.PHI_PLUS, DepsClass.PHI_MINUS)
DRAWS_PER_UNIT = 4


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the per-unit stream rule described in the module docstring."""

    master: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master) < 2**64:
            raise ValueError(f"master seed must be a 64-bit unsigned integer, got {self.master}")

    def uniforms(self, round_index: int, start: int, stop: int) -> np.ndarray:
        """Uniform draws for units ``start..stop-1`` of a round, shape (n, 4)."""
        key = np.random.SeedSequence([int(self.master), round_index]).generate_state(2, np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key, counter=start))
        return gen.random((stop - start, DRAWS_PER_UNIT))


def _as_seed(seed: Union[int, SeedSpec]) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


def identify_class(state: PureState, candidates) -> object:
    """Label of the candidate state equal to ``state`` up to a global phase."""
    for label, ref in candidates.items():
        if abs(abs(state.overlap(ref)) - 1.0) < 1e-9:
            return label
    raise RuntimeError("state is not one of the candidate basis states")


def _dominant(rho) -> PureState:
    values, vectors = np.linalg.eigh(rho.matrix)
    if values[-1] < 1 - 1e-9:
        raise RuntimeError("expected a pure state")
    return PureState(vectors[:, -1] / np.linalg.norm(vectors[:, -1]), rho.sector)


@lru_cache(maxsize=None)
def step1_table() -> dict[DepsClass, tuple[tuple[int, int], DepsClass]]:
    deps = {c: make_basis_state(c) for c in CLASSES}
    table = {}
    for c in CLASSES:
        corrected = optics.apply_conditional_hwp(deps[c])
        table[c] = (optics.port_signature(c), identify_class(corrected, deps))
    return table


@dataclass(frozen=True)
class Step2Entry:
    pass_probability: float
    # (outcome, conditional probability, kept class) per sigma_x branch
    branches: tuple[tuple[optics.MeasurementOutcome, float, Optional[DepsClass]], ...]


@lru_cache(maxsize=None)
def step2_table() -> dict[tuple[DepsClass, DepsClass], Step2Entry]:
    bells = {DepsClass.PHI_PLUS: bell_state("Phi+"), DepsClass.PHI_MINUS: bell_state("Phi-")}
    table = {}
    for c1 in KEPT_CLASSES:
        for c2 in KEPT_CLASSES:
            pairs = []
            for c in (c1, c2):
                converted, _ = optics.wavelength_convert(make_basis_state(c).projector())
                pairs.append(optics.apply_bilateral_hadamard(converted))
            check = optics.parity_check_postselect(*pairs)
            branches = []
            if check.kept_state is not None:
                for b in optics.sigma_x_branches(check.kept_state):
                    kept = None
                    if b.kept is not None:
                        out = optics.apply_bilateral_hadamard(b.kept)
                        kept = identify_class(_dominant(out), bells)
                    branches.append((b.outcome, b.probability, kept))
            table[(c1, c2)] = Step2Entry(check.pass_probability, tuple(branches))
    return table


def _werner_cdf(F: float) -> np.ndarray:
    weights = np.array([F if c is DepsClass.PHI_PLUS else (1 - F) / 7 for c in CLASSES])
    return np.cumsum(weights)


def _class_from_uniform(F: float, u):
    idx = np.searchsorted(_werner_cdf(F), u, side="right")
    return np.minimum(idx, len(CLASSES) - 1)


def sample_class(F: float, rng: np.random.Generator) -> DepsClass:
    """Draw one class from the Werner mixture of fidelity F."""
    check_probability(F, "F")
    return CLASSES[int(_class_from_uniform(F, rng.random()))]


def run_step1_trajectory(cls: DepsClass) -> tuple[tuple[int, int], DepsClass]:
    """Triggered ports and corrected class of one pair through step 1."""
    return step1_table()[DepsClass(cls)]


def run_step2_trajectory(
    cls1: DepsClass, cls2: DepsClass, rng: np.random.Generator
) -> tuple[bool, Optional[DepsClass], Optional[optics.MeasurementOutcome]]:
    """One purification round on a pair of (Phi+/Phi-) pairs.

    Returns ``(passed, kept class, sigma_x outcome)``.
    """
    if cls1 not in KEPT_CLASSES or cls2 not in KEPT_CLASSES:
        raise ValueError("step 2 only accepts Phi+ or Phi- pairs")
    entry = step2_table()[(cls1, cls2)]
    if rng.random() >= entry.pass_probability:
        return False, None, None
    probs = np.array([p for _, p, _ in entry.branches])
    outcome, _, kept = entry.branches[int(rng.choice(len(probs), p=probs / probs.sum()))]
    return True, kept, outcome


@dataclass(frozen=True)
class TrialRecord:
    classes: tuple[DepsClass, DepsClass]
    ports: tuple[tuple[int, int], tuple[int, int]]
    corrected: tuple[DepsClass, DepsClass]
    passed: bool
    outcome: Optional[optics.MeasurementOutcome]
    kept: Optional[DepsClass]


def sample_trial(F: float, rng: np.random.Generator) -> TrialRecord:
    """Two Werner pairs through step 1 and one purification round (ideal conversion)."""
    classes = (sample_class(F, rng), sample_class(F, rng))
    routed = [run_step1_trajectory(c) for c in classes]
    passed, kept, outcome = run_step2_trajectory(routed[0][1], routed[1][1], rng)
    return TrialRecord(
        classes=classes,
        ports=(routed[0][0], routed[1][0]),
        corrected=(routed[0][1], routed[1][1]),
        passed=passed,
        outcome=outcome,
        kept=kept,
    )


@dataclass(frozen=True)
class McStatistics:
    round: int
    trials: int
    kept: int
    target_count: int
    initial_pairs: int

    @property
    def fidelity_estimate(self) -> float:
        return self.target_count / self.kept if self.kept else math.nan

    @property
    def standard_error(self) -> float:
        if not self.kept:
            return math.nan
        f = self.fidelity_estimate
        return math.sqrt(f * (1 - f) / self.kept)

    @property
    def pass_rate(self) -> float:
        return self.kept / self.trials if self.trials else math.nan

    @property
    def pass_rate_error(self) -> float:
        if not self.trials:
            return math.nan
        q = self.pass_rate
        return math.sqrt(q * (1 - q) / self.trials)

    @property
    def cumulative_yield(self) -> float:
        return self.kept / self.initial_pairs

    def __add__(self, other: "McStatistics") -> "McStatistics":
        if (self.round, self.initial_pairs) != (other.round, other.initial_pairs):
            raise ValueError("can only merge statistics of the same round and run")
        return McStatistics(
            self.round,
            self.trials + other.trials,
            self.kept + other.kept,
            self.target_count + other.target_count,
            self.initial_pairs,
        )


_CLASS_CODE = {c: i for i, c in enumerate(CLASSES)}
_PHI_PLUS, _PHI_MINUS = _CLASS_CODE[DepsClass.PHI_PLUS], _CLASS_CODE[DepsClass.PHI_MINUS]


def _step1_arrays():
    table = step1_table()
    ports = np.array([table[c][0] for c in CLASSES])
    corrected = np.array([_CLASS_CODE[table[c][1]] for c in CLASSES])
    return ports, corrected


def _step2_arrays():
    """pass[c1, c2], branch_cdf[c1, c2, :], kept[c1, c2, :] over codes 0=Phi+, 1=Phi-."""
    table = step2_table()
    pass_prob = np.zeros((2, 2))
    cdf = np.ones((2, 2, 4))
    kept = np.full((2, 2, 4), -1)
    for i, c1 in enumerate(KEPT_CLASSES):
        for j, c2 in enumerate(KEPT_CLASSES):
            entry = table[(c1, c2)]
            pass_prob[i, j] = entry.pass_probability
            if entry.branches:
                probs = np.array([p for _, p, _ in entry.branches])
                cdf[i, j] = np.cumsum(probs / probs.sum())
                kept[i, j] = [KEPT_CLASSES.index(k) if k is not None else -1 for *_, k in entry.branches]
    return pass_prob, cdf, kept


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    if n == 0:
        return []
    size = max(1, -(-n // max(1, workers)))
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def _map_chunks(fn, n: int, workers: int) -> list:
    spans = _chunks(n, workers)
    if workers <= 1 or len(spans) <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def _round0(F0: float, eta: float, seed: SeedSpec, lo: int, hi: int):
    ports, corrected = _step1_arrays()
    u = seed.uniforms(0, lo, hi)
    cls = _class_from_uniform(F0, u[:, 0])
    observed = ports[cls]
    expected = np.array([CLASSES[c].port_signature for c in cls]).reshape(-1, 2)
    if not np.array_equal(observed, expected):
        raise RuntimeError("sampled trajectory left through ports inconsistent with its class")
    converted = (u[:, 1] < eta) & (u[:, 2] < eta)
    code = np.where(corrected[cls] == _PHI_PLUS, 0, 1)
    return code[converted], cls


def _purify_round(survivors: np.ndarray, k: int, seed: SeedSpec, lo: int, hi: int):
    pass_prob, cdf, kept_table = _step2_arrays()
    u = seed.uniforms(k, lo, hi)
    c1 = survivors[2 * np.arange(lo, hi)]
    c2 = survivors[2 * np.arange(lo, hi) + 1]
    passed = u[:, 0] < pass_prob[c1, c2]
    branch = np.sum(u[:, 1:2] >= cdf[c1, c2], axis=1).clip(max=3)
    kept = kept_table[c1, c2, branch]
    return kept[passed]


def run_experiment(
    F0: float,
    rounds: int,
    trials: int,
    seed: Union[int, SeedSpec] = 0,
    eta: float = 1.0,
    workers: int = 1,
) -> list[McStatistics]:
    """Sample ``trials`` initial pairs through step 1 and ``rounds`` purification rounds.

    Returns one :class:`McStatistics` per round, round 0 being the converted
    ensemble after step 1. Survivors of a round are paired in order,
    (0, 1), (2, 3), ...; an odd one out idles.
    """
    check_probability(F0, "F0")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if rounds < 0:
        raise ValueError(f"rounds must be >= 0, got {rounds}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"conversion efficiency must lie in (0, 1], got {eta!r}")
    seed = _as_seed(seed)

    parts = _map_chunks(lambda lo, hi: _round0(F0, eta, seed, lo, hi)[0], trials, workers)
    survivors = np.concatenate(parts) if parts else np.zeros(0, dtype=int)
    stats = [McStatistics(0, trials, len(survivors), int(np.sum(survivors == 0)), trials)]
    for k in range(1, rounds + 1):
        units = len(survivors) // 2
        parts = _map_chunks(lambda lo, hi: _purify_round(survivors, k, seed, lo, hi), units, workers)
        survivors = np.concatenate(parts) if parts else np.zeros(0, dtype=int)
        stats.append(McStatistics(k, units, len(survivors), int(np.sum(survivors == 0)), trials))
    return stats


def run_xiao_baseline(
    F0: float, trials: int, seed: Union[int, SeedSpec] = 0, workers: int = 1
) -> McStatistics:
    """Sample the discarding step 1: only port pair (1, 2) survives."""
    check_probability(F0, "F0")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seed = _as_seed(seed)
    ports, _ = _step1_arrays()

    def chunk(lo, hi):
        cls = _class_from_uniform(F0, seed.uniforms(0, lo, hi)[:, 0])
        keep = np.all(ports[cls] == (1, 2), axis=1)
        return int(keep.sum()), int(np.sum(cls[keep] == _PHI_PLUS))

    counts = _map_chunks(chunk, trials, workers)
    kept = sum(c[0] for c in counts)
    target = sum(c[1] for c in counts)
    return McStatistics(0, trials, kept, target, trials)
