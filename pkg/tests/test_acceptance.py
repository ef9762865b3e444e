"""Exit criteria for the package, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import time

import numpy as np

import oracles
from depspurify import cli, optics, protocol
from depspurify import montecarlo as mc
from depspurify.qstate import DepsClass, bell_state, make_basis_state, werner_state

F_GRID = [0, 0.125, 0.2, 0.5, 0.8, 0.95, 1]
ATOL = 1e-12


def test_criterion_1_step1_weights():
    start = time.perf_counter()
    for F in F_GRID:
        r = protocol.step1_correct(werner_state(F))
        assert r.yield_ == 1.0
        assert abs(r.weights[0] - (4 * F + 3) / 7) < ATOL
        assert abs(r.weights[1] - 4 * (1 - F) / 7) < ATOL
    assert time.perf_counter() - start < 1.0


def test_criterion_2_step2_equals_closed_form():
    start = time.perf_counter()
    for F in F_GRID:
        converted, _ = optics.wavelength_convert(protocol.step1_correct(werner_state(F)).state)
        r = protocol.step2_purify(converted)
        assert abs(r.output_fidelity - (4 * F + 3) ** 2 / (32 * F**2 - 8 * F + 25)) < ATOL
    assert time.perf_counter() - start < 1.0


def test_criterion_3_threshold():
    for F in (0.13, 0.2, 0.5):
        assert protocol.fidelity_recursion(F) > (4 * F + 3) / 7
    for F in (0.05, 0.1):
        assert protocol.fidelity_recursion(F) < (4 * F + 3) / 7
    assert abs(protocol.fidelity_recursion(0.125) - (4 * 0.125 + 3) / 7) < ATOL
    trace = protocol.iterate(0.2, 6)
    expected = oracles.iterate_sector(3.8 / 7, 6)
    assert np.max(np.abs(trace.fidelities - expected)) < ATOL
    assert expected[6] > 0.99 and trace[6].fidelity > 0.99


def test_criterion_4_crossed_pair_exclusion():
    crossed = optics.parity_check_postselect(bell_state("Phi+"), bell_state("Psi+"))
    assert abs(crossed.pass_probability) < ATOL
    # the same pair before the bilateral Hadamards
    rotated = [optics.apply_bilateral_hadamard(bell_state(n)) for n in ("Phi+", "Phi-")]
    assert abs(optics.parity_check_postselect(*rotated).pass_probability) < ATOL
    for name in ("Phi+", "Psi+"):
        same = optics.parity_check_postselect(bell_state(name), bell_state(name))
        assert abs(same.pass_probability - 0.5) < ATOL


def test_criterion_5_monte_carlo_agreement():
    start = time.perf_counter()
    stats = mc.run_experiment(0.5, rounds=1, trials=100_000, seed=20240501)
    r1 = stats[1]
    assert abs(r1.fidelity_estimate - 25 / 29) <= 3 * r1.standard_error
    assert abs(r1.pass_rate - 29 / 98) <= 3 * r1.pass_rate_error
    assert time.perf_counter() - start < 10.0


def test_criterion_6_efficiency_comparison():
    for F in F_GRID:
        c = protocol.compare_schemes(F)
        assert c.modified_yield == 1.0
        assert abs(c.baseline_yield - (F + (1 - F) / 7)) < ATOL
    assert abs(protocol.compare_schemes(0.5).baseline_yield - 0.571429) < 1e-6
    for F in (0.2, 0.5, 0.8):
        s = mc.run_xiao_baseline(F, 100_000, seed=20240502)
        assert abs(s.pass_rate - (F + (1 - F) / 7)) <= 3 * s.pass_rate_error
        modified = mc.run_experiment(F, 0, 100_000, seed=20240502)[0]
        assert modified.pass_rate == 1.0


def _assert_density(rho):
    m = rho.matrix
    assert np.max(np.abs(m - m.conj().T)) < ATOL
    assert abs(np.trace(m) - 1) < ATOL
    assert np.linalg.eigvalsh(m).min() >= -1e-10


def test_criterion_7_invariant_suite():
    for F in F_GRID:
        rho = werner_state(F)
        _assert_density(rho)
        step1 = protocol.step1_correct(rho).state
        _assert_density(step1)
        converted, _ = optics.wavelength_convert(step1)
        _assert_density(converted)
        rotated = optics.apply_bilateral_hadamard(converted)
        _assert_density(rotated)
        assert abs(rotated.purity() - converted.purity()) < ATOL
        flipped = optics.apply_phase_flip(converted, "a")
        assert abs(flipped.purity() - converted.purity()) < ATOL
        check = optics.parity_check_postselect(rotated, rotated)
        _assert_density(check.kept_state)
        branches = optics.sigma_x_branches(check.kept_state)
        assert abs(sum(b.probability for b in branches) - 1) < ATOL
        for b in branches:
            _assert_density(b.kept)
        _assert_density(protocol.step2_purify(converted).state)
    # the HWP stage is unitary on each port block
    for cls in DepsClass:
        psi = make_basis_state(cls).projector()
        assert abs(optics.apply_conditional_hwp(psi).purity() - 1) < ATOL


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for i, workers in enumerate(("1", "1", "4", "7")):
        path = tmp_path / f"run{i}.csv"
        code = cli.main(
            ["simulate", "--f0", "0.5", "--rounds", "3", "--engine", "both", "--trials", "100000",
             "--seed", "42", "--workers", workers, "--out", str(path)]
        )
        assert code == 0
        outputs.append(path.read_bytes())
    assert all(o == outputs[0] for o in outputs)
