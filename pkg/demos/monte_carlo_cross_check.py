"""
Monte Carlo cross-check of the exact density-matrix results
============================================================

Trajectories track class labels only, which is exact here because every
ensemble in the protocol is diagonal in the class basis.
"""

import numpy as np

from depspurify import montecarlo as mc
from depspurify import protocol

F0, rounds, trials, seed = 0.2, 4, 100_000, 7

exact = protocol.iterate(F0, rounds)
sampled = mc.run_experiment(F0, rounds, trials, seed=seed)

print("round  exact      mc         stderr    z     kept")
for e, s in zip(exact.rounds, sampled):
    z = (s.fidelity_estimate - e.fidelity) / s.standard_error
    print(f"{e.round:5d}  {e.fidelity:.6f}  {s.fidelity_estimate:.6f}  {s.standard_error:.2e}"
          f"  {z:+.2f}  {s.kept}")

###############################################################################
# The discarding first step, sampled.

for F in (0.2, 0.5, 0.8):
    s = mc.run_xiao_baseline(F, trials, seed=seed)
    print(f"F = {F}: kept fraction {s.pass_rate:.5f} +/- {s.pass_rate_error:.5f}"
          f"  (expected {F + (1 - F) / 7:.5f})")

###############################################################################
# A single recorded trial: two pairs through step 1 and one round.

print(mc.sample_trial(0.5, np.random.default_rng(seed)))
