"""
Bit-flip correction with WDMs, PBSs and two half-wave plates
=============================================================

Each photon of a doubly entangled pair leaves its WDM + PBS through an
upper or a lower port. The lower port flags a polarization flip, and a
half-wave plate there undoes it, so every pair is kept.
"""

from depspurify import optics, protocol
from depspurify.qstate import DepsClass, fidelity, make_basis_state, werner_state

###############################################################################
# Port routing of the eight classes, and the class each one becomes after the
# half-wave plates.

for cls in DepsClass:
    corrected = optics.apply_conditional_hwp(make_basis_state(cls))
    overlaps = {
        target.label: abs(corrected.overlap(make_basis_state(target))) ** 2
        for target in (DepsClass.PHI_PLUS, DepsClass.PHI_MINUS)
    }
    becomes = max(overlaps, key=overlaps.get)
    print(f"{cls.label:9s} ports {optics.port_signature(cls)}  ->  {becomes}")

###############################################################################
# A Werner ensemble keeps all of its pairs; only the sign (phase-flip)
# errors remain.

for F in (0.2, 0.5, 0.8):
    result = protocol.step1_correct(werner_state(F))
    plus, minus = result.weights
    print(f"F = {F:.1f}: yield {result.yield_:.3f}, Phi+ {plus:.6f}, Phi- {minus:.6f}"
          f"  (closed form {(4 * F + 3) / 7:.6f})")

###############################################################################
# The discarding variant only keeps coincidences on ports (1, 2).

baseline = protocol.xiao_step1_baseline(werner_state(0.5))
print(f"discarding scheme at F = 0.5: yield {baseline.yield_:.6f}, "
      f"fidelity {fidelity(baseline.state, make_basis_state(DepsClass.PHI_PLUS)):.6f}")
