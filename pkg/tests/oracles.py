"""Symbolic reference calculations, independent of the matrix code paths.

Kets are dicts from basis labels to integer amplitudes; the common
1/sqrt(2) normalizations cancel in every ratio computed here, so all
results are exact Fractions.
"""
from fractions import Fraction
from itertools import product

# (pol_a, freq_a, pol_b, freq_b) with pol in "HV" and freq in "01" (0 = unprimed)
DEPS_KETS = {
    "Phi+": {("H", 0, "H", 0): 1, ("V", 1, "V", 1): 1},
    "Phi-": {("H", 0, "H", 0): 1, ("V", 1, "V", 1): -1},
    "Psi+": {("H", 0, "V", 0): 1, ("V", 1, "H", 1): 1},
    "Psi-": {("H", 0, "V", 0): 1, ("V", 1, "H", 1): -1},
    "Gamma+": {("V", 0, "H", 0): 1, ("H", 1, "V", 1): 1},
    "Gamma-": {("V", 0, "H", 0): 1, ("H", 1, "V", 1): -1},
    "Upsilon+": {("V", 0, "V", 0): 1, ("H", 1, "H", 1): 1},
    "Upsilon-": {("V", 0, "V", 0): 1, ("H", 1, "H", 1): -1},
}

FLIP = {"H": "V", "V": "H"}


def lower_port(pol, freq):
    # upper port holds (H, unprimed) and (V, primed)
    return (pol == "H") != (freq == 0)


def ports(term):
    pa, fa, pb, fb = term
    return (3 if lower_port(pa, fa) else 1, 4 if lower_port(pb, fb) else 2)


def hwp_correct(ket):
    out = {}
    for (pa, fa, pb, fb), amp in ket.items():
        if lower_port(pa, fa):
            pa = FLIP[pa]
        if lower_port(pb, fb):
            pb = FLIP[pb]
        out[(pa, fa, pb, fb)] = out.get((pa, fa, pb, fb), 0) + amp
    return out


def same_ket(k1, k2):
    return {t: a for t, a in k1.items() if a} == {t: a for t, a in k2.items() if a}


def classify(ket):
    for name, ref in DEPS_KETS.items():
        if same_ket(ket, ref):
            return name
    raise AssertionError(f"unrecognised ket {ket}")


def werner_weights(F):
    F = Fraction(F)
    return {name: (F if name == "Phi+" else (1 - F) / 7) for name in DEPS_KETS}


def step1_weights(F):
    """(weight on Phi+, weight on Phi-) after bit-flip correction."""
    out = {"Phi+": Fraction(0), "Phi-": Fraction(0)}
    for name, w in werner_weights(F).items():
        out[classify(hwp_correct(DEPS_KETS[name]))] += w
    return out["Phi+"], out["Phi-"]


# Polarization-only pair kets after conversion, keys (pol_a, pol_b).
BELL_KETS = {
    "Phi+": {("H", "H"): 1, ("V", "V"): 1},
    "Phi-": {("H", "H"): 1, ("V", "V"): -1},
    "Psi+": {("H", "V"): 1, ("V", "H"): 1},
    "Psi-": {("H", "V"): 1, ("V", "H"): -1},
}

# Bilateral Hadamard image of each Bell state (standard identities).
AFTER_HADAMARD = {"Phi+": "Phi+", "Phi-": "Psi+", "Psi+": "Phi-", "Psi-": "Psi-"}


def norm2(ket):
    return sum(a * a for a in ket.values())


def parity_branch(name1, name2):
    """Pass probability and surviving four-photon ket (a1, b1, a2, b2)."""
    k1, k2 = BELL_KETS[name1], BELL_KETS[name2]
    joint = {t1 + t2: a1 * a2 for (t1, a1), (t2, a2) in product(k1.items(), k2.items())}
    kept = {t: a for t, a in joint.items() if t[0] == t[2] and t[1] == t[3]}
    return Fraction(norm2(kept), norm2(joint)), kept


def sigma_x_outcomes(kept):
    """{(sa, sb): (relative probability, corrected pair ket)} on photons a2, b2."""
    x = {+1: {"H": 1, "V": 1}, -1: {"H": 1, "V": -1}}
    results = {}
    total = norm2(kept)
    for sa, sb in product((+1, -1), repeat=2):
        pair = {}
        for (a1, b1, a2, b2), amp in kept.items():
            pair[(a1, b1)] = pair.get((a1, b1), 0) + amp * x[sa][a2] * x[sb][b2]
        if sa != sb:
            pair = {(a, b): (-amp if a == "V" else amp) for (a, b), amp in pair.items()}
        # the x-basis bras contribute 1/2 to each squared amplitude
        results[(sa, sb)] = (Fraction(norm2(pair), 4 * total) if total else Fraction(0), pair)
    return results


def classify_bell(ket):
    for name, ref in BELL_KETS.items():
        if same_ket(ket, ref) or same_ket(ket, {t: -a for t, a in ref.items()}):
            return name
    raise AssertionError(f"unrecognised pair ket {ket}")


def step2_oracle(p):
    """(pass probability, output weight on Phi+) for p Phi+ + (1 - p) Phi- input."""
    p = Fraction(p)
    weights = {AFTER_HADAMARD["Phi+"]: p, AFTER_HADAMARD["Phi-"]: 1 - p}
    passed = Fraction(0)
    out = {}
    for (n1, w1), (n2, w2) in product(weights.items(), repeat=2):
        prob, kept = parity_branch(n1, n2)
        if prob == 0:
            continue
        passed += w1 * w2 * prob
        for branch_prob, pair in sigma_x_outcomes(kept).values():
            if branch_prob == 0:
                continue
            name = AFTER_HADAMARD[classify_bell(pair)]
            out[name] = out.get(name, 0) + w1 * w2 * prob * branch_prob
    return passed, out.get("Phi+", Fraction(0)) / passed


def iterate_sector(p0, rounds):
    ps = [p0]
    for _ in range(rounds):
        p = ps[-1]
        ps.append(p * p / (p * p + (1 - p) * (1 - p)))
    return ps
