"""Acceptance criteria, one test each, at their stated tolerances and time limits.

All comparisons are exact.  Each test logs one PASS/FAIL line, repeated in
the terminal summary.  Run this file directly for the lines alone.
"""
import pytest

from ergolab.checks import run_suite

CRITERIA = [
    (1, "lipschitz", "Lipschitz bound |phi_m(A) - phi_m(B)| <= (m+1) d(A,B) on five systems"),
    (2, "ergodicity", "ergodic odometer: phi = 1 exactly on every non-null cylinder union"),
    (3, "witness-jump", "non-ergodic product: witness within 1/64 jumps by more than 1/4"),
    (4, "null-point", "null class: probe jump exactly 1 at every radius"),
    (5, "periodic", "periodic systems: bounded stabilization and L*delta probe jumps"),
    (6, "phi-star", "odometer: phi* of level-l cylinders is 2^-l, witness jumps 1/2"),
    (7, "tower", "Rokhlin towers for Odometer(2), Odometer(3): disjoint, coverage > 1 - eps"),
    (8, "oracle", "permutation rates and cylinder algebra agree with brute-force oracles"),
    (9, "totally-ergodic", "golden rotation: phi = 1 for powers up to 16, probe jumps 0"),
]


@pytest.mark.parametrize("number,suite,claim", CRITERIA, ids=[f"criterion-{n}-{s}" for n, s, _ in CRITERIA])
def test_criterion(number, suite, claim, acceptance_log):
    res = run_suite(suite, seed=0)
    line = f"criterion {number} {'PASS' if res.passed else 'FAIL'}: {claim} | {res.detail} | {res.seconds:.2f}s"
    if res.limit:
        line += f" (limit {res.limit:g}s)"
    acceptance_log.append(line)
    print(line)
    assert res.passed, res.detail


if __name__ == "__main__":
    for number, suite, claim in CRITERIA:
        r = run_suite(suite)
        print(f"criterion {number} {'PASS' if r.passed else 'FAIL'}: {claim} | {r.detail} | {r.seconds:.2f}s")
