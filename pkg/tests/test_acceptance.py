"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every criterion runs through its verification suite (entgeo.verify), which
pairs the implementation with an independent oracle:

 1. pythagoras            identity gap <= 1e-7 over 100 pairs, both families
 2. projection-optimality projection never undercut by 10^4 family samples
 3. maxent-oracle         entropy within 1e-6 of a projected-gradient
                          simplex solver; boundary faces and entropies exact
                          to 1e-8 in C^4 and C^6
 4. calculus              gradient vs finite differences (1e-6, 100 trials),
                          metric vs second differences (1e-5, 50 trials),
                          metric positive definite off the identity
 5. limits                ray limits and free-energy asymptotes within 1e-6
                          of direct evaluation at large parameters
 6. pinsker               2 S(rho, sigma) - |rho - sigma|_1^2 >= -1e-8 over
                          1000 pairs including rank-deficient states
 7. closure-dichotomies   mid-segment distance >= 0.05 vs top end <= 1e-6;
                          a certified non-exposed depth-2 lattice node
 8. topology              the bit and qubit counterexample patterns; no
                          one-way-arrow violations over 200 random sequences
 9. lattice-oracle        enumerated lattice equals the polytope face
                          lattice for C^5 with 2 random constraints, 10x
10. representation        divergences preserved to 1e-10 under embeddings;
                          uniform-state collapse exact for n = 3, 5
"""

import pytest

from entgeo.verify import SUITES

CRITERIA = [
    ("criterion-01", "pythagoras"),
    ("criterion-02", "projection-optimality"),
    ("criterion-03", "maxent-oracle"),
    ("criterion-04", "calculus"),
    ("criterion-05", "limits"),
    ("criterion-06", "pinsker"),
    ("criterion-07", "closure-dichotomies"),
    ("criterion-08", "topology"),
    ("criterion-09", "lattice-oracle"),
    ("criterion-10", "representation"),
]


@pytest.mark.parametrize("label,suite", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(label, suite):
    result = SUITES[suite](0)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {label} [{suite}]")
    for failure in result.detail.get("failures", []):
        print(f"     {failure}")
    assert result.passed, f"{label} ({suite}): {result.detail.get('failures')}"
