"""Homotopy transfer, first on a toy retraction and then on the pseudo-line.

Part one pushes a strict algebra on Sierpinski through a random deformation
retraction and checks that the result is again a homotopy algebra, with an
infinity-morphism back into the original.

Part two runs the Chevalley-Eilenberg model for the Heisenberg Lie algebra on
the pseudo-line, whose opens are {}, {1}, {3}, {1,3} and {1,2,3}.  After
perturbing and transferring, the binary operation is the product of the
enveloping algebra written on symmetric tensors, so x.y - y.x = z.

    python demos/heisenberg_transfer.py
"""
from disjcalc.core import sierpinski
from disjcalc.hodisj import check_algebra, check_infinity_morphism, dual_numbers
from disjcalc.transfer import LIE_PRESETS, ce_demo, random_retraction_structure, transfer

print("-- Sierpinski, Q[x]/(x^2) (x) interval, random retraction")
A, rets = random_retraction_structure(sierpinski(), dual_numbers(), seed=1)
for U, r in sorted(rets.items(), key=lambda t: sorted(t[0])):
    print(f"  {sorted(U)}: {len(r.big)} -> {len(r.small)} dims")
B, iinf = transfer(A, rets, 3)
print(" ", check_algebra(B, 3).summary())
print(" ", check_infinity_morphism(iinf, 3).summary())

for name in ("heisenberg", "abelian2"):
    print(f"\n-- pseudo-line CE model, {name}")
    rep, *_ = ce_demo(LIE_PRESETS[name](), 3)
    for line in rep["lines"]:
        print("  ", line)
    bad = [k for k, v in rep["checks"].items() if not v["passed"]]
    print(f"  {len(rep['checks'])} checks, {'all pass' if not bad else 'failing: ' + ', '.join(bad)}")
    print(f"  every product matches PBW: {all(p['pbw_match'] for p in rep['products'])}")
