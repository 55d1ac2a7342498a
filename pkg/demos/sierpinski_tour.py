"""A walk through the Sierpinski space, from the operad up to algebras over it.

Sierpinski has points {1, 2} and opens {}, {1}, {1,2}.  We look at the
operations, rewrite a tree to normal form, check the presentation and its
Koszul dual, then build a strict algebra and read off the classical data.

    python demos/sierpinski_tour.py
"""
from disjcalc.core import leaf, ext, bin_, fmt_open, sierpinski
from disjcalc.disj import (DisjBasisElement, check_ql, compose_partial, disj_admissible,
                           normal_form_tree, presentation_report)
from disjcalc.hodisj import check_algebra, dual_numbers, specialize_finite, strict_structure
from disjcalc.koszul_dual import enumerate_chain_families, koszul_homology

E, A, X = frozenset(), frozenset({1}), frozenset({1, 2})
sp = sierpinski()
print(f"space: points {sp.points}, opens {[fmt_open(U) for U in sp.opens]}")

# operations exist when the inputs are pairwise disjoint and sit inside the output
print("\n-- operations in arity 2")
for V in sp.opens:
    for U1 in sp.opens:
        for U2 in sp.opens:
            if disj_admissible(V, (U1, U2)):
                print(f"  {fmt_open(V)} <- {fmt_open(U1)}, {fmt_open(U2)}")

# composition just concatenates inputs
outer = DisjBasisElement.make(X, (A, E))
inner = DisjBasisElement.make(A, (E, E))
print(f"\n{outer!r} o_1 {inner!r} = {compose_partial(outer, 1, inner)!r}")

# a tree that extends twice and multiplies; rewriting collapses it to one basis element
t = ext(A, X, bin_(leaf(1, E), ext(E, A, leaf(2, E))))
print(f"\ntree {t!r}\n  normal form {normal_form_tree(t)!r}")

print("\n-- presentation and quadratic-linear conditions")
print(" ", presentation_report(sp, 3).summary())
print(" ", check_ql(sp, 3).summary())

print("\n-- Koszul dual: cobar homology in a few arities")
for V, ins in [(X, (E,)), (X, (E, A)), (A, (A, A)), (X, (E, E, A))]:
    h = koszul_homology(sp, V, ins)
    print(f"  {fmt_open(V)} <- ({', '.join(map(fmt_open, ins))}): {h or 'acyclic'}")
print(f"  weight-2 generators in arity 2: {len(list(enumerate_chain_families(sp, 2, 2)))}")

print("\n-- a strict algebra: Q[x]/(x^2) on every open")
S = strict_structure(sp, dual_numbers())
print(" ", check_algebra(S, 3).summary())
spec = specialize_finite(S)
print(f"  classical data ({spec.kind}): {sorted(spec.data)}; {spec.report.summary()}")
