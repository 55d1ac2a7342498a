"""Signs in the Koszul dual cooperad, and what breaks without them.

Generators are ordered families of strict chains of opens.  The differential
deletes interior entries of a chain.  The decomposition splits a family into
an outer family whose inputs are the tops of inner families.  Getting the cooperad identities to hold took three sign
corrections (see SIGNS.md); this script switches each one off in turn and
prints the first identity that fails.

    python demos/cooperad_signs.py
"""
from disjcalc.core import fmt_open, fmt_q, pseudo_line, sierpinski
from disjcalc.koszul_dual import (codistribute, decompose_full, decompose_inf, kd_differential_planar,
                                  literal_signs, parse_family, verify_cooperad)

F = parse_family("[({}<{1}<{1,2}<{1,2,3})]")
print(f"F = {F!r}  (weight {F.weight})")
print("d F =")
for G, c in sorted(kd_differential_planar(F).items(), key=repr):
    print(f"   {fmt_q(c)} {G!r}")

G = parse_family("[({}<{1}), ({}<{3})]")
print(f"\ninfinitesimal cuts of {G!r}:")
for t in decompose_inf(G):
    print("  ", t)
print("full cuts:")
for t in decompose_full(G):
    print("  ", t)
H = parse_family("[({}<{1}<{1,2}), ({3}<{3,4})]")
print(f"\nmerging the chains of {H!r} into one chain:")
for chain, bottoms, c in codistribute(H):
    print(f"   {fmt_q(c)} {'<'.join(map(fmt_open, chain))} over {bottoms!r}")

print("\n-- with all corrections")
for sp in (sierpinski(), pseudo_line()):
    print(" ", verify_cooperad(sp, 3).summary())

for name in ("d", "shuffle", "full"):
    print(f"\n-- dropping the '{name}' correction")
    with literal_signs(**{k: k == name for k in ('d', 'shuffle', 'full')}):
        for sp in (sierpinski(), pseudo_line()):
            r = verify_cooperad(sp, 3)
            print(" ", r.summary())
            if r.violations:
                v = r.violations[0]
                print(f"    first failure: {v['check']} on {v['family']}")
