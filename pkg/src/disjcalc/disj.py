"""The colored operad Disj and its quadratic-linear presentation.

Disj(V; U_1..U_k) is one-dimensional when the U_i are pairwise disjoint
subsets of V and zero otherwise; the basis element is ``DisjBasisElement``.
The presentation uses unary generators Ext(U,V), U strictly inside V, and
binary generators Bin(U,V), U and V disjoint.  Trees of the free operad
are the shuffle trees of ``core``; linear combinations are dicts
{tree: Fraction}.

Rewriting (all rules have coefficient +1):
  R3   Bin(Ext(A), B) -> Ext(Bin(A, B))   (and on the right input)
  R1   Ext(Ext(A))    -> Ext(A)
  R2a  Bin(A, Bin(B, C))   -> Bin(Bin(A, B), C)
  R2b  Bin(Bin(A, C), B)   -> Bin(Bin(A, B), C)     if min B < min C
A tree with no redex is an optional Ext over a left comb whose leaves are
read in label order, i.e. exactly one basis element.
"""
from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import NamedTuple

from .core import (Bin, CheckReport, DisjCalcError, Echelon, Ext, FiniteSpace,
                   InadmissibleTree, Leaf, Node, Q, bin_, check_leaf_labels,
                   check_tree, ext, fmt_open, leaf, normalize_tree, nullspace,
                   okey, rank, relabel_tree, tree_inputs, tree_leaves,
                   tree_min_leaf, tree_output, tree_weight, vadd, vterm, _pkey)


class ColorMismatch(DisjCalcError):
    pass


class NotCommutative(DisjCalcError):
    pass


class NotAssociative(DisjCalcError):
    pass


# ------------------------------------------------------------ strict operad

def disj_admissible(output, inputs) -> bool:
    """Inputs pairwise disjoint and contained in the output (k >= 1)."""
    if not inputs:
        return False
    seen = frozenset()
    for U in inputs:
        if U & seen or not U <= output:
            return False
        seen |= U
    return True


class DisjBasisElement(NamedTuple):
    output: frozenset
    inputs: tuple

    @classmethod
    def make(cls, output, inputs, check=True):
        e = cls(frozenset(output), tuple(frozenset(U) for U in inputs))
        if check and not disj_admissible(e.output, e.inputs):
            raise InadmissibleTree(f"no operation {e!r}")
        return e

    @property
    def arity(self):
        return len(self.inputs)

    def act(self, sigma):
        """Right action of a permutation (one-line, 1-based): inputs U o sigma^-1."""
        k = self.arity
        new = [None] * k
        for i in range(k):
            new[sigma[i] - 1] = self.inputs[i]
        return DisjBasisElement(self.output, tuple(new))

    def to_json(self):
        return {"output": sorted(self.output, key=_pkey),
                "inputs": [sorted(U, key=_pkey) for U in self.inputs]}

    @classmethod
    def from_json(cls, obj):
        return cls.make(obj["output"], obj["inputs"])

    def __repr__(self):
        return "m^" + fmt_open(self.output) + "_(" + ",".join(fmt_open(U) for U in self.inputs) + ")"


def identity_element(U):
    return DisjBasisElement.make(U, (U,))


def compose_partial(outer: DisjBasisElement, i: int, inner: DisjBasisElement):
    """outer o_i inner (1-based slot)."""
    if outer.inputs[i - 1] != inner.output:
        raise ColorMismatch(f"slot {i} of {outer!r} has color {fmt_open(outer.inputs[i - 1])},"
                            f" inner output is {fmt_open(inner.output)}")
    ins = outer.inputs[:i - 1] + inner.inputs + outer.inputs[i:]
    if not disj_admissible(outer.output, ins):  # never happens for valid data
        return None
    return DisjBasisElement(outer.output, ins)


def compose_strict(outer: DisjBasisElement, inners):
    """Full composition outer(inner_1, ..., inner_k); None stands for zero."""
    if len(inners) != outer.arity:
        raise ColorMismatch(f"{outer!r} takes {outer.arity} inputs, got {len(inners)}")
    ins = []
    for i, (U, e) in enumerate(zip(outer.inputs, inners), 1):
        if e.output != U:
            raise ColorMismatch(f"slot {i}: expected output {fmt_open(U)}, got {fmt_open(e.output)}")
        ins.extend(e.inputs)
    if not disj_admissible(outer.output, ins):
        return None
    return DisjBasisElement(outer.output, tuple(ins))


# ------------------------------------------------------------ rewriting

def _redexes(t, path=()):
    """Yield (path, rule) for every redex, in pre-order."""
    if isinstance(t, Leaf):
        return
    g = t.gen
    if isinstance(g, Ext):
        if isinstance(t.children[0], Node) and isinstance(t.children[0].gen, Ext):
            yield path, "R1"
    else:
        a, b = t.children
        if isinstance(a, Node) and isinstance(a.gen, Ext):
            yield path, "R3L"
        if isinstance(b, Node) and isinstance(b.gen, Ext):
            yield path, "R3R"
        if isinstance(b, Node) and isinstance(b.gen, Bin):
            yield path, "R2a"
        if isinstance(a, Node) and isinstance(a.gen, Bin):
            if tree_min_leaf(b) < tree_min_leaf(a.children[1]):
                yield path, "R2b"
    for i, c in enumerate(t.children):
        yield from _redexes(c, path + (i,))


def _rewrite_here(t, rule):
    if rule == "R1":
        inner = t.children[0]
        return ext(inner.gen.src, t.gen.dst, inner.children[0])
    a, b = t.children
    if rule == "R3L":
        W = tree_output(b)
        return ext(a.gen.src | W, a.gen.dst | W, bin_(a.children[0], b))
    if rule == "R3R":
        U = tree_output(a)
        return ext(U | b.gen.src, U | b.gen.dst, bin_(a, b.children[0]))
    if rule == "R2a":
        B, C = b.children
        return bin_(bin_(a, B), C)
    if rule == "R2b":
        A, C = a.children
        return bin_(bin_(A, b), C)
    raise ValueError(rule)


def _apply_at(t, path, rule):
    if not path:
        return _rewrite_here(t, rule)
    i = path[0]
    ch = list(t.children)
    ch[i] = _apply_at(ch[i], path[1:], rule)
    return normalize_tree(Node(t.gen, tuple(ch)))


_PRIORITY = {"R3L": 0, "R3R": 0, "R1": 1, "R2a": 2, "R2b": 2}


def rewrite(t, strategy="standard", rng=None, trace=None):
    """Rewrite a tree until no rule applies.  ``strategy`` is 'standard'
    (R3, then R1, then R2) or 'random' (uniform redex, needs ``rng``)."""
    while True:
        reds = list(_redexes(t))
        if not reds:
            return t
        if strategy == "random":
            path, rule = (rng or random).choice(reds)
        else:
            path, rule = min(reds, key=lambda pr: _PRIORITY[pr[1]])
        t = _apply_at(t, path, rule)
        if trace is not None:
            trace.append((rule, path, t))


def _basis_of_normal(t) -> DisjBasisElement:
    body = t
    if isinstance(t, Node) and isinstance(t.gen, Ext):
        body = t.children[0]
    # body must be a left comb read in label order
    s = body
    labels = []
    while isinstance(s, Node):
        assert isinstance(s.gen, Bin), "Ext left below a Bin after rewriting"
        left, right = s.children
        assert isinstance(right, Leaf)
        labels.append(right.label)
        s = left
    labels.append(s.label)
    labels.reverse()
    assert labels == sorted(labels)
    return DisjBasisElement(tree_output(t), tree_inputs(t))


def normal_form_tree(t, strategy="standard", seed=None):
    check_tree(t)
    check_leaf_labels(t)
    rng = random.Random(seed) if strategy == "random" else None
    return _basis_of_normal(rewrite(t, strategy, rng))


def normal_form(element, strategy="standard", seed=None) -> dict:
    """Linear combination of trees (or a single tree) -> {DisjBasisElement: coeff}."""
    if isinstance(element, (Leaf, Node)):
        element = {element: Q(1)}
    out = {}
    for t, c in element.items():
        vterm(out, normal_form_tree(t, strategy, seed), Q(c))
    return out


# ------------------------------------------------------------ tree enumeration

def _opens_below(space, V):
    return [U for U in space.opens if U < V]


@lru_cache(maxsize=None)
def _trees(space, V, leaves, max_weight):
    """All shuffle trees with output V on the labelled leaves ((label, color), ...)."""
    if max_weight is not None and max_weight < 0:
        return ()
    cols = [c for _, c in leaves]
    seen = frozenset()
    for c in cols:
        if c & seen or not c <= V:
            return ()
        seen |= c
    out = []
    if len(leaves) == 1 and cols[0] == V:
        out.append(Leaf(leaves[0][0], V))
    mw = None if max_weight is None else max_weight - 1
    for U in _opens_below(space, V):
        if seen <= U:
            for t in _trees(space, U, leaves, mw):
                out.append(Node(Ext(U, V), (t,)))
    if len(leaves) >= 2:
        first, rest = leaves[0], leaves[1:]
        for r in range(0, len(rest)):
            for pick in itertools.combinations(rest, r):
                L1 = (first,) + pick
                L2 = tuple(x for x in rest if x not in pick)
                u1 = frozenset().union(*(c for _, c in L1))
                u2 = frozenset().union(*(c for _, c in L2))
                for A in space.opens:
                    if not u1 <= A or A & u2 or not A <= V:
                        continue
                    B = V - A
                    if B not in space._index or not u2 <= B:
                        continue
                    for t1 in _trees(space, A, L1, mw):
                        rem = None if mw is None else mw - tree_weight(t1)
                        for t2 in _trees(space, B, L2, rem):
                            out.append(Node(Bin(A, B), (t1, t2)))
    return tuple(out)


def enumerate_trees(space, output, inputs, max_weight=None, weight=None):
    """Shuffle trees with the given output color and input colors (leaf i has
    color inputs[i-1]).  Finite because Ext ladders are bounded by the lattice."""
    leaves = tuple((i + 1, frozenset(U)) for i, U in enumerate(inputs))
    ts = _trees(space, frozenset(output), leaves, max_weight)
    if weight is not None:
        ts = tuple(t for t in ts if tree_weight(t) == weight)
    return list(ts)


def color_signatures(space, arity, canonical=True):
    """(output, inputs) pairs of the given arity.  With ``canonical`` the
    input tuple is sorted (the rest follow by relabelling)."""
    it = (itertools.combinations_with_replacement(space.opens, arity) if canonical
          else itertools.product(space.opens, repeat=arity))
    for ins in it:
        for V in space.opens:
            yield V, tuple(ins)


# ------------------------------------------------------------ relations

class RelationBasis(NamedTuple):
    output: frozenset
    inputs: tuple
    r1: list
    r2: list
    r3: list
    qr: list  # R1 with the linear term dropped, then R2, R3 unchanged

    @property
    def all(self):
        return self.r1 + self.r2 + self.r3

    def __len__(self):
        return len(self.r1) + len(self.r2) + len(self.r3)


def _lin(*pairs):
    v = {}
    for t, c in pairs:
        vterm(v, normalize_tree(t), Q(c))
    return v


@lru_cache(maxsize=None)
def _relation_basis(space, V, ins):
    r1, r2, r3 = [], [], []
    k = len(ins)
    if k == 1:
        (U,) = ins
        if U < V:
            for W in space.opens:
                if U < W < V:
                    x = leaf(1, U)
                    r1.append(_lin((ext(W, V, ext(U, W, x)), 1), (ext(U, V, x), -1)))
    elif k == 2:
        A, B = ins
        if not A & B and A | B <= V:
            x, y = leaf(1, A), leaf(2, B)
            # Ext on the first input
            if B <= V and (V - B) in space._index and A < V - B:
                Vl = V - B
                r3.append(_lin((bin_(ext(A, Vl, x), y), 1),
                               (ext(A | B, V, bin_(x, y)), -1)))
            if A <= V and (V - A) in space._index and B < V - A:
                Vr = V - A
                r3.append(_lin((bin_(x, ext(B, Vr, y)), 1),
                               (ext(A | B, V, bin_(x, y)), -1)))
    elif k == 3:
        U, W_, X = ins
        if not (U & W_ or U & X or W_ & X) and U | W_ | X == V:
            a, b, c = leaf(1, U), leaf(2, W_), leaf(3, X)
            t1 = bin_(bin_(a, b), c)
            t2 = bin_(bin_(a, c), b)
            t3 = bin_(a, bin_(b, c))
            r2.append(_lin((t1, 1), (t2, -1)))
            r2.append(_lin((t2, 1), (t3, -1)))
    qr = [{t: c for t, c in r.items() if tree_weight(t) == 2} for r in r1] + r2 + r3
    return RelationBasis(V, ins, r1, r2, r3, qr)


def relation_basis(space, colors) -> RelationBasis:
    """All R1/R2/R3 elements with colors (output, inputs); inputs indexed by leaf label."""
    V, ins = colors
    return _relation_basis(space, frozenset(V), tuple(frozenset(U) for U in ins))


# ------------------------------------------------------------ local substitution

def _node_at(t, path):
    for i in path:
        t = t.children[i]
    return t


def _replace_at(t, path, new):
    if not path:
        return new
    ch = list(t.children)
    ch[path[0]] = _replace_at(ch[path[0]], path[1:], new)
    return Node(t.gen, tuple(ch))


def _edges(t, path=()):
    """Paths to vertices having at least one vertex child, with that child index."""
    if isinstance(t, Leaf):
        return
    for i, c in enumerate(t.children):
        if isinstance(c, Node):
            yield path, i
        yield from _edges(c, path + (i,))


def _local_piece(v, ci):
    """The two-vertex piece (v, its child ci) with hanging subtrees made leaves."""
    hang = []
    for i, c in enumerate(v.children):
        if i == ci:
            hang.extend(c.children)
        else:
            hang.append(c)
    order = sorted(range(len(hang)), key=lambda j: tree_min_leaf(hang[j]))
    pos = {j: n + 1 for n, j in enumerate(order)}
    it = iter(range(len(hang)))
    kids = []
    for i, c in enumerate(v.children):
        if i == ci:
            sub = tuple(Leaf(pos[next(it)], tree_output(g)) for g in c.children)
            kids.append(Node(c.gen, sub))
        else:
            kids.append(Leaf(pos[next(it)], tree_output(c)))
    local = normalize_tree(Node(v.gen, tuple(kids)))
    hanging = [hang[j] for j in order]
    return local, hanging


def _plug(local, hanging):
    def go(s):
        if isinstance(s, Leaf):
            return hanging[s.label - 1]
        return Node(s.gen, tuple(go(c) for c in s.children))
    return go(local)


def ideal_elements(space, t):
    """Elements C[r(T_1..T_m)] for every relation r whose quadratic part
    contains the two-vertex piece of ``t`` at some edge."""
    out = []
    for path, ci in _edges(t):
        v = _node_at(t, path)
        local, hanging = _local_piece(v, ci)
        rb = relation_basis(space, (tree_output(local), tree_inputs(local)))
        for r in rb.all:
            if local not in r:
                continue
            vec = {}
            for q, c in r.items():
                nt = normalize_tree(_replace_at(t, path, _plug(q, hanging)))
                vterm(vec, nt, c)
            out.append(vec)
    return out


# ------------------------------------------------------------ dimensions

def arity_dimension(space, output, inputs, method="normal_form"):
    """dim of the (output; inputs) component of the presented operad.

    'normal_form': number of distinct normal forms over all trees.
    'rank': number of trees minus the rank of the ideal in that component.
    """
    trees = enumerate_trees(space, output, inputs)
    if method == "normal_form":
        return len({normal_form_tree(t) for t in trees})
    if method == "rank":
        ech = Echelon(order=_tree_order)
        for t in trees:
            for vec in ideal_elements(space, t):
                ech.add(vec)
        return len(trees) - len(ech)
    raise ValueError(method)


def _tree_order(t):
    return repr(t)


def presentation_report(space, max_arity=4, method="normal_form"):
    """Compare arity_dimension with the admissibility predicate on every
    color signature of arity <= max_arity."""
    rep = CheckReport(f"presentation[{space.name}, k<={max_arity}, {method}]")
    for k in range(1, max_arity + 1):
        for V, ins in color_signatures(space, k, canonical=False):
            d = arity_dimension(space, V, ins, method)
            rep.checked += 1
            want = 1 if disj_admissible(V, ins) else 0
            if d != want:
                rep.fail(output=V, inputs=ins, dimension=d, expected=want)
    return rep


# ------------------------------------------------------------ ql conditions

def check_ql(space, weight_bound=3, canonical=True) -> CheckReport:
    """Exact check of the two conditions for a quadratic-linear presentation.

    ql1: no nonzero element of R is linear, i.e. R -> quadratic part is injective.
    ql2: (R o E + E o R) meets the quadratic trees only inside R.  Per color
    signature we enumerate the weight-3 trees, form every S-generator by
    substituting a relation at an edge, take the kernel of the cubic
    projection and test its quadratic part against span(R).
    """
    rep = CheckReport(f"ql[{space.name}]")
    rep.details = {"strata": 0, "generators": 0, "quadratic_solutions": 0}
    for k in (1, 2, 3):
        for V, ins in color_signatures(space, k, canonical):
            rb = relation_basis(space, (V, ins))
            if not len(rb):
                continue
            rep.checked += 1
            full = rank(rb.all, _tree_order)
            quad = rank([{t: c for t, c in r.items() if tree_weight(t) == 2} for r in rb.all],
                        _tree_order)
            if full != quad:
                rep.fail(condition="ql1", output=V, inputs=ins)
    if weight_bound < 3:
        return rep
    for k in range(1, 5):
        for V, ins in color_signatures(space, k, canonical):
            cubic = enumerate_trees(space, V, ins, max_weight=3, weight=3)
            if not cubic:
                continue
            gens = []
            seen = set()
            for t in cubic:
                for vec in ideal_elements(space, t):
                    key = frozenset(vec.items())
                    if key not in seen:
                        seen.add(key)
                        gens.append(vec)
            if not gens:
                continue
            rep.details["strata"] += 1
            rep.details["generators"] += len(gens)
            cols = [{t: c for t, c in g.items() if tree_weight(t) == 3} for g in gens]
            ker = nullspace(cols, _tree_order)
            R = Echelon(order=_tree_order)
            for r in relation_basis(space, (V, ins)).all:
                R.add(r)
            for combo in ker:
                q = {}
                for j, c in combo.items():
                    vadd(q, gens[j], c)
                if not q:
                    continue
                rep.details["quadratic_solutions"] += 1
                rep.checked += 1
                if not R.contains(q):
                    rep.fail(condition="ql2", output=V, inputs=ins,
                             element={repr(t): c for t, c in q.items()})
    return rep


# The "two unary operations" system, with the colors forgotten: every
# composite is recorded by its planar shape.  Shapes with two Ext and one Bin:
#   T1 Ext(Ext(Bin))        T2 Bin(Ext(Ext(-)), -)     T3 Bin(-, Ext(Ext(-)))
#   T4 Bin(Ext(-), Ext(-))  T5 Ext(Bin(Ext(-), -))     T6 Ext(Bin(-, Ext(-)))
# and the quadratic shapes Q1 Ext(Bin), Q2 Bin(Ext(-), -), Q3 Bin(-, Ext(-)).

_E = ("E",)


def _shape(t):
    """Planar shape of a tree: generator kinds with leaves as '-'."""
    if isinstance(t, Leaf):
        return "-"
    kind = "E" if isinstance(t.gen, Ext) else "B"
    return kind + "(" + ",".join(_shape(c) for c in t.children) + ")"


def _fine_tuned_generators():
    """e1..e9 on a symbolic configuration.  Colors are dropped, so each e_i
    is a pair (cubic tree, quadratic-or-cubic tree) of abstract shapes."""
    U, V = leaf(1, "U"), leaf(2, "V")
    E = lambda c: Node(Ext(None, None), (c,))
    B = lambda a, b: Node(Bin(None, None), (a, b))
    return [
        (E(E(B(U, V))), E(B(U, V))),                  # e1
        (B(E(E(U)), V), B(E(U), V)),                  # e2
        (B(U, E(E(V))), B(U, E(V))),                  # e3
        (B(E(U), E(V)), E(B(U, E(V)))),               # e4
        (B(E(E(U)), V), E(B(E(U), V))),               # e5
        (E(B(E(U), V)), E(E(B(U, V)))),               # e6
        (B(E(U), E(V)), E(B(E(U), V))),               # e7
        (B(U, E(E(V))), E(B(U, E(V)))),               # e8
        (E(B(U, E(V))), E(E(B(U, V)))),               # e9
    ]


def fine_tuned_system():
    """Returns (equations, solution basis, quadratic residues).

    equations: {cubic shape: {i: coeff}} (i = 1..9), one per planar shape.
    solutions: basis of the common kernel, vectors indexed 1..9.
    residues: for each solution, its quadratic part as {shape: coeff}.
    """
    gens = _fine_tuned_generators()
    cols = []
    for first, second in gens:
        v = {}
        vterm(v, _shape(first), 1)
        vterm(v, _shape(second), -1)
        cols.append(v)
    eqs = {}
    for i, v in enumerate(cols, 1):
        for s, c in v.items():
            if s.count("E") + s.count("B") == 3:
                eqs.setdefault(s, {})[i] = c
    cubic_cols = [{s: c for s, c in v.items() if s.count("E") + s.count("B") == 3} for v in cols]
    ker = nullspace(cubic_cols)
    sols = [{j + 1: c for j, c in combo.items()} for combo in ker]
    residues = []
    for sol in sols:
        q = {}
        for i, c in sol.items():
            vadd(q, {s: x for s, x in cols[i - 1].items() if s.count("E") + s.count("B") == 2}, c)
        residues.append(q)
    return eqs, sols, residues


def same_span(vecs_a, vecs_b, n):
    """Do two lists of vectors (dicts over 1..n) span the same space?"""
    ra, rb = rank(vecs_a), rank(vecs_b)
    return ra == rb == rank(list(vecs_a) + list(vecs_b))


# R3 in shape form: Q2 - Q1 and Q3 - Q1 (both kinds of Ext move across Bin)
R3_SHAPES = [{"B(E(-),-)": 1, "E(B(-,-))": -1}, {"B(-,E(-))": 1, "E(B(-,-))": -1}]


# ------------------------------------------------------------ strict algebras

def strict_algebra_from_commutative(space, algebra):
    """The strict structure A(U) = A with Ext acting by the identity and Bin by
    the product; all operations of weight >= 2 vanish.

    ``algebra`` is a ``CommAlgebra`` (see hodisj) or its JSON dict.
    """
    from .hodisj import CommAlgebra, strict_structure
    if isinstance(algebra, dict):
        algebra = CommAlgebra.from_json(algebra)
    algebra.validate()
    return strict_structure(space, algebra)


# ------------------------------------------------------------ export

def basis_element_to_dot(e: DisjBasisElement, name="op"):
    """A corolla drawing of a basis element."""
    lines = [f"digraph {name} {{", "  rankdir=BT;",
             f'  v [shape=circle, label="m"];',
             f'  root [shape=point]; v -> root [label="{fmt_open(e.output)}"];']
    for i, U in enumerate(e.inputs, 1):
        lines.append(f'  l{i} [shape=plaintext, label="{i}"]; l{i} -> v [label="{fmt_open(U)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
