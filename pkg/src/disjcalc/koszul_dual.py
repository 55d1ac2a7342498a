"""The Koszul dual cooperad: chain families, differential, decompositions.

Ordered chain families span a planar (non-symmetric) cooperad on which the
differential and both decomposition maps are written down directly.  The
symmetric cooperad is the quotient by graded shuffle relations; to handle
it we carry *labeled* families (family, labels) where ``labels[m]`` is the
input slot fed into chain m.  Such an element evaluates on inputs
(a_1..a_k) as mu_family(a_{labels[0]}, ..., a_{labels[k-1]}) with the
Koszul sign of the reordering.

The relation vectors only permute the chains of a family, so the quotient
splits over S_k-orbits of (chain, label) pairs, and reduction never needs
to know the ambient space.
"""
from __future__ import annotations

import csv
import io
import itertools
from contextlib import contextmanager
from functools import lru_cache

from .core import (DisjCalcError, DifferentialNotSquareZero, Echelon, FiniteSpace,
                   GradedComplex, chain_key, compositions, fmt_chain, fmt_open,
                   fmt_q, homology_ranks, inverse_perm, koszul_sign, okey,
                   perm_sign, shuffles, vadd, vterm, Q,
                   CheckReport, _jsonable, _pkey)


class DisjointnessViolation(DisjCalcError):
    pass


class MixedArity(DisjCalcError):
    pass


class InvalidFamily(DisjCalcError):
    pass


def _union(sets):
    out = frozenset()
    for S in sets:
        if out & S:
            raise DisjointnessViolation(f"{fmt_open(out)} and {fmt_open(S)} overlap")
        out = out | S
    return out


class ChainFamily(tuple):
    """An ordered tuple of strict chains of opens with pairwise disjoint tops."""

    def __new__(cls, chains, check=True):
        obj = tuple.__new__(cls, (tuple(frozenset(U) for U in ch) for ch in chains))
        if check:
            obj.validate()
        return obj

    def validate(self):
        if not self:
            raise InvalidFamily("a chain family needs at least one chain")
        for ch in self:
            if not ch:
                raise InvalidFamily("empty chain")
            for a, b in zip(ch, ch[1:]):
                if not a < b:
                    raise InvalidFamily(f"chain {fmt_chain(ch)} is not strictly increasing")
        try:
            _union(ch[-1] for ch in self)
        except DisjointnessViolation:
            raise InvalidFamily("tops are not pairwise disjoint") from None

    @property
    def k(self):
        return len(self)

    @property
    def lengths(self):
        return tuple(len(ch) for ch in self)

    @property
    def weight(self):
        return (len(self) - 1) + sum(len(ch) - 1 for ch in self)

    @property
    def degree(self):
        return -self.weight

    @property
    def inputs(self):
        return tuple(ch[0] for ch in self)

    @property
    def tops(self):
        return tuple(ch[-1] for ch in self)

    @property
    def output(self):
        return _union(self.tops)

    def is_identity(self):
        return len(self) == 1 and len(self[0]) == 1

    def key(self):
        return tuple(chain_key(ch) for ch in self)

    def __repr__(self):
        return "[" + ", ".join(fmt_chain(ch) for ch in self) + "]"

    def to_json(self):
        return [[sorted(U, key=str) for U in ch] for ch in self]


def family(*chains):
    """Convenience constructor: family([], [1]) etc. with lists of opens per chain."""
    return ChainFamily(chains)


def identity(U):
    return ChainFamily(((frozenset(U),),))


def family_from_json(obj):
    return ChainFamily([[frozenset(U) for U in ch] for ch in obj])


# ---------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def _chains_by_length(space: FiniteSpace):
    out = {}
    for U in space.opens:
        stack = [(U,)]
        while stack:
            ch = stack.pop()
            out.setdefault(len(ch), []).append(ch)
            for W in space.opens:
                if ch[-1] < W:
                    stack.append(ch + (W,))
    for L in out:
        out[L].sort(key=chain_key)
    return out


def lattice_height(space):
    return max(_chains_by_length(space))


def enumerate_chain_families(space: FiniteSpace, k: int, weight: int):
    """All ordered families with k chains and the given weight, sorted."""
    excess = weight - (k - 1)
    if k < 1 or excess < 0:
        return []
    bylen = _chains_by_length(space)
    out = []
    for extra in itertools.product(range(excess + 1), repeat=k):
        if sum(extra) != excess:
            continue
        pools = [bylen.get(e + 1, []) for e in extra]
        for combo in itertools.product(*pools):
            tops = [ch[-1] for ch in combo]
            ok = all(not (tops[a] & tops[b]) for a in range(k) for b in range(a + 1, k))
            if ok:
                out.append(ChainFamily(combo, check=False))
    out.sort(key=lambda F: F.key())
    return out


def all_families(space, max_weight, include_identity=False):
    out = []
    for w in range(0 if include_identity else 1, max_weight + 1):
        for k in range(1, w + 2):
            out.extend(enumerate_chain_families(space, k, w))
    return out


# -------------------------------------------------------------- shuffles

def shuffle_chain(sigma, chains):
    """The chain obtained by advancing the chains in the order prescribed by sigma.

    ``sigma`` is a (s_1-1, ..., s_q-1)-shuffle in one-line notation; step r
    advances the chain owning the element sigma^{-1}(r).
    """
    chains = [tuple(frozenset(U) for U in ch) for ch in chains]
    blocks = []
    for b, ch in enumerate(chains):
        blocks.extend([b] * (len(ch) - 1))
    if sorted(sigma) != list(range(1, len(blocks) + 1)):
        raise ValueError("sigma does not match the chain lengths")
    inv = inverse_perm(sigma)
    pos = [0] * len(chains)
    cur = [ch[0] for ch in chains]
    out = [_union(cur)]
    for r in range(len(blocks)):
        b = blocks[inv[r] - 1]
        pos[b] += 1
        cur[b] = chains[b][pos[b]]
        out.append(_union(cur))
    return tuple(out)


# Three sign corrections to the literal formulas (see SIGNS.md).  They are
# all on by default; ``literal_signs`` switches them off for comparison.
_FIX = {"d": True, "shuffle": True, "full": True}


@contextmanager
def literal_signs(d=True, shuffle=True, full=True):
    """Temporarily drop the chosen sign corrections (True = drop it)."""
    old = dict(_FIX)
    _FIX.update({"d": not d and old["d"], "shuffle": not shuffle and old["shuffle"],
                 "full": not full and old["full"]})
    _clear_caches()
    try:
        yield
    finally:
        _FIX.update(old)
        _clear_caches()


def _clear_caches():
    for f in (decompose_inf, decompose_full, _orbit, _reduce_one):
        f.cache_clear()
    _VERIFY_MEMO.clear()


def _window_rev(s1, window):
    if not _FIX["shuffle"]:
        return 0
    e = 0
    for a in range(len(window)):
        for b in range(a + 1, len(window)):
            e += (s1[window[a]] - 1) * (s1[window[b]] - 1)
    return e


def _interleave(s2, windows):
    """Inner binary parts pass the lower segments of earlier windows."""
    if not _FIX["full"]:
        return 0
    e, below = 0, 0
    for w in windows:
        e += (len(w) - 1) * below
        below += sum(s2[i] - 1 for i in w)
    return e


def _par(n):
    return -1 if n % 2 else 1


# -------------------------------------------------------------- differential

def kd_differential_planar(F: ChainFamily) -> dict:
    """Differential on ordered families (no reduction)."""
    out = {}
    k = F.k
    acc = 0
    for i, ch in enumerate(F):
        s = len(ch)
        for j in range(1, s - 1):
            sign = _par((k - 1) + acc + (s - 2 - j if _FIX["d"] else j - 1))
            newch = ch[:j] + ch[j + 1:]
            G = ChainFamily(F[:i] + (newch,) + F[i + 1:], check=False)
            vterm(out, G, sign)
        acc += s - 1
    return out


def kd_differential(F: ChainFamily, reduce=True) -> dict:
    """Differential of mu_F; with ``reduce`` the result is a reduced labeled element."""
    planar = kd_differential_planar(F)
    if not reduce:
        return planar
    lab = tuple(range(1, F.k + 1))
    return kd_reduce({(G, lab): c for G, c in planar.items()})


# ------------------------------------------------------------ decompositions

class DecompTerm:
    """outer o_j inner (infinitesimal), or outer(inners...) (full)."""
    __slots__ = ("outer", "j", "inner", "inners", "coeff", "data")

    def __init__(self, outer, coeff, j=None, inner=None, inners=None, data=None):
        self.outer, self.coeff, self.j = outer, coeff, j
        self.inner, self.inners, self.data = inner, inners, data or {}

    def __repr__(self):
        if self.inners is None:
            return f"{fmt_q(self.coeff)} * {self.outer!r} o_{self.j} {self.inner!r}"
        return f"{fmt_q(self.coeff)} * {self.outer!r} ({', '.join(map(repr, self.inners))})"

    def to_json(self):
        d = {"outer": self.outer.to_json(), "coeff": fmt_q(self.coeff)}
        if self.inners is None:
            d.update(slot=self.j, inner=self.inner.to_json())
        else:
            d["inners"] = [x.to_json() for x in self.inners]
        return d


def _splits(F, idxs):
    """Choices of s''_i in 1..s_i for each chain index in idxs."""
    return itertools.product(*[range(1, len(F[i]) + 1) for i in idxs])


def eps_sign(s1, s2, j, p, q):
    """Exponent for the infinitesimal decomposition (s1 = s', s2 = s'' lists over all chains)."""
    k = len(s1)
    e = (q + 1) * (p - j) + (q - 1) * sum(x - 1 for x in s1)
    for i in range(k):
        if s2[i] - 1:
            e += (s2[i] - 1) * sum(s1[l] - 1 for l in range(i + 1, k))
    return e


def delta_sign(s1, s2, qs, p):
    k = len(s1)
    e = sum((qs[j] + 1) * (p - 1 - j) for j in range(p))
    e += sum(q - 1 for q in qs) * sum(x - 1 for x in s1)
    for i in range(k):
        if s2[i] - 1:
            e += (s2[i] - 1) * sum(s1[l] - 1 for l in range(i + 1, k))
    return e


def _outer_chains(F, window, s2loc):
    """Shuffled upper segments for one window: list of (chain, sign)."""
    segs = [F[i][s2 - 1:] for i, s2 in zip(window, s2loc)]
    out = []
    for sigma, sg in shuffles(*[len(sg_) - 1 for sg_ in segs]):
        out.append((shuffle_chain(sigma, segs), sg))
    return out


@lru_cache(maxsize=None)
def decompose_inf(F: ChainFamily):
    """Reduced infinitesimal decomposition: list of DecompTerm(outer, j, inner)."""
    k = F.k
    s = F.lengths
    terms = []
    for q in range(1, k + 1):
        p = k + 1 - q
        for j in range(1, p + 1):
            window = list(range(j - 1, j - 1 + q))
            for s2loc in _splits(F, window):
                if q == 1 and s2loc[0] == 1:
                    continue  # inner would be an identity
                s2 = [1] * k
                for i, v in zip(window, s2loc):
                    s2[i] = v
                s1 = [s[i] - s2[i] + 1 for i in range(k)]
                if p == 1 and all(x == 1 for x in s1):
                    continue  # outer would be an identity
                inner = ChainFamily([F[i][:s2[i]] for i in window], check=False)
                e = eps_sign(s1, s2, j, p, q) + _window_rev(s1, window)
                for ch, sg in _outer_chains(F, window, s2loc):
                    outer = ChainFamily(F[:j - 1] + (ch,) + F[j - 1 + q:], check=False)
                    terms.append(DecompTerm(outer, sg * _par(e), j=j, inner=inner,
                                            data={"p": p, "q": q, "s1": s1, "s2": s2}))
    return tuple(terms)


@lru_cache(maxsize=None)
def decompose_full(F: ChainFamily):
    """Full decomposition (including identity inners/outer): DecompTerm(outer, inners)."""
    k = F.k
    s = F.lengths
    terms = []
    for qs in compositions(k):
        p = len(qs)
        windows, start = [], 0
        for q in qs:
            windows.append(list(range(start, start + q)))
            start += q
        for s2 in _splits(F, range(k)):
            s1 = [s[i] - s2[i] + 1 for i in range(k)]
            inners = tuple(ChainFamily([F[i][:s2[i]] for i in w], check=False) for w in windows)
            e = delta_sign(s1, s2, qs, p) + sum(_window_rev(s1, w) for w in windows)
            e += _interleave(s2, windows)
            per_window = [_outer_chains(F, w, [s2[i] for i in w]) for w in windows]
            for combo in itertools.product(*per_window):
                sg = 1
                for _, x in combo:
                    sg *= x
                outer = ChainFamily([ch for ch, _ in combo], check=False)
                terms.append(DecompTerm(outer, sg * _par(e), inners=inners,
                                        data={"p": p, "qs": qs, "s1": s1, "s2": list(s2)}))
    return tuple(terms)


def codistribute(F: ChainFamily):
    """Pairs (outer chain, bottom family) with coefficients; returns list of (chain, family, coeff)."""
    k = F.k
    tot = sum(len(ch) - 1 for ch in F)
    pre = _par((k - 1) * tot + _window_rev([len(ch) for ch in F], list(range(k))))
    bottoms = ChainFamily([(ch[0],) for ch in F], check=False)
    out = []
    for sigma, sg in shuffles(*[len(ch) - 1 for ch in F]):
        out.append((shuffle_chain(sigma, F), bottoms, pre * sg))
    return out


# -------------------------------------------------------- shuffle relations

def _orbit_key(F, labels):
    return tuple(sorted(zip((chain_key(ch) for ch in F), labels, F), key=lambda t: (t[1], t[0])))


def _elem_order(elem):
    F, lab = elem
    return (F.key(), lab)


@lru_cache(maxsize=None)
def _orbit(okey_):
    """Echelon form of the relation span for one orbit, plus its element list."""
    pairs = [(t[2], t[1]) for t in okey_]  # (chain, label) sorted by label
    k = len(pairs)
    elems = []
    for perm in itertools.permutations(range(k)):
        F = ChainFamily([pairs[i][0] for i in perm], check=False)
        lab = tuple(pairs[i][1] for i in perm)
        elems.append((F, lab))
    elems.sort(key=_elem_order)
    ech = Echelon(order=_elem_order)
    for F, lab in elems:
        par = [len(ch) - 1 for ch in F]
        for prof in compositions(k):
            if len(prof) < 2:
                continue
            vec = {}
            for sigma, sg in shuffles(*prof):
                inv = inverse_perm(sigma)
                G = ChainFamily([F[inv[m] - 1] for m in range(k)], check=False)
                lab2 = tuple(lab[inv[m] - 1] for m in range(k))
                vterm(vec, (G, lab2), sg * koszul_sign(sigma, par))
            ech.add(vec)
    basis = [e for e in elems if e not in ech.rows]
    return ech, tuple(basis)


def relation_vectors(F, labels=None):
    """All graded-shuffle relation vectors generated from one labeled family."""
    labels = labels or tuple(range(1, F.k + 1))
    k = F.k
    par = [len(ch) - 1 for ch in F]
    out = []
    for prof in compositions(k):
        if len(prof) < 2:
            continue
        vec = {}
        for sigma, sg in shuffles(*prof):
            inv = inverse_perm(sigma)
            G = ChainFamily([F[inv[m] - 1] for m in range(k)], check=False)
            lab2 = tuple(labels[inv[m] - 1] for m in range(k))
            vterm(vec, (G, lab2), sg * koszul_sign(sigma, par))
        out.append(vec)
    return out


def _as_labeled(element):
    out = {}
    for key, c in element.items():
        if isinstance(key, ChainFamily):
            key = (key, tuple(range(1, key.k + 1)))
        vterm(out, key, Q(c))
    return out


def stratum_of(elem):
    F, lab = elem
    colors = [None] * F.k
    for ch, l in zip(F, lab):
        colors[l - 1] = ch[0]
    return (F.output, tuple(colors), F.weight)


def kd_reduce(element: dict) -> dict:
    """Canonical representative modulo the graded shuffle relations.

    Keys may be ChainFamily (identity labels) or (ChainFamily, labels).
    """
    el = _as_labeled(element)
    strata = {stratum_of(e) for e in el}
    if len(strata) > 1:
        raise MixedArity(f"terms live in {len(strata)} different strata")
    groups = {}
    for e, c in el.items():
        groups.setdefault(_orbit_key(*e), {})[e] = c
    out = {}
    for ok, vec in groups.items():
        ech, _ = _orbit(ok)
        vadd(out, ech.reduce(vec))
    return out


@lru_cache(maxsize=None)
def _reduce_one(elem):
    return tuple(kd_reduce({elem: 1}).items())


def reduce_single(elem) -> dict:
    """kd_reduce of one (labeled) family, memoized."""
    if isinstance(elem, ChainFamily):
        elem = (elem, tuple(range(1, elem.k + 1)))
    return dict(_reduce_one(elem))


def reduced_basis_orbit(F, labels=None):
    labels = labels or tuple(range(1, F.k + 1))
    return _orbit(_orbit_key(F, labels))[1]


def stratum_basis(space, V, colors, weight):
    """Reduced labeled families in the stratum (output V, colors by label, weight)."""
    V = frozenset(V)
    k = len(colors)
    excess = weight - (k - 1)
    if excess < 0:
        return []
    return list(_stratum_basis(space, V, tuple(frozenset(c) for c in colors), weight))


@lru_cache(maxsize=None)
def _stratum_basis(space, V, colors, weight):
    k = len(colors)
    excess = weight - (k - 1)
    bylen = _chains_by_length(space)
    out = []
    for extra in itertools.product(range(excess + 1), repeat=k):
        if sum(extra) != excess:
            continue
        pools = [[ch for ch in bylen.get(e + 1, []) if ch[0] == c and ch[-1] <= V]
                 for e, c in zip(extra, colors)]
        for combo in itertools.product(*pools):
            tops = [ch[-1] for ch in combo]
            if any(tops[a] & tops[b] for a in range(k) for b in range(a + 1, k)):
                continue
            if frozenset().union(*tops) != V:
                continue
            F = ChainFamily(combo, check=False)
            out.extend(reduced_basis_orbit(F))
    out.sort(key=_elem_order)
    return tuple(out)


def reduced_dimension(space, k, weight):
    """Dimension of the symmetric quotient in arity k and given weight,
    counted once per unordered collection of chains (orbit of labelings)."""
    seen = set()
    n = 0
    for F in enumerate_chain_families(space, k, weight):
        srt = ChainFamily(sorted(F, key=chain_key), check=False)
        if srt in seen:
            continue
        seen.add(srt)
        n += len(reduced_basis_orbit(srt))
    return n


def labeled_sign(labels, degrees):
    """Koszul sign for feeding inputs (a_1..a_k) into positions per labels."""
    perm = inverse_perm(labels)  # input l goes to position perm[l-1]
    return koszul_sign(perm, degrees)


def _std(labels):
    srt = sorted(labels)
    r = {l: i + 1 for i, l in enumerate(srt)}
    return tuple(r[l] for l in labels)


def decompose_inf_labeled(F, labels):
    """Infinitesimal decomposition of a labeled family.

    Returns list of (outer_labeled, inner_labeled, S, coeff) where S is the
    sorted tuple of original labels feeding the inner vertex.
    """
    out = []
    for t in decompose_inf(F):
        q = t.inner.k
        j = t.j
        S = labels[j - 1:j - 1 + q]
        inner = (t.inner, _std(S))
        olab = labels[:j - 1] + (min(S),) + labels[j - 1 + q:]
        outer = (t.outer, _std(olab))
        out.append((outer, inner, tuple(sorted(S)), t.coeff))
    return out


# ----------------------------------------------------------- cobar machinery
#
# A cobar tree is either a leaf (int, planar: 0) or a node (decoration, children).
# Decorations are ChainFamily (planar) or (ChainFamily, labels) (symmetric).
# The vertex order used for Koszul signs is pre-order.

def _dec_family(dec):
    return dec if isinstance(dec, ChainFamily) else dec[0]


def _vdeg(dec):
    return 1 - _dec_family(dec).weight


def _tree_parity(t):
    if not isinstance(t, tuple):
        return 0
    return _vdeg(t[0]) + sum(_tree_parity(c) for c in t[1])


def tree_degree(t):
    return _tree_parity(t)


def _vertices(t):
    if not isinstance(t, tuple):
        return []
    out = [t[0]]
    for c in t[1]:
        out.extend(_vertices(c))
    return out


def _min_leaf(t):
    if not isinstance(t, tuple):
        return t
    return min(_min_leaf(c) for c in t[1])


def _blocks_sign(items, target):
    """Koszul sign of reordering items (list of (id, parity)) into target id order."""
    pos = {idv: i for i, idv in enumerate(target)}
    perm = [pos[idv] + 1 for idv, _ in items]
    return koszul_sign(perm, [p % 2 for _, p in items])


def _cobar_d_vertex(dec, planar):
    """Images of a single vertex s^{-1}x under d: list of (replacement builder, coeff).

    Linear part: -s^{-1}dx.  Quadratic part: -sum c (-1)^{|x'|} s^{-1}x' o_j s^{-1}x''.
    Returned as ('lin', newdec, c) and ('quad', outer_dec, inner_dec, info, c).
    """
    res = []
    F = _dec_family(dec)
    if planar:
        for G, c in kd_differential_planar(F).items():
            res.append(("lin", G, -c))
        for t in decompose_inf(F):
            res.append(("quad", t.outer, t.inner, t.j, -t.coeff * _par(t.outer.weight)))
    else:
        lab = dec[1]
        dv = kd_reduce({(G, lab): c for G, c in kd_differential_planar(F).items()})
        for e, c in dv.items():
            res.append(("lin", e, -c))
        for outer, inner, S, c in decompose_inf_labeled(F, lab):
            co = -c * _par(outer[0].weight)
            for eo, a in kd_reduce({outer: 1}).items():
                for ei, b in kd_reduce({inner: 1}).items():
                    res.append(("quad", eo, ei, S, co * a * b))
    return res


def _split_node(dec_children, term, planar):
    """Build the replacement subtree for a quadratic term; returns (subtree, sign)."""
    children = dec_children
    _, outer, inner, info, c = term
    if planar:
        j = info
        q = inner.k
        inner_node = (inner, tuple(children[j - 1:j - 1 + q]))
        new_children = tuple(children[:j - 1]) + (inner_node,) + tuple(children[j - 1 + q:])
        node = (outer, new_children)
        # naive order: v', v'', child blocks ; target: v', blocks before j, v'', window, rest
        items = [("o", 0), ("i", _vdeg(inner))] + [(("c", m), _tree_parity(ch)) for m, ch in enumerate(children)]
        target = ["o"] + [("c", m) for m in range(j - 1)] + ["i"] + [("c", m) for m in range(j - 1, len(children))]
        return node, c * _blocks_sign(items, target)
    S = info
    # children are indexed by label rank (1-based)
    inner_children = tuple(children[l - 1] for l in S)
    inner_node = (inner, inner_children)
    rest = [l for l in range(1, len(children) + 1) if l not in S or l == S[0]]
    new_children = []
    target = ["o"]
    for l in rest:
        if l == S[0]:
            new_children.append(inner_node)
            target.append("i")
            target.extend(("c", m - 1) for m in S)
        else:
            new_children.append(children[l - 1])
            target.append(("c", l - 1))
    node = (outer, tuple(new_children))
    items = [("o", 0), ("i", _vdeg(inner))] + [(("c", m), _tree_parity(ch)) for m, ch in enumerate(children)]
    return node, c * _blocks_sign(items, target)


def cobar_d(t, planar=True, parts=("lin", "quad")):
    """Cobar differential of a tree (leaf or node); returns dict tree -> coeff."""
    out = {}
    if not isinstance(t, tuple):
        return out
    dec, children = t
    # act on the root vertex
    for term in _cobar_d_vertex(dec, planar):
        if term[0] not in parts:
            continue
        if term[0] == "lin":
            vterm(out, (term[1], children), term[2])
        else:
            node, c = _split_node(children, term, planar)
            vterm(out, node, c)
    # act inside children, passing the root and earlier children
    acc = _vdeg(dec)
    for m, ch in enumerate(children):
        if isinstance(ch, tuple):
            sign = _par(acc)
            for sub, c in cobar_d(ch, planar, parts).items():
                nc = children[:m] + (sub,) + children[m + 1:]
                vterm(out, (dec, nc), sign * c)
        acc += _tree_parity(ch)
    return out


def cobar_d_vec(vec, planar=True, parts=("lin", "quad")):
    out = {}
    for t, c in vec.items():
        vadd(out, cobar_d(t, planar, parts), c)
    return out


def _leaves_planar(F):
    return tuple(0 for _ in range(F.k))


def planar_cobar_checks(F: ChainFamily):
    """d_1^2, d_1 d_2 + d_2 d_1 and d_2^2 on the one-vertex planar tree of F.

    Returns a dict name -> residual (empty dict when the check passes).
    """
    t = (F, _leaves_planar(F))
    lin = ("lin",)
    quad = ("quad",)
    d1 = cobar_d(t, True, lin)
    d2 = cobar_d(t, True, quad)
    return {
        "d^2=0": cobar_d_vec(d1, True, lin),
        "coderivation": vadd(cobar_d_vec(d2, True, lin), cobar_d_vec(d1, True, quad)),
        "coassociativity": cobar_d_vec(d2, True, quad),
    }


# ------------------------------------------------------ full coassociativity

def full_coassociativity(F):
    """Compare the two iterated full decompositions as three-level trees."""
    lhs, rhs = {}, {}
    for t in decompose_full(F):
        # (Delta o id): split the top vertex; the middle level is u.inners,
        # the bottom level t.inners, attached to consecutive middle inputs.
        for u in decompose_full(t.outer):
            vterm(lhs, (u.outer, u.inners, t.inners), t.coeff * u.coeff)
    for t in decompose_full(F):
        per = [decompose_full(x) for x in t.inners]
        for combo in itertools.product(*per):
            c = t.coeff
            for v in combo:
                c *= v.coeff
            e = 0
            for a in range(len(combo)):
                ba = sum(x.weight for x in combo[a].inners)
                ma = sum(combo[b].outer.weight for b in range(a + 1, len(combo)))
                e += ba * ma
            # top t.outer has p inputs; middle level: combo[m].outer, one per input
            # of the top; bottom: concatenation of their inners
            mids = tuple(v.outer for v in combo)
            bots = tuple(x for v in combo for x in v.inners)
            vterm(rhs, ("R", t.outer, mids, bots), c * _par(e))
    # lhs keys (top, middles grouped under top inputs, bottoms): middles of the
    # lhs are u.inners (one per top input), bottoms t.inners (one per middle input)
    L = {}
    for (top, mids, bots), c in lhs.items():
        vterm(L, ("R", top, mids, bots), c)
    return vadd(L, rhs, -1)


# --------------------------------------------------------- symmetric cobar

def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


class CobarArity:
    """Basis of the symmetric cobar complex in one arity (V; U_1..U_k)."""

    def __init__(self, space, V, colors):
        self.space = space
        self.V = frozenset(V)
        self.colors = tuple(frozenset(c) for c in colors)
        self._memo = {}
        self.trees = self._trees(self.V, tuple(range(1, len(self.colors) + 1)))

    def _trees(self, V, leaves):
        key = (V, leaves)
        if key in self._memo:
            return self._memo[key]
        out = []
        cols = self.colors
        if len(leaves) == 1 and cols[leaves[0] - 1] == V:
            out.append(leaves[0])
        need = frozenset().union(*[cols[l - 1] for l in leaves])
        if need <= V:
            for part in _set_partitions(leaves):
                part = sorted((tuple(sorted(b)) for b in part), key=min)
                m = len(part)
                options = []
                for b in part:
                    opts = []
                    bneed = frozenset().union(*[cols[l - 1] for l in b])
                    for c in self.space.opens:
                        if bneed <= c <= V and not (m == 1 and c == V):
                            subs = self._trees(c, b)
                            if subs:
                                opts.append((c, subs))
                    options.append(opts)
                for choice in itertools.product(*options):
                    cs = tuple(c for c, _ in choice)
                    tops_ok = True
                    if not tops_ok:
                        continue
                    maxw = (m - 1) + sum(lattice_height(self.space) - 1 for _ in range(m))
                    for w in range(max(1, m - 1), maxw + 1):
                        for dec in stratum_basis(self.space, V, cs, w):
                            if dec[0].is_identity():
                                continue
                            for subs in itertools.product(*[s for _, s in choice]):
                                out.append((dec, tuple(subs)))
        self._memo[key] = out
        return out

    def complex(self):
        trees = self.trees
        idx = {t: i for i, t in enumerate(trees)}
        diff = {}
        for t, i in idx.items():
            img = cobar_d(t, planar=False)
            row = {}
            for u, c in img.items():
                if u not in idx:
                    raise DisjCalcError(f"cobar differential left the enumerated basis: {u!r}")
                row[idx[u]] = c
            if row:
                diff[i] = row
        degs = [tree_degree(t) for t in trees]
        labels = [fmt_tree(t) for t in trees]
        return GradedComplex(degs, diff, labels)


def fmt_tree(t):
    if not isinstance(t, tuple):
        return str(t)
    dec, ch = t
    if isinstance(dec, ChainFamily):
        d = repr(dec)
    else:
        d = repr(dec[0]) + "@" + "".join(map(str, dec[1]))
    return d + "(" + ",".join(fmt_tree(c) for c in ch) + ")"


def is_admissible(V, colors):
    V = frozenset(V)
    try:
        u = _union(frozenset(c) for c in colors)
    except DisjointnessViolation:
        return False
    return u <= V


def koszul_homology(space, V, colors):
    """Homology ranks {degree: rank} of the cobar complex in arity (V; colors)."""
    C = CobarArity(space, V, colors).complex()
    return homology_ranks(C)


def homology_csv(rows):
    """rows: iterable of (V, colors, ranks dict) -> CSV text.

    Inputs are space-separated; fields holding commas get quoted.  A row with
    an empty degree means the homology vanishes in that arity."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["output", "inputs", "degree", "rank"])
    for V, cols, ranks in rows:
        ins = " ".join(fmt_open(c) for c in cols)
        if not ranks:
            w.writerow([fmt_open(V), ins, "", 0])
        for d in sorted(ranks):
            w.writerow([fmt_open(V), ins, d, ranks[d]])
    return buf.getvalue()


# ------------------------------------------------------------ verification

def _fmt_vec(v):
    return {fmt_tree(k) if isinstance(k, tuple) and len(k) == 2 and isinstance(k[1], tuple) else repr(k): fmt_q(c)
            for k, c in v.items()}


def canonical_family(F: ChainFamily):
    """Shape of F up to relabelling the atoms of the set system it spans.

    Every check in ``verify_cooperad`` only uses unions, inclusions and
    disjointness of the opens occurring in F, so two families with the same
    shape pass or fail together.
    """
    opens = sorted({U for ch in F for U in ch}, key=okey)
    pts = set().union(*opens) if opens else set()
    sig = {}
    for p in sorted(pts, key=_pkey):
        sig.setdefault(tuple(p in U for U in opens), []).append(p)
    atoms = list(sig)
    if len(atoms) > 6:
        return ("raw", F)
    where = {tuple_: n for n, tuple_ in enumerate(atoms)}
    enc = [[frozenset(where[tuple(p in V for V in opens)] for p in U) for U in ch] for ch in F]
    best = None
    for perm in itertools.permutations(range(len(atoms))):
        key = tuple(tuple(tuple(sorted(perm[a] for a in U)) for U in ch) for ch in enc)
        if best is None or key < best:
            best = key
    return ("shape", best)


_VERIFY_MEMO = {}


def _family_checks(F):
    """Run every per-family identity; returns [(check, details or None)]."""
    out = []
    for name, res in planar_cobar_checks(F).items():
        out.append((name, {"residual": _fmt_vec(res)} if res else None))
    # full decomposition restricted to one nontrivial inner = infinitesimal
    inf = {}
    for t in decompose_inf(F):
        vterm(inf, (t.outer, t.j, t.inner), t.coeff)
    full1 = {}
    for t in decompose_full(F):
        nontriv = [m for m, x in enumerate(t.inners) if not x.is_identity()]
        if len(nontriv) == 1 and not t.outer.is_identity():
            m = nontriv[0]
            vterm(full1, (t.outer, m + 1, t.inners[m]), t.coeff)
    diff = vadd(dict(inf), full1, -1)
    out.append(("full-vs-infinitesimal", {"lhs": {repr(k): fmt_q(c) for k, c in inf.items()},
                                          "rhs": {repr(k): fmt_q(c) for k, c in full1.items()}} if diff else None))
    # codistributive law = the part of the full decomposition with a
    # single outer chain and bottoms as inner
    cod = {}
    for ch, bot, c in codistribute(F):
        vterm(cod, (ch, bot), c)
    part = {}
    for t in decompose_full(F):
        if t.outer.k == 1 and all(len(ch) == 1 for ch in t.inners[0]):
            vterm(part, (t.outer[0], t.inners[0]), t.coeff)
    bad = vadd(dict(cod), part, -1)
    out.append(("codistributivity", {"lhs": {repr(k): fmt_q(c) for k, c in cod.items()},
                                     "rhs": {repr(k): fmt_q(c) for k, c in part.items()}} if bad else None))
    res = full_coassociativity(F)
    out.append(("full-coassociativity", {"residual": {repr(k): fmt_q(c) for k, c in res.items()}} if res else None))
    # the shuffle relations form a dg coideal
    bad = _coideal_residual(F)
    out.append(("shuffle-coideal", {"residual": bad} if bad else None))
    return out


def verify_cooperad(space, weight_bound=3, memo=True):
    """d^2 = 0, coderivation, coassociativity, codistributivity and the
    coideal property of the shuffle relations on every family of weight
    <= weight_bound.  With ``memo`` families of the same shape (see
    ``canonical_family``) are computed once, also across spaces."""
    rep = CheckReport(f"cooperad[{space.name}, w<={weight_bound}]")
    fams = all_families(space, weight_bound)
    shapes = set()
    for F in fams:
        key = (canonical_family(F), tuple(sorted(_FIX.items())))
        shapes.add(key)
        res = _VERIFY_MEMO.get(key) if memo else None
        if res is None:
            res = _family_checks(F)
            if memo:
                _VERIFY_MEMO[key] = [(name, None if det is None else "fail") for name, det in res]
        elif any(det for _, det in res):
            res = _family_checks(F)  # rerun for a report in F's own terms
        for name, det in res:
            rep.checked += 1
            if det:
                rep.fail(check=name, family=repr(F), **det)
    rep.details = {"families": len(fams), "shapes": len(shapes)}
    if not space.points:
        for k in range(2, weight_bound + 2):
            rep.checked += 1
            bad = compare_cinfty(k)
            if bad:
                rep.fail(check="C-infinity comparison", arity=k, residual=bad)
    return rep


def _coideal_residual(F):
    """Delta and d of every relation vector generated by F vanish in the quotient."""
    for vec in relation_vectors(F):
        # differential
        dv = {}
        for (G, lab), c in vec.items():
            vadd(dv, {(H, lab): a for H, a in kd_differential_planar(G).items()}, c)
        if dv and kd_reduce(dv):
            return {"d": repr(kd_reduce(dv))}
        # decomposition
        acc = {}
        for (G, lab), c in vec.items():
            for outer, inner, S, a in decompose_inf_labeled(G, lab):
                for eo, x in _reduce_one(outer):
                    for ei, y in _reduce_one(inner):
                        vterm(acc, (S, eo, ei), c * a * x * y)
        if acc:
            return {"Delta": {repr(k): fmt_q(v) for k, v in acc.items()}}
    return None


# -------------------------------------------- independent C-infinity reference

def cinfty_relation_terms(n):
    """Stasheff's relation for an A-infinity structure, cohomological grading:

        sum_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(1^r (x) m_s (x) 1^t) = 0.

    Returns {(p, j, q): sign} for the quadratic terms m_p o_j m_q (p, q >= 2)
    written as  d(m_n) = sum sign * m_p o_j m_q.
    """
    out = {}
    for s in range(2, n):
        for r in range(0, n - s + 1):
            t = n - s - r
            p = r + 1 + t
            if p < 2:
                continue
            out[(p, r + 1, s)] = -((-1) ** (r + s * t))
    return out


def cinfty_shuffle_terms(ls):
    """C-infinity: m_n vanishes on signed shuffles; returns [(sigma, sgn)] with
    the coefficient of m_n o sigma (Koszul signs of the inputs added at evaluation)."""
    return [(sig, sg) for sig, sg in shuffles(*ls)]


def compare_cinfty(n):
    """Compare the hoDisj relation for ((emptyset),...,(emptyset)) with Stasheff's signs."""
    E = frozenset()
    F = ChainFamily([(E,)] * n, check=False)
    ours = {}
    for t in decompose_inf(F):
        p, q = t.outer.k, t.inner.k
        vterm(ours, (p, t.j, q), -t.coeff * _par(t.outer.weight))
    ref = cinfty_relation_terms(n)
    bad = {}
    for key in set(ours) | set(ref):
        if ours.get(key, 0) != ref.get(key, 0):
            bad[repr(key)] = (fmt_q(ours.get(key, 0)), fmt_q(ref.get(key, 0)))
    # shuffle relations: delta_sigma reduces to sgn(sigma) when all chains have length 1
    for prof in compositions(n):
        if len(prof) < 2:
            continue
        mine = {sig: koszul_sign(sig, [0] * n) * perm_sign(sig) for sig, _ in shuffles(*prof)}
        for sig, sg in cinfty_shuffle_terms(prof):
            if mine[sig] != sg:
                bad[repr((prof, sig))] = (mine[sig], sg)
    return bad


# ------------------------------------------------------------------ JSON

def kd_to_json(element):
    out = []
    for key, c in sorted(_as_labeled(element).items(), key=lambda kv: _elem_order(kv[0])):
        F, lab = key
        d = {"chains": F.to_json(), "coeff": fmt_q(c)}
        if lab != tuple(range(1, F.k + 1)):
            d["labels"] = list(lab)
        out.append(d)
    return out


def kd_from_json(obj):
    out = {}
    for t in obj:
        F = family_from_json(t["chains"])
        lab = tuple(t.get("labels", range(1, F.k + 1)))
        vterm(out, (F, lab), Q(t["coeff"]))
    return out


def parse_family(text):
    """'[({}<{1}),({3})]' (the repr format) or a JSON list of chains."""
    import json
    from .core import parse_open
    t = text.strip()
    if t.startswith("[[") or t.startswith("[ ["):
        return family_from_json(json.loads(t))
    if t.startswith("[") and t.endswith("]"):
        t = t[1:-1]
    chains = []
    for part in t.split(")"):
        part = part.strip().lstrip(",").strip()
        if not part:
            continue
        if not part.startswith("("):
            raise ValueError(f"cannot parse chain near {part!r}")
        chains.append(tuple(parse_open(u) for u in part[1:].split("<")))
    return ChainFamily(chains)
