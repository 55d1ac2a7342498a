"""Retractions, perturbation, homotopy transfer and the pseudo-line CE model.

Linear maps between finite complexes are stored as ``{column: sparse vec}``.
Conventions: a retraction (i, p, h) of ``big`` onto ``small`` satisfies
p i = id and d h + h d = id - i p, with h^2 = p h = h i = 0.  With this sign
for h the perturbation series alternate: i' = sum (-h delta)^n i etc.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import NamedTuple

from .core import (CheckReport, DisjCalcError, DifferentialNotSquareZero, GradedComplex, Q,
                   fmt_open, fmt_q, homology_ranks, vadd, vterm)
from .hodisj import (HoMorphism, HoStructure, MultiMap, ZERO, _compose_full, apply_vec,
                     generator_degree, morphism_degree)
from .koszul_dual import ChainFamily, decompose_full, labeled_sign


class NotNilpotent(DisjCalcError):
    pass


class NotSquareZero(DifferentialNotSquareZero):
    pass


class TruncationExceeded(DisjCalcError):
    pass


# ------------------------------------------------------------ linear maps

def lin_apply(M, vec):
    out = {}
    for j, c in vec.items():
        col = M.get(j)
        if col:
            vadd(out, col, c)
    return out


def lin_compose(M, N, cols):
    """M o N on the given source columns."""
    return {j: lin_apply(M, N.get(j, {})) for j in cols}


def lin_identity(n):
    return {j: {j: Q(1)} for j in range(n)}


def lin_from_complex(C: GradedComplex):
    return {j: dict(C.d_basis(j)) for j in range(len(C))}


def lin_equal(M, N, cols):
    return all(M.get(j, {}) == N.get(j, {}) for j in cols)


def _clean(M):
    return {j: v for j, v in M.items() if v}


# ------------------------------------------------------------ retractions

class Retraction(NamedTuple):
    big: GradedComplex
    small: GradedComplex
    i: dict  # small -> big
    p: dict  # big -> small
    h: dict  # big -> big, degree -1


def identity_retraction(C: GradedComplex):
    n = len(C)
    return Retraction(C, C, lin_identity(n), lin_identity(n), {})


def validate_retraction(r: Retraction, name="") -> CheckReport:
    rep = CheckReport(f"retraction{('[' + name + ']') if name else ''}")
    B, S = r.big, r.small
    nb, ns = len(B), len(S)
    dB, dS = lin_from_complex(B), lin_from_complex(S)

    def fail(what, col):
        rep.fail(identity=what, basis=str(col))

    for j in range(ns):
        for k in r.i.get(j, {}):
            if B.degrees[k] != S.degrees[j]:
                fail("deg i", S.labels[j])
    for j in range(nb):
        for k in r.p.get(j, {}):
            if S.degrees[k] != B.degrees[j]:
                fail("deg p", B.labels[j])
        for k in r.h.get(j, {}):
            if B.degrees[k] != B.degrees[j] - 1:
                fail("deg h", B.labels[j])
    # chain maps
    for j in range(ns):
        rep.checked += 2
        if lin_apply(dB, r.i.get(j, {})) != lin_apply(r.i, dS.get(j, {})):
            fail("d i = i d", S.labels[j])
        if lin_apply(r.p, r.i.get(j, {})) != {j: 1}:
            fail("p i = id", S.labels[j])
        rep.checked += 1
        if lin_apply(r.h, r.i.get(j, {})):
            fail("h i = 0", S.labels[j])
    for j in range(nb):
        rep.checked += 4
        if lin_apply(dS, r.p.get(j, {})) != lin_apply(r.p, dB.get(j, {})):
            fail("d p = p d", B.labels[j])
        lhs = lin_apply(dB, r.h.get(j, {}))
        vadd(lhs, lin_apply(r.h, dB.get(j, {})))
        rhs = {j: Q(1)}
        vadd(rhs, lin_apply(r.i, r.p.get(j, {})), -1)
        if lhs != rhs:
            fail("d h + h d = id - i p", B.labels[j])
        if lin_apply(r.h, r.h.get(j, {})):
            fail("h h = 0", B.labels[j])
        if lin_apply(r.p, r.h.get(j, {})):
            fail("p h = 0", B.labels[j])
    return rep


class Perturbed(NamedTuple):
    retraction: Retraction
    delta_small: dict
    iterations: int


def perturb(r: Retraction, delta: dict, bound=None) -> Perturbed:
    """Homological perturbation lemma for a perturbation ``delta`` of the
    big differential.  Raises NotSquareZero / NotNilpotent."""
    B = r.big
    nb = len(B)
    cols = range(nb)
    dB = lin_from_complex(B)
    D = {j: dict(dB.get(j, {})) for j in cols}
    for j, v in delta.items():
        D.setdefault(j, {})
        vadd(D[j], v)
    D = _clean(D)
    for j in cols:
        if lin_apply(D, D.get(j, {})):
            raise NotSquareZero(f"(d + delta)^2 != 0 on {B.labels[j]}")
    bound = bound if bound is not None else nb + 1
    # X = -delta h ; series S = sum X^n
    X = _clean({j: {k: -c for k, c in lin_apply(delta, r.h.get(j, {})).items()} for j in cols})
    S = lin_identity(nb)
    P = lin_identity(nb)
    n = 0
    while True:
        P = _clean(lin_compose(X, P, cols))
        if not P:
            break
        n += 1
        if n > bound:
            raise NotNilpotent(f"(delta h)^n does not vanish for n <= {bound}")
        for j, v in P.items():
            S.setdefault(j, {})
            vadd(S[j], v)
    S = _clean(S)
    # i' = sum (-h delta)^n i  =  i - h S delta i
    hS = lin_compose(r.h, S, cols)
    scols = range(len(r.small))
    i2 = {}
    for j in scols:
        v = dict(r.i.get(j, {}))
        vadd(v, lin_apply(hS, lin_apply(delta, r.i.get(j, {}))), -1)
        i2[j] = v
    p2 = _clean({j: lin_apply(r.p, S.get(j, {})) for j in cols})
    h2 = _clean({j: lin_apply(r.h, S.get(j, {})) for j in cols})
    pS = {j: lin_apply(r.p, S.get(j, {})) for j in cols}
    dsmall = _clean({j: lin_apply(pS, lin_apply(delta, r.i.get(j, {}))) for j in scols})
    Snew = r.small
    dS = {j: dict(Snew.d_basis(j)) for j in scols}
    for j, v in dsmall.items():
        dS.setdefault(j, {})
        vadd(dS[j], v)
    small2 = GradedComplex(Snew.degrees, _clean(dS), Snew.labels, Snew.levels)
    big2 = GradedComplex(B.degrees, D, B.labels, B.levels)
    return Perturbed(Retraction(big2, small2, _clean(i2), p2, h2), dsmall, n)


# ------------------------------------------------------------ transfer

def _lin_multimap(M):
    return MultiMap(fn=lambda idx: M.get(idx[0], {}))


def transfer(A: HoStructure, retractions: dict, weight_bound=3, h_sign=-1):
    """Transfer A along per-open retractions onto the small complexes.

    rho_F = sum over full decompositions with a non-identity outer family of
    c * mu^A_{outer}(g_1, ..., g_p), with g = i on identity inners and
    g = -h o rho on the others.  Then mu^B_F = p o rho_F and the
    infinity-morphism i_inf : B ~> A has components i (weight 0) and -h o rho_F
    (the minus sign matches the degree convention for morphism components).
    """
    sp = A.space
    R = {frozenset(U): r for U, r in retractions.items()}
    small = {U: R[U].small for U in sp.opens}
    rho_memo = {}

    def rho(F):
        m = rho_memo.get(F)
        if m is None:
            m = MultiMap(fn=lambda idx, F=F: _rho_eval(F, idx))
            rho_memo[F] = m
        return m

    def g(F):
        if F.weight == 0:
            return _lin_multimap(R[F.output].i)
        hF = R[F.output].h
        r_ = rho(F)
        return MultiMap(fn=lambda idx: {k: h_sign * c for k, c in lin_apply(hF, r_(idx)).items()})

    g_memo = {}

    def gm(F):
        m = g_memo.get(F)
        if m is None:
            m = g_memo[F] = g(F)
        return m

    def _rho_eval(F, idx):
        degs = [small[ch[0]].degrees[i] for ch, i in zip(F, idx)]
        out = {}
        for t in decompose_full(F):
            if t.outer.weight == 0:
                continue
            comp = _compose_full(A.op(t.outer), [gm(x) for x in t.inners],
                                 [morphism_degree(x) for x in t.inners],
                                 [x.k for x in t.inners], degs, idx)
            vadd(out, comp, t.coeff)
        return out

    def planar_mu(F):
        pF = R[F.output].p
        r_ = rho(F)
        return MultiMap(fn=lambda idx: lin_apply(pF, r_(idx)))

    planar_cache = {}

    def factory(e):
        G, lab = e
        if G not in planar_cache:
            planar_cache[G] = planar_mu(G)
        mu = planar_cache[G]
        colors = [None] * G.k
        for ch, l in zip(G, lab):
            colors[l - 1] = ch[0]

        def fn(idx):
            degs = [small[c].degrees[i] for c, i in zip(colors, idx)]
            s = labeled_sign(lab, degs)
            v = mu(tuple(idx[l - 1] for l in lab))
            return {k: s * c for k, c in v.items()} if s < 0 else v
        return MultiMap(fn=fn)

    B = HoStructure(sp, small, level_bound=A.level_bound, name=f"transfer[{A.name}]")
    B.reduced_factory = factory
    B.direct = planar_mu  # planar ops straight from the tree formula (no reduction)
    f = HoMorphism(B, A, {U: _lin_multimap(R[U].i) for U in sp.opens}, name="i_inf")
    f.fn = gm
    return B, f


def transfer_by_trees(A: HoStructure, retractions: dict, F: ChainFamily, h_sign=-1):
    """Independent evaluation of mu^B_F: expand the recursion into an explicit
    list of decorated trees first, then evaluate each tree."""
    R = {frozenset(U): r for U, r in retractions.items()}
    small = {U: R[U].small for U in A.space.opens}

    def trees(G):
        """List of (coeff, node) with node = (outer, [subtree or ('leaf', color)])."""
        out = []
        for t in decompose_full(G):
            if t.outer.weight == 0:
                continue
            options = []
            for x in t.inners:
                if x.weight == 0:
                    options.append([(Fraction(1), ("leaf", x.output))])
                else:
                    options.append(trees(x))
            for combo in itertools.product(*options):
                c = t.coeff
                for cc, _ in combo:
                    c *= cc
                out.append((c, (t.outer, [n for _, n in combo], t.inners)))
        return out

    def evaluate(node, idx, degs):
        if node[0] == "leaf":
            return lin_apply(R[node[1]].i, {idx[0]: 1})
        outer, kids, inners = node
        maps, mdegs, qs = [], [], []
        for kid, x in zip(kids, inners):
            qs.append(x.k)
            mdegs.append(morphism_degree(x))
            if kid[0] == "leaf":
                maps.append(_lin_multimap(R[kid[1]].i))
            else:
                hh = R[x.output].h
                maps.append(MultiMap(fn=lambda ix, kid=kid, x=x, hh=hh: {
                    k: h_sign * c for k, c in lin_apply(hh, evaluate(kid, ix, [
                        small[ch[0]].degrees[i] for ch, i in zip(x, ix)])).items()}))
        return _compose_full(A.op(outer), maps, mdegs, qs, degs, idx)

    tl = trees(F)
    pF = R[F.output].p

    def fn(idx):
        degs = [small[ch[0]].degrees[i] for ch, i in zip(F, idx)]
        out = {}
        for c, node in tl:
            vadd(out, lin_apply(pF, evaluate(node, idx, degs)), c)
        return out
    return MultiMap(fn=fn), len(tl)


# ------------------------------------------------------------ graded symmetric algebras

class SymAlgebra:
    """Truncated graded symmetric algebra Sym^{<= maxdeg}(V) on named generators.

    Monomials are sorted tuples of generator indices; odd generators do not
    repeat.  ``levels`` of the basis are the symmetric degrees.
    """

    def __init__(self, names, degrees, maxdeg=2):
        self.names = list(names)
        self.gdeg = list(degrees)
        self.maxdeg = maxdeg
        n = len(self.names)
        mons = [()]
        for d in range(1, maxdeg + 1):
            for m in itertools.combinations_with_replacement(range(n), d):
                if any(m.count(g) > 1 and self.gdeg[g] % 2 for g in set(m)):
                    continue
                mons.append(m)
        self.monomials = mons
        self.index = {m: i for i, m in enumerate(mons)}

    def __len__(self):
        return len(self.monomials)

    def degree(self, m):
        return sum(self.gdeg[g] for g in m)

    def label(self, m):
        if not m:
            return "1"
        return "*".join(self.names[g] for g in m)

    def mul_mon(self, m1, m2):
        """(sign, monomial) or None if zero; raises TruncationExceeded."""
        if len(m1) + len(m2) > self.maxdeg:
            raise TruncationExceeded(f"{self.label(m1)} * {self.label(m2)} leaves symmetric degree <= {self.maxdeg}")
        seq = list(m1) + list(m2)
        # bubble sort with Koszul signs
        s = 0
        arr = seq[:]
        for a in range(len(arr)):
            for b in range(len(arr) - 1 - a):
                if arr[b] > arr[b + 1]:
                    if self.gdeg[arr[b]] % 2 and self.gdeg[arr[b + 1]] % 2:
                        s += 1
                    arr[b], arr[b + 1] = arr[b + 1], arr[b]
        m = tuple(arr)
        for g in set(m):
            if m.count(g) > 1 and self.gdeg[g] % 2:
                return None
        return (-1 if s % 2 else 1), m

    def mul(self, i, j):
        r = self.mul_mon(self.monomials[i], self.monomials[j])
        if r is None:
            return {}
        s, m = r
        return {self.index[m]: Q(s)}

    def mul_vec(self, u, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                vadd(out, self.mul(i, j), a * b)
        return out

    def gen_vec(self, g):
        return {self.index[(g,)]: Q(1)}

    def extend_algebra_map(self, target, images):
        """Algebra map Sym(self) -> target from generator images (vectors in target)."""
        M = {}
        for i, m in enumerate(self.monomials):
            v = {target.index[()]: Q(1)}
            for g in m:
                v = target.mul_vec(v, images.get(g, {}))
            M[i] = {k: c for k, c in v.items() if c}
        return _clean(M)

    def extend_derivation(self, images, deg):
        """Derivation of degree ``deg`` from generator images (vectors in self)."""
        M = {}
        for i, m in enumerate(self.monomials):
            out = {}
            for pos, g in enumerate(m):
                img = images.get(g)
                if not img:
                    continue
                sign = -1 if (deg * sum(self.gdeg[x] for x in m[:pos])) % 2 else 1
                left = {self.index[()]: Q(1)}
                for x in m[:pos]:
                    left = self.mul_vec(left, self.gen_vec(x))
                right = {self.index[()]: Q(1)}
                for x in m[pos + 1:]:
                    right = self.mul_vec(right, self.gen_vec(x))
                vadd(out, self.mul_vec(self.mul_vec(left, img), right), sign)
            M[i] = out
        return _clean(M)

    def complex(self, diff):
        return GradedComplex([self.degree(m) for m in self.monomials], diff,
                             [self.label(m) for m in self.monomials],
                             [len(m) for m in self.monomials])


# ------------------------------------------------------------ Lie algebras and PBW

class LieData:
    """A finite-dimensional graded Lie algebra with structure constants
    ``brackets[(i, j)] = {k: c}`` (given for i < j, the rest by antisymmetry)
    and an optional differential."""

    def __init__(self, names, brackets, degrees=None, diff=None, name=""):
        self.names = list(names)
        self.degrees = list(degrees) if degrees else [0] * len(self.names)
        self.name = name
        self.diff = {i: dict(v) for i, v in (diff or {}).items()}
        br = {}
        for (i, j), v in brackets.items():
            v = {k: Q(c) for k, c in v.items() if c}
            br[(i, j)] = v
            if (j, i) not in brackets:
                s = -1 if (self.degrees[i] * self.degrees[j]) % 2 == 0 else 1
                br[(j, i)] = {k: s * c for k, c in v.items()}
        self.brackets = br

    def __len__(self):
        return len(self.names)

    def br(self, i, j):
        return self.brackets.get((i, j), {})

    def br_vec(self, u, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                vadd(out, self.br(i, j), a * b)
        return out

    def validate(self):
        n = len(self)
        deg = self.degrees
        for i, j in itertools.product(range(n), repeat=2):
            s = -1 if (deg[i] * deg[j]) % 2 == 0 else 1
            if self.br(i, j) != {k: s * c for k, c in self.br(j, i).items()}:
                raise DisjCalcError(f"bracket not antisymmetric on {self.names[i]}, {self.names[j]}")
        for i, j, k in itertools.product(range(n), repeat=3):
            # [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
            lhs = self.br_vec({i: 1}, self.br(j, k))
            rhs = self.br_vec(self.br(i, j), {k: 1})
            vadd(rhs, self.br_vec({j: 1}, self.br(i, k)), -1 if (deg[i] * deg[j]) % 2 else 1)
            if lhs != rhs:
                raise DisjCalcError(f"Jacobi fails on {self.names[i]}, {self.names[j]}, {self.names[k]}")
        return True

    def to_json(self):
        return {"name": self.name,
                "basis": [{"name": nm, "degree": d} for nm, d in zip(self.names, self.degrees)],
                "brackets": [{"x": self.names[i], "y": self.names[j],
                              "value": {self.names[k]: fmt_q(c) for k, c in sorted(v.items())}}
                             for (i, j), v in sorted(self.brackets.items()) if i < j]}

    @classmethod
    def from_json(cls, obj):
        names = [b["name"] for b in obj["basis"]]
        degs = [int(b.get("degree", 0)) for b in obj["basis"]]
        pos = {nm: i for i, nm in enumerate(names)}
        br = {}
        for n_, e in enumerate(obj.get("brackets", [])):
            try:
                val = e["value"]
                if isinstance(val, list):
                    val = {names[k]: c for k, c in enumerate(val)}
                br[(pos[e["x"]], pos[e["y"]])] = {pos[k]: Q(c) for k, c in val.items()}
            except (KeyError, IndexError, ValueError) as err:
                raise DisjCalcError(f"$.brackets[{n_}]: {err}") from None
        return cls(names, br, degs, name=obj.get("name", ""))


def abelian2():
    return LieData(["x", "y"], {}, name="abelian2")


def heisenberg():
    return LieData(["x", "y", "z"], {(0, 1): {2: 1}}, name="heisenberg")


def solvable2():
    return LieData(["x", "y"], {(0, 1): {1: 1}}, name="solvable2")


LIE_PRESETS = {"abelian2": abelian2, "heisenberg": heisenberg, "solvable2": solvable2}


def pbw_product(g: LieData, m1, m2) -> dict:
    """Product of PBW monomials (weakly increasing index tuples) in U(g),
    straightened back to the sorted basis by [x, y] substitutions.  Only
    degree-0 Lie algebras are supported here."""
    if any(g.degrees):
        raise DisjCalcError("pbw_product handles ungraded Lie algebras only")
    out = {}
    todo = [(tuple(m1) + tuple(m2), Q(1))]
    while todo:
        word, c = todo.pop()
        for pos in range(len(word) - 1):
            a, b = word[pos], word[pos + 1]
            if a > b:
                # b-a swap: word = ..ab.. = ..ba.. + ..[a,b]..
                todo.append((word[:pos] + (b, a) + word[pos + 2:], c))
                for k, x in g.br(a, b).items():
                    todo.append((word[:pos] + (k,) + word[pos + 2:], c * x))
                break
        else:
            vterm(out, word, c)
    return out


def pbw_mul_vec(g, u, v):
    out = {}
    for m1, a in u.items():
        for m2, b in v.items():
            vadd(out, pbw_product(g, m1, m2), a * b)
    return out


def symmetrize(g, mono):
    """The symmetrization map Sym(g) -> U(g) on a sorted monomial."""
    k = len(mono)
    if k == 0:
        return {(): Q(1)}
    out = {}
    perms = list(itertools.permutations(mono))
    for p in perms:
        v = {(): Q(1)}
        for x in p:
            v = pbw_mul_vec(g, v, {(x,): Q(1)})
        vadd(out, v, Fraction(1, len(perms)))
    return out


# ------------------------------------------------------------ the pseudo-line model

# K(U): compactly supported "forms" on the pseudo-line.  Basis names and
# degrees, products a*w_i = w_i/2, w*w = 0, and (outside the honest model)
# a*a = a, which keeps d Leibniz and is only ever hit by the bracket term
# on symmetric degree two.
_K_BASIS = {"a": 0, "w1": 1, "w3": 1}
_K_OPENS = {(): [], (1,): ["w1"], (3,): ["w3"], (1, 3): ["w1", "w3"], (1, 2, 3): ["a", "w1", "w3"]}
_K_DIFF = {"a": {"w1": Q(1), "w3": Q(-1)}}
_HALF = Fraction(1, 2)


def _k_mul(x, y):
    if x == "a" and y == "a":
        return {"a": Q(1)}
    if x == "a":
        return {y: _HALF}
    if y == "a":
        return {x: _HALF}
    return {}


def _components(U):
    """Connected components of an open of the pseudo-line, by their form."""
    U = tuple(sorted(U))
    if U == (1, 2, 3):
        return ["X"]
    return [f"w{p}" for p in U]


class PseudoLineModel:
    """The truncated Chevalley-Eilenberg model U -> Sym^{<=2}(K(U) (x) g[1]).

    ``rep`` chooses the form (w1 or w3) used by i on the connected open X.
    """

    def __init__(self, lie: LieData, rep="w1", maxdeg=2):
        from .core import pseudo_line
        if any(lie.degrees):
            raise DisjCalcError("the pseudo-line model is built for degree-0 Lie algebras")
        self.lie = lie
        self.space = pseudo_line()
        self.rep = rep
        self.maxdeg = maxdeg
        self.big = {}
        self.small = {}
        self.gens = {}
        self.retraction = {}
        self.delta = {}
        for U in self.space.opens:
            key = tuple(sorted(U))
            forms = _K_OPENS[key]
            gens = [(k, x) for k in forms for x in range(len(lie))]
            names = [f"{k}{lie.names[x]}" for k, x in gens]
            S = SymAlgebra(names, [_K_BASIS[k] + lie.degrees[x] - 1 for k, x in gens], maxdeg)
            self.big[U] = S
            self.gens[U] = gens
            comps = _components(U)
            sg = [(c, x) for c in comps for x in range(len(lie))]
            snames = [(lie.names[x] if len(comps) == 1 else f"{lie.names[x]}{c[1:]}") for c, x in sg]
            T = SymAlgebra(snames, [lie.degrees[x] for c, x in sg], maxdeg)
            self.small[U] = (T, sg)
        for U in self.space.opens:
            self._build(U)

    # -- linear pieces
    def _gen_index(self, U, k, x):
        return self.gens[U].index((k, x))

    def _d_gen(self, U):
        S = self.big[U]
        out = {}
        for g, (k, x) in enumerate(self.gens[U]):
            img = {}
            for k2, c in _K_DIFF.get(k, {}).items():
                if (k2, x) in self.gens[U]:
                    vadd(img, S.gen_vec(self._gen_index(U, k2, x)), c)
            if img:
                out[g] = img
        return out

    def _build(self, U):
        S = self.big[U]
        T, sg = self.small[U]
        lie = self.lie
        d = S.extend_derivation(self._d_gen(U), 1)
        big = S.complex(d)
        small = T.complex({})
        # i and p on generators
        iimg, pimg = {}, {}
        for sgi, (c, x) in enumerate(sg):
            form = self.rep if c == "X" else c
            iimg[sgi] = S.gen_vec(self._gen_index(U, form, x))
        for g, (k, x) in enumerate(self.gens[U]):
            if k == "a":
                continue
            c = "X" if len(_components(U)) == 1 and tuple(sorted(U)) == (1, 2, 3) else k
            pimg[g] = T.gen_vec(sg.index((c, x)))
        i = T.extend_algebra_map(S, iimg)
        p = S.extend_algebra_map(T, pimg)
        h = self._homotopy(U) if tuple(sorted(U)) == (1, 2, 3) else {}
        self.retraction[U] = Retraction(big, small, i, p, h)
        self.delta[U] = self._ce(U)

    def _homotopy(self, U):
        """(1/m) D_h in coordinates (u = rep form, b = w1 - w3, a)."""
        S = self.big[U]
        n = len(self.lie)
        other = "w3" if self.rep == "w1" else "w1"
        # new coordinates: generator names u_x, b_x, a_x ; sign of b relative to 'other'
        # w_rep = u, w_other = u -/+ b  (b := w1 - w3)
        sgn = -1 if self.rep == "w1" else 1
        names = [f"u{x}" for x in range(n)] + [f"b{x}" for x in range(n)] + [f"a{x}" for x in range(n)]
        N = SymAlgebra(names, [0] * (2 * n) + [-1] * n, self.maxdeg)
        to_new, to_old = {}, {}
        for x in range(n):
            gu = self._gen_index(U, self.rep, x)
            go = self._gen_index(U, other, x)
            ga = self._gen_index(U, "a", x)
            to_new[gu] = N.gen_vec(x)
            v = dict(N.gen_vec(x))
            vadd(v, N.gen_vec(n + x), sgn)
            to_new[go] = v
            to_new[ga] = N.gen_vec(2 * n + x)
            to_old[x] = S.gen_vec(gu)
            w = S.gen_vec(self._gen_index(U, "w1", x))
            vadd(w, S.gen_vec(self._gen_index(U, "w3", x)), -1)
            to_old[n + x] = w
            to_old[2 * n + x] = S.gen_vec(ga)
        A = S.extend_algebra_map(N, to_new)
        Binv = N.extend_algebra_map(S, to_old)
        Dh = N.extend_derivation({n + x: N.gen_vec(2 * n + x) for x in range(n)}, -1)
        H = {}
        for j in range(len(S)):
            out = {}
            for k, c in A.get(j, {}).items():
                m = sum(1 for g in N.monomials[k] if g >= n)
                if m == 0:
                    continue
                vadd(out, lin_apply(Binv, Dh.get(k, {})), c / m)
            if out:
                H[j] = out
        return H

    def _ce(self, U):
        """The bracket part of the CE differential on symmetric degree two:
        s l1 * s l2 -> (-1)^{|s l1|} s[l1, l2], with [k x, m y] = (k m) [x, y]."""
        S = self.big[U]
        gens = self.gens[U]
        out = {}
        for j, mono in enumerate(S.monomials):
            if len(mono) != 2:
                continue
            g1, g2 = mono
            (k1, x1), (k2, x2) = gens[g1], gens[g2]
            sign = -1 if S.gdeg[g1] % 2 else 1
            v = {}
            for kk, c in _k_mul(k1, k2).items():
                for z, cz in self.lie.br(x1, x2).items():
                    if (kk, z) not in gens:
                        continue
                    vadd(v, S.gen_vec(gens.index((kk, z))), sign * c * cz)
            if v:
                out[j] = v
        return out

    # -- strict structure
    def _incl(self, U, V):
        """Extension by zero Sym(K(U) g[1]) -> Sym(K(V) g[1])."""
        S, T = self.big[U], self.big[V]
        imgs = {g: T.gen_vec(self.gens[V].index(kx)) for g, kx in enumerate(self.gens[U])}
        return S.extend_algebra_map(T, imgs)

    def strict_structure(self, carriers=None):
        from .koszul_dual import all_families
        sp = self.space
        carriers = carriers or {U: self.retraction[U].big for U in sp.opens}
        incl = {}
        for U in sp.opens:
            for V in sp.opens:
                if U <= V:
                    incl[(U, V)] = self._incl(U, V)
        planar = {}
        for F in all_families(sp, 1):
            if F.k == 1:
                M = incl[(F[0][0], F[0][1])]
                planar[F] = MultiMap(fn=lambda idx, M=M: M.get(idx[0], {}))
            else:
                U, W = F[0][0], F[1][0]
                V = U | W
                T = self.big[V]
                MU, MW = incl[(U, V)], incl[(W, V)]
                planar[F] = MultiMap(fn=lambda idx, MU=MU, MW=MW, T=T: T.mul_vec(MU.get(idx[0], {}), MW.get(idx[1], {})))
        return HoStructure(sp, carriers, planar=planar, level_bound=self.maxdeg,
                           name=f"CE[{self.lie.name}]")

    def syzygy(self, U, j):
        """Symmetric degree minus form degree of a big basis monomial."""
        m = self.big[U].monomials[j]
        return len(m) - sum(1 for g in m if self.gens[U][g][0] != "a")


def _fmt_sym(T, vec):
    """Render a Sym(g) vector: sym(xy) for quadratic monomials."""
    parts = []
    for k in sorted(vec, key=lambda k: (-len(T.monomials[k]), T.monomials[k])):
        c = vec[k]
        m = T.monomials[k]
        body = "1" if not m else (T.names[m[0]] if len(m) == 1 else
                                   "sym(" + "".join(T.names[g] for g in m) + ")")
        if c == 1:
            s = body
        elif c == -1:
            s = "-" + body
        else:
            s = f"{fmt_q(c)} {body}"
        parts.append(s)
    if not parts:
        return "0"
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


def ce_demo(lie: LieData, weight_bound=3, rep="w1", check=True):
    """Perturb, transfer and compare with the enveloping algebra.  Returns a
    JSON-able report with keys passed, checks, products, lines."""
    lie.validate()
    model = PseudoLineModel(lie, rep)
    sp = model.space
    report = {"lie": lie.name, "rep": rep, "checks": {}, "products": [], "lines": []}
    ok = True

    def record(name, passed, **extra):
        nonlocal ok
        report["checks"][name] = {"passed": bool(passed), **extra}
        ok = ok and bool(passed)

    perturbed = {}
    for U in sp.opens:
        r = model.retraction[U]
        record(f"retraction {fmt_open(U)}", validate_retraction(r).passed)
        P = perturb(r, model.delta[U])
        perturbed[U] = P.retraction
        record(f"perturbed retraction {fmt_open(U)}", validate_retraction(P.retraction).passed)
        record(f"delta' = 0 on {fmt_open(U)}", not P.delta_small)
        record(f"i' = i on {fmt_open(U)}", _clean(P.retraction.i) == _clean(r.i))
        # (a) small carrier is the tensor product over components of Sym(g)
        T, sg = model.small[U]
        ncomp = len(_components(U))
        want = len(SymAlgebra([f"g{j}" for j in range(ncomp * len(lie))], [0] * (ncomp * len(lie)), model.maxdeg))
        hom = sum(homology_ranks(P.retraction.big).values())
        record(f"carrier {fmt_open(U)}", len(T) == want == hom, components=ncomp, dim=len(T))
        # syzygy bookkeeping: h' raises it by one, p' kills positive syzygy
        good = True
        for j in range(len(P.retraction.big)):
            sz = model.syzygy(U, j)
            for k in P.retraction.h.get(j, {}):
                good &= model.syzygy(U, k) == sz + 1
            if sz > 0 and P.retraction.p.get(j):
                good = False
        record(f"syzygy {fmt_open(U)}", good)
    A = model.strict_structure({U: perturbed[U].big for U in sp.opens})
    B, iinf = transfer(A, perturbed, weight_bound)
    # (b) the extension {1,3} -> X against the PBW product
    U13 = frozenset({1, 3})
    X = frozenset({1, 2, 3})
    ext = B.op(ChainFamily([(U13, X)]))
    T13, sg13 = model.small[U13]
    TX, sgX = model.small[X]
    pbw_ok = True
    for j, m in enumerate(T13.monomials):
        left = tuple(sorted(sg13[g][1] for g in m if sg13[g][0] == "w1"))
        right = tuple(sorted(sg13[g][1] for g in m if sg13[g][0] == "w3"))
        got = ext((j,))
        as_u = {}
        for k, c in got.items():
            vadd(as_u, symmetrize(lie, tuple(sgX[g][1] for g in TX.monomials[k])), c)
        want = pbw_mul_vec(lie, symmetrize(lie, left), symmetrize(lie, right))
        match = as_u == want
        pbw_ok &= match
        if len(left) == 1 and len(right) == 1:
            line = f"{lie.names[left[0]]}·{lie.names[right[0]]} = {_fmt_sym(TX, got)}"
            report["lines"].append(line)
            report["products"].append({"left": lie.names[left[0]], "right": lie.names[right[0]],
                                       "value": _fmt_sym(TX, got), "pbw_match": match})
    record("pbw", pbw_ok)
    if check:
        from .hodisj import check_algebra, check_infinity_morphism
        ra = check_algebra(A, weight_bound)
        record("strict CE structure", ra.passed, summary=ra.summary())
        rb = check_algebra(B, weight_bound)
        record("transferred structure", rb.passed, summary=rb.summary())
        rm = check_infinity_morphism(iinf, weight_bound)
        record("i_inf", rm.passed, summary=rm.summary())
    # (c) everything of weight >= 2 vanishes
    from .koszul_dual import all_families
    vanish = True
    for F in all_families(sp, weight_bound):
        if F.weight < 2:
            continue
        m = B.op(F)
        for idx in B.input_tuples(F):
            if m(idx):
                vanish = False
                report.setdefault("nonvanishing", repr(F))
                break
    record("higher operations vanish", vanish)
    report["passed"] = ok
    return report, B, iinf, model


# ------------------------------------------------------------ sample retractions

def cdga_times_interval(alg, t=0):
    """alg (x) <1, s, ds> with |s| = -1, |ds| = 0, s^2 = s ds = ds ds = 0, d s = ds,
    retracting onto alg via i(v) = v 1 + t * (x v) ds, where x is the second basis
    vector of alg (any degree-0 element works)."""
    from .hodisj import CommAlgebra
    n = alg.n
    lab = ["1", "s", "ds"]
    ldeg = [0, -1, 0]
    # basis (v, l) -> v*3 + l
    degs = [alg.degrees[v] + ldeg[l] for v in range(n) for l in range(3)]
    names = [f"{alg.labels[v]}.{lab[l]}" for v in range(n) for l in range(3)]
    lmul = {(0, 0): (0, 1), (0, 1): (1, 1), (1, 0): (1, 1), (0, 2): (2, 1), (2, 0): (2, 1)}
    mult = {}
    for v1, l1, v2, l2 in itertools.product(range(n), range(3), range(n), range(3)):
        if (l1, l2) not in lmul:
            continue
        l, c = lmul[(l1, l2)]
        s = -1 if (ldeg[l1] * alg.degrees[v2]) % 2 else 1
        vec = {k * 3 + l: s * c * x for k, x in alg.mul(v1, v2).items()}
        if vec:
            mult[(v1 * 3 + l1, v2 * 3 + l2)] = vec
    diff = {}
    for v in range(n):
        # d(v s) = dv s + (-1)^{|v|} v ds
        img = {v * 3 + 2: Q(-1 if alg.degrees[v] % 2 else 1)}
        for k, c in alg.complex.d_basis(v).items():
            vadd(img, {k * 3 + 1: c})
        diff[v * 3 + 1] = img
        dv = {k * 3: c for k, c in alg.complex.d_basis(v).items()}
        if dv:
            diff[v * 3] = dv
        dvd = {k * 3 + 2: c for k, c in alg.complex.d_basis(v).items()}
        if dvd:
            diff[v * 3 + 2] = dvd
    big = CommAlgebra(degs, mult, diff, names, name=f"{alg.name}(x)I", symmetric=False)
    if any(alg.degrees) or alg.complex.diff:
        raise DisjCalcError("cdga_times_interval expects an algebra in degree 0 with d = 0")
    small = alg.complex
    x = 1 if n > 1 else 0
    i, p, h = {}, {}, {}
    for v in range(n):
        iv = {v * 3: Q(1)}
        for k, c in alg.mul(x, v).items():
            vadd(iv, {k * 3 + 2: t * c})
        i[v] = iv
        p[v * 3] = {v: Q(1)}
        h[v * 3 + 2] = {v * 3 + 1: Q(1)}
        hv = {}
        for k, c in alg.mul(x, v).items():
            vadd(hv, {k * 3 + 1: -t * c})
        if hv:
            h[v * 3] = hv
    return big, Retraction(big.complex, small, _clean(i), p, _clean(h))


def random_retraction_structure(space, alg, seed=0):
    """Strict structure on alg (x) interval with a random parameter t_U per open."""
    from .hodisj import strict_structure
    rng = random.Random(seed)
    big, _ = cdga_times_interval(alg, 0)
    A = strict_structure(space, big)
    rets = {}
    for U in space.opens:
        t = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        _, r = cdga_times_interval(alg, t)
        rets[U] = r
    return A, rets


def random_iso_retraction(C: GradedComplex, seed=0):
    """h = 0 retraction onto a copy of C through a random degree-preserving
    isomorphism that commutes with d (only used for d = 0)."""
    if C.diff:
        raise DisjCalcError("random_iso_retraction expects d = 0")
    rng = random.Random(seed)
    n = len(C)
    while True:
        M = {}
        for j in range(n):
            col = {}
            for k in range(n):
                if C.degrees[k] == C.degrees[j]:
                    c = Fraction(rng.randint(-3, 3))
                    if c:
                        col[k] = c
            M[j] = col
        inv = _invert(M, n)
        if inv is not None:
            return Retraction(C, GradedComplex(C.degrees, {}, [f"{l}'" for l in C.labels]), M, inv, {})


def _invert(M, n):
    """Exact inverse of a square sparse matrix (columns), or None if singular."""
    rows = [[Fraction(M.get(j, {}).get(k, 0)) for j in range(n)] + [Fraction(int(k == r)) for r in range(n)]
            for k in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c]), None)
        if piv is None:
            return None
        rows[c], rows[piv] = rows[piv], rows[c]
        lead = rows[c][c]
        rows[c] = [x / lead for x in rows[c]]
        for r in range(n):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return {j: {k: rows[k][n + j] for k in range(n) if rows[k][n + j]} for j in range(n)}
