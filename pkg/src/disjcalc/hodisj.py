"""Homotopy prefactorization algebras on a finite space.

A structure assigns a cochain complex to every open and a multilinear map
mu_F : A(U_11) x ... x A(U_k1) -> A(tops) of degree 1 - weight(F) to every
chain family F of positive weight.  The maps satisfy

  d(mu_F) = - mu_{dF} - sum c (-1)^{w(F')} mu_{F'} o_j mu_{F''}

where dF and the terms c F' o_j F'' come from ``koszul_dual``, d(g) is the
commutator with the carrier differentials, and compositions carry the
usual Koszul signs on inputs.  An infinity-morphism f : A ~> B has
components f_F of degree -weight(F) with f on identity families a chain
map, subject to

  d(f_F) = f_{dF} + sum c (-1)^{w(F')} f_{F'} o_j mu^A_{F''}
                  - sum c mu^B_{F'}(f_{F''_1}, ..., f_{F''_p})

(the second sum also includes the term with an identity outer family, the
third one runs over full decompositions whose outer family is not an
identity).

Operations can be given either on ordered families directly ("planar"
mode) or only on the reduced labeled representatives of the symmetric
quotient, in which case any ordered family is evaluated by reducing it.
"""
from __future__ import annotations

import itertools
from typing import NamedTuple

from .core import (CheckReport, DisjCalcError, GradedComplex, MalformedInput, Q, fmt_open, fmt_q,
                   complex_from_json, okey, vadd, vterm, _pkey)
from .koszul_dual import (ChainFamily, all_families, decompose_full, decompose_inf,
                          family_from_json, identity, kd_differential_planar, kd_reduce,
                          labeled_sign, relation_vectors, stratum_basis)


class WrongSpace(DisjCalcError):
    pass


class MalformedStructure(MalformedInput):
    pass


def _par(n):
    return -1 if n % 2 else 1


def generator_degree(F: ChainFamily) -> int:
    """Degree of mu_F: 2 - k - sum(s_i - 1)."""
    return 2 - F.k - sum(len(ch) - 1 for ch in F)


def morphism_degree(F: ChainFamily) -> int:
    return 1 - F.k - sum(len(ch) - 1 for ch in F)


# ------------------------------------------------------------ multilinear maps

class MultiMap:
    """A multilinear map given on basis-index tuples, as a table or a function.

    Values are sparse dicts over the output basis.  Lookups are memoized.
    """

    def __init__(self, fn=None, table=None):
        self.fn = fn
        self.table = {tuple(k): dict(v) for k, v in (table or {}).items()}
        self._memo = {}

    def __call__(self, idx):
        idx = tuple(idx)
        if idx in self.table:
            return self.table[idx]
        if self.fn is None:
            return {}
        r = self._memo.get(idx)
        if r is None:
            r = self.fn(idx)
            r = {k: v for k, v in r.items() if v}
            self._memo[idx] = r
        return r

    def tabulate(self, bases):
        """Materialize on the product of index ranges."""
        out = {}
        for idx in itertools.product(*bases):
            v = self(idx)
            if v:
                out[idx] = v
        return MultiMap(table=out)


ZERO = MultiMap()


def apply_vec(m, vecs):
    """m(v_1, ..., v_k) for sparse vectors v_i (no signs: plain multilinearity)."""
    out = {}
    for combo in itertools.product(*[list(v.items()) for v in vecs]):
        c = 1
        for _, x in combo:
            c *= x
        vadd(out, m(tuple(i for i, _ in combo)), c)
    return out


# ------------------------------------------------------------ commutative algebras

class CommAlgebra:
    """Finite-dimensional graded commutative dg algebra with a chosen basis.

    ``mult[(i, j)]`` is a sparse dict; missing entries are zero.  Only pairs
    with i <= j need to be given, the rest follows by graded commutativity
    (pass ``symmetric=False`` to take the table literally).
    """

    def __init__(self, degrees, mult, diff=None, labels=None, name="", symmetric=True):
        self.degrees = list(degrees)
        self.name = name
        self.labels = list(labels) if labels else [f"e{i}" for i in range(len(self.degrees))]
        n = len(self.degrees)
        table = {}
        for (i, j), v in mult.items():
            v = {k: Q(c) for k, c in v.items() if c}
            table[(i, j)] = v
            if symmetric and (j, i) not in mult and i != j:
                s = _par(self.degrees[i] * self.degrees[j])
                table[(j, i)] = {k: s * c for k, c in v.items()}
        self.mult = table
        self.complex = GradedComplex(self.degrees, diff or {}, self.labels)
        self.n = n

    def mul(self, i, j):
        return self.mult.get((i, j), {})

    def mul_vec(self, u, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                vadd(out, self.mul(i, j), a * b)
        return out

    def validate(self):
        from .disj import NotAssociative, NotCommutative
        n = self.n
        deg = self.degrees
        for (i, j), v in self.mult.items():
            for k in v:
                if deg[k] != deg[i] + deg[j]:
                    raise DisjCalcError(f"product {self.labels[i]}*{self.labels[j]} is not homogeneous")
        for i in range(n):
            for j in range(n):
                a = self.mul(i, j)
                b = {k: _par(deg[i] * deg[j]) * c for k, c in self.mul(j, i).items()}
                if a != b:
                    raise NotCommutative(f"{self.labels[i]}*{self.labels[j]} != +-{self.labels[j]}*{self.labels[i]}")
        for i, j, k in itertools.product(range(n), repeat=3):
            lhs = self.mul_vec(self.mul(i, j), {k: 1})
            rhs = self.mul_vec({i: 1}, self.mul(j, k))
            if lhs != rhs:
                raise NotAssociative(f"({self.labels[i]}*{self.labels[j]})*{self.labels[k]}"
                                     f" != {self.labels[i]}*({self.labels[j]}*{self.labels[k]})")
        C = self.complex
        for i, j in itertools.product(range(n), repeat=2):
            lhs = C.d(self.mul(i, j))
            rhs = self.mul_vec(C.d_basis(i), {j: 1})
            vadd(rhs, self.mul_vec({i: 1}, C.d_basis(j)), _par(deg[i]))
            if lhs != rhs:
                raise DisjCalcError(f"Leibniz rule fails on {self.labels[i]}, {self.labels[j]}")
        return True

    def to_json(self):
        return {"name": self.name,
                "basis": [{"name": str(l), "degree": d} for l, d in zip(self.labels, self.degrees)],
                "mult": [{"x": self.labels[i], "y": self.labels[j],
                          "value": {self.labels[k]: fmt_q(c) for k, c in sorted(v.items())}}
                         for (i, j), v in sorted(self.mult.items())],
                "d": self.complex.to_json()["d"]}

    @classmethod
    def from_json(cls, obj):
        names = [b["name"] for b in obj["basis"]]
        pos = {nm: i for i, nm in enumerate(names)}
        degs = [int(b["degree"]) for b in obj["basis"]]
        mult = {}
        for n_, e in enumerate(obj.get("mult", [])):
            try:
                key = (pos[e["x"]], pos[e["y"]])
                mult[key] = {pos[k]: Q(v) for k, v in e["value"].items()}
            except KeyError as err:
                raise MalformedStructure(f"$.mult[{n_}]: unknown basis name {err}") from None
        diff = {}
        for src, img in obj.get("d", {}).items():
            diff[pos[src]] = {pos[k]: Q(v) for k, v in img.items()}
        return cls(degs, mult, diff, names, obj.get("name", ""), symmetric=False)


def unit_algebra():
    return CommAlgebra([0], {(0, 0): {0: 1}}, labels=["1"], name="Q")


def dual_numbers():
    """Q[x]/(x^2), x in degree 0."""
    return CommAlgebra([0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}}, labels=["1", "x"], name="Q[x]/(x^2)")


def exterior_one():
    """Q[e]/(e^2) with e in degree 1."""
    return CommAlgebra([0, 1], {(0, 0): {0: 1}, (0, 1): {1: 1}}, labels=["1", "e"], name="Lambda[e]")


def nonassociative_sample():
    """A commutative but non-associative 2-dim product: e*e = x, e*x = e, x*x = 0."""
    return CommAlgebra([0, 0], {(0, 0): {1: 1}, (0, 1): {0: 1}}, labels=["e", "x"], name="nonassoc")


ALGEBRAS = {"unit": unit_algebra, "dual_numbers": dual_numbers, "exterior": exterior_one}


# ------------------------------------------------------------ structures

class HoStructure:
    """Carriers per open plus operations on chain families.

    planar:  {ChainFamily: MultiMap} operations on ordered families (missing = 0)
    reduced: {(ChainFamily, labels): MultiMap} operations on reduced labeled
             representatives; a value takes its inputs in label order.
    Exactly one of the two is normally used.  ``level_bound`` truncates all
    checks to input tuples of total level <= bound (carriers with levels).
    """

    def __init__(self, space, carriers, planar=None, reduced=None, level_bound=None, name=""):
        self.space = space
        self.carriers = {frozenset(U): C for U, C in carriers.items()}
        missing = [U for U in space.opens if U not in self.carriers]
        if missing:
            raise MalformedStructure(f"no carrier for open {fmt_open(missing[0])}")
        self.planar = dict(planar or {})
        self.reduced = dict(reduced or {})
        self.level_bound = level_bound
        self.name = name
        self.reduced_factory = None  # optional: builds missing reduced entries on demand
        self._red_cache = {}

    def __repr__(self):
        return f"HoStructure({self.name or self.space.name}, {len(self.planar) + len(self.reduced)} ops)"

    def degree(self, U, i):
        return self.carriers[U].degrees[i]

    def level(self, U, i):
        lv = self.carriers[U].levels
        return 0 if lv is None else lv[i]

    def op(self, F: ChainFamily) -> MultiMap:
        """The planar operation mu_F."""
        if not self.reduced and self.reduced_factory is None:
            return self.planar.get(F, ZERO)
        red = self._red_cache.get(F)
        if red is None:
            red = []
            for e, c in kd_reduce({F: 1}).items():
                if e not in self.reduced and self.reduced_factory is not None:
                    self.reduced[e] = self.reduced_factory(e)
                if e in self.reduced:
                    red.append((self.reduced[e], c))
            self._red_cache[F] = red
        if F in self.planar:
            return self.planar[F]
        if not red:
            return ZERO

        def fn(idx, red=red):
            out = {}
            for m, c in red:
                vadd(out, m(idx), c)
            return out
        m = MultiMap(fn)
        self.planar[F] = m
        return m

    def input_tuples(self, F):
        bases = [range(len(self.carriers[ch[0]])) for ch in F]
        for idx in itertools.product(*bases):
            if self.level_bound is not None:
                if sum(self.level(ch[0], i) for ch, i in zip(F, idx)) > self.level_bound:
                    continue
            yield idx

    def to_json(self, weight_bound=2):
        carriers = {fmt_open(U): C.to_json() for U, C in sorted(self.carriers.items(), key=lambda t: okey(t[0]))}
        ops = []
        for F in all_families(self.space, weight_bound):
            m = self.op(F)
            entries = []
            for idx in self.input_tuples(F):
                v = m(idx)
                if v:
                    entries.append({"inputs": list(idx), "value": {str(k): fmt_q(c) for k, c in sorted(v.items())}})
            if entries:
                ops.append({"family": F.to_json(), "entries": entries})
        return {"space": self.space.to_json(), "carriers": carriers, "ops": ops,
                "level_bound": self.level_bound}


def structure_from_json(obj, space=None):
    """Load a structure; ops are given on ordered families (planar mode)."""
    from .core import space_from_json
    if space is None:
        if "space" not in obj:
            raise MalformedStructure("$.space: missing")
        space = space_from_json(obj["space"])
    carriers = {}
    opens_by_name = {fmt_open(U): U for U in space.opens}
    for name, C in obj.get("carriers", {}).items():
        if name not in opens_by_name:
            raise MalformedStructure(f"$.carriers.{name}: not an open of the space")
        carriers[opens_by_name[name]] = complex_from_json(C, f"$.carriers.{name}")
    planar = {}
    for n_, e in enumerate(obj.get("ops", [])):
        try:
            F = family_from_json(e["family"])
        except (KeyError, TypeError, DisjCalcError) as err:
            raise MalformedStructure(f"$.ops[{n_}].family: {err}") from None
        tab = {}
        for m_, ent in enumerate(e.get("entries", [])):
            try:
                tab[tuple(ent["inputs"])] = {int(k): Q(v) for k, v in ent["value"].items()}
            except (KeyError, ValueError, TypeError) as err:
                raise MalformedStructure(f"$.ops[{n_}].entries[{m_}]: {err}") from None
        planar[F] = MultiMap(table=tab)
    return HoStructure(space, carriers, planar=planar, level_bound=obj.get("level_bound"))


def strict_structure(space, alg: CommAlgebra):
    """A(U) = alg for every U; Ext acts by the identity, Bin by the product."""
    C = alg.complex
    carriers = {U: C for U in space.opens}
    ident = MultiMap(fn=lambda idx: {idx[0]: Q(1)})
    prod = MultiMap(fn=lambda idx: alg.mul(idx[0], idx[1]))
    planar = {}
    for F in all_families(space, 1):
        planar[F] = ident if F.k == 1 else prod
    return HoStructure(space, carriers, planar=planar, name=f"strict[{alg.name}]")


# ------------------------------------------------------------ evaluation helpers

def _d_op(A: HoStructure, F, m, deg, idx):
    """(d m)(a) = d(m(a)) - (-1)^deg sum_m +- m(.., d a_m, ..)."""
    out = A.carriers[F.output].d(m(idx))
    acc = 0
    for pos, (ch, i) in enumerate(zip(F, idx)):
        Cin = A.carriers[ch[0]]
        s = -_par(deg + acc)
        for b, c in Cin.d_basis(i).items():
            vadd(out, m(idx[:pos] + (b,) + idx[pos + 1:]), s * c)
        acc += Cin.degrees[i]
    return out


def _degs(A, F, idx):
    return [A.carriers[ch[0]].degrees[i] for ch, i in zip(F, idx)]


def _compose_inf(outer_m, j, q, inner_m, inner_deg, degs, idx):
    """(outer o_j inner)(a) with the Koszul sign of inner passing a_1..a_{j-1}."""
    s = _par(inner_deg * sum(degs[:j - 1]))
    out = {}
    for b, c in inner_m(idx[j - 1:j - 1 + q]).items():
        vadd(out, outer_m(idx[:j - 1] + (b,) + idx[j - 1 + q:]), s * c)
    return out


def _compose_full(outer_m, inner_ms, inner_degs, qs, degs, idx):
    """outer(g_1, ..., g_p)(a): g_i applied to consecutive blocks, each g_i
    passing the inputs of the earlier blocks."""
    parts = []
    start, passed, sign = 0, 0, 0
    for g, gd, q in zip(inner_ms, inner_degs, qs):
        sign += gd * passed
        parts.append(g(idx[start:start + q]))
        passed += sum(degs[start:start + q])
        start += q
    if any(not p for p in parts):
        return {}
    out = apply_vec(outer_m, parts)
    return {k: _par(sign) * v for k, v in out.items()} if sign % 2 else out


def _relation_tag(F):
    if F.weight != 2:
        return f"weight {F.weight}"
    if F.k == 1:
        return "R1"
    if F.k == 2:
        return "R3"
    return "R2"


def _fmt_idx(A, F, idx):
    return [f"{A.carriers[ch[0]].labels[i]}" for ch, i in zip(F, idx)]


def _fmt_vec(C, v):
    return {str(C.labels[k]): fmt_q(c) for k, c in sorted(v.items())}


# ------------------------------------------------------------ checkers

def check_algebra(A: HoStructure, weight_bound=3, shuffle=True, max_violations=20) -> CheckReport:
    """Degree rule, shuffle vanishing and the structure equation on every
    family of weight <= weight_bound and every basis input tuple."""
    rep = CheckReport(f"algebra[{A.name or A.space.name}, w<={weight_bound}]")
    for F in all_families(A.space, weight_bound):
        deg = generator_degree(F)
        m = A.op(F)
        Cout = A.carriers[F.output]
        dF = kd_differential_planar(F)
        terms = decompose_inf(F)
        rels = relation_vectors(F) if shuffle and F.k > 1 else []
        for idx in A.input_tuples(F):
            degs = _degs(A, F, idx)
            val = m(idx)
            rep.checked += 1
            for b in val:
                if Cout.degrees[b] != sum(degs) + deg:
                    rep.fail(check="degree", family=repr(F), inputs=_fmt_idx(A, F, idx),
                             output=str(Cout.labels[b]), expected=sum(degs) + deg)
                    break
            lhs = _d_op(A, F, m, deg, idx)
            rhs = {}
            for G, c in dF.items():
                vadd(rhs, A.op(G)(idx), -c)
            for t in terms:
                q = t.inner.k
                comp = _compose_inf(A.op(t.outer), t.j, q, A.op(t.inner),
                                    generator_degree(t.inner), degs, idx)
                vadd(rhs, comp, -t.coeff * _par(t.outer.weight))
            if lhs != rhs:
                diff = dict(lhs)
                vadd(diff, rhs, -1)
                rep.fail(check="equation", relation=_relation_tag(F), family=repr(F),
                         inputs=_fmt_idx(A, F, idx), lhs=_fmt_vec(Cout, lhs),
                         rhs=_fmt_vec(Cout, rhs), difference=_fmt_vec(Cout, diff))
            for r in rels:
                tot = {}
                for (G, lab), c in r.items():
                    perm_idx = tuple(idx[l - 1] for l in lab)
                    vadd(tot, A.op(G)(perm_idx), c * labeled_sign(lab, degs))
                if tot:
                    rep.fail(check="shuffle", family=repr(F), inputs=_fmt_idx(A, F, idx),
                             value=_fmt_vec(Cout, tot))
            if len(rep.violations) >= max_violations:
                return rep
    return rep


class HoMorphism:
    """Components f_F : A(bottoms) -> B(tops) of degree -weight(F).

    ``unary0[U]`` is the chain map on the identity family of U; ``maps`` is
    {ChainFamily: MultiMap} for positive weight (missing = 0).
    """

    def __init__(self, source: HoStructure, target: HoStructure, unary0, maps=None, name=""):
        self.source, self.target = source, target
        self.unary0 = {frozenset(U): m for U, m in unary0.items()}
        self.maps = dict(maps or {})
        self.fn = None
        self.name = name

    def comp(self, F: ChainFamily) -> MultiMap:
        if F.weight == 0:
            return self.unary0[F.output]
        m = self.maps.get(F)
        if m is None and self.fn is not None:
            m = self.fn(F)
            self.maps[F] = m
        return m or ZERO


def identity_morphism(A: HoStructure):
    ident = MultiMap(fn=lambda idx: {idx[0]: Q(1)})
    return HoMorphism(A, A, {U: ident for U in A.space.opens}, name="id")


def check_infinity_morphism(f: HoMorphism, weight_bound=3, max_violations=20) -> CheckReport:
    A, B = f.source, f.target
    rep = CheckReport(f"morphism[{f.name or A.space.name}, w<={weight_bound}]")
    for F in all_families(A.space, weight_bound, include_identity=True):
        deg = morphism_degree(F)
        m = f.comp(F)
        Cout = B.carriers[F.output]
        if F.weight == 0:
            dF, infs, fulls = {}, [], []
        else:
            dF = kd_differential_planar(F)
            infs = list(decompose_inf(F))
            fulls = decompose_full(F)
        for idx in A.input_tuples(F):
            degs = _degs(A, F, idx)
            rep.checked += 1
            val = m(idx)
            for b in val:
                if Cout.degrees[b] != sum(degs) + deg:
                    rep.fail(check="degree", family=repr(F), inputs=_fmt_idx(A, F, idx))
                    break
            # d(f_F) computed with source differentials on inputs, target on output
            lhs = Cout.d(val)
            acc = 0
            for pos, (ch, i) in enumerate(zip(F, idx)):
                Cin = A.carriers[ch[0]]
                s = -_par(deg + acc)
                for b, c in Cin.d_basis(i).items():
                    vadd(lhs, m(idx[:pos] + (b,) + idx[pos + 1:]), s * c)
                acc += Cin.degrees[i]
            rhs = {}
            for G, c in dF.items():
                vadd(rhs, f.comp(G)(idx), c)
            for t in infs:
                comp = _compose_inf(f.comp(t.outer), t.j, t.inner.k, A.op(t.inner),
                                    generator_degree(t.inner), degs, idx)
                vadd(rhs, comp, t.coeff * _par(t.outer.weight))
            for t in fulls:
                if t.outer.weight == 0:
                    # identity outer: f_id o mu^A_F
                    inner = t.inners[0]
                    comp = _compose_inf(f.comp(t.outer), 1, inner.k, A.op(inner),
                                        generator_degree(inner), degs, idx)
                    vadd(rhs, comp, t.coeff)
                    continue
                comp = _compose_full(B.op(t.outer), [f.comp(g) for g in t.inners],
                                     [morphism_degree(g) for g in t.inners],
                                     [g.k for g in t.inners], degs, idx)
                vadd(rhs, comp, -t.coeff)
            if lhs != rhs:
                diff = dict(lhs)
                vadd(diff, rhs, -1)
                rep.fail(check="equation", family=repr(F), inputs=_fmt_idx(A, F, idx),
                         lhs=_fmt_vec(Cout, lhs), rhs=_fmt_vec(Cout, rhs),
                         difference=_fmt_vec(Cout, diff))
            if len(rep.violations) >= max_violations:
                return rep
    return rep


# ------------------------------------------------------------ finite spaces

class Specialization(NamedTuple):
    kind: str
    data: dict
    report: CheckReport


def _fam(*chains):
    return ChainFamily([tuple(frozenset(U) for U in ch) for ch in chains])


def specialize_finite(A: HoStructure, bound=3) -> Specialization:
    """Read off the classical data on the empty space, a point or the
    Sierpinski space and re-verify the induced identities on all basis inputs.

    empty:      m_k = mu_{(empty)^k}                        (C-infinity algebra)
    point:      A, M, m_{k,i}, pointing maps f_{k,i}; checks
                (d m_{3,1})(m,a,b) = m.(a*b) - (m.a).b
    sierpinski: A, M, eta_M, N, eta_N, f and h = -mu_{(empty<{1}<{1,2})}; checks
                (d h)(a) = eta_N(a) - f(eta_M(a))
    """
    sp = A.space
    rep = CheckReport(f"specialize[{sp.name}]")
    E = frozenset()
    names = {len(sp.points)}
    if sp.opens == (E,):
        ops = {k: A.op(_fam(*[(E,)] * k)) for k in range(2, bound + 2)}
        # consistency with the general checker, restricted to these ops
        sub = check_algebra(A, bound)
        rep.checked += sub.checked
        for v in sub.violations:
            rep.fail(**v)
        return Specialization("empty", {"A": A.carriers[E], "m": ops}, rep)
    if len(sp.points) >= 1 and sp.opens == (E, sp.top):
        X = sp.top
        data = {"A": A.carriers[E], "M": A.carriers[X]}
        data["m"] = {(k, i): A.op(_fam(*[((X,) if n == i else (E,)) for n in range(1, k + 1)]))
                     for k in range(2, bound + 2) for i in range(1, k + 1)}
        data["f"] = {(k, i): A.op(_fam(*[((E, X) if n == i else (E,)) for n in range(1, k + 1)]))
                     for k in range(1, bound + 1) for i in range(1, k + 1)}
        F3 = _fam((X,), (E,), (E,))
        mod = A.op(_fam((X,), (E,)))
        prod = A.op(_fam((E,), (E,)))
        M, Aa = A.carriers[X], A.carriers[E]
        m31 = A.op(F3)
        for idx in A.input_tuples(F3):
            mi, a, b = idx
            degs = [M.degrees[mi], Aa.degrees[a], Aa.degrees[b]]
            lhs = _d_op(A, F3, m31, generator_degree(F3), idx)
            # m.(a*b) - (m.a).b, with the Koszul sign of a*b passing m (degree 0 op: none)
            rhs = apply_vec(mod, [{mi: 1}, prod((a, b))])
            vadd(rhs, apply_vec(mod, [mod((mi, a)), {b: 1}]), -1)
            rep.checked += 1
            if lhs != rhs:
                rep.fail(check="module identity", inputs=_fmt_idx(A, F3, idx),
                         lhs=_fmt_vec(M, lhs), rhs=_fmt_vec(M, rhs))
        return Specialization("point", data, rep)
    o1, o12 = frozenset({1}), frozenset({1, 2})
    if sp.points == (1, 2) and set(sp.opens) == {E, o1, o12}:
        eta_M = A.op(_fam((E, o1)))
        eta_N = A.op(_fam((E, o12)))
        f = A.op(_fam((o1, o12)))
        Fh = _fam((E, o1, o12))
        mu_h = A.op(Fh)
        h = MultiMap(fn=lambda idx: {k: -c for k, c in mu_h(idx).items()})
        data = {"A": A.carriers[E], "M": A.carriers[o1], "N": A.carriers[o12],
                "eta_M": eta_M, "eta_N": eta_N, "f": f, "h": h}
        N = A.carriers[o12]
        hdeg = generator_degree(Fh)
        for idx in A.input_tuples(Fh):
            lhs = _d_op(A, Fh, h, hdeg, idx)
            rhs = dict(eta_N(idx))
            vadd(rhs, apply_vec(f, [eta_M(idx)]), -1)
            rep.checked += 1
            if lhs != rhs:
                rep.fail(check="homotopy identity", inputs=_fmt_idx(A, Fh, idx),
                         lhs=_fmt_vec(N, lhs), rhs=_fmt_vec(N, rhs))
        return Specialization("sierpinski", data, rep)
    raise WrongSpace(f"no specialization for the space {sp.name or sp!r}")


# ------------------------------------------------------------ the shriek side

class ShriekAlgebra:
    """Carriers per open with unary maps iota[(U, W)] (U strictly inside W)
    and binary maps mu[(U, V)] (U, V disjoint) into U u V.

    Degrees: iota has degree 1 and mu degree 0, so that the unary relation
    below is homogeneous.
    """

    def __init__(self, space, carriers, iota=None, mu=None):
        self.space = space
        self.carriers = {frozenset(U): C for U, C in carriers.items()}
        self.iota = {(frozenset(U), frozenset(W)): m for (U, W), m in (iota or {}).items()}
        self.mu = {(frozenset(U), frozenset(V)): m for (U, V), m in (mu or {}).items()}

    def i(self, U, W, x: dict):
        m = self.iota.get((U, W))
        if m is None:
            return {}
        out = {}
        for b, c in x.items():
            vadd(out, m((b,)), c)
        return out

    def m(self, U, V, x: dict, y: dict):
        mm = self.mu.get((U, V))
        if mm is None:
            return {}
        return apply_vec(mm, [x, y])


def check_shriek_algebra(S: ShriekAlgebra) -> CheckReport:
    """Relations of algebras over the Koszul dual operad, on basis elements:

      d(iota_{UW} x) + iota_{UW}(dx) = sum_{U<V<W} iota_{VW} iota_{UV} x
      mu_{UV}(x, y) = -(-1)^{|x||y|} mu_{VU}(y, x)
      graded Jacobi for mu on triples of pairwise disjoint opens
      d mu(x, y) = mu(dx, y) + (-1)^{|x|} mu(x, dy)
      iota_{U u W, X} mu(x, y) = [X = V u W] mu(iota x, y) + [X = U u V'] (-1)^{|x|} mu(x, iota y)
    """
    rep = CheckReport(f"shriek[{S.space.name}]")
    sp = S.space
    C = S.carriers
    opens = sp.opens

    def deg(U, i):
        return C[U].degrees[i]

    for U, W in itertools.product(opens, repeat=2):
        if not U < W:
            continue
        for x in range(len(C[U])):
            lhs = C[W].d(S.i(U, W, {x: 1}))
            vadd(lhs, S.i(U, W, C[U].d_basis(x)))
            rhs = {}
            for V in opens:
                if U < V < W:
                    vadd(rhs, S.i(V, W, S.i(U, V, {x: 1})))
            rep.checked += 1
            if lhs != rhs:
                rep.fail(check="unary", source=fmt_open(U), target=fmt_open(W),
                         input=str(C[U].labels[x]), lhs=_fmt_vec(C[W], lhs), rhs=_fmt_vec(C[W], rhs))
    pairs = [(U, V) for U in opens for V in opens if not U & V]
    for U, V in pairs:
        T = U | V
        for x in range(len(C[U])):
            for y in range(len(C[V])):
                a = S.m(U, V, {x: 1}, {y: 1})
                b = S.m(V, U, {y: 1}, {x: 1})
                rep.checked += 1
                s = -_par(deg(U, x) * deg(V, y))
                if a != {k: s * c for k, c in b.items()}:
                    rep.fail(check="antisymmetry", opens=[fmt_open(U), fmt_open(V)],
                             inputs=[str(C[U].labels[x]), str(C[V].labels[y])])
                lhs = C[T].d(a)
                rhs = S.m(U, V, C[U].d_basis(x), {y: 1})
                vadd(rhs, S.m(U, V, {x: 1}, C[V].d_basis(y)), _par(deg(U, x)))
                if lhs != rhs:
                    rep.fail(check="chain map", opens=[fmt_open(U), fmt_open(V)],
                             inputs=[str(C[U].labels[x]), str(C[V].labels[y])])
                # derivation rule for every extension of U u V
                for X in opens:
                    if not T < X:
                        continue
                    lhs = S.i(T, X, a)
                    rhs = {}
                    Vx, Ux = X - U, X - V
                    if Ux in sp._index and U < Ux and not Ux & V:
                        vadd(rhs, S.m(Ux, V, S.i(U, Ux, {x: 1}), {y: 1}))
                    if Vx in sp._index and V < Vx and not Vx & U:
                        vadd(rhs, S.m(U, Vx, {x: 1}, S.i(V, Vx, {y: 1})), _par(deg(U, x)))
                    rep.checked += 1
                    if lhs != rhs:
                        rep.fail(check="derivation", opens=[fmt_open(U), fmt_open(V), fmt_open(X)],
                                 inputs=[str(C[U].labels[x]), str(C[V].labels[y])],
                                 lhs=_fmt_vec(C[X], lhs), rhs=_fmt_vec(C[X], rhs))
    for U, V, W in itertools.product(opens, repeat=3):
        if U & V or U & W or V & W:
            continue
        for x, y, z in itertools.product(range(len(C[U])), range(len(C[V])), range(len(C[W]))):
            dx, dy, dz = deg(U, x), deg(V, y), deg(W, z)
            # (-1)^{|x||z|} [x,[y,z]] + cyclic = 0
            t1 = S.m(U, V | W, {x: 1}, S.m(V, W, {y: 1}, {z: 1}))
            t2 = S.m(V, W | U, {y: 1}, S.m(W, U, {z: 1}, {x: 1}))
            t3 = S.m(W, U | V, {z: 1}, S.m(U, V, {x: 1}, {y: 1}))
            tot = {}
            vadd(tot, t1, _par(dx * dz))
            vadd(tot, t2, _par(dy * dx))
            vadd(tot, t3, _par(dz * dy))
            rep.checked += 1
            if tot:
                rep.fail(check="jacobi", opens=[fmt_open(U), fmt_open(V), fmt_open(W)],
                         inputs=[str(C[U].labels[x]), str(C[V].labels[y]), str(C[W].labels[z])])
    return rep
