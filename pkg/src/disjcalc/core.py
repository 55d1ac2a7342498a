"""Finite spaces, chain families, shuffles and exact linear algebra over Q.

Everything downstream works with exact rationals (fractions.Fraction) and
sparse vectors stored as plain dicts {key: Fraction}.  Opens are frozensets
of points.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction


class DisjCalcError(Exception):
    """Base class for all library errors."""


class TopologyViolation(DisjCalcError):
    pass


class DifferentialNotSquareZero(DisjCalcError):
    pass


class MalformedInput(DisjCalcError):
    """Bad input data; the message starts with the offending JSON path."""


# ---------------------------------------------------------------- rationals

def Q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fmt_q(x) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ------------------------------------------------------------ sparse vectors

def vadd(acc: dict, vec: dict, c=1) -> dict:
    """acc += c * vec, in place; zero entries are dropped."""
    if not c:
        return acc
    for k, v in vec.items():
        nv = acc.get(k, 0) + c * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def vterm(acc: dict, key, c) -> dict:
    if c:
        nv = acc.get(key, 0) + c
        if nv:
            acc[key] = nv
        else:
            acc.pop(key, None)
    return acc


def vscale(vec: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * v for k, v in vec.items()}


class Echelon:
    """Incremental row echelon form over Q with sparse rows.

    Columns are arbitrary hashable keys; ``order`` maps a key to something
    sortable.  The pivot of each row is its largest column, so reducing a
    vector modulo the span yields a representative supported on the
    smallest columns not used as pivots.
    """

    def __init__(self, order=None):
        self.order = order or (lambda k: k)
        self.rows = {}  # pivot -> row with row[pivot] == 1

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = {k: Q(c) for k, c in vec.items() if c}
        rows = self.rows
        while True:
            hits = [k for k in v if k in rows]
            if not hits:
                return v
            p = max(hits, key=self.order)
            vadd(v, rows[p], -v[p])

    def add(self, vec: dict) -> bool:
        """Insert a vector; returns True if the rank went up."""
        v = self.reduce(vec)
        if not v:
            return False
        p = max(v, key=self.order)
        c = v[p]
        self.rows[p] = {k: x / c for k, x in v.items()}
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def pivots(self):
        return set(self.rows)


def rank(vectors, order=None) -> int:
    e = Echelon(order=order or _anykey)
    for v in vectors:
        e.add(v)
    return len(e)


def _anykey(k):
    return repr(k) if not isinstance(k, (int, tuple)) else k


def nullspace(columns, order=None):
    """Kernel of the linear map sending basis vector j to columns[j].

    ``columns`` is a list of sparse vectors; returns a list of sparse
    vectors over range(len(columns)) spanning the kernel.
    """
    order = order or _anykey
    # eliminate on augmented rows [col | e_j]
    basis = []  # list of (reduced col, combo)
    pivots = {}
    kernel = []
    for j, col in enumerate(columns):
        v = {k: Q(c) for k, c in col.items() if c}
        combo = {j: Fraction(1)}
        while True:
            hits = [k for k in v if k in pivots]
            if not hits:
                break
            p = max(hits, key=order)
            rv, rc = pivots[p]
            c = v[p]
            vadd(v, rv, -c)
            vadd(combo, rc, -c)
        if v:
            p = max(v, key=order)
            c = v[p]
            pivots[p] = ({k: x / c for k, x in v.items()},
                         {k: x / c for k, x in combo.items()})
        else:
            kernel.append(combo)
    return kernel


# ------------------------------------------------------------- finite spaces

def _pkey(p):
    return (0, p, "") if isinstance(p, int) else (1, 0, str(p))


def okey(U):
    """Sort key for opens: lexicographic on the sorted point list."""
    return tuple(_pkey(p) for p in sorted(U, key=_pkey))


def fmt_open(U) -> str:
    if not U:
        return "{}"
    return "{" + ",".join(str(p) for p in sorted(U, key=_pkey)) + "}"


class FiniteSpace:
    """A finite topological space given by its full lattice of opens."""

    def __init__(self, points, opens, name=""):
        self.points = tuple(sorted(set(points), key=_pkey))
        self.opens = tuple(sorted({frozenset(U) for U in opens}, key=okey))
        self.name = name
        self._index = {U: i for i, U in enumerate(self.opens)}

    def __repr__(self):
        return f"FiniteSpace({self.name or '?'}, {len(self.points)} pts, {len(self.opens)} opens)"

    def __eq__(self, other):
        return (isinstance(other, FiniteSpace) and self.points == other.points
                and self.opens == other.opens)

    def __hash__(self):
        return hash((self.points, self.opens))

    @property
    def top(self):
        return frozenset(self.points)

    def is_open(self, U) -> bool:
        return frozenset(U) in self._index

    def index(self, U) -> int:
        return self._index[frozenset(U)]

    def sub_opens(self, V):
        return [U for U in self.opens if U <= V]

    def to_json(self) -> dict:
        return {"points": list(self.points),
                "opens": [sorted(U, key=_pkey) for U in self.opens],
                "name": self.name}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def build_space(points, opens, name="") -> FiniteSpace:
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise TopologyViolation("duplicate points")
    P = frozenset(pts)
    fam = set()
    for U in opens:
        U = frozenset(U)
        if not U <= P:
            raise TopologyViolation(f"open {fmt_open(U)} is not a subset of the points")
        fam.add(U)
    if frozenset() not in fam:
        raise TopologyViolation("the empty set must be open")
    if P not in fam:
        raise TopologyViolation("the whole space must be open")
    for U, V in itertools.combinations(fam, 2):
        if U | V not in fam:
            raise TopologyViolation(f"not closed under union: {fmt_open(U)} u {fmt_open(V)}")
        if U & V not in fam:
            raise TopologyViolation(f"not closed under intersection: {fmt_open(U)} n {fmt_open(V)}")
    return FiniteSpace(pts, fam, name)


def space_from_json(obj) -> FiniteSpace:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return build_space(obj["points"], obj["opens"], obj.get("name", ""))


def empty():
    return build_space([], [[]], "empty")


def point():
    return build_space([1], [[], [1]], "point")


def sierpinski():
    """Two points; opens {}, {1}, {1,2}."""
    return build_space([1, 2], [[], [1], [1, 2]], "sierpinski")


def discrete(n):
    pts = list(range(1, n + 1))
    opens = [c for r in range(n + 1) for c in itertools.combinations(pts, r)]
    return build_space(pts, opens, f"discrete{n}")


def indiscrete(n):
    pts = list(range(1, n + 1))
    return build_space(pts, [[], pts], f"indiscrete{n}")


def pseudo_line():
    """Three points; opens {}, {1}, {3}, {1,3}, {1,2,3}."""
    return build_space([1, 2, 3], [[], [1], [3], [1, 3], [1, 2, 3]], "pseudo_line")


PRESETS = {
    "empty": empty, "point": point, "sierpinski": sierpinski,
    "pseudo_line": pseudo_line, "pseudo-line": pseudo_line,
}


def preset(name: str) -> FiniteSpace:
    if name in PRESETS:
        return PRESETS[name]()
    for stem, fn in (("discrete", discrete), ("indiscrete", indiscrete)):
        if name.startswith(stem) and name[len(stem):].isdigit():
            return fn(int(name[len(stem):]))
    raise KeyError(name)


# ------------------------------------------------------------------- chains

def chains_from(space: FiniteSpace, bottom, length: int):
    """All strict chains bottom = U_1 < ... < U_length."""
    bottom = frozenset(bottom)
    out = []

    def grow(ch):
        if len(ch) == length:
            out.append(tuple(ch))
            return
        last = ch[-1]
        for W in space.opens:
            if last < W:
                grow(ch + [W])

    grow([bottom])
    return out


def all_chains(space: FiniteSpace, length: int):
    out = []
    for U in space.opens:
        out.extend(chains_from(space, U, length))
    return out


def chain_key(ch):
    return tuple(okey(U) for U in ch)


def fmt_chain(ch) -> str:
    return "(" + "<".join(fmt_open(U) for U in ch) + ")"


# ------------------------------------------------------------------ shuffles

def perm_sign(perm) -> int:
    """Sign of a permutation in one-line notation (values 1..n or 0..n-1)."""
    p = list(perm)
    s = 1
    seen = [False] * len(p)
    base = min(p) if p else 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j, L = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j] - base
            L += 1
        if L % 2 == 0:
            s = -s
    return s


def shuffles(*ls):
    """All (l_1,...,l_n)-shuffles with their signs.

    A shuffle is returned in one-line notation (sigma(1), ..., sigma(N)),
    values 1-based, increasing on each consecutive block.
    """
    N = sum(ls)
    blocks = []
    start = 0
    for L in ls:
        blocks.append(list(range(start, start + L)))
        start += L
    out = []

    def place(bi, free, img):
        if bi == len(ls):
            perm = tuple(x + 1 for x in img)
            out.append((perm, perm_sign(perm)))
            return
        for pos in itertools.combinations(free, ls[bi]):
            rest = [x for x in free if x not in pos]
            img2 = list(img)
            for e, p in zip(blocks[bi], pos):
                img2[e] = p
            place(bi + 1, rest, img2)

    place(0, list(range(N)), [None] * N)
    out.sort()
    return out


def koszul_sign(perm, parities) -> int:
    """Koszul sign of moving item i to position perm[i] (1-based perm).

    ``parities[i]`` is the degree (mod 2) of item i.
    """
    s = 0
    n = len(perm)
    for a in range(n):
        if not parities[a] % 2:
            continue
        for b in range(a + 1, n):
            if parities[b] % 2 and perm[a] > perm[b]:
                s += 1
    return -1 if s % 2 else 1


def inverse_perm(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p - 1] = i + 1
    return tuple(inv)


def compositions(n, parts=None, minpart=1):
    """Ordered tuples of positive ints summing to n (optionally fixed length)."""
    if parts is None:
        for p in range(1, n + 1):
            yield from compositions(n, p, minpart)
        return
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(minpart, n - minpart * (parts - 1) + 1):
        for rest in compositions(n - first, parts - 1, minpart):
            yield (first,) + rest


# ---------------------------------------------------------- graded complexes

class GradedComplex:
    """A finite-dimensional cochain complex with a chosen basis.

    ``degrees[i]`` is the degree of basis vector i and ``diff[i]`` its image
    (sparse dict over basis indices); d raises degree by one.  ``labels``
    are arbitrary printable names.  ``levels`` is an optional per-basis
    filtration index used by truncated carriers.
    """

    def __init__(self, degrees, diff=None, labels=None, levels=None, check=True):
        self.degrees = list(degrees)
        self.diff = {i: dict(v) for i, v in (diff or {}).items() if v}
        self.labels = list(labels) if labels is not None else [f"e{i}" for i in range(len(self.degrees))]
        self.levels = list(levels) if levels is not None else None
        if check:
            self.check()

    def __len__(self):
        return len(self.degrees)

    @property
    def dim(self):
        return len(self.degrees)

    def d(self, vec: dict) -> dict:
        out = {}
        for i, c in vec.items():
            if i in self.diff:
                vadd(out, self.diff[i], c)
        return out

    def d_basis(self, i) -> dict:
        return self.diff.get(i, {})

    def check(self):
        for i, img in self.diff.items():
            for j in img:
                if self.degrees[j] != self.degrees[i] + 1:
                    raise DisjCalcError(f"differential not of degree +1 on basis {self.labels[i]}")
            dd = self.d(img)
            if dd:
                raise DifferentialNotSquareZero(f"d^2 != 0 on basis element {self.labels[i]}")

    def in_degree(self, n):
        return [i for i, d in enumerate(self.degrees) if d == n]

    def index(self, label):
        return self.labels.index(label)

    def to_json(self):
        basis = [{"name": str(l), "degree": d} for l, d in zip(self.labels, self.degrees)]
        if self.levels is not None:
            for b, lv in zip(basis, self.levels):
                b["level"] = lv
        return {"basis": basis,
                "d": {str(self.labels[i]): {str(self.labels[j]): fmt_q(c) for j, c in sorted(v.items())}
                      for i, v in sorted(self.diff.items())}}


def homology_ranks(C: GradedComplex) -> dict:
    """Betti numbers {degree: dim H^degree}, omitting zeros."""
    C.check()
    ranks = {}
    for n in sorted(set(C.degrees)):
        cols = [C.d_basis(i) for i in C.in_degree(n)]
        ranks[n] = rank(cols)
    out = {}
    for n in sorted(set(C.degrees)):
        h = len(C.in_degree(n)) - ranks[n] - ranks.get(n - 1, 0)
        if h:
            out[n] = h
    return out


def complex_from_json(obj, path="$") -> GradedComplex:
    if not isinstance(obj, dict) or not isinstance(obj.get("basis"), list):
        raise MalformedInput(f"{path}.basis: expected a list of {{name, degree}}")
    names, degs, levels = [], [], []
    for n, b in enumerate(obj["basis"]):
        try:
            names.append(str(b["name"]))
            degs.append(int(b["degree"]))
            levels.append(b.get("level"))
        except (KeyError, TypeError, ValueError) as err:
            raise MalformedInput(f"{path}.basis[{n}]: {err!r}") from None
    pos = {n: i for i, n in enumerate(names)}
    diff = {}
    for src, img in obj.get("d", {}).items():
        try:
            diff[pos[src]] = {pos[t]: Q(c) for t, c in img.items()}
        except (KeyError, ValueError, ZeroDivisionError) as err:
            raise MalformedInput(f"{path}.d.{src}: {err!r}") from None
    lv = levels if all(x is not None for x in levels) and levels else None
    return GradedComplex(degs, diff, names, lv)


# ------------------------------------------------------------ check reports

class CheckReport:
    """Outcome of a structural check; ``violations`` is a list of dicts."""

    def __init__(self, name=""):
        self.name = name
        self.violations = []
        self.checked = 0
        self.details = {}

    @property
    def passed(self):
        return not self.violations

    def fail(self, **kw):
        self.violations.append(kw)

    def __bool__(self):
        return self.passed

    def summary(self):
        st = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {st} ({self.checked} checks, {len(self.violations)} violations)"

    def to_json(self):
        out = {"name": self.name, "passed": self.passed, "checked": self.checked,
               "violations": [_jsonable(v) for v in self.violations]}
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, frozenset):
        return sorted(x, key=str)
    if isinstance(x, dict):
        return {repr(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return repr(x)



# ------------------------------------------------------------ shuffle trees
#
# Trees of the free colored operad on the generators Ext(U<V) (unary) and
# Bin(U,V) (binary, U and V disjoint).  A tree is either a Leaf or a Node.
# Shuffle form: the children of every vertex are ordered by their minimal
# leaf label; Bin is relabelled accordingly (the generators sit in degree 0
# and Bin(U,V).(12) = Bin(V,U), so reordering carries no sign).

from typing import NamedTuple


class InadmissibleTree(DisjCalcError):
    pass


class Ext(NamedTuple):
    src: frozenset
    dst: frozenset

    @property
    def arity(self):
        return 1

    def __repr__(self):
        return f"Ext({fmt_open(self.src)},{fmt_open(self.dst)})"


class Bin(NamedTuple):
    left: frozenset
    right: frozenset

    @property
    def arity(self):
        return 2

    @property
    def dst(self):
        return self.left | self.right

    def __repr__(self):
        return f"Bin({fmt_open(self.left)},{fmt_open(self.right)})"


class Leaf(NamedTuple):
    label: int
    color: frozenset

    def __repr__(self):
        return f"{self.label}:{fmt_open(self.color)}"


class Node(NamedTuple):
    gen: object
    children: tuple

    def __repr__(self):
        return f"{self.gen!r}[" + ", ".join(map(repr, self.children)) + "]"


def ext(src, dst, child):
    return Node(Ext(frozenset(src), frozenset(dst)), (child,))


def bin_(a, b):
    """Binary vertex over two subtrees; the generator is read off the children."""
    return Node(Bin(tree_output(a), tree_output(b)), (a, b))


def leaf(label, color):
    return Leaf(label, frozenset(color))


def tree_output(t):
    if isinstance(t, Leaf):
        return t.color
    return t.gen.dst


def tree_leaves(t):
    if isinstance(t, Leaf):
        return [t]
    out = []
    for c in t.children:
        out.extend(tree_leaves(c))
    return out


def tree_min_leaf(t):
    if isinstance(t, Leaf):
        return t.label
    return min(tree_min_leaf(c) for c in t.children)


def tree_weight(t):
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(tree_weight(c) for c in t.children)


def tree_inputs(t):
    """Input colors indexed by leaf label (labels must be 1..k)."""
    lv = sorted(tree_leaves(t), key=lambda l: l.label)
    return tuple(l.color for l in lv)


def check_tree(t, shuffle=True):
    """Raise InadmissibleTree unless edge colors are consistent (and, with
    ``shuffle``, children are ordered by minimal leaf)."""
    if isinstance(t, Leaf):
        return
    g = t.gen
    if isinstance(g, Ext):
        if len(t.children) != 1:
            raise InadmissibleTree(f"{g!r} needs one input")
        if not g.src < g.dst:
            raise InadmissibleTree(f"{g!r}: extension needs a strict inclusion")
        if tree_output(t.children[0]) != g.src:
            raise InadmissibleTree(f"{g!r}: input edge has color {fmt_open(tree_output(t.children[0]))}")
    elif isinstance(g, Bin):
        if len(t.children) != 2:
            raise InadmissibleTree(f"{g!r} needs two inputs")
        if g.left & g.right:
            raise InadmissibleTree(f"{g!r}: inputs are not disjoint")
        if tree_output(t.children[0]) != g.left or tree_output(t.children[1]) != g.right:
            raise InadmissibleTree(f"{g!r}: input edge colors do not match")
        if shuffle and tree_min_leaf(t.children[0]) > tree_min_leaf(t.children[1]):
            raise InadmissibleTree(f"{g!r}: children not in shuffle order")
    else:
        raise InadmissibleTree(f"unknown generator {g!r}")
    for c in t.children:
        check_tree(c, shuffle)


def check_leaf_labels(t):
    labs = sorted(l.label for l in tree_leaves(t))
    if labs != list(range(1, len(labs) + 1)):
        raise InadmissibleTree(f"leaf labels {labs} are not 1..k")


def normalize_tree(t):
    """Put a tree in shuffle form."""
    if isinstance(t, Leaf):
        return t
    ch = tuple(normalize_tree(c) for c in t.children)
    if isinstance(t.gen, Bin):
        a, b = ch
        if tree_min_leaf(a) > tree_min_leaf(b):
            a, b = b, a
        return Node(Bin(tree_output(a), tree_output(b)), (a, b))
    return Node(t.gen, ch)


def relabel_tree(t, mapping):
    if isinstance(t, Leaf):
        return Leaf(mapping[t.label], t.color)
    return Node(t.gen, tuple(relabel_tree(c, mapping) for c in t.children))


def graft(t1, i, t2):
    """Operadic partial composition t1 o_i t2 (leaf i of t1 replaced by t2)."""
    k2 = len(tree_leaves(t2))
    target = None
    for l in tree_leaves(t1):
        if l.label == i:
            target = l
    if target is None:
        raise InadmissibleTree(f"no leaf {i}")
    if target.color != tree_output(t2):
        raise InadmissibleTree(f"grafting color mismatch at leaf {i}")
    m1 = {l.label: (l.label if l.label < i else l.label + k2 - 1) for l in tree_leaves(t1)}
    m2 = {l.label: l.label + i - 1 for l in tree_leaves(t2)}
    t2r = relabel_tree(t2, m2)

    def sub(t):
        if isinstance(t, Leaf):
            return t2r if t.label == i else Leaf(m1[t.label], t.color)
        return Node(t.gen, tuple(sub(c) for c in t.children))

    return normalize_tree(sub(t1))


def tree_to_dot(t, name="tree"):
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [fontname=\"Helvetica\"];"]
    counter = [0]

    def walk(s):
        counter[0] += 1
        me = f"n{counter[0]}"
        if isinstance(s, Leaf):
            lines.append(f'  {me} [shape=plaintext, label="{s.label}"];')
        else:
            kind = "Ext" if isinstance(s.gen, Ext) else "Bin"
            lines.append(f'  {me} [shape=circle, label="{kind}"];')
            for c in s.children:
                cid = walk(c)
                lines.append(f'  {cid} -> {me} [label="{fmt_open(tree_output(c))}"];')
        return me

    root = walk(t)
    lines.append(f'  root [shape=point]; {root} -> root [label="{fmt_open(tree_output(t))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_json(t):
    if isinstance(t, Leaf):
        return {"leaf": t.label, "color": sorted(t.color, key=_pkey)}
    g = t.gen
    if isinstance(g, Ext):
        d = {"ext": [sorted(g.src, key=_pkey), sorted(g.dst, key=_pkey)]}
    else:
        d = {"bin": [sorted(g.left, key=_pkey), sorted(g.right, key=_pkey)]}
    d["children"] = [tree_to_json(c) for c in t.children]
    return d


def tree_from_json(obj, path="$"):
    if not isinstance(obj, dict):
        raise InadmissibleTree(f"{path}: expected an object")
    if "leaf" in obj:
        return Leaf(int(obj["leaf"]), frozenset(obj.get("color", [])))
    kids = obj.get("children")
    if not isinstance(kids, list):
        raise InadmissibleTree(f"{path}.children: expected a list")
    ch = tuple(tree_from_json(c, f"{path}.children[{n}]") for n, c in enumerate(kids))
    if "ext" in obj:
        a, b = obj["ext"]
        return Node(Ext(frozenset(a), frozenset(b)), ch)
    if "bin" in obj:
        a, b = obj["bin"]
        return Node(Bin(frozenset(a), frozenset(b)), ch)
    raise InadmissibleTree(f"{path}: vertex needs 'ext' or 'bin'")


# ------------------------------------------------------------ text parsing

def _point(tok):
    tok = tok.strip()
    return int(tok) if tok.lstrip("-").isdigit() else tok


def parse_open(text) -> frozenset:
    """'{1,2}', '{}', '∅' or a JSON-style list -> frozenset of points."""
    if isinstance(text, (list, tuple, set, frozenset)):
        return frozenset(_point(str(p)) if isinstance(p, str) else p for p in text)
    t = text.strip()
    if t in ("∅", "{}", "", "[]"):
        return frozenset()
    if t[0] in "{[" and t[-1] in "}]":
        t = t[1:-1]
    return frozenset(_point(p) for p in t.split(",") if p.strip())


def split_opens(text):
    """Split 'A,B,...' at commas outside braces."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return [parse_open(x) for x in out]


# ------------------------------------------------------------ all small topologies

def all_topologies(n, up_to_homeomorphism=True):
    """Every topology on the points 1..n (closed under union and intersection),
    optionally one representative per homeomorphism class."""
    pts = list(range(1, n + 1))
    X = frozenset(pts)
    subsets = [frozenset(c) for r in range(1, n) for c in itertools.combinations(pts, r)]
    found, seen = [], set()
    for mask in range(1 << len(subsets)):
        opens = {frozenset(), X} | {s for b, s in enumerate(subsets) if mask >> b & 1}
        if any(a | b not in opens or a & b not in opens for a in opens for b in opens):
            continue
        key = frozenset(opens)
        if up_to_homeomorphism:
            if key in seen:
                continue
            for perm in itertools.permutations(pts):
                m = dict(zip(pts, perm))
                seen.add(frozenset(frozenset(m[p] for p in U) for U in opens))
        found.append(build_space(pts, [sorted(U) for U in opens], name=f"top{n}_{len(found)}"))
    return found
