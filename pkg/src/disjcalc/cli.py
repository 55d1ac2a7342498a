"""disjcalc command line.

Exit codes: 0 when every requested check passes, 1 when a check fails (the
report is still written), 2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import core, disj, hodisj, koszul_dual as kd, transfer as tr
from .core import DisjCalcError, MalformedInput, fmt_open, fmt_q


class CheckFailed(Exception):
    pass


def threads():
    try:
        return max(1, int(os.environ.get("DISJCALC_THREADS", "1")))
    except ValueError:
        return 1


# ------------------------------------------------------------ loading

def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise MalformedInput(f"$: {what} file {path!r} not found") from None
    except json.JSONDecodeError as err:
        raise MalformedInput(f"$: {what} file {path!r} is not valid JSON ({err.msg}, line {err.lineno})") from None


def load_space(arg):
    try:
        return core.preset(arg)
    except KeyError:
        pass
    obj = _read_json(arg, "space")
    for key in ("points", "opens"):
        if key not in obj:
            raise MalformedInput(f"$.{key}: missing")
    try:
        return core.space_from_json(obj)
    except core.TopologyViolation as err:
        raise MalformedInput(f"$.opens: {err}") from None


def load_algebra(arg, space):
    """A strict structure from a named/JSON commutative algebra, or a full
    structure JSON (one with 'carriers')."""
    if arg in hodisj.ALGEBRAS:
        return hodisj.strict_structure(space, hodisj.ALGEBRAS[arg]())
    obj = _read_json(arg, "algebra")
    if "carriers" in obj:
        return hodisj.structure_from_json(obj, space if "space" not in obj else None)
    if "basis" not in obj:
        raise MalformedInput("$.basis: missing (expected an algebra or a structure)")
    alg = hodisj.CommAlgebra.from_json(obj)
    return hodisj.strict_structure(space, alg)


def load_retractions(arg, space):
    obj = _read_json(arg, "retraction")
    opens = {fmt_open(U): U for U in space.opens}
    out = {}
    for name, r in obj.get("opens", {}).items():
        path = f"$.opens.{name}"
        if name not in opens:
            raise MalformedInput(f"{path}: not an open of the space")
        small = core.complex_from_json(r.get("small"), f"{path}.small")
        maps = {}
        for key in ("i", "p", "h"):
            try:
                maps[key] = {int(j): {int(k): core.Q(c) for k, c in col.items()}
                             for j, col in r.get(key, {}).items()}
            except (ValueError, AttributeError, ZeroDivisionError) as err:
                raise MalformedInput(f"{path}.{key}: {err}") from None
        out[opens[name]] = (small, maps)
    return out


def _family(text):
    try:
        return kd.parse_family(text)
    except (ValueError, DisjCalcError, json.JSONDecodeError) as err:
        raise MalformedInput(f"$family: {err}") from None


# ------------------------------------------------------------ output

def emit(args, report, text_lines, fmt_default="json"):
    out = getattr(args, "report", None)
    fmt = getattr(args, "format", None) or fmt_default
    for line in text_lines:
        print(line)
    if out:
        with open(out, "w") as fh:
            if fmt == "json":
                json.dump(report, fh, indent=2, sort_keys=True, ensure_ascii=False)
                fh.write("\n")
            else:
                fh.write(report if isinstance(report, str) else "\n".join(text_lines) + "\n")
    if isinstance(report, dict) and report.get("passed") is False:
        raise CheckFailed()


def _rep(r):
    return r.to_json()


# ------------------------------------------------------------ subcommands

def cmd_basis(args):
    sp = load_space(args.space)
    fams = kd.enumerate_chain_families(sp, args.arity, args.weight)
    red = kd.reduced_dimension(sp, args.arity, args.weight)
    lines = [repr(F) for F in fams]
    lines.append(f"{len(fams)} ordered families / {red} reduced")
    emit(args, {"space": sp.name, "arity": args.arity, "weight": args.weight,
                "ordered": [F.to_json() for F in fams], "n_ordered": len(fams), "n_reduced": red}, lines)


def cmd_diff(args):
    F = _family(args.family)
    d = kd.kd_differential_planar(F) if args.planar else kd.kd_differential(F)
    lines = []
    for key, c in sorted(d.items(), key=lambda kv: repr(kv[0])):
        G, lab = key if isinstance(key, tuple) and not isinstance(key, kd.ChainFamily) else (key, None)
        lines.append(f"{fmt_q(c)} {G!r}" + (f" @{''.join(map(str, lab))}" if lab else ""))
    emit(args, {"family": F.to_json(), "d": kd.kd_to_json(d)}, lines or ["0"])


def cmd_coprod(args):
    F = _family(args.family)
    terms = kd.decompose_full(F) if args.full else kd.decompose_inf(F)
    rows, lines = [], []
    for t in terms:
        if args.full:
            row = {"outer": t.outer.to_json(), "inners": [x.to_json() for x in t.inners], "coeff": fmt_q(t.coeff)}
            lines.append(f"{fmt_q(t.coeff)} {t.outer!r} o ({', '.join(repr(x) for x in t.inners)})")
        else:
            row = {"outer": t.outer.to_json(), "j": t.j, "inner": t.inner.to_json(), "coeff": fmt_q(t.coeff)}
            lines.append(f"{fmt_q(t.coeff)} {t.outer!r} o_{t.j} {t.inner!r}")
        rows.append(row)
    emit(args, {"family": F.to_json(), "full": bool(args.full), "terms": rows}, lines or ["0"])


def cmd_normal_form(args):
    obj = _read_json(args.tree, "tree")
    try:
        t = core.tree_from_json(obj)
        core.check_tree(t)
    except core.InadmissibleTree as err:
        raise MalformedInput(str(err)) from None
    nf = disj.normal_form(t, strategy=args.strategy, seed=args.seed)
    items = sorted(nf.items(), key=lambda kv: repr(kv[0]))
    lines = [f"{fmt_q(c)} {e!r}" for e, c in items] or ["0"]
    emit(args, {"tree": core.tree_to_json(t), "normal_form": [{"element": e.to_json(), "coeff": fmt_q(c)}
                                                             for e, c in items]}, lines)


def cmd_check_ql(args):
    sp = load_space(args.space)
    r = disj.check_ql(sp, args.weight)
    emit(args, _rep(r), [r.summary()])


def cmd_verify_cooperad(args):
    sp = load_space(args.space)
    r = kd.verify_cooperad(sp, args.weight)
    emit(args, _rep(r), [r.summary()] + [json.dumps(v, ensure_ascii=False) for v in r.violations[:1]])


def _koszul_row(payload):
    spname, V, cols = payload
    sp = core.preset(spname) if isinstance(spname, str) else spname
    return kd.koszul_homology(sp, V, cols)


def cmd_koszul_check(args):
    sp = load_space(args.space)
    rows = []
    if args.output is not None:
        V = core.parse_open(args.output)
        cols = core.split_opens(args.inputs or "")
        if V not in sp._index or any(c not in sp._index for c in cols):
            raise MalformedInput("$output: colors must be opens of the space")
        jobs = [(V, tuple(cols))]
    else:
        jobs = []
        for k in range(1, args.max_arity + 1):
            for V, cols in disj.color_signatures(sp, k, canonical=True):
                jobs.append((V, tuple(cols)))
    payloads = [(sp, V, cols) for V, cols in jobs]
    n = threads()
    if n > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_koszul_row, payloads))
    else:
        results = [_koszul_row(p) for p in payloads]
    ok = True
    lines = []
    for (V, cols), ranks in zip(jobs, results):
        want = {0: 1} if kd.is_admissible(V, cols) else {}
        good = ranks == want
        ok &= good
        rows.append((V, cols, ranks))
        full = {d: ranks.get(d, 0) for d in sorted(set(ranks) | {0})}
        desc = "{" + ", ".join(f"{d}:{r}" for d, r in full.items()) + ", else 0}"
        lines.append(f"{fmt_open(V)} <- ({', '.join(fmt_open(c) for c in cols)}): {desc}"
                     + ("" if good else "  MISMATCH"))
    if args.format == "csv":
        csv = kd.homology_csv(rows)
        if args.report:
            with open(args.report, "w") as fh:
                fh.write(csv)
        for l in lines:
            print(l)
        if not ok:
            raise CheckFailed()
        return
    report = {"space": sp.name, "passed": ok,
              "rows": [{"output": fmt_open(V), "inputs": [fmt_open(c) for c in cols],
                        "ranks": {str(d): r for d, r in sorted(rk.items())}} for V, cols, rk in rows]}
    emit(args, report, lines)


def cmd_check_algebra(args):
    sp = load_space(args.space)
    A = load_algebra(args.algebra, sp)
    r = hodisj.check_algebra(A, args.weight)
    emit(args, _rep(r), [r.summary()] + [json.dumps(v, ensure_ascii=False) for v in r.violations[:1]])


def cmd_check_morphism(args):
    sp = load_space(args.space)
    obj = _read_json(args.morphism, "morphism")
    try:
        A = hodisj.structure_from_json(obj["source"], sp) if isinstance(obj.get("source"), dict) \
            else load_algebra(obj["source"], sp)
        B = hodisj.structure_from_json(obj["target"], sp) if isinstance(obj.get("target"), dict) \
            else load_algebra(obj["target"], sp)
    except KeyError as err:
        raise MalformedInput(f"$.{err.args[0]}: missing") from None
    opens = {fmt_open(U): U for U in sp.opens}
    unary, maps = {}, {}
    for name, tab in obj.get("unary", {}).items():
        if name not in opens:
            raise MalformedInput(f"$.unary.{name}: not an open of the space")
        col = {int(j): {int(k): core.Q(c) for k, c in v.items()} for j, v in tab.items()}
        unary[opens[name]] = hodisj.MultiMap(fn=lambda idx, col=col: col.get(idx[0], {}))
    for U in sp.opens:
        unary.setdefault(U, hodisj.MultiMap(fn=lambda idx: {idx[0]: core.Q(1)}))
    for n_, e in enumerate(obj.get("components", [])):
        try:
            F = kd.family_from_json(e["family"])
            tab = {tuple(x["inputs"]): {int(k): core.Q(v) for k, v in x["value"].items()}
                   for x in e.get("entries", [])}
        except (KeyError, TypeError, ValueError, DisjCalcError) as err:
            raise MalformedInput(f"$.components[{n_}]: {err!r}") from None
        maps[F] = hodisj.MultiMap(table=tab)
    f = hodisj.HoMorphism(A, B, unary, maps, name=obj.get("name", "f"))
    r = hodisj.check_infinity_morphism(f, args.weight)
    emit(args, _rep(r), [r.summary()] + [json.dumps(v, ensure_ascii=False) for v in r.violations[:1]])


def cmd_specialize(args):
    sp = load_space(args.space)
    A = load_algebra(args.algebra, sp)
    try:
        s = hodisj.specialize_finite(A, args.weight)
    except hodisj.WrongSpace as err:
        raise MalformedInput(f"$space: {err}") from None
    rep = s.report.to_json()
    rep["kind"] = s.kind
    rep["data"] = core._jsonable(s.data)
    emit(args, rep, [f"{s.kind}: {s.report.summary()}"])


def cmd_transfer(args):
    sp = load_space(args.space)
    if args.demo:
        alg = hodisj.ALGEBRAS.get(args.algebra or "dual_numbers", hodisj.dual_numbers)()
        A, rets = tr.random_retraction_structure(sp, alg, seed=args.seed)
    else:
        if not args.algebra or not args.retraction:
            raise MalformedInput("$: transfer needs --algebra and --retraction (or --demo)")
        A = load_algebra(args.algebra, sp)
        raw = load_retractions(args.retraction, sp)
        rets = {}
        for U in sp.opens:
            if U not in raw:
                raise MalformedInput(f"$.opens.{fmt_open(U)}: missing")
            small, m = raw[U]
            rets[U] = tr.Retraction(A.carriers[U], small, m["i"], m["p"], m["h"])
    reports = {}
    ok = True
    for U, r in sorted(rets.items(), key=lambda t: core.okey(t[0])):
        v = tr.validate_retraction(r, fmt_open(U))
        reports[f"retraction {fmt_open(U)}"] = v.to_json()
        ok &= v.passed
    lines = []
    if ok:
        B, f = tr.transfer(A, rets, args.weight)
        rb = hodisj.check_algebra(B, args.weight)
        rm = hodisj.check_infinity_morphism(f, args.weight)
        reports["transferred"] = rb.to_json()
        reports["i_inf"] = rm.to_json()
        ok = rb.passed and rm.passed
        lines += [rb.summary(), rm.summary()]
        structure = B.to_json(min(args.weight, 2))
    else:
        lines.append("retraction identities fail; nothing transferred")
        structure = None
    emit(args, {"passed": ok, "checks": reports, "structure": structure}, lines)


def cmd_ce_demo(args):
    if args.lie in tr.LIE_PRESETS:
        lie = tr.LIE_PRESETS[args.lie]()
    else:
        lie = tr.LieData.from_json(_read_json(args.lie, "lie"))
    rep, *_ = tr.ce_demo(lie, args.weight, rep=args.rep)
    lines = list(rep["lines"])
    lines += [f"{k}: {'PASS' if v['passed'] else 'FAIL'}" for k, v in rep["checks"].items()]
    emit(args, rep, lines)


def cmd_export_dot(args):
    if args.tree:
        obj = _read_json(args.tree, "tree")
        try:
            t = core.tree_from_json(obj)
        except core.InadmissibleTree as err:
            raise MalformedInput(str(err)) from None
        dot = core.tree_to_dot(t)
    else:
        try:
            e = disj.DisjBasisElement.make(core.parse_open(args.output), core.split_opens(args.inputs or ""))
        except DisjCalcError as err:
            raise MalformedInput(f"$element: {err}") from None
        dot = disj.basis_element_to_dot(e)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)


# ------------------------------------------------------------ parser

def _bound(x):
    v = int(x)
    if v < 1:
        raise argparse.ArgumentTypeError("bounds must be >= 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="disjcalc", description="Disjoint-union operad toolkit on finite spaces.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, helptext, space=True, weight=None):
        q = sub.add_parser(name, help=helptext)
        if space:
            q.add_argument("--space", required=True, help="preset name or space JSON file")
        if weight is not None:
            q.add_argument("--weight", type=_bound, default=weight)
        q.add_argument("--report", help="write the machine-readable report here")
        q.add_argument("--format", choices=["json", "csv", "dot", "text"], default=None)
        q.set_defaults(fn=fn)
        return q

    q = add("basis", cmd_basis, "list chain families of given arity and weight")
    q.add_argument("--arity", type=_bound, required=True)
    q.add_argument("--weight", type=int, required=True)
    q = add("diff", cmd_diff, "differential of a chain family", space=False)
    q.add_argument("--family", required=True)
    q.add_argument("--planar", action="store_true", help="skip the shuffle reduction")
    q = add("coprod", cmd_coprod, "infinitesimal (or full) decomposition", space=False)
    q.add_argument("--family", required=True)
    q.add_argument("--full", action="store_true")
    q = add("normal-form", cmd_normal_form, "normal form of a shuffle tree", space=False)
    q.add_argument("--tree", required=True)
    q.add_argument("--strategy", choices=["standard", "random"], default="standard")
    q.add_argument("--seed", type=int, default=0)
    add("check-ql", cmd_check_ql, "quadratic-linear conditions", weight=3)
    add("verify-cooperad", cmd_verify_cooperad, "cooperad identities", weight=3)
    q = add("koszul-check", cmd_koszul_check, "cobar homology ranks")
    q.add_argument("--output", help="output color V, e.g. {1,2}")
    q.add_argument("--inputs", help="comma separated input colors, e.g. '∅,{1}'")
    q.add_argument("--max-arity", type=_bound, default=3)
    q = add("check-algebra", cmd_check_algebra, "check a homotopy structure", weight=3)
    q.add_argument("--algebra", required=True, help="algebra preset, algebra JSON or structure JSON")
    q = add("check-morphism", cmd_check_morphism, "check an infinity-morphism", weight=3)
    q.add_argument("--morphism", required=True)
    q = add("specialize", cmd_specialize, "classical data on small spaces", weight=3)
    q.add_argument("--algebra", required=True)
    q = add("transfer", cmd_transfer, "homotopy transfer along retractions", weight=3)
    q.add_argument("--algebra")
    q.add_argument("--retraction")
    q.add_argument("--demo", action="store_true", help="use a random retraction of alg (x) interval")
    q.add_argument("--seed", type=int, default=0)
    q = add("ce-demo", cmd_ce_demo, "pseudo-line Chevalley-Eilenberg transfer", space=False, weight=3)
    q.add_argument("--lie", default="heisenberg", help="preset or LieData JSON")
    q.add_argument("--rep", choices=["w1", "w3"], default="w1")
    q = add("export-dot", cmd_export_dot, "DOT for a tree or basis element", space=False)
    q.add_argument("--tree")
    q.add_argument("--output")
    q.add_argument("--inputs")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except CheckFailed:
        return 1
    except MalformedInput as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (DisjCalcError, KeyError, ValueError) as err:
        print(f"error: $: {err}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
