"""Command-line front end.

Usage: ``patchdense <command> [files ...] [options]``. With no files, the
bundled ``chromatic.space`` is loaded. Reports are ``key: value`` lines with
sets written ``{a,b}`` in identifier order; ``--porcelain`` prints one
tab-separated record per line instead. The exit status is 0 whenever a verdict
was computed, 2 on bad input.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from typing import Sequence

from . import finspace as fs
from . import lattice as lt
from . import prospace as ps
from . import support as sp
from ._util import fmt_set, natural_key, sort_ids
from .errors import PatchDenseError
from .textio import Workspace, bundled, load

DEFAULT_DEPTH = ps.DEFAULT_DEPTH
DEFAULT_BOUND = sp.DEFAULT_BOUND


class InputError(Exception):
    pass


class Report:
    """Ordered scalar fields and tables; rendered deterministically."""

    def __init__(self, command: str):
        self.items: list[tuple[str, object]] = [("command", command)]
        #: depth actually used, when a query clamps it
        self.depth: int | None = None

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    def table(self, key: str, rows) -> None:
        self.items.append((key, [tuple(str(c) for c in r) for r in rows]))

    def render(self, porcelain: bool = False) -> str:
        out = []
        for key, value in self.items:
            if isinstance(value, list):
                if porcelain:
                    out.extend("\t".join((key, *row)) for row in value)
                    if not value:
                        out.append(f"{key}\t")
                else:
                    out.append(f"{key}:" + ("" if value else " (none)"))
                    out.extend("  " + " -> ".join(row) for row in value)
            else:
                out.append(f"{key}\t{_fmt(value)}" if porcelain else f"{key}: {_fmt(value)}")
        return "\n".join(out) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, (set, frozenset)):
        return fmt_set(v)
    if isinstance(v, ps.LevelSet):
        return f"level {v.level} : {fmt_set(v.members)}"
    if hasattr(v, "value") and isinstance(v.value, str):
        return v.value
    return str(v)


# ---------------------------------------------------------------------------
# argument helpers


def _subset(text: str) -> list[str]:
    return [x for x in (t.strip() for t in text.split(",")) if x]


def _mapping(text: str) -> dict[str, str]:
    table = {}
    for item in _subset(text):
        a, sep, b = item.partition("=")
        if not sep or not a or not b:
            raise InputError(f"expected 'd=x,...' in map, got {item!r}")
        table[a.strip()] = b.strip()
    return table


def _one(kind: str, table: dict, name: str | None):
    if name is None:
        if len(table) == 1:
            return next(iter(table.values()))
        raise InputError(f"--{kind} is required ({len(table)} {kind}s loaded)")
    if name not in table:
        raise InputError(f"no {kind} named {name!r}")
    return table[name]


def _poset(ws: Workspace, name):
    return _one("space", ws.posets, name)


def _prospace(ws: Workspace, name):
    return _one("prospace", ws.prospaces, name)


def _inclusion(X: fs.FinPoset, args) -> dict[str, str]:
    if args.map is not None and args.subset is not None:
        raise InputError("give either --subset or --map")
    if args.map is not None:
        i = _mapping(args.map)
    elif args.subset is not None:
        i = {x: x for x in _subset(args.subset)}
    else:
        raise InputError("--subset or --map is required")
    X.mask(i.values())
    return i


def _sections(ws: Workspace, X: ps.ProSpace) -> ps.SectionSystem:
    if X.name in ws.sections:
        return ws.sections[X.name]
    return ps.builtin_sections(X)


def _point(ws: Workspace, X: ps.ProSpace, text: str) -> ps.ProPoint:
    rule = X.rule
    if isinstance(rule, ps.ChainGrowthRule):
        if text == rule.top:
            return rule.point(None)
        if text.startswith(rule.prefix) and text[len(rule.prefix):].isdigit():
            k = int(text[len(rule.prefix):])
            if k >= 1:
                return rule.point(k)
    if isinstance(rule, ps.ConstantRule) and text in rule.poset:
        return ps.ProPoint(lambda n: text, text)
    n, sep, x = text.partition(":")
    if sep and n.isdigit():
        return _sections(ws, X).point(int(n), x)
    raise InputError(f"cannot read point {text!r} (use a point name or n:x)")


def _family(ws: Workspace, X: ps.ProSpace, args) -> ps.DenseFamily:
    kind = args.family
    if kind == "finite-points":
        F = _finite_points(X)
    elif kind == "sections":
        F = ps.retractable_limit(X, _sections(ws, X))
    elif kind == "points":
        F = ps.DenseFamily(points=tuple(_point(ws, X, s) for s in _subset(args.points or "")))
    else:
        raise InputError(f"unknown family {kind!r}")
    if getattr(args, "exclude", None):
        F = F.without(*(_point(ws, X, s) for s in _subset(args.exclude)))
    return F


def _finite_points(X: ps.ProSpace) -> ps.DenseFamily:
    try:
        return ps.finite_points(X)
    except TypeError as exc:
        raise InputError(str(exc)) from None


def _covers(X: fs.FinPoset):
    return [(a, b) for a, b in X.covers()]


# ---------------------------------------------------------------------------
# commands


def cmd_dual(ws, args, r):
    X = _poset(ws, args.space)
    D = fs.hochster_dual(X)
    r.add("space", X.name)
    r.add("elements", set(D.elements))
    r.table("covers", _covers(D))


def cmd_thomason(ws, args, r):
    X = _poset(ws, args.space)
    S = _subset(args.subset)
    r.add("space", X.name)
    r.add("subset", set(S))
    r.add("thomason", fs.is_thomason(X, S))
    r.add("closure", fs.closure(X, S))


def cmd_dense(ws, args, r):
    X = _poset(ws, args.space)
    S = frozenset(_subset(args.subset))
    r.add("space", X.name)
    r.add("subset", S)
    r.add("dense", fs.patch_dense_fin(X, S))
    missed = sort_ids(set(X.elements) - S)
    # every point of a finite space is constructible, so a missed point is a witness
    r.add("missed", {missed[0]} if missed else None)


def _random_lemma(args, r):
    rng = random.Random(args.seed)
    agree = 0
    for _ in range(args.random):
        X = fs.random_poset(rng, rng.randint(1, 8))
        D = [x for x in X if rng.random() < 0.5]
        agree += len(set(fs.lemma_dense_epi(X, {x: x for x in D}))) == 1
    r.add("seed", args.seed)
    r.add("cases", args.random)
    r.add("agree", agree)


def cmd_lemma(ws, args, r):
    if args.random:
        _random_lemma(args, r)
        return
    X = _poset(ws, args.space)
    i = _inclusion(X, args)
    b1, b2, b3 = fs.lemma_dense_epi(X, i)
    r.add("space", X.name)
    r.add("image", set(i.values()))
    r.add("constructible", b1)
    r.add("open_pairs", b2)
    r.add("sierpinski", b3)
    r.add("agree", b1 == b2 == b3)


def _closure_report(res: lt.ClosureResult, r):
    r.add("points", set(res.space.elements))
    r.table("covers", _covers(res.space))
    r.table("unit", sorted(res.unit.items(), key=lambda kv: natural_key(kv[0])))


def cmd_closure(ws, args, r):
    L = _one("lattice", ws.lattices, args.lattice)
    r.add("lattice", L.name)
    r.add("size", len(L))
    _closure_report(lt.spectral_closure(L), r)


def cmd_closure_ev(ws, args, r):
    if args.random:
        rng = random.Random(args.seed)
        agree = 0
        for _ in range(args.random):
            carrier = [f"x{k}" for k in range(rng.randint(1, 6))]
            gens = [[x for x in carrier if rng.random() < 0.5] for _ in range(rng.randint(0, 4))]
            L = lt.generate(carrier, gens)
            agree += lt.closure_isomorphism(lt.spectral_closure(L), lt.closure_via_evaluation(L)) is not None
        r.add("seed", args.seed)
        r.add("cases", args.random)
        r.add("agree", agree)
        return
    L = _one("lattice", ws.lattices, args.lattice)
    ev = lt.closure_via_evaluation(L)
    r.add("lattice", L.name)
    r.add("size", len(L))
    _closure_report(ev, r)
    iso = lt.closure_isomorphism(lt.spectral_closure(L), ev)
    r.add("isomorphic_to_closure", iso is not None)
    if iso is not None:
        r.table("iso", sorted(iso.items(), key=lambda kv: natural_key(kv[0])))


def cmd_realize(ws, args, r):
    X = _poset(ws, args.space)
    i = _inclusion(X, args)
    R = lt.realize_in_ambient(i, X)
    r.add("space", X.name)
    r.add("image", set(R.subspace.elements))
    r.add("lattice_size", len(R.closure.lattice))
    r.table("iso", [(p, R.iso[p]) for p in sort_ids(R.iso)])


def cmd_pro_dense(ws, args, r):
    X = _prospace(ws, args.prospace)
    depth = r.depth = X.clamp(args.depth)
    F = _family(ws, X, args)
    v = ps.patch_dense_pro(X, F, depth)
    r.add("prospace", X.name)
    r.add("family", args.family)
    if args.exclude:
        r.add("exclude", set(_subset(args.exclude)))
    r.add("status", v.status)
    r.add("witness", v.witness)
    r.add("reason", v.reason)


def cmd_visible(ws, args, r):
    X = _prospace(ws, args.prospace)
    depth = r.depth = X.clamp(args.depth)
    v = ps.weakly_visible_pro(X, _point(ws, X, args.point), depth)
    r.add("prospace", X.name)
    r.add("point", args.point)
    r.add("status", v.status)
    r.add("V", v.V)
    r.add("W", v.W)


def cmd_singleton(ws, args, r):
    X = _prospace(ws, args.prospace)
    depth = r.depth = X.clamp(args.depth)
    v = ps.is_constructible_singleton(X, _point(ws, X, args.point), depth)
    r.add("prospace", X.name)
    r.add("point", args.point)
    r.add("constructible", v.status)
    r.add("witness", v.witness)


def _terms(pair):
    return None if pair is None else f"{pair[0]} / {pair[1]}"


def cmd_distinguish(ws, args, r):
    d = _one("support", ws.supports, args.support)
    r.add("support", d.name)
    if d.pro:
        X = d.space
        depth = r.depth = X.clamp(args.depth)
        if args.family == "finite-points":
            fam = [ps.builtin_sections(X, "finite")]
        elif args.family in (None, "sections"):
            fam = [_sections(ws, X)]
        else:
            raise InputError("--family must be sections or finite-points on a pro space")
        r.add("family", args.family or "sections")
    else:
        depth = None
        if args.map:
            fam = [_mapping(m) for m in args.map]
        elif args.subset is not None:
            fam = [{x: x for x in _subset(args.subset)}]
        else:
            raise InputError("--subset or --map is required on a finite space")
        r.add("image", {x for m in fam for x in m.values()})
    rep = sp.distinguishes_supports(d, fam, args.bound, depth)
    r.add("distinguishes", rep.distinguishes)
    r.add("basis_dense", rep.basis_dense)
    r.add("dense", rep.dense)
    r.add("agree", rep.agree)
    r.add("generates", rep.generates)
    r.add("relative", rep.relative)
    r.add("witness_distinguish", _terms(rep.witness_distinguish))
    r.add("witness_basis", _terms(rep.witness_basis))


def _thomason_arg(d, text: str):
    if d.pro:
        n, sep, rest = text.partition(":")
        if not sep or not n.strip().isdigit():
            raise InputError("on a pro space give --thomason as n:a,b")
        return ps.LevelSet(d.space, int(n), _subset(rest))
    return _subset(text)


def cmd_classify(ws, args, r):
    d = _one("support", ws.supports, args.support)
    if d.pro:
        r.depth = d.space.clamp(args.depth)
    T = _thomason_arg(d, args.thomason)
    c = sp.classify(d, T, args.bound)
    r.add("support", d.name)
    r.add("thomason", d.fmt(c.ideal.thomason))
    r.add("ideal_size", len(c.ideal.members))
    r.add("ideal", "{" + ",".join(sorted((str(t) for t in c.ideal.members), key=natural_key)) + "}")
    r.add("support_of_ideal", d.fmt(c.support))
    r.add("exact", c.exact)


def _iso_rows(rec):
    inverse = {x: p for p, x in rec.iso.items()}
    return [(x, inverse[x]) for x in rec.target]


def cmd_reconstruct(ws, args, r):
    d = _one("support", ws.supports, args.support)
    r.add("support", d.name)
    if not d.pro:
        D = _subset(args.dense) if args.dense not in (None, "all") else list(d.space.elements)
        rec = sp.reconstruct_from_dense(d, D, args.bound)
        r.add("dense", set(D))
        r.add("lattice_size", len(rec.lattice))
        r.add("columns", "point -> closure point")
        r.table("iso", _iso_rows(rec))
        return
    X = d.space
    depth = r.depth = X.clamp(args.depth)
    if args.dense in (None, "finite-points"):
        F = _finite_points(X)
    elif args.dense == "sections":
        F = ps.retractable_limit(X, _sections(ws, X))
    else:
        raise InputError("--dense must be finite-points or sections on a pro space")
    top = depth if args.levels is None else min(args.levels, depth)
    recs = sp.reconstruct_from_dense(d, F, args.bound, depth, range(top + 1))
    r.add("dense", args.dense or "finite-points")
    r.add("levels", f"0..{top}")
    r.add("columns", "level -> point -> closure point")
    r.table("iso", [(rec.level, *row) for rec in recs for row in _iso_rows(rec)])


def cmd_demo(ws, args, r):
    if args.name != "chromatic":
        raise InputError(f"unknown demo {args.name!r}")
    depth = args.depth
    X = ps.chromatic(working_depth=depth)
    rule = X.rule
    F = ps.finite_points(X)
    r.add("prospace", X.name)
    r.add("finite_points", ps.patch_dense_pro(X, F, depth).status)
    r.add("singleton_Cinf", ps.is_constructible_singleton(X, rule.point(None), depth).status)
    r.add("visible_Cinf", ps.weakly_visible_pro(X, rule.point(None), depth).status)
    rows = []
    for n in range(1, depth + 1):
        p = rule.point(n)
        s = ps.is_constructible_singleton(X, p, depth)
        v = ps.weakly_visible_pro(X, p, depth)
        w = ps.patch_dense_pro(X, F.without(p), depth)
        rows.append((p.name, s.status.value, v.status.value, w.status.value, _fmt(w.witness)))
    r.add("columns", "point -> singleton -> visible -> density without it -> witness")
    r.table("points", rows)


COMMANDS = {
    "dual": cmd_dual,
    "thomason": cmd_thomason,
    "dense": cmd_dense,
    "lemma-dense-epi": cmd_lemma,
    "closure": cmd_closure,
    "closure-ev": cmd_closure_ev,
    "realize": cmd_realize,
    "pro-dense": cmd_pro_dense,
    "visible": cmd_visible,
    "singleton": cmd_singleton,
    "distinguish": cmd_distinguish,
    "classify": cmd_classify,
    "reconstruct": cmd_reconstruct,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("files", nargs="*", help="input files (default: bundled chromatic.space)")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    common.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--porcelain", action="store_true", help="tab-separated records")
    common.add_argument("--timing", action="store_true", help="report elapsed time")

    parser = argparse.ArgumentParser(prog="patchdense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, *opts):
        p = sub.add_parser(name, parents=[common], help=help)
        for flags, kw in opts:
            p.add_argument(*flags, **kw)
        return p

    space = (("--space",), {})
    pro = (("--prospace",), {})
    supp = (("--support",), {})
    subset = (("--subset",), {"help": "comma-separated points"})
    imap = (("--map",), {"help": "d=x,... from an index set into the space"})
    rand = (("--random",), {"type": int, "default": 0, "help": "run N seeded random cases"})
    point = (("--point",), {"required": True, "help": "point name such as C3, or n:x"})

    add("dual", "Hochster dual", space)
    add("thomason", "is a subset Thomason", space, (("--subset",), {"required": True}))
    add("dense", "is a subset patch-dense", space, (("--subset",), {"required": True}))
    add("lemma-dense-epi", "three density conditions", space, subset, imap, rand)
    add("closure", "spectral closure of a lattice", (("--lattice",), {}))
    add("closure-ev", "closure via the evaluation map", (("--lattice",), {}), rand)
    add("realize", "closure realized inside the space", space, subset, imap)
    add("pro-dense", "patch-density in a pro-space", pro,
        (("--family",), {"default": "finite-points",
                         "choices": ["finite-points", "sections", "points"]}),
        (("--points",), {"help": "comma-separated point specs for --family points"}),
        (("--exclude",), {"help": "comma-separated points removed from the family"}))
    add("visible", "weak visibility of a point", pro, point)
    add("singleton", "is a singleton constructible", pro, point)
    add("distinguish", "does a family distinguish supports", supp, subset,
        (("--map",), {"action": "append", "help": "one map per flag, d=x,..."}),
        (("--family",), {"choices": ["sections", "finite-points"]}))
    add("classify", "ideal of a Thomason subset and back", supp,
        (("--thomason",), {"required": True, "help": "a,b or n:a,b on a pro space"}))
    add("reconstruct", "rebuild the space from a dense subset", supp,
        (("--dense",), {"help": "a,b | all | finite-points | sections"}),
        (("--levels",), {"type": int, "help": "last level to rebuild (pro spaces)"}))
    add("demo", "canned demonstrations", (("name",), {"choices": ["chromatic"]}))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.depth < 0 or args.bound < 0:
        print("patchdense: error: --depth and --bound must be non-negative", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        if args.command == "demo":
            ws = Workspace()
        else:
            ws = load(args.files or [bundled()], working_depth=max(DEFAULT_DEPTH, args.depth))
        report = Report(args.command if args.command != "demo" else f"demo {args.name}")
        COMMANDS[args.command](ws, args, report)
    except (InputError, PatchDenseError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"patchdense: error: {msg}", file=sys.stderr)
        return 2
    report.add("depth", args.depth if report.depth is None else report.depth)
    report.add("bound", args.bound)
    if args.timing:
        report.add("elapsed_ms", round(1000 * (time.perf_counter() - start)))
    sys.stdout.write(report.render(args.porcelain))
    return 0


if __name__ == "__main__":
    sys.exit(main())
