"""Line-oriented text formats for posets, lattices, pro-spaces and support data.

A file is a sequence of blocks. Each block starts with a header line and runs
until the next header::

    poset S2
    elem a b
    le a b

    lattice L
    carrier x y z
    gen x
    gen x y

    prospace T
    rule table
    level 0 P0
    level 1 P1
    map 0 a->u b->u
    section 0 u->a

    support d on S2
    gen g = b
    gen h = level 1 : C1 Cinf

``#`` starts a comment. Blocks may refer to names defined in any loaded file;
references are resolved after every file has been read.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import PatchDenseError, ParseError
from .finspace import FinPoset
from .lattice import SetLattice, generate
from .prospace import (
    DEFAULT_DEPTH,
    ChainGrowthRule,
    ConstantRule,
    LevelSet,
    ProSpace,
    SectionSystem,
    TableRule,
)
from .support import SupportDatum

KINDS = ("poset", "lattice", "prospace", "support")


@dataclass
class _Line:
    path: str
    no: int
    words: list[str]

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.path, self.no)


@dataclass
class _Block:
    kind: str
    name: str
    head: _Line
    body: list[_Line] = field(default_factory=list)
    on: str | None = None


@dataclass
class Workspace:
    """Named objects loaded from text files."""

    posets: dict[str, FinPoset] = field(default_factory=dict)
    lattices: dict[str, SetLattice] = field(default_factory=dict)
    prospaces: dict[str, ProSpace] = field(default_factory=dict)
    supports: dict[str, SupportDatum] = field(default_factory=dict)
    #: explicit ``section`` lines of a prospace block
    sections: dict[str, SectionSystem] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (self.posets or self.lattices or self.prospaces or self.supports)

    def space(self, name: str) -> FinPoset | ProSpace:
        if name in self.posets:
            return self.posets[name]
        if name in self.prospaces:
            return self.prospaces[name]
        raise KeyError(f"no space named {name!r}")


def _split(text: str, path: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            words = shlex.split(body)
        except ValueError as exc:
            raise ParseError(str(exc), path, no) from None
        out.append(_Line(path, no, words))
    return out


def _blocks(lines: Iterable[_Line]) -> list[_Block]:
    blocks: list[_Block] = []
    for ln in lines:
        w = ln.words
        if w[0] in KINDS:
            if w[0] == "support":
                if len(w) != 4 or w[2] != "on":
                    raise ln.fail("expected 'support <name> on <space>'")
                blocks.append(_Block("support", w[1], ln, on=w[3]))
            else:
                if len(w) != 2:
                    raise ln.fail(f"expected '{w[0]} <name>'")
                blocks.append(_Block(w[0], w[1], ln))
        elif not blocks:
            raise ln.fail(f"{w[0]!r} outside of a block")
        else:
            blocks[-1].body.append(ln)
    return blocks


def _arrows(ln: _Line, words: list[str]) -> dict[str, str]:
    table = {}
    for w in words:
        a, sep, b = w.partition("->")
        if not sep or not a or not b:
            raise ln.fail(f"expected '<elem>-><elem>', got {w!r}")
        if table.setdefault(a, b) != b:
            raise ln.fail(f"{a} is sent to both {table[a]} and {b}")
    return table


def _int(ln: _Line, word: str) -> int:
    try:
        n = int(word)
    except ValueError:
        raise ln.fail(f"expected a level number, got {word!r}") from None
    if n < 0:
        raise ln.fail(f"negative level {n}")
    return n


def _build_poset(b: _Block) -> FinPoset:
    elems: list[str] = []
    rel = []
    for ln in b.body:
        key, args = ln.words[0], ln.words[1:]
        if key == "elem":
            elems.extend(args)
        elif key == "le":
            if len(args) != 2:
                raise ln.fail("expected 'le <a> <b>'")
            rel.append((ln, args[0], args[1]))
        else:
            raise ln.fail(f"unknown poset line {key!r}")
    known = set(elems)
    if len(known) != len(elems):
        raise b.head.fail(f"poset {b.name}: duplicate element")
    for ln, a, c in rel:
        for x in (a, c):
            if x not in known:
                raise ln.fail(f"unknown element {x!r} in poset {b.name}")
    try:
        return FinPoset(elems, [(a, c) for _, a, c in rel], name=b.name)
    except PatchDenseError as exc:
        line = rel[-1][0] if rel else b.head
        raise line.fail(f"poset {b.name}: {exc}") from None


def _build_lattice(b: _Block) -> SetLattice:
    carrier = None
    gens = []
    for ln in b.body:
        key, args = ln.words[0], ln.words[1:]
        if key == "carrier":
            if carrier is not None:
                raise ln.fail("carrier given twice")
            carrier = args
        elif key == "gen":
            gens.append((ln, args))
        else:
            raise ln.fail(f"unknown lattice line {key!r}")
    if carrier is None:
        raise b.head.fail(f"lattice {b.name} has no carrier")
    for ln, g in gens:
        for x in g:
            if x not in carrier:
                raise ln.fail(f"{x!r} is not in the carrier of {b.name}")
    try:
        return generate(carrier, [g for _, g in gens], name=b.name)
    except PatchDenseError as exc:
        raise b.head.fail(str(exc)) from None


def _build_prospace(b: _Block, ws: Workspace, working_depth: int) -> None:
    rule_line = None
    levels: dict[int, tuple[_Line, str]] = {}
    maps: dict[int, dict[str, str]] = {}
    sections: dict[int, dict[str, str]] = {}
    lines: dict[tuple[str, int], _Line] = {}
    for ln in b.body:
        key, args = ln.words[0], ln.words[1:]
        if key == "rule":
            if rule_line is not None:
                raise ln.fail("rule given twice")
            rule_line = ln
        elif key == "level":
            if len(args) != 2:
                raise ln.fail("expected 'level <n> <poset>'")
            n = _int(ln, args[0])
            if n in levels:
                raise ln.fail(f"level {n} given twice")
            levels[n] = (ln, args[1])
        elif key in ("map", "section"):
            if len(args) < 2:
                raise ln.fail(f"expected '{key} <n> <elem>-><elem> ...'")
            n = _int(ln, args[0])
            table = (maps if key == "map" else sections).setdefault(n, {})
            for a, c in _arrows(ln, args[1:]).items():
                if table.setdefault(a, c) != c:
                    raise ln.fail(f"{key} {n}: {a} is sent to both {table[a]} and {c}")
            lines.setdefault((key, n), ln)
        else:
            raise ln.fail(f"unknown prospace line {key!r}")
    if rule_line is None:
        raise b.head.fail(f"prospace {b.name} has no rule")
    kind = rule_line.words[1:]
    try:
        if kind == ["chain-growth"]:
            if levels or maps:
                raise rule_line.fail("a chain-growth rule takes no level or map lines")
            rule = ChainGrowthRule()
        elif len(kind) == 2 and kind[0] == "constant":
            if levels or maps:
                raise rule_line.fail("a constant rule takes no level or map lines")
            if kind[1] not in ws.posets:
                raise rule_line.fail(f"unknown poset {kind[1]!r}")
            rule = ConstantRule(ws.posets[kind[1]])
        elif kind == ["table"]:
            if not levels:
                raise rule_line.fail("a table rule needs level lines")
            top = max(levels)
            for n in range(top + 1):
                if n not in levels:
                    raise b.head.fail(f"prospace {b.name}: level {n} is missing")
                if levels[n][1] not in ws.posets:
                    raise levels[n][0].fail(f"unknown poset {levels[n][1]!r}")
            for n in maps:
                if n >= top:
                    raise lines[("map", n)].fail(f"map {n} has no level {n + 1} to start from")
            for n in range(top):
                if n not in maps:
                    raise b.head.fail(f"prospace {b.name}: map {n} is missing")
            rule = TableRule([ws.posets[levels[n][1]] for n in range(top + 1)],
                             [maps[n] for n in range(top)])
        else:
            raise rule_line.fail(f"unknown rule {' '.join(kind)!r}")
        X = ProSpace(rule, working_depth=working_depth, name=b.name)
    except ParseError:
        raise
    except PatchDenseError as exc:
        raise b.head.fail(f"prospace {b.name}: {exc}") from None
    ws.prospaces[b.name] = X
    if sections:
        S = SectionSystem.from_tables(X, sections, name=b.name)
        try:
            S.validate(max(sections) + 1)
        except PatchDenseError as exc:
            line = lines.get(("section", getattr(exc, "level", None)), b.head)
            raise line.fail(f"prospace {b.name}: {exc}") from None
        ws.sections[b.name] = S


def _build_support(b: _Block, ws: Workspace) -> SupportDatum:
    if b.on in ws.posets:
        space = ws.posets[b.on]
    elif b.on in ws.prospaces:
        space = ws.prospaces[b.on]
    else:
        raise b.head.fail(f"unknown space {b.on!r}")
    pro = isinstance(space, ProSpace)
    assignment = {}
    for ln in b.body:
        w = ln.words
        if w[0] != "gen" or len(w) < 3 or w[2] != "=":
            raise ln.fail("expected 'gen <label> = ...'")
        label, rest = w[1], w[3:]
        if label in assignment:
            raise ln.fail(f"generator {label} given twice")
        try:
            if pro:
                if len(rest) < 3 or rest[0] != "level" or rest[2] != ":":
                    raise ln.fail("expected 'gen <label> = level <n> : <elem> ...'")
                assignment[label] = LevelSet(space, _int(ln, rest[1]), rest[3:])
            else:
                for x in rest:
                    if x not in space:
                        raise ln.fail(f"unknown element {x!r} of {b.on}")
                assignment[label] = rest
            SupportDatum(space, {label: assignment[label]})
        except ParseError:
            raise
        except PatchDenseError as exc:
            raise ln.fail(str(exc)) from None
    return SupportDatum(space, assignment, name=b.name)


def loads(text: str, path: str = "<input>", working_depth: int = DEFAULT_DEPTH) -> Workspace:
    return _load([(path, text)], working_depth)


def load(paths: Iterable[str | Path], working_depth: int = DEFAULT_DEPTH) -> Workspace:
    """Read and validate every file; errors carry ``path:line``."""
    sources = []
    for p in paths:
        try:
            sources.append((str(p), Path(p).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ParseError(f"cannot read: {exc.strerror}", str(p), 0) from None
    return _load(sources, working_depth)


def bundled(name: str = "chromatic.space") -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("patchdense") / "data" / name))


def _load(sources, working_depth: int) -> Workspace:
    blocks = []
    for path, text in sources:
        blocks.extend(_blocks(_split(text, path)))
    seen: dict[tuple[str, str], _Block] = {}
    for b in blocks:
        key = (b.kind, b.name)
        if key in seen:
            first = seen[key].head
            raise b.head.fail(f"{b.kind} {b.name} already defined at {first.path}:{first.no}")
        seen[key] = b
    ws = Workspace()
    spaces = {b.name for b in blocks if b.kind in ("poset", "prospace")}
    clash = {b.name for b in blocks if b.kind == "poset"} & {
        b.name for b in blocks if b.kind == "prospace"
    }
    if clash:
        name = sorted(clash)[0]
        raise seen[("prospace", name)].head.fail(f"{name} names both a poset and a prospace")
    for b in blocks:
        if b.kind == "poset":
            ws.posets[b.name] = _build_poset(b)
        elif b.kind == "lattice":
            ws.lattices[b.name] = _build_lattice(b)
    for b in blocks:
        if b.kind == "prospace":
            _build_prospace(b, ws, working_depth)
    for b in blocks:
        if b.kind == "support":
            if b.on not in spaces:
                raise b.head.fail(f"unknown space {b.on!r}")
            ws.supports[b.name] = _build_support(b, ws)
    return ws
