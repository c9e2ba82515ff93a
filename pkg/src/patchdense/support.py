"""Support data: generator labels with Thomason supports, and what they classify.

Object terms are built from generator labels with tensor (``*``), sum (``+``),
suspension ``S(...)`` and the constants ``0`` and ``1``. Supports are computed
structurally: tensor is intersection, sum is union, suspension does nothing,
``0`` has empty support and ``1`` has full support. Cones are not part of the
language, since the support of a cone is not determined by the supports of its
ends.

Every decision here is made twice, once per characterization, and both answers
are reported. When the generator supports do not produce every Thomason subset
within the term bound the answers are flagged as relative to the realizable
sublattice.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from ._util import fmt_set, sort_ids
from .errors import ReconstructionError, SupportError
from .finspace import FinPoset, SpectralMapFin, patch_dense_fin
from .lattice import ClosureResult, SetLattice, dual_map, spectral_closure
from .prospace import (
    DenseFamily,
    Density,
    DensityVerdict,
    LevelSet,
    ProPoint,
    ProSpace,
    SectionSystem,
    patch_dense_pro,
)

DEFAULT_BOUND = 6

# ---------------------------------------------------------------------------
# terms


class Term:
    __slots__ = ()

    def __mul__(self, other):
        return Tensor(self, other)

    def __add__(self, other):
        return Sum(self, other)

    def shift(self):
        return Shift(self)


@dataclass(frozen=True)
class Gen(Term):
    label: str

    @property
    def size(self):
        return 1

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class _Const(Term):
    symbol: str

    @property
    def size(self):
        return 1

    def __str__(self):
        return self.symbol


ZERO = _Const("0")
ONE = _Const("1")


@dataclass(frozen=True)
class Tensor(Term):
    left: Term
    right: Term

    @property
    def size(self):
        return 1 + self.left.size + self.right.size

    def __str__(self):
        return f"({self.left}*{self.right})"


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term

    @property
    def size(self):
        return 1 + self.left.size + self.right.size

    def __str__(self):
        return f"({self.left}+{self.right})"


@dataclass(frozen=True)
class Shift(Term):
    inner: Term

    @property
    def size(self):
        return 1 + self.inner.size

    def __str__(self):
        return f"S({self.inner})"


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][\w.\-]*\()|([A-Za-z_0-9][\w.\-]*)|(.))")


def parse_term(text: str) -> Term:
    """Parse ``g*h + S(k)``; ``*`` binds tighter than ``+``; ``S(...)`` is suspension."""
    tokens = []
    for m in _TOKEN.finditer(text):
        call, word, sym = m.groups()
        if call is not None:
            if call != "S(":
                raise SupportError(f"unknown operator {call[:-1]!r} in {text!r}")
            tokens.append("S(")
        elif word is not None:
            tokens.append(word)
        elif sym is not None and not sym.isspace():
            tokens.append(sym)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise SupportError(f"malformed term {text!r}")
        pos += 1
        return tok

    def atom():
        tok = take()
        if tok == "(":
            t = expr()
            take(")")
            return t
        if tok == "S(":
            t = expr()
            take(")")
            return Shift(t)
        if tok == "0":
            return ZERO
        if tok == "1":
            return ONE
        if tok in "*+)":
            raise SupportError(f"malformed term {text!r}")
        return Gen(tok)

    def product():
        t = atom()
        while peek() == "*":
            take()
            t = Tensor(t, atom())
        return t

    def expr():
        t = product()
        while peek() == "+":
            take()
            t = Sum(t, product())
        return t

    result = expr()
    if pos != len(tokens):
        raise SupportError(f"trailing input in term {text!r}")
    return result


def generators_of(t: Term) -> set[str]:
    if isinstance(t, Gen):
        return {t.label}
    if isinstance(t, (Tensor, Sum)):
        return generators_of(t.left) | generators_of(t.right)
    if isinstance(t, Shift):
        return generators_of(t.inner)
    return set()


# ---------------------------------------------------------------------------
# data

SupportSet = Union[frozenset, LevelSet]


class SupportDatum:
    """Generator labels assigned to Thomason subsets of a finite or pro space."""

    def __init__(self, space: FinPoset | ProSpace, assignment: Mapping[str, object], name: str = ""):
        self.space = space
        self.name = name
        self.pro = isinstance(space, ProSpace)
        table = {}
        for label, s in assignment.items():
            label = str(label)
            if label in ("0", "1", "S"):
                raise SupportError(f"{label!r} is reserved")
            if self.pro:
                if not isinstance(s, LevelSet):
                    raise SupportError(f"{label}: supports on a pro space must be level sets")
                if not s.is_thomason():
                    raise SupportError(f"{label}: {s!r} is not an up-set at its level")
            else:
                s = frozenset(str(x) for x in s)
                if not space.is_closed(s):
                    raise SupportError(f"{label}: {fmt_set(s)} is not Thomason")
            table[label] = s
        self.assignment = table
        self._terms: dict[int, tuple] = {}

    @property
    def labels(self) -> list[str]:
        return sort_ids(self.assignment)

    # set operations on either kind of space

    def whole(self) -> SupportSet:
        return self.space.whole(0) if self.pro else frozenset(self.space.elements)

    def empty(self) -> SupportSet:
        return self.space.empty(0) if self.pro else frozenset()

    def complement(self, s: SupportSet) -> SupportSet:
        return s.complement() if self.pro else self.whole() - s

    def key(self, s: SupportSet):
        if self.pro:
            n = s.normalize()
            return (n.level, frozenset(n.members))
        return s

    def fmt(self, s: SupportSet) -> str:
        if self.pro:
            n = s.normalize()
            return f"level {n.level} : {fmt_set(n.members)}"
        return fmt_set(s)

    def __repr__(self):
        return f"SupportDatum({self.name!r}, {len(self.assignment)} generators)"


def supp(d: SupportDatum, t: Term) -> SupportSet:
    if isinstance(t, Gen):
        try:
            return d.assignment[t.label]
        except KeyError:
            raise SupportError(f"generator {t.label!r} is not assigned") from None
    if t == ZERO:
        return d.empty()
    if t == ONE:
        return d.whole()
    if isinstance(t, Tensor):
        return supp(d, t.left) & supp(d, t.right)
    if isinstance(t, Sum):
        return supp(d, t.left) | supp(d, t.right)
    if isinstance(t, Shift):
        return supp(d, t.inner)
    raise TypeError(f"not a term: {t!r}")


def basic_constructible(d: SupportDatum, k: Term, l: Term) -> SupportSet:
    """``supp(k)`` minus ``supp(l)``."""
    return supp(d, k) & d.complement(supp(d, l))


def enumerate_terms(d: SupportDatum, bound: int = DEFAULT_BOUND) -> list[tuple[Term, SupportSet]]:
    """One smallest term per support realizable with at most ``bound`` symbols."""
    cached = d._terms.get(bound)
    if cached is not None:
        return list(cached)
    found: dict = {}
    reps: list[tuple[Term, SupportSet]] = []

    def add(t, s):
        k = d.key(s)
        if k not in found:
            found[k] = t
            reps.append((t, s))

    for t in [ZERO, ONE] + [Gen(g) for g in d.labels]:
        if t.size <= bound:
            add(t, supp(d, t))
    # the support of a compound term only depends on the supports of its parts,
    # so combining representatives reaches every realizable support
    for size in range(2, bound + 1):
        current = list(reps)
        for t, s in current:
            if t.size == size - 1:
                add(Shift(t), s)
        for a, sa in current:
            for b, sb in current:
                if a.size + b.size + 1 == size:
                    add(Tensor(a, b), sa & sb)
                    add(Sum(a, b), sa | sb)
    d._terms[bound] = tuple(reps)
    return reps


def _thomason_targets(d: SupportDatum, level: int | None = None) -> list:
    if d.pro:
        lvl = d.space.level(level)
        return [LevelSet(d.space, level, lvl.subset(m)) for m in lvl.closed_masks()]
    return d.space.closed_sets()


def generates_opens(d: SupportDatum, bound: int = DEFAULT_BOUND, level: int | None = None) -> bool:
    """Every Thomason subset (of ``level`` for pro spaces) is a realizable support."""
    keys = {d.key(s) for _, s in enumerate_terms(d, bound)}
    return all(d.key(T) in keys for T in _thomason_targets(d, level))


def generated_level(d: SupportDatum, bound: int = DEFAULT_BOUND, depth: int | None = None) -> int:
    """Largest level ``<= depth`` all of whose up-sets are realizable, or -1."""
    depth = d.space.clamp(depth)
    keys = {d.key(s) for _, s in enumerate_terms(d, bound)}
    best = -1
    for n in range(depth + 1):
        if all(d.key(T) in keys for T in _thomason_targets(d, n)):
            best = n
    return best


# ---------------------------------------------------------------------------
# families of maps

MapLike = Union[SpectralMapFin, Mapping[str, object]]


def section_maps(sections: SectionSystem, depth: int) -> list[dict[str, ProPoint]]:
    """``sigma_n: level(n) -> limit`` for ``n <= depth``, as point tables."""
    X = sections.space
    last = depth if X.max_depth is None else min(depth, X.max_depth)
    return [{x: sections.point(n, x) for x in X.level(n)} for n in range(last + 1)]


def _normalize_family(d: SupportDatum, fam, depth: int):
    """Return ``(maps, dense_family)``; maps are plain ``dict`` tables."""
    maps = []
    sections = []
    for phi in fam:
        if isinstance(phi, SectionSystem):
            sections.append(phi)
            maps.extend(section_maps(phi, depth))
        elif isinstance(phi, SpectralMapFin):
            if phi.target != d.space:
                raise SupportError("map does not land in the datum's space")
            maps.append(dict(phi.assignment))
        else:
            maps.append(dict(phi))
    points = tuple(p for m in maps for p in m.values()) if d.pro else ()
    return maps, DenseFamily(points=points, sections=tuple(sections))


def _in(d: SupportDatum, point, s: SupportSet) -> bool:
    if d.pro:
        return point.resolve(s.level) in s.members
    return point in s


@dataclass(frozen=True)
class DistinguishReport:
    distinguishes: bool
    basis_dense: bool
    dense: bool
    generates: bool
    bound: int
    witness_distinguish: tuple[Term, Term] | None = None
    witness_basis: tuple[Term, Term] | None = None
    density: DensityVerdict | None = None

    @property
    def agree(self) -> bool:
        return self.distinguishes == self.basis_dense

    @property
    def relative(self) -> bool:
        return not self.generates


def distinguishes_supports(d: SupportDatum, fam: Sequence, bound: int = DEFAULT_BOUND,
                           depth: int | None = None) -> DistinguishReport:
    """Decide whether ``fam`` jointly distinguishes supports, in two ways.

    (A) for every pair of realizable terms with different supports, some map
    pulls the supports back to different sets; (B) the union of the images
    meets every nonempty ``supp(k) - supp(l)``. Also reported: patch-density of
    the union of images in the whole space.
    """
    depth = d.space.clamp(depth) if d.pro else 0
    maps, family = _normalize_family(d, fam, depth)
    if d.pro:
        for p in family.points:
            p.check(d.space, depth)
    else:
        for m in maps:
            d.space.mask(m.values())
    reps = enumerate_terms(d, bound)

    def pre(m, s):
        return frozenset(y for y, x in m.items() if _in(d, x, s))

    pulls = [[pre(m, s) for m in maps] for _, s in reps]
    wit_a = None
    for a, (k, sk) in enumerate(reps):
        for b, (l, sl) in enumerate(reps):
            if a == b or sk <= sl:
                continue
            if pulls[a] == pulls[b]:
                wit_a = (k, l)
                break
        if wit_a:
            break

    image = [x for m in maps for x in m.values()]
    wit_b = None
    for k, sk in reps:
        for l, sl in reps:
            c = sk & d.complement(sl)
            if (c.is_empty() if d.pro else not c):
                continue
            if not any(_in(d, x, c) for x in image):
                wit_b = (k, l)
                break
        if wit_b:
            break

    density = None
    if d.pro:
        density = patch_dense_pro(d.space, family, depth)
        dense = density.status != Density.NOT_DENSE
        generates = generated_level(d, bound, depth) == depth
    else:
        dense = patch_dense_fin(d.space, image)
        generates = generates_opens(d, bound)
    return DistinguishReport(
        wit_a is None, wit_b is None, dense, generates, bound, wit_a, wit_b, density
    )


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class IdealShadow:
    """Terms (up to the bound, one per support) whose support lies in ``thomason``."""

    datum: SupportDatum = field(repr=False)
    thomason: SupportSet
    members: tuple[Term, ...]
    bound: int

    def __contains__(self, t: Term) -> bool:
        return supp(self.datum, t) <= self.thomason

    def key(self):
        return frozenset(str(t) for t in self.members)


def _check_thomason(d: SupportDatum, T) -> SupportSet:
    if d.pro:
        if not isinstance(T, LevelSet) or not T.is_thomason():
            raise SupportError(f"{T!r} is not a Thomason level set")
        return T
    T = frozenset(str(x) for x in T)
    if not d.space.is_closed(T):
        raise SupportError(f"{fmt_set(T)} is not Thomason")
    return T


def ideal_of_thomason(d: SupportDatum, T, bound: int = DEFAULT_BOUND) -> IdealShadow:
    T = _check_thomason(d, T)
    members = tuple(t for t, s in enumerate_terms(d, bound) if s <= T)
    return IdealShadow(d, T, members, bound)


def supp_of_ideal(I: IdealShadow) -> SupportSet:
    d = I.datum
    out = d.empty()
    for t in I.members:
        out = out | supp(d, t)
    return out


@dataclass(frozen=True)
class Classification:
    ideal: IdealShadow
    support: SupportSet
    exact: bool


def classify(d: SupportDatum, T, bound: int = DEFAULT_BOUND) -> Classification:
    """Round trip ``T -> ideal -> support``; exact iff ``T`` is a union of realizable supports."""
    I = ideal_of_thomason(d, T, bound)
    back = supp_of_ideal(I)
    return Classification(I, back, back == I.thomason)


@dataclass(frozen=True)
class InjectivityReport:
    injective: bool
    dense: bool
    generates: bool
    bound: int
    collision: tuple[IdealShadow, IdealShadow] | None = None

    @property
    def agree(self) -> bool:
        return self.injective == self.dense


def dense_injectivity_check(d: SupportDatum, D, bound: int = DEFAULT_BOUND,
                            depth: int | None = None) -> InjectivityReport:
    """Is ``I -> union of D & supp(k), k in I`` injective on ideal shadows? Also: is ``D`` dense?

    For a pro space ``D`` is a :class:`DenseFamily`; ideals are indexed by the
    up-sets of every level up to the realizable level.
    """
    if d.pro:
        depth = d.space.clamp(depth)
        points = D.members(depth)
        for p in points:
            p.check(d.space, depth)
        top = max(generated_level(d, bound, depth), 0)
        targets = [T for n in range(top + 1) for T in _thomason_targets(d, n)]
        generates = top == depth
        dense = patch_dense_pro(d.space, D, depth).status != Density.NOT_DENSE

        def trace(s):
            return frozenset(i for i, p in enumerate(points) if _in(d, p, s))
    else:
        Dset = frozenset(str(x) for x in D)
        d.space.mask(Dset)
        targets = _thomason_targets(d)
        generates = generates_opens(d, bound)
        dense = patch_dense_fin(d.space, Dset)

        def trace(s):
            return Dset & s

    ideals = {}
    for T in targets:
        I = ideal_of_thomason(d, T, bound)
        ideals.setdefault(I.key(), I)
    images = {}
    collision = None
    for I in ideals.values():
        img = frozenset().union(*(trace(supp(d, t)) for t in I.members))
        if img in images:
            collision = (images[img], I)
            break
        images[img] = I
    return InjectivityReport(collision is None, dense, generates, bound, collision)


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class Reconstruction:
    lattice: SetLattice
    closure: ClosureResult
    target: FinPoset
    iso: Mapping[str, str]
    level: int | None = None


def _comparison(res: ClosureResult, target: FinPoset, carrier_image: Mapping[str, str]) -> dict:
    """Canonical map from the closure to ``target``, checked to be an isomorphism."""
    eta_inv = res.open_table()
    hom = {}
    for o in target.opens():
        u = frozenset(c for c, x in carrier_image.items() if x in o)
        if u not in eta_inv:
            raise ReconstructionError(
                f"{fmt_set(u)} is missing from the restricted lattice"
            )
        hom[o] = eta_inv[u]
    jbar = dual_map(res.space, target, hom)
    if sorted(jbar.values()) != sorted(target.elements):
        raise ReconstructionError("comparison map is not bijective")
    for p in res.space:
        for q in res.space:
            if res.space.leq(p, q) != target.leq(jbar[p], jbar[q]):
                raise ReconstructionError(f"comparison map does not reflect order at {p}, {q}")
    for c, x in carrier_image.items():
        if jbar[res.unit[c]] != x:
            raise ReconstructionError(f"comparison map does not commute with the unit at {c}")
    return jbar


def reconstruct_from_dense(d: SupportDatum, D, bound: int = DEFAULT_BOUND,
                           depth: int | None = None, levels: Iterable[int] | None = None):
    """Rebuild the space from the supports restricted to a dense subset.

    Finite spaces: ``D`` is a subset and a single :class:`Reconstruction` is
    returned. Pro spaces: ``D`` is a :class:`DenseFamily` and a list of
    per-level reconstructions is returned, using at level ``n`` only supports
    presented at levels ``<= n``.
    """
    if not d.pro:
        Dset = frozenset(str(x) for x in D)
        X = d.space
        X.mask(Dset)
        if not patch_dense_fin(X, Dset):
            raise ReconstructionError(f"{fmt_set(Dset)} is not patch-dense")
        if not generates_opens(d, bound):
            raise ReconstructionError(
                f"generator supports do not realize every Thomason subset within bound {bound}"
            )
        carrier = sort_ids(Dset)
        elems = {Dset - s for _, s in enumerate_terms(d, bound)}
        L = SetLattice(carrier, elems, name=d.name)
        res = spectral_closure(L)
        iso = _comparison(res, X, {c: c for c in carrier})
        return Reconstruction(L, res, X, iso)

    X = d.space
    depth = X.clamp(depth)
    verdict = patch_dense_pro(X, D, depth)
    if verdict.status == Density.NOT_DENSE:
        raise ReconstructionError(f"family is not patch-dense: misses {verdict.witness!r}")
    points = D.members(depth)
    for p in points:
        p.check(X, depth)
    # distinct members already differ at level ``depth``; one level deeper keeps
    # labels like C33 apart from the point at infinity
    label_level = depth + 1 if X.max_depth is None else depth
    names = {p.resolve(label_level): p for p in points}
    carrier = sort_ids(names)
    reps = enumerate_terms(d, bound)
    levels = range(depth + 1) if levels is None else levels
    out = []
    for n in levels:
        if not generates_opens(d, bound, n):
            raise ReconstructionError(f"supports do not realize every up-set of level {n}")
        presented = [s for _, s in reps if s.normalize().level <= n]
        elems = {frozenset(c for c in carrier if not _in(d, names[c], s)) for s in presented}
        L = SetLattice(carrier, elems, name=f"{d.name}@{n}")
        res = spectral_closure(L)
        target = X.level(n)
        iso = _comparison(res, target, {c: names[c].resolve(n) for c in carrier})
        out.append(Reconstruction(L, res, target, iso, level=n))
    return out


def chromatic_datum(X: ProSpace, count: int | None = None, name: str = "chromatic") -> SupportDatum:
    """Generators ``g1 .. g{count}`` with ``supp(g_k)`` the up-set of ``C_k``."""
    rule = X.rule
    count = X.working_depth + 1 if count is None else count
    assignment = {
        f"g{k}": LevelSet(X, k, {rule.name(k), rule.top}) for k in range(1, count + 1)
    }
    return SupportDatum(X, assignment, name=name)

