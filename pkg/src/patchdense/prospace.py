"""Sequential inverse limits of finite posets.

A :class:`ProSpace` is described by a rule producing the finite levels
``X_0, X_1, ...`` and monotone surjective transitions ``p_n: X_{n+1} -> X_n``.
Points of the limit are :class:`ProPoint` resolvers, and the constructible
subsets we can talk about are :class:`LevelSet` values ``(n, S)`` standing for
the preimage of ``S`` under the projection to level ``n``. Every quasi-compact
open of a sequential limit is pulled back from some level, so this fragment is
enough to state and check density.

Queries that range over infinitely many levels return a verdict recording the
depth used. A verdict is only *proven* when structure (a total system of
sections, or a finite-depth diagram) covers every level.
"""
from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

from ._util import fmt_set, sort_ids
from .errors import DepthError, InvalidPointError, NotMonotoneError, SectionError
from .finspace import FinPoset, SpectralMapFin

DEFAULT_DEPTH = 32


# ---------------------------------------------------------------------------
# rules


class Rule(ABC):
    """Finite description of a tower of posets."""

    #: last level index, or ``None`` for an infinite tower
    max_depth: int | None = None

    @abstractmethod
    def level(self, n: int) -> FinPoset: ...

    @abstractmethod
    def transition(self, n: int) -> Mapping[str, str]:
        """``p_n`` as a table from level ``n + 1`` to level ``n``."""

    @abstractmethod
    def fiber_is_singleton(self, space: ProSpace, n: int, e: str) -> bool:
        """Whether exactly one point of the limit projects to ``e`` at level ``n``."""

    def sections(self, kind: str = "") -> SectionSystem | None:
        return None


class ConstantRule(Rule):
    """Every level is the same poset and every transition the identity."""

    def __init__(self, poset: FinPoset):
        self.poset = poset

    def level(self, n):
        return self.poset

    def transition(self, n):
        return {x: x for x in self.poset}

    def fiber_is_singleton(self, space, n, e):
        return True

    def sections(self, kind=""):
        return _RuleSections(lambda space, n: {x: x for x in self.poset}, "identity")

    def __repr__(self):
        return f"ConstantRule({self.poset.name or self.poset!r})"


class ChainGrowthRule(Rule):
    """Level ``n`` is the chain ``C1 < ... < Cn < Cinf``; ``p_n`` folds ``C{n+1}`` into ``Cinf``.

    The limit is the chain ``C1 -> C2 -> ... -> Cinf`` with ``Cinf`` the closed
    point at infinity.
    """

    def __init__(self, prefix: str = "C", top: str = "inf"):
        self.prefix = prefix
        self.top = prefix + top

    def name(self, k: int | None) -> str:
        return self.top if k is None else f"{self.prefix}{k}"

    def level(self, n):
        return FinPoset.chain([self.name(k) for k in range(1, n + 1)] + [self.top])

    def transition(self, n):
        table = {self.name(k): self.name(k) for k in range(1, n + 1)}
        table[self.name(n + 1)] = self.top
        table[self.top] = self.top
        return table

    def fiber_is_singleton(self, space, n, e):
        # transitions fix every non-top point, and the top fiber grows forever
        return e != self.top

    def point(self, k: int | None) -> ProPoint:
        if k is None:
            return ProPoint(lambda n: self.top, self.top)
        label = self.name(k)
        return ProPoint(lambda n: label if n >= k else self.top, label)

    def sections(self, kind="top"):
        if kind == "top":
            return _RuleSections(lambda space, n: {x: x for x in space.level(n)}, "top")
        if kind == "finite":
            def step(space, n):
                table = {x: x for x in space.level(n)}
                table[self.top] = self.name(n + 1)
                return table

            return _RuleSections(step, "finite")
        raise ValueError(f"unknown chain section kind {kind!r}")

    def __repr__(self):
        return "ChainGrowthRule()"


class TableRule(Rule):
    """Finitely many levels given explicitly; the limit is the last level."""

    def __init__(self, levels: Iterable[FinPoset], maps: Iterable[Mapping[str, str]]):
        self.levels = list(levels)
        self.maps = [dict(m) for m in maps]
        if not self.levels:
            raise ValueError("a table rule needs at least one level")
        if len(self.maps) != len(self.levels) - 1:
            raise ValueError(
                f"{len(self.levels)} levels need {len(self.levels) - 1} transition maps, "
                f"got {len(self.maps)}"
            )
        self.max_depth = len(self.levels) - 1

    def level(self, n):
        if not 0 <= n <= self.max_depth:
            raise DepthError(f"level {n} is beyond the table depth {self.max_depth}")
        return self.levels[n]

    def transition(self, n):
        if not 0 <= n < self.max_depth:
            raise DepthError(f"transition {n} is beyond the table depth {self.max_depth}")
        return self.maps[n]

    def fiber_is_singleton(self, space, n, e):
        return len(space.fiber(self.max_depth, n, e)) == 1

    def __repr__(self):
        return f"TableRule(depth={self.max_depth})"


# ---------------------------------------------------------------------------
# the space


class ProSpace:
    """Inverse limit of the tower produced by ``rule``.

    Levels and transitions are materialized lazily and memoized; validation
    (monotonicity and surjectivity of every transition) runs up to
    ``working_depth``, or to the last level of a finite tower.
    """

    def __init__(self, rule: Rule, working_depth: int = DEFAULT_DEPTH, name: str = ""):
        if working_depth < 0:
            raise ValueError("working depth must be non-negative")
        self.rule = rule
        self.working_depth = working_depth
        self.name = name
        self._levels: dict[int, FinPoset] = {}
        self._maps: dict[int, SpectralMapFin] = {}
        self._proj: dict[tuple[int, int], dict[str, str]] = {}
        self._lock = threading.Lock()
        for n in range(self.validated_depth):
            self.transition(n)

    @property
    def max_depth(self) -> int | None:
        return self.rule.max_depth

    @property
    def validated_depth(self) -> int:
        if self.max_depth is None:
            return self.working_depth
        return min(self.working_depth, self.max_depth)

    def clamp(self, depth: int | None) -> int:
        depth = self.working_depth if depth is None else depth
        if depth < 0:
            raise DepthError("depth must be non-negative")
        if depth > self.working_depth:
            raise DepthError(f"depth {depth} exceeds the working depth {self.working_depth}")
        if self.max_depth is not None:
            depth = min(depth, self.max_depth)
        return depth

    def level(self, n: int) -> FinPoset:
        if n < 0:
            raise DepthError("negative level")
        got = self._levels.get(n)
        if got is None:
            got = self.rule.level(n)
            with self._lock:
                got = self._levels.setdefault(n, got)
        return got

    def transition(self, n: int) -> SpectralMapFin:
        """``p_n: level(n + 1) -> level(n)``."""
        got = self._maps.get(n)
        if got is None:
            src, tgt = self.level(n + 1), self.level(n)
            try:
                got = SpectralMapFin(src, tgt, self.rule.transition(n))
            except NotMonotoneError as exc:
                raise NotMonotoneError(f"transition {n}: {exc}", witness=exc.witness) from None
            missed = set(tgt.elements) - set(got.image())
            if missed:
                raise NotMonotoneError(
                    f"transition {n} is not surjective: misses {fmt_set(missed)}"
                )
            with self._lock:
                got = self._maps.setdefault(n, got)
        return got

    def projection(self, m: int, n: int) -> dict[str, str]:
        """``p_{m,n}`` as a table, for ``m >= n``."""
        if m < n:
            raise DepthError(f"cannot project from level {m} up to level {n}")
        got = self._proj.get((m, n))
        if got is None:
            if m == n:
                got = {x: x for x in self.level(m)}
            else:
                step = self.transition(m - 1).assignment
                below = self.projection(m - 1, n)
                got = {x: below[step[x]] for x in self.level(m)}
            with self._lock:
                got = self._proj.setdefault((m, n), got)
        return got

    def project(self, m: int, n: int, x: str) -> str:
        """``p_{m,n}(x)`` for ``m >= n``."""
        return self.projection(m, n)[x]

    def fiber(self, m: int, n: int, e: str) -> frozenset[str]:
        return frozenset(x for x in self.level(m) if self.project(m, n, x) == e)

    def levelset(self, n: int, members: Iterable) -> LevelSet:
        return LevelSet(self, n, frozenset(members))

    def whole(self, n: int = 0) -> LevelSet:
        return LevelSet(self, n, frozenset(self.level(n).elements))

    def empty(self, n: int = 0) -> LevelSet:
        return LevelSet(self, n, frozenset())

    def __repr__(self):
        return f"ProSpace({self.name or self.rule!r}, working_depth={self.working_depth})"


def make_prospace(rule: Rule, working_depth: int = DEFAULT_DEPTH, name: str = "") -> ProSpace:
    return ProSpace(rule, working_depth=working_depth, name=name)


def chromatic(working_depth: int = DEFAULT_DEPTH) -> ProSpace:
    """The chain ``C1 -> C2 -> ... -> Cinf``."""
    return ProSpace(ChainGrowthRule(), working_depth=working_depth, name="chromatic")


# ---------------------------------------------------------------------------
# constructible sets pulled back from a level


@dataclass(frozen=True, eq=False)
class LevelSet:
    """The preimage of ``members`` under the projection to level ``level``.

    Two level sets are equal when they agree after lifting to a common level.
    """

    space: ProSpace
    level: int
    members: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(str(m) for m in self.members))
        self.space.level(self.level).mask(self.members)

    def lift(self, m: int) -> LevelSet:
        return lift(self, m)

    def normalize(self) -> LevelSet:
        """Equal level set at the lowest level it is pulled back from."""
        cur = self
        while cur.level > 0:
            p = cur.space.transition(cur.level - 1)
            below = p.image(cur.members)
            if p.preimage(below) != cur.members:
                break
            cur = LevelSet(cur.space, cur.level - 1, below)
        return cur

    def _common(self, other: LevelSet) -> tuple[LevelSet, LevelSet]:
        if other.space is not self.space:
            raise ValueError("level sets live in different spaces")
        m = max(self.level, other.level)
        return self.lift(m), other.lift(m)

    def __eq__(self, other):
        if not isinstance(other, LevelSet):
            return NotImplemented
        if other.space is not self.space:
            return False
        a, b = self._common(other)
        return a.members == b.members

    def __hash__(self):
        n = self.normalize()
        return hash((id(self.space), n.level, n.members))

    def __and__(self, other):
        a, b = self._common(other)
        return LevelSet(a.space, a.level, a.members & b.members)

    def __or__(self, other):
        a, b = self._common(other)
        return LevelSet(a.space, a.level, a.members | b.members)

    def __sub__(self, other):
        a, b = self._common(other)
        return LevelSet(a.space, a.level, a.members - b.members)

    def complement(self) -> LevelSet:
        return LevelSet(self.space, self.level, frozenset(self.space.level(self.level)) - self.members)

    def __le__(self, other):
        a, b = self._common(other)
        return a.members <= b.members

    def is_empty(self) -> bool:
        # transitions are surjective, so every level element has points above it
        return not self.members

    def is_thomason(self) -> bool:
        return self.space.level(self.level).is_closed(self.members)

    def __repr__(self):
        return f"LevelSet({self.level}, {fmt_set(self.members)})"


def lift(C: LevelSet, m: int) -> LevelSet:
    if m < C.level:
        raise DepthError(f"cannot lift from level {C.level} down to level {m}")
    if m == C.level:
        return C
    X = C.space
    table = X.projection(m, C.level)
    members = frozenset(x for x, y in table.items() if y in C.members)
    return LevelSet(X, m, members)


# ---------------------------------------------------------------------------
# points


class ProPoint:
    """A point of the limit, given by its projection to every level."""

    __slots__ = ("_resolver", "name", "_memo")

    def __init__(self, resolver: Callable[[int], str], name: str = ""):
        self._resolver = resolver
        self.name = name
        self._memo: dict[int, str] = {}

    @classmethod
    def table(cls, values: Mapping[int, str], tail: str | Callable[[int], str] | None = None,
              name: str = "") -> ProPoint:
        """Explicit values for some levels, ``tail`` for the rest."""
        values = {int(k): str(v) for k, v in dict(values).items()}

        def resolve(n):
            if n in values:
                return values[n]
            if tail is None:
                raise DepthError(f"point {name or '?'} is unresolved at level {n}")
            return tail(n) if callable(tail) else tail

        return cls(resolve, name)

    def resolve(self, n: int) -> str:
        got = self._memo.get(n)
        if got is None:
            got = self._memo.setdefault(n, str(self._resolver(n)))
        return got

    def signature(self, depth: int) -> tuple[str, ...]:
        return tuple(self.resolve(n) for n in range(depth + 1))

    def check(self, X: ProSpace, depth: int) -> None:
        """Verify compatibility with the transitions up to ``depth``."""
        for n in range(depth + 1):
            e = self.resolve(n)
            if e not in X.level(n):
                raise InvalidPointError(f"point {self.name}: {e!r} is not in level {n}")
            if n > 0 and X.transition(n - 1)(e) != self.resolve(n - 1):
                raise InvalidPointError(
                    f"point {self.name}: p_{n - 1}({e}) != {self.resolve(n - 1)}"
                )

    def __repr__(self):
        return f"ProPoint({self.name})"


def member(p: ProPoint, C: LevelSet) -> bool:
    p.check(C.space, C.level)
    return p.resolve(C.level) in C.members


# ---------------------------------------------------------------------------
# sections


class SectionSystem:
    """One-step sections ``s_n: level(n) -> level(n + 1)`` with ``p_n s_n = id``.

    Iterating them embeds each level into the limit: ``sigma_n(x)`` projects to
    ``p_{n,m}(x)`` below ``n`` and to ``s_{m-1} ... s_n(x)`` above it, and
    ``pi_n sigma_n = id``.
    """

    def __init__(self, space: ProSpace, step: Callable[[int], Mapping[str, str]],
                 total: bool, name: str = ""):
        self.space = space
        self._step = step
        #: sections exist for every level of the space
        self.total = total
        self.name = name
        self._steps: dict[int, dict[str, str]] = {}
        self._points: dict[tuple[int, str], ProPoint] = {}

    @classmethod
    def from_tables(cls, space: ProSpace, tables: Mapping[int, Mapping[str, str]],
                    name: str = "") -> SectionSystem:
        tables = {int(n): {str(a): str(b) for a, b in t.items()} for n, t in tables.items()}

        def step(n):
            if n not in tables:
                raise DepthError(f"no section given at level {n}")
            return tables[n]

        total = space.max_depth is not None and all(
            n in tables for n in range(space.max_depth)
        )
        return cls(space, step, total, name)

    def step(self, n: int) -> dict[str, str]:
        got = self._steps.get(n)
        if got is None:
            got = self._steps.setdefault(n, dict(self._step(n)))
        return got

    def validate(self, depth: int) -> None:
        """Check each ``s_n`` for ``n < depth``; raise :class:`SectionError` with a witness."""
        X = self.space
        last = depth if X.max_depth is None else min(depth, X.max_depth)
        for n in range(last):
            table = self.step(n)
            src, tgt = X.level(n), X.level(n + 1)
            for x in src:
                if x not in table:
                    raise SectionError(f"section {n} undefined at {x}", n, x)
                if table[x] not in tgt:
                    raise SectionError(f"section {n} sends {x} outside level {n + 1}", n, x)
            p = X.transition(n)
            for x in src:
                if p(table[x]) != x:
                    raise SectionError(
                        f"not a section at level {n}: p_{n}(s_{n}({x})) = {p(table[x])}", n, x
                    )
            try:
                SpectralMapFin(src, tgt, table)
            except NotMonotoneError as exc:
                raise SectionError(
                    f"section {n} is not monotone at {exc.witness}", n, exc.witness[0]
                ) from None

    def point(self, n: int, x: str) -> ProPoint:
        x = str(x)
        got = self._points.get((n, x))
        if got is None:
            got = self._points.setdefault((n, x), self._make_point(n, x))
        return got

    def _make_point(self, n: int, x: str) -> ProPoint:
        X = self.space
        X.level(n).index(x)
        chain = {n: x}

        def resolve(m):
            if m not in chain:
                if m < n:
                    for k in range(min(chain) - 1, m - 1, -1):
                        chain[k] = X.transition(k)(chain[k + 1])
                else:
                    for k in range(max(chain), m):
                        chain[k + 1] = self.step(k)[chain[k]]
            return chain[m]

        return ProPoint(resolve, f"sigma_{n}({x})")

    def points(self, depth: int) -> list[ProPoint]:
        last = depth if self.space.max_depth is None else min(depth, self.space.max_depth)
        return [self.point(n, x) for n in range(last + 1) for x in self.space.level(n)]


class _RuleSections:
    """Section recipe a rule provides for every level."""

    def __init__(self, step, name):
        self.step = step
        self.name = name

    def bind(self, space: ProSpace) -> SectionSystem:
        return SectionSystem(space, lambda n: self.step(space, n), True, self.name)


def builtin_sections(X: ProSpace, kind: str = "") -> SectionSystem:
    recipe = X.rule.sections(kind) if kind else X.rule.sections()
    if recipe is None:
        raise SectionError(f"{X.rule!r} has no built-in sections")
    return recipe.bind(X)


# ---------------------------------------------------------------------------
# families and verdicts


@dataclass(frozen=True)
class DenseFamily:
    """Candidate patch-dense family: explicit points plus section images.

    ``sections`` contribute every ``sigma_n(x)``; ``excluded`` points are removed
    (compared by their projections up to the depth in use).
    """

    points: tuple[ProPoint, ...] = ()
    sections: tuple[SectionSystem, ...] = ()
    excluded: tuple[ProPoint, ...] = ()

    def without(self, *points: ProPoint) -> DenseFamily:
        return DenseFamily(self.points, self.sections, self.excluded + tuple(points))

    def members(self, depth: int) -> list[ProPoint]:
        gone = {p.signature(depth) for p in self.excluded}
        out = {}
        for p in list(self.points) + [q for s in self.sections for q in s.points(depth)]:
            sig = p.signature(depth)
            if sig not in gone:
                out.setdefault(sig, p)
        return list(out.values())


class Density(str, Enum):
    DENSE_PROVEN = "DENSE_PROVEN"
    DENSE_UP_TO_DEPTH = "DENSE_UP_TO_DEPTH"
    NOT_DENSE = "NOT_DENSE"


class Visibility(str, Enum):
    VISIBLE = "VISIBLE"
    NOT_VISIBLE_UP_TO_DEPTH = "NOT_VISIBLE_UP_TO_DEPTH"


class Answer(str, Enum):
    YES = "YES"
    NO = "NO"


@dataclass(frozen=True)
class DensityVerdict:
    status: Density
    depth: int
    witness: LevelSet | None = None
    reason: str = ""


@dataclass(frozen=True)
class VisibilityVerdict:
    status: Visibility
    depth: int
    V: LevelSet | None = None
    W: LevelSet | None = None


@dataclass(frozen=True)
class SingletonVerdict:
    status: Answer
    depth: int
    witness: LevelSet | None = None


def patch_dense_pro(X: ProSpace, F: DenseFamily, depth: int | None = None) -> DensityVerdict:
    depth = X.clamp(depth)
    if not F.excluded:
        for s in F.sections:
            if s.total:
                s.validate(X.validated_depth)
                return DensityVerdict(
                    Density.DENSE_PROVEN, depth,
                    reason=f"sections {s.name or '?'} cover every level",
                )
    members = F.members(depth)
    for p in members:
        p.check(X, depth)
    for n in range(depth + 1):
        hit = {p.resolve(n) for p in members}
        missing = [x for x in X.level(n) if x not in hit]
        if missing:
            # a nonempty level set (n, S) is met iff some member lands in S
            return DensityVerdict(
                Density.NOT_DENSE, depth, LevelSet(X, n, {sort_ids(missing)[0]}),
                reason=f"no member projects into it at level {n}",
            )
    if X.max_depth is not None and depth == X.max_depth:
        return DensityVerdict(Density.DENSE_PROVEN, depth, reason="every level checked")
    return DensityVerdict(Density.DENSE_UP_TO_DEPTH, depth, reason=f"levels 0..{depth} covered")


def weakly_visible_pro(X: ProSpace, p: ProPoint, depth: int | None = None) -> VisibilityVerdict:
    """Search level-presented Thomason ``V, W`` with ``{p} = V & ~W``.

    At level ``n`` with ``e = p(n)`` the smallest candidate is
    ``V = up(e)``, ``W = level - down(e)`` (so ``V & ~W`` is the level set of
    ``{e}``); any other pair gives a superset, so it suffices to test this one.
    """
    depth = X.clamp(depth)
    p.check(X, depth)
    for n in range(depth + 1):
        e = p.resolve(n)
        lvl = X.level(n)
        V = LevelSet(X, n, lvl.up(e))
        W = LevelSet(X, n, frozenset(lvl.elements) - lvl.down(e))
        if (V - W).members == {e} and X.rule.fiber_is_singleton(X, n, e):
            return VisibilityVerdict(Visibility.VISIBLE, depth, V, W)
    return VisibilityVerdict(Visibility.NOT_VISIBLE_UP_TO_DEPTH, depth)


def is_constructible_singleton(X: ProSpace, p: ProPoint, depth: int | None = None) -> SingletonVerdict:
    """Whether ``{p}`` is a level set presented at some level ``<= depth``."""
    depth = X.clamp(depth)
    p.check(X, depth)
    for n in range(depth + 1):
        e = p.resolve(n)
        if X.rule.fiber_is_singleton(X, n, e):
            return SingletonVerdict(Answer.YES, depth, LevelSet(X, n, {e}))
    return SingletonVerdict(Answer.NO, depth)


def retractable_limit(X: ProSpace, sections: SectionSystem | Mapping[int, Mapping[str, str]],
                      depth: int | None = None) -> DenseFamily:
    """Validate the sections and return the family of all section images."""
    if not isinstance(sections, SectionSystem):
        sections = SectionSystem.from_tables(X, sections)
    sections.validate(X.validated_depth if depth is None else X.clamp(depth))
    return DenseFamily(sections=(sections,))


def finite_points(X: ProSpace) -> DenseFamily:
    """The points ``C1, C2, ...`` of a chain-growth space, as section images."""
    if not isinstance(X.rule, ChainGrowthRule):
        raise TypeError("finite points are defined for chain-growth spaces")
    return retractable_limit(X, builtin_sections(X, "finite"))
