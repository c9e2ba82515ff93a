"""Finite spectral spaces, encoded as finite posets.

Convention: ``a <= b`` means ``b`` lies in the closure of ``{a}`` (``a`` specializes
to ``b``). Closed sets are the up-sets, open sets the down-sets, and every open
is quasi-compact. Thomason subsets are the up-sets as well, i.e. the opens of
the Hochster dual (the order-reversed poset).

Internally subsets are bitmasks over the element index; the public API speaks
``frozenset`` of element identifiers.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Hashable, Iterable, Iterator, Mapping

from ._util import bits, popcount, sort_ids
from .errors import InvalidSubsetError, NotMonotoneError, OrderError

# Beyond this size the full constructible family is not materialized.
MAX_MATERIALIZED = 16


class FinPoset:
    """An immutable finite partial order, read as a finite spectral space."""

    __slots__ = ("_elements", "_index", "_up", "_down", "_name", "_cache")

    def __init__(self, elements: Iterable, relations: Iterable = (), name: str = ""):
        elements = tuple(str(e) for e in elements)
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise OrderError("duplicate element identifiers")
        n = len(elements)
        up = [1 << i for i in range(n)]
        for a, b in relations:
            a, b = str(a), str(b)
            for e in (a, b):
                if e not in index:
                    raise OrderError(f"relation mentions unknown element {e!r}")
            up[index[a]] |= 1 << index[b]
        # reflexive-transitive closure (Warshall on bitmask rows)
        for k in range(n):
            bk = 1 << k
            for i in range(n):
                if up[i] & bk:
                    up[i] |= up[k]
        down = [0] * n
        for i in range(n):
            for j in bits(up[i]):
                down[j] |= 1 << i
        for i in range(n):
            both = up[i] & down[i] & ~(1 << i)
            if both:
                j = next(bits(both))
                raise OrderError(
                    f"antisymmetry violated: {elements[i]} <= {elements[j]} <= {elements[i]}"
                )
        self._elements = elements
        self._index = index
        self._up = tuple(up)
        self._down = tuple(down)
        self._name = name
        self._cache = {}

    # construction helpers

    @classmethod
    def chain(cls, n_or_names, name: str = "") -> FinPoset:
        names = _names(n_or_names)
        return cls(names, zip(names, names[1:]), name=name)

    @classmethod
    def antichain(cls, n_or_names, name: str = "") -> FinPoset:
        return cls(_names(n_or_names), name=name)

    @classmethod
    def sierpinski(cls) -> FinPoset:
        """``{0 -> 1}`` with ``1`` the closed point."""
        return cls(["0", "1"], [("0", "1")], name="sierpinski")

    # basic access

    @property
    def elements(self) -> tuple[str, ...]:
        return self._elements

    @property
    def name(self) -> str:
        return self._name

    def __len__(self):
        return len(self._elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self._elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise InvalidSubsetError(f"{x!r} is not an element of {self._label()}") from None

    def _label(self):
        return f"poset {self._name!r}" if self._name else "the poset"

    def leq(self, a, b) -> bool:
        return bool(self._up[self.index(a)] >> self.index(b) & 1)

    @property
    def relations(self) -> frozenset[tuple[str, str]]:
        """All pairs ``(a, b)`` with ``a <= b``, reflexive pairs included."""
        if "rel" not in self._cache:
            els = self._elements
            self._cache["rel"] = frozenset(
                (els[i], els[j]) for i in range(len(els)) for j in bits(self._up[i])
            )
        return self._cache["rel"]

    def covers(self) -> list[tuple[str, str]]:
        out = []
        for i in range(len(self)):
            strict = self._up[i] & ~(1 << i)
            for j in bits(strict):
                between = strict & self._down[j] & ~(1 << j)
                if not between:
                    out.append((self._elements[i], self._elements[j]))
        return sorted(out, key=lambda p: (sort_ids(p), p))

    # subsets as masks

    def mask(self, subset: Iterable) -> int:
        m = 0
        for x in subset:
            m |= 1 << self.index(x)
        return m

    def subset(self, mask: int) -> frozenset[str]:
        return frozenset(self._elements[i] for i in bits(mask))

    @property
    def full_mask(self) -> int:
        return (1 << len(self._elements)) - 1

    def up(self, x) -> frozenset[str]:
        return self.subset(self._up[self.index(x)])

    def down(self, x) -> frozenset[str]:
        return self.subset(self._down[self.index(x)])

    def up_mask(self, m: int) -> int:
        out = 0
        for i in bits(m):
            out |= self._up[i]
        return out

    def down_mask(self, m: int) -> int:
        out = 0
        for i in bits(m):
            out |= self._down[i]
        return out

    def upset(self, subset: Iterable) -> frozenset[str]:
        return self.subset(self.up_mask(self.mask(subset)))

    def downset(self, subset: Iterable) -> frozenset[str]:
        return self.subset(self.down_mask(self.mask(subset)))

    def is_open(self, subset) -> bool:
        m = self.mask(subset)
        return self.down_mask(m) == m

    def is_closed(self, subset) -> bool:
        m = self.mask(subset)
        return self.up_mask(m) == m

    def maximal(self) -> frozenset[str]:
        """The closed points."""
        return frozenset(e for i, e in enumerate(self._elements) if self._up[i] == 1 << i)

    def minimal(self) -> frozenset[str]:
        return frozenset(e for i, e in enumerate(self._elements) if self._down[i] == 1 << i)

    def open_masks(self) -> tuple[int, ...]:
        """Every down-set, as a bitmask."""
        if "opens" not in self._cache:
            n = len(self._elements)
            order = sorted(range(n), key=lambda i: popcount(self._down[i]))
            out = []

            def rec(k, cur):
                if k == n:
                    out.append(cur)
                    return
                i = order[k]
                rec(k + 1, cur)
                strict = self._down[i] & ~(1 << i)
                if strict & cur == strict:
                    rec(k + 1, cur | 1 << i)

            rec(0, 0)
            self._cache["opens"] = tuple(sorted(out, key=lambda m: (popcount(m), m)))
        return self._cache["opens"]

    def closed_masks(self) -> tuple[int, ...]:
        full = self.full_mask
        return tuple(full & ~m for m in self.open_masks())

    def opens(self) -> list[frozenset[str]]:
        return [self.subset(m) for m in self.open_masks()]

    def closed_sets(self) -> list[frozenset[str]]:
        return [self.subset(m) for m in self.closed_masks()]

    # derived spaces

    def dual(self) -> FinPoset:
        return FinPoset(self._elements, ((b, a) for a, b in self.relations), name=self._name)

    def subspace(self, subset: Iterable, name: str = "") -> FinPoset:
        keep = self.mask(subset)
        els = [e for i, e in enumerate(self._elements) if keep >> i & 1]
        rel = [(a, b) for a, b in self.relations if a in els and b in els]
        return FinPoset(els, rel, name=name)

    def relabel(self, mapping: Mapping) -> FinPoset:
        return FinPoset(
            (mapping[e] for e in self._elements),
            ((mapping[a], mapping[b]) for a, b in self.relations),
            name=self._name,
        )

    # identity

    def __eq__(self, other):
        if not isinstance(other, FinPoset):
            return NotImplemented
        return set(self._elements) == set(other._elements) and self.relations == other.relations

    def __hash__(self):
        return hash((frozenset(self._elements), self.relations))

    def __repr__(self):
        rel = ", ".join(f"{a}<={b}" for a, b in self.covers())
        return f"FinPoset([{', '.join(self._elements)}]{'; ' + rel if rel else ''})"


def _names(n_or_names) -> list[str]:
    if isinstance(n_or_names, int):
        return [str(i) for i in range(n_or_names)]
    return [str(x) for x in n_or_names]


def _check(X: FinPoset, S) -> int:
    return X.mask(S)


@dataclass(frozen=True, eq=False)
class SpectralMapFin:
    """A monotone map between finite posets (= a spectral map)."""

    source: FinPoset
    target: FinPoset
    assignment: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        table = {str(k): str(v) for k, v in dict(self.assignment).items()}
        missing = [x for x in self.source if x not in table]
        if missing:
            raise InvalidSubsetError(f"map undefined on {missing[0]!r}")
        for x, y in table.items():
            self.source.index(x)
            self.target.index(y)
        for a, b in self.source.relations:
            if not self.target.leq(table[a], table[b]):
                raise NotMonotoneError(
                    f"not monotone: {a} <= {b} but {table[a]} is not <= {table[b]}",
                    witness=(a, b),
                )
        object.__setattr__(self, "assignment", MappingProxyType(table))

    def __call__(self, x) -> str:
        return self.assignment[x]

    def image(self, subset=None) -> frozenset[str]:
        src = self.source.elements if subset is None else subset
        return frozenset(self.assignment[x] for x in src)

    def preimage(self, subset) -> frozenset[str]:
        s = set(subset)
        self.target.mask(s)
        return frozenset(x for x, y in self.assignment.items() if y in s)

    def __eq__(self, other):
        if not isinstance(other, SpectralMapFin):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.assignment) == dict(other.assignment)
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# operations


def closure(X: FinPoset, S: Iterable) -> frozenset[str]:
    """Smallest closed superset of ``S``, i.e. its up-closure."""
    return X.upset(S)


def hochster_dual(X: FinPoset) -> FinPoset:
    return X.dual()


def is_thomason(X: FinPoset, S: Iterable) -> bool:
    """``S`` is open in the dual topology (complements of quasi-compact opens generate it)."""
    m = X.mask(S)
    full = X.full_mask
    # opens of X* are unions of complements of opens of X; with finitely many
    # points it is enough to test that m is a union of such complements
    covered = 0
    for o in X.open_masks():
        c = full & ~o
        if c & ~m == 0:
            covered |= c
    return covered == m


def _meet_closure(gens: Iterable[int]) -> set[int]:
    gens = list(dict.fromkeys(gens))
    seen = set(gens)
    todo = list(gens)
    while todo:
        m = todo.pop()
        for g in gens:
            k = m & g
            if k not in seen:
                seen.add(k)
                todo.append(k)
    return seen


def _union_closure(family: Iterable[int]) -> set[int]:
    out = {0}
    for m in family:
        out |= {r | m for r in out}
    return out


def constructible_masks(X: FinPoset) -> frozenset[int]:
    if "cons" not in X._cache:
        if len(X) > MAX_MATERIALIZED:
            raise ValueError(
                f"refusing to materialize 2^{len(X)} constructible sets; use is_constructible"
            )
        full = X.full_mask
        gens = list(X.open_masks()) + [full & ~m for m in X.open_masks()]
        result = frozenset(_union_closure(_meet_closure(gens)))
        if len(result) != 1 << len(X):
            raise AssertionError("constructible sets of a finite spectral space must be all subsets")
        X._cache["cons"] = result
    return X._cache["cons"]


def constructible_sets(X: FinPoset) -> list[frozenset[str]]:
    """All constructible subsets, generated from opens and their complements."""
    return [X.subset(m) for m in sorted(constructible_masks(X), key=lambda m: (popcount(m), m))]


def is_constructible(X: FinPoset, S: Iterable) -> bool:
    """Lazy membership test that never materializes the constructible family."""
    m = X.mask(S)
    for i in bits(m):
        # down(x) is open, up(x) is closed; their intersection is a basic constructible
        basic = X._down[i] & X._up[i]
        if basic & ~m:
            return False
    return True


def patch_dense_fin(X: FinPoset, D: Iterable) -> bool:
    """``D`` meets every nonempty constructible subset of ``X``."""
    d = X.mask(D)
    if len(X) <= MAX_MATERIALIZED:
        return all(c & d for c in constructible_masks(X) if c)
    # every nonempty constructible contains a basic set down(x) & up(x)
    return all(X._down[i] & X._up[i] & d for i in range(len(X)))


def locally_closed_points(X: FinPoset) -> frozenset[str]:
    return frozenset(
        e for i, e in enumerate(X.elements) if X._down[i] & X._up[i] == 1 << i
    )


def weakly_visible_points_fin(X: FinPoset) -> frozenset[str]:
    """Points ``x`` with ``{x} = V & ~W`` for Thomason ``V, W`` (exhaustive search)."""
    thomason = X.closed_masks()
    found = 0
    for v in thomason:
        for w in thomason:
            m = v & ~w
            if m and m & (m - 1) == 0:
                found |= m
    return X.subset(found)


def is_jacobson(X: FinPoset) -> bool:
    """Closed points are dense in every closed subset."""
    closed_points = X.mask(X.maximal())
    return all(X.up_mask(c & closed_points) == c for c in X.closed_masks())


def lemma_dense_epi(X: FinPoset, i: Mapping[Hashable, str]) -> tuple[bool, bool, bool]:
    """Evaluate the three equivalent density conditions for ``i: D -> X`` separately.

    Returns ``(b1, b2, b3)``:

    * ``b1`` -- the image meets every nonempty constructible (by enumeration);
    * ``b2`` -- for all opens ``U, V``: ``i^-1(U) <= i^-1(V)`` implies ``U <= V``;
    * ``b3`` -- ``i`` is epimorphic against every pair of spectral maps to the
      Sierpinski space, found by brute force over all functions ``X -> {0, 1}``.
    """
    dom = list(i)
    targets = [X.index(i[d]) for d in dom]

    b1 = patch_dense_fin(X, (i[d] for d in dom))

    def pre(u):
        out = 0
        for k, t in enumerate(targets):
            if u >> t & 1:
                out |= 1 << k
        return out

    opens = X.open_masks()
    pres = [pre(u) for u in opens]
    b2 = True
    for u, pu in zip(opens, pres):
        for v, pv in zip(opens, pres):
            if pu & ~pv == 0 and u & ~v != 0:
                b2 = False
                break
        if not b2:
            break

    n = len(X)
    rel = [(X.index(a), X.index(b)) for a, b in X.relations if a != b]
    seen = {}
    b3 = True
    for alpha in range(1 << n):
        # alpha has bit k set iff x_k goes to the closed point 1
        if any(alpha >> a & 1 and not alpha >> b & 1 for a, b in rel):
            continue
        restricted = tuple(alpha >> t & 1 for t in targets)
        if seen.setdefault(restricted, alpha) != alpha:
            b3 = False
            break
    return b1, b2, b3


# ---------------------------------------------------------------------------
# small posets


def find_isomorphism(X: FinPoset, Y: FinPoset) -> dict[str, str] | None:
    """Some order isomorphism ``X -> Y``, by backtracking; intended for small posets."""
    if len(X) != len(Y) or len(X.relations) != len(Y.relations):
        return None
    sig_x = [(popcount(X._down[i]), popcount(X._up[i])) for i in range(len(X))]
    sig_y = [(popcount(Y._down[i]), popcount(Y._up[i])) for i in range(len(Y))]
    if sorted(sig_x) != sorted(sig_y):
        return None
    n = len(X)
    assign = [-1] * n
    used = [False] * n

    def ok(i, j):
        for k in range(i):
            a = assign[k]
            if (X._up[k] >> i & 1) != (Y._up[a] >> j & 1):
                return False
            if (X._up[i] >> k & 1) != (Y._up[j] >> a & 1):
                return False
        return True

    def rec(i):
        if i == n:
            return True
        for j in range(n):
            if not used[j] and sig_x[i] == sig_y[j] and ok(i, j):
                assign[i], used[j] = j, True
                if rec(i + 1):
                    return True
                assign[i], used[j] = -1, False
        return False

    if not rec(0):
        return None
    return {X.elements[i]: Y.elements[assign[i]] for i in range(n)}


def _canonical(up: tuple[int, ...]) -> tuple[int, ...]:
    n = len(up)
    best = None
    for perm in itertools.permutations(range(n)):
        rows = [0] * n
        for i in range(n):
            r = 0
            for j in bits(up[i]):
                r |= 1 << perm[j]
            rows[perm[i]] = r
        key = tuple(rows)
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def _poset_codes(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = set()
    for code in _poset_codes(n - 1):
        P = FinPoset(range(n - 1), [(i, j) for i in range(n - 1) for j in bits(code[i])])
        for d in P.open_masks():
            # new element n-1 sits directly above the down-set d
            rows = [r | (1 << (n - 1) if d >> i & 1 else 0) for i, r in enumerate(code)]
            rows.append(1 << (n - 1))
            out.add(_canonical(tuple(rows)))
    return tuple(sorted(out))


def all_posets(n: int) -> list[FinPoset]:
    """One representative of each isomorphism class of ``n``-element posets."""
    names = [chr(ord("a") + k) for k in range(n)]
    return [
        FinPoset(names, [(names[i], names[j]) for i in range(n) for j in bits(code[i])])
        for code in _poset_codes(n)
    ]


def random_poset(rng: random.Random, n: int, density: float = 0.35, prefix: str = "x") -> FinPoset:
    """Random poset: random DAG along a hidden linear order, then closure; labels shuffled."""
    names = [f"{prefix}{k}" for k in range(n)]
    rng.shuffle(names)
    rel = [(names[a], names[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < density]
    order = list(names)
    rng.shuffle(order)
    return FinPoset(order, rel)
