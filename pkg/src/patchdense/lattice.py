"""Lattices of subsets and their spectral closure.

A :class:`SetLattice` is a family of subsets of a finite carrier containing the
empty set and the carrier and closed under pairwise intersection and union. Its
spectral closure is the initial spectral space receiving a map from the carrier
that pulls quasi-compact opens back into the lattice. Two constructions are
provided and checked against each other:

* :func:`spectral_closure` -- Birkhoff duality: points are the join-irreducible
  members ordered by inclusion, so the down-sets (opens) of the closure are in
  bijection with the lattice.
* :func:`closure_via_evaluation` -- the image of the evaluation map into a
  product of Sierpinski spaces, one factor per lattice member.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping

from ._util import fmt_set, natural_key, sort_ids
from .errors import IsomorphismError, LatticeError
from .finspace import FinPoset, SpectralMapFin


def _key(s: frozenset) -> tuple:
    return (len(s), [natural_key(x) for x in sort_ids(s)])


class SetLattice:
    """Bounded distributive lattice of subsets of a finite carrier."""

    __slots__ = ("carrier", "elements", "name")

    def __init__(self, carrier: Iterable, elements: Iterable[Iterable], name: str = ""):
        carrier = tuple(str(c) for c in carrier)
        if len(set(carrier)) != len(carrier):
            raise LatticeError("duplicate carrier identifiers")
        full = frozenset(carrier)
        elems = frozenset(frozenset(str(x) for x in e) for e in elements)
        for e in elems:
            if not e <= full:
                raise LatticeError(f"{fmt_set(e)} is not a subset of the carrier")
        if frozenset() not in elems or full not in elems:
            raise LatticeError("a set lattice must contain the empty set and the carrier")
        for a in elems:
            for b in elems:
                if a & b not in elems or a | b not in elems:
                    raise LatticeError(
                        f"not closed under intersection/union: {fmt_set(a)}, {fmt_set(b)}"
                    )
        self.carrier = carrier
        self.elements = elems
        self.name = name

    def sorted_elements(self) -> list[frozenset[str]]:
        return sorted(self.elements, key=_key)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, s):
        return frozenset(s) in self.elements

    def __iter__(self):
        return iter(self.sorted_elements())

    def __eq__(self, other):
        if not isinstance(other, SetLattice):
            return NotImplemented
        return set(self.carrier) == set(other.carrier) and self.elements == other.elements

    def __hash__(self):
        return hash((frozenset(self.carrier), self.elements))

    def __repr__(self):
        return f"SetLattice({fmt_set(self.carrier)}, {[fmt_set(e) for e in self]})"

    def separates_points(self) -> bool:
        return all(
            any((x in u) != (y in u) for u in self.elements)
            for i, x in enumerate(self.carrier)
            for y in self.carrier[i + 1 :]
        )


def generate(carrier: Iterable, generators: Iterable[Iterable], name: str = "") -> SetLattice:
    """Smallest set lattice on ``carrier`` containing ``generators``."""
    carrier = tuple(str(c) for c in carrier)
    full = frozenset(carrier)
    gens = []
    for g in generators:
        g = frozenset(str(x) for x in g)
        if not g <= full:
            raise LatticeError(f"generator {fmt_set(g)} is not a subset of the carrier")
        gens.append(g)
    seen = {frozenset(), full, *gens}
    todo = list(seen)
    while todo:
        a = todo.pop()
        for b in list(seen):
            for c in (a & b, a | b):
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
    return SetLattice(carrier, seen, name=name)


def join_irreducible_sets(L: SetLattice) -> list[frozenset[str]]:
    out = []
    for j in L.elements:
        if not j:
            continue
        below = frozenset().union(*(u for u in L.elements if u < j))
        if below != j:
            out.append(j)
    return sorted(out, key=_key)


def join_irreducibles(L: SetLattice) -> FinPoset:
    """Poset of join-irreducibles ordered by inclusion; its down-sets form a copy of ``L``.

    A point is named after the set it stands for, e.g. ``{a,b}``.
    """
    jis = join_irreducible_sets(L)
    names = [fmt_set(j) for j in jis]
    rel = [(names[p], names[q]) for p, a in enumerate(jis) for q, b in enumerate(jis) if a < b]
    return FinPoset(names, rel, name=L.name)


@dataclass(frozen=True, eq=False)
class ClosureResult:
    """Spectral closure of a set lattice together with its unit map."""

    lattice: SetLattice
    space: FinPoset
    unit: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "unit", MappingProxyType(dict(self.unit)))

    def pullback(self, open_set: Iterable) -> frozenset[str]:
        o = set(open_set)
        return frozenset(x for x, p in self.unit.items() if p in o)

    def open_table(self) -> dict[frozenset[str], frozenset[str]]:
        """Map each lattice member to the open of :attr:`space` pulling back to it.

        Raises :class:`IsomorphismError` if pulling back is not a bijection onto the lattice.
        """
        table = {}
        for o in self.space.opens():
            u = self.pullback(o)
            if u in table:
                raise IsomorphismError(f"two opens pull back to {fmt_set(u)}")
            table[u] = o
        if set(table) != set(self.lattice.elements):
            raise IsomorphismError("pulled-back opens differ from the lattice")
        return table

    def is_initial(self) -> bool:
        try:
            self.open_table()
        except IsomorphismError:
            return False
        return True

    def unit_injective(self) -> bool:
        return len(set(self.unit.values())) == len(self.unit)


def _prime_filter(L: SetLattice, x: str) -> list[frozenset[str]]:
    return [u for u in L.elements if x in u]


def spectral_closure(L: SetLattice) -> ClosureResult:
    space = join_irreducibles(L)
    jis = {fmt_set(j): j for j in join_irreducible_sets(L)}
    unit = {}
    for x in L.carrier:
        generator = frozenset.intersection(*_prime_filter(L, x))
        name = fmt_set(generator)
        if name not in jis:
            raise LatticeError(f"prime filter of {x} is not generated by a join-irreducible")
        unit[x] = name
    return ClosureResult(L, space, unit)


def closure_via_evaluation(L: SetLattice) -> ClosureResult:
    """Image of ``x -> (0 if x in U else 1)_U`` in the product of Sierpinski spaces."""
    index = L.sorted_elements()
    unit = {x: "".join("0" if x in u else "1" for u in index) for x in L.carrier}
    points = sorted(set(unit.values()))
    rel = [(p, q) for p in points for q in points if all(a <= b for a, b in zip(p, q))]
    return ClosureResult(L, FinPoset(points, rel, name=L.name), unit)


def closure_isomorphism(a: ClosureResult, b: ClosureResult) -> dict[str, str] | None:
    """The unique map ``a.space -> b.space`` commuting with the units, if it is an isomorphism."""
    if set(a.unit) != set(b.unit):
        return None
    phi = {}
    for x, p in a.unit.items():
        if phi.setdefault(p, b.unit[x]) != b.unit[x]:
            return None
    if set(phi) != set(a.space.elements) or len(set(phi.values())) != len(phi):
        return None
    if set(phi.values()) != set(b.space.elements):
        return None
    for p in a.space:
        for q in a.space:
            if a.space.leq(p, q) != b.space.leq(phi[p], phi[q]):
                return None
    return phi


def dual_map(src: FinPoset, tgt: FinPoset, hom: Mapping[frozenset, frozenset]) -> dict[str, str]:
    """Recover a spectral map ``src -> tgt`` from the lattice map ``opens(tgt) -> opens(src)``.

    Each point ``p`` of ``src`` determines the prime filter ``{O : p in hom(O)}`` of
    opens of ``tgt``; in a finite space that filter is the neighbourhood filter of
    exactly one point.
    """
    t_opens = tgt.opens()
    nbhd = {}
    for q in tgt:
        nbhd[frozenset(k for k, o in enumerate(t_opens) if q in o)] = q
    out = {}
    for p in src:
        f = frozenset(k for k, o in enumerate(t_opens) if p in hom[o])
        if f not in nbhd:
            raise IsomorphismError(f"point {p} does not determine a point of the target")
        out[p] = nbhd[f]
    return out


def closure_map(
    f: Mapping[str, str], source: ClosureResult, target: ClosureResult
) -> SpectralMapFin:
    """Spectral map between closures induced by a morphism of pairs.

    ``f`` maps the carrier of ``source.lattice`` to that of ``target.lattice`` and
    must pull every member of the target lattice back into the source lattice.
    """
    src_table = source.open_table()
    hom = {}
    for o in target.space.opens():
        u = target.pullback(o)
        back = frozenset(x for x in source.lattice.carrier if f[x] in u)
        if back not in src_table:
            raise LatticeError(f"preimage {fmt_set(back)} is not in the source lattice")
        hom[o] = src_table[back]
    return SpectralMapFin(source.space, target.space, dual_map(source.space, target.space, hom))


def restricted_lattice(i: Mapping[Hashable, str], X: FinPoset) -> SetLattice:
    """``{i^-1(U) : U open in X}`` on the carrier ``D``."""
    dom = [str(d) for d in i]
    img = {str(d): i[d] for d in i}
    X.mask(img.values())
    elems = {frozenset(d for d in dom if img[d] in o) for o in X.opens()}
    return SetLattice(dom, elems, name=X.name)


@dataclass(frozen=True, eq=False)
class Realization:
    subspace: FinPoset
    closure: ClosureResult
    corestriction: Mapping[str, str]
    iso: Mapping[str, str]


def realize_in_ambient(i: Mapping[Hashable, str], X: FinPoset) -> Realization:
    """Realize the closure of the restricted lattice inside ``X`` as the image of ``i``.

    The comparison map from the closure to the image is the one induced by the
    universal property (built from the lattice maps, not found by search); it is
    then checked to be an order isomorphism commuting with the units.
    """
    img = {str(d): i[d] for d in i}
    Y = X.subspace(set(img.values()), name=X.name)
    res = spectral_closure(restricted_lattice(i, X))
    eta_inv = res.open_table()
    hom = {}
    for o in Y.opens():
        j_pre = frozenset(d for d, y in img.items() if y in o)
        if j_pre not in eta_inv:
            raise IsomorphismError(f"{fmt_set(j_pre)} is not in the restricted lattice")
        hom[o] = eta_inv[j_pre]
    jbar = dual_map(res.space, Y, hom)
    if len(set(jbar.values())) != len(jbar) or set(jbar.values()) != set(Y.elements):
        raise IsomorphismError("comparison map is not bijective")
    for p in res.space:
        for q in res.space:
            if res.space.leq(p, q) != Y.leq(jbar[p], jbar[q]):
                raise IsomorphismError(f"comparison map is not an order isomorphism at {p}, {q}")
    for d, y in img.items():
        if jbar[res.unit[d]] != y:
            raise IsomorphismError(f"comparison map does not commute with the units at {d}")
    return Realization(Y, res, img, jbar)
