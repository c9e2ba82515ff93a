"""Naive reference implementations used as test oracles.

Everything here works on plain Python sets and the raw relation list, and shares
no code with the bitmask implementations under test.
"""
from itertools import combinations


def leq_table(elements, relations):
    """Reflexive-transitive closure by repeated squaring until stable."""
    rel = {(a, a) for a in elements} | set(relations)
    while True:
        new = rel | {(a, d) for a, b in rel for c, d in rel if b == c}
        if new == rel:
            return rel
        rel = new


def powerset(elements):
    elements = list(elements)
    for r in range(len(elements) + 1):
        for c in combinations(elements, r):
            yield frozenset(c)


def opens(elements, rel):
    """Down-sets: if y is in U and x <= y then x is in U."""
    return [
        U for U in powerset(elements)
        if all(x in U for (x, y) in rel if y in U)
    ]


def closed_sets(elements, rel):
    full = frozenset(elements)
    return [full - U for U in opens(elements, rel)]


def boolean_closure(elements, family):
    """Smallest family containing ``family`` closed under complement, meet and join."""
    full = frozenset(elements)
    out = set(family) | {full - U for U in family} | {frozenset(), full}
    while True:
        new = set(out)
        for a in out:
            new.add(full - a)
            for b in out:
                new.add(a & b)
                new.add(a | b)
        if new == out:
            return out
        out = new


def constructible(elements, rel):
    return boolean_closure(elements, opens(elements, rel))


def patch_dense(elements, rel, D):
    D = set(D)
    return all(C & D for C in constructible(elements, rel) if C)


def thomason(elements, rel, S):
    """Union of closed sets whose complements are (quasi-compact) opens."""
    S = frozenset(S)
    parts = [Z for Z in closed_sets(elements, rel) if Z <= S]
    return frozenset().union(*parts) == S


def lattice_closure(carrier, gens):
    full = frozenset(carrier)
    out = {frozenset(), full, *map(frozenset, gens)}
    while True:
        new = out | {a & b for a in out for b in out} | {a | b for a in out for b in out}
        if new == out:
            return out
        out = new


def prime_filter_closure(carrier, L):
    """Points: prime filters of L (as frozensets of members); order by reverse inclusion.

    A prime filter F is a point; its open neighbourhoods are the members it
    contains, so F <= G (G in the closure of F) iff G is a subset of F.
    """
    L = list(L)
    full = frozenset(carrier)
    filters = []
    for F in powerset(range(len(L))):
        members = {L[k] for k in F}
        if not members or frozenset() in members or full not in members:
            continue
        if any((a & b) not in members for a in members for b in members):
            continue
        if any(b not in members for a in members for b in L if a <= b):
            continue
        if any(a not in members and b not in members for a in L for b in L if a | b in members):
            continue
        filters.append(frozenset(members))
    unit = {x: frozenset(U for U in L if x in U) for x in carrier}
    return filters, unit


def is_order_iso(rel_a, rel_b, phi):
    return all(((phi[x], phi[y]) in rel_b) == ((x, y) in rel_a) for x in phi for y in phi)


# number of posets on n unlabeled points, n = 0..6 (OEIS A000112)
POSET_COUNTS = [1, 1, 2, 5, 16, 63, 318]
