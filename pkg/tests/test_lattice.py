import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import relation_of
from patchdense import (
    FinPoset,
    IsomorphismError,
    LatticeError,
    SetLattice,
    closure_isomorphism,
    closure_map,
    closure_via_evaluation,
    find_isomorphism,
    generate,
    join_irreducibles,
    patch_dense_fin,
    random_poset,
    realize_in_ambient,
    restricted_lattice,
    spectral_closure,
)


def fs(*sets):
    return {frozenset(s) for s in sets}


@st.composite
def lattices(draw, max_carrier=6, max_gens=4):
    n = draw(st.integers(1, max_carrier))
    carrier = [f"c{k}" for k in range(n)]
    gens = draw(st.lists(st.sets(st.sampled_from(carrier)), max_size=max_gens))
    return generate(carrier, gens)


# generate and validation


def test_generate_examples():
    assert generate("ab", [{"a"}]).elements == fs("", "a", "ab")
    assert generate("abc", [{"a"}, {"b"}]).elements == fs("", "a", "b", "ab", "abc")
    assert generate("ab", []).elements == fs("", "ab")


def test_generate_rejects_foreign_generator():
    with pytest.raises(LatticeError):
        generate("ab", [{"z"}])


def test_set_lattice_validation():
    with pytest.raises(LatticeError):
        SetLattice("ab", [set(), {"a"}, {"b"}, {"a", "b"}, {"z"}])
    with pytest.raises(LatticeError):
        SetLattice("ab", [{"a"}, {"a", "b"}])
    with pytest.raises(LatticeError):
        SetLattice("abc", [set(), {"a"}, {"b"}, {"a", "b", "c"}])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.sets(st.integers(0, n - 1)), max_size=4))))
def test_generate_matches_naive(case):
    n, gens = case
    carrier = [f"c{k}" for k in range(n)]
    gens = [{carrier[k] for k in g} for g in gens]
    assert generate(carrier, gens).elements == oracles.lattice_closure(carrier, gens)


# join-irreducibles and the closure


def test_join_irreducible_examples():
    chain = join_irreducibles(SetLattice("ab", fs("", "a", "ab")))
    assert len(chain) == 2 and chain.leq("{a}", "{a,b}")
    assert join_irreducibles(generate("ab", [{"a"}, {"b"}])) == FinPoset.antichain(["{a}", "{b}"])
    assert len(join_irreducibles(SetLattice("ab", fs("", "ab")))) == 1


def test_spectral_closure_examples():
    res = spectral_closure(SetLattice("ab", fs("", "a", "ab")))
    assert res.space.leq(res.unit["a"], res.unit["b"])
    assert res.unit["a"] != res.unit["b"]
    # the full power set gives back the discrete carrier
    res = spectral_closure(generate("abc", [{"a"}, {"b"}, {"c"}]))
    assert res.unit_injective()
    assert res.space == FinPoset.antichain(res.space.elements)
    assert len(spectral_closure(SetLattice("a", fs("", "a"))).space) == 1


def test_closure_via_evaluation_example():
    res = closure_via_evaluation(SetLattice("ab", fs("", "a", "ab")))
    assert len(res.space) == 2
    assert res.space.leq(res.unit["a"], res.unit["b"])


@settings(max_examples=60, deadline=None)
@given(lattices())
def test_closure_matches_prime_filters(L):
    res = spectral_closure(L)
    filters, unit = oracles.prime_filter_closure(L.carrier, L.elements)
    assert len(res.space) == len(filters)
    # every point's neighbourhood filter is one of the prime filters, and orders agree
    nbhd = {p: frozenset(u for u, o in res.open_table().items() if p in o) for p in res.space}
    assert set(nbhd.values()) == set(filters)
    for p in res.space:
        for q in res.space:
            assert res.space.leq(p, q) == (nbhd[q] <= nbhd[p])
    for x in L.carrier:
        assert nbhd[res.unit[x]] == unit[x]


@settings(max_examples=60, deadline=None)
@given(lattices())
def test_closure_properties(L):
    res = spectral_closure(L)
    assert res.is_initial()
    assert patch_dense_fin(res.space, res.unit.values())
    ev = closure_via_evaluation(L)
    phi = closure_isomorphism(res, ev)
    assert phi is not None
    assert all(phi[res.unit[x]] == ev.unit[x] for x in L.carrier)


def test_closure_isomorphism_detects_mismatch():
    a = spectral_closure(SetLattice("ab", fs("", "a", "ab")))
    b = spectral_closure(generate("ab", [{"a"}, {"b"}]))
    assert closure_isomorphism(a, b) is None


# functoriality


def test_closure_map_identity():
    rng = random.Random(3)
    for _ in range(40):
        carrier = [f"c{k}" for k in range(rng.randint(1, 5))]
        L = generate(carrier, [[x for x in carrier if rng.random() < 0.5] for _ in range(3)])
        res = spectral_closure(L)
        f = closure_map({x: x for x in carrier}, res, res)
        assert dict(f.assignment) == {p: p for p in res.space}


def test_closure_map_of_inclusion():
    big = spectral_closure(generate("abc", [{"a"}, {"a", "b"}]))
    small = spectral_closure(generate("ab", [{"a"}]))
    # restrict big's lattice along the inclusion {a,b} -> {a,b,c}
    f = closure_map({"a": "a", "b": "b"}, small, big)
    assert f(small.unit["a"]) == big.unit["a"]
    assert f(small.unit["b"]) == big.unit["b"]
    with pytest.raises(LatticeError):
        closure_map({"a": "b", "b": "a"}, small, big)


# restriction and realization


def test_restricted_lattice_examples(sierpinski):
    X = FinPoset.chain(["a", "b", "c"])
    ident = restricted_lattice({x: x for x in X}, X)
    assert ident.elements == set(map(frozenset, X.opens()))
    assert restricted_lattice({"0": "0"}, sierpinski).elements == fs("", "0")


def test_realize_examples(sierpinski):
    R = realize_in_ambient({"0": "0", "1": "1"}, sierpinski)
    assert R.subspace == sierpinski
    assert {R.iso[R.closure.unit[x]] for x in "01"} == {"0", "1"}
    assert all(R.iso[R.closure.unit[x]] == x for x in "01")
    R = realize_in_ambient({"0": "0"}, sierpinski)
    assert len(R.subspace) == 1 and len(R.closure.space) == 1


def test_realize_non_injective_index_map():
    X = FinPoset.chain(["a", "b", "c"])
    R = realize_in_ambient({"u": "a", "v": "a", "w": "c"}, X)
    assert set(R.subspace.elements) == {"a", "c"}
    assert R.iso[R.closure.unit["u"]] == "a" == R.iso[R.closure.unit["v"]]


def test_realize_random_is_order_iso():
    rng = random.Random(11)
    for _ in range(100):
        X = random_poset(rng, rng.randint(1, 7))
        D = [x for x in X if rng.random() < 0.6] or [X.elements[0]]
        R = realize_in_ambient({x: x for x in D}, X)
        assert oracles.is_order_iso(relation_of(R.closure.space), relation_of(R.subspace), dict(R.iso))
        assert find_isomorphism(R.closure.space, R.subspace) is not None


def test_open_table_raises_on_non_initial():
    res = spectral_closure(SetLattice("ab", fs("", "a", "ab")))
    broken = type(res)(res.lattice, res.space, {"a": res.unit["b"], "b": res.unit["b"]})
    with pytest.raises(IsomorphismError):
        broken.open_table()
    assert not broken.is_initial()
