import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from data_gen import random_datum
from patchdense import (
    FinPoset,
    LevelSet,
    ReconstructionError,
    SupportDatum,
    SupportError,
    builtin_sections,
    chromatic,
    chromatic_datum,
    classify,
    dense_injectivity_check,
    distinguishes_supports,
    enumerate_terms,
    finite_points,
    find_isomorphism,
    ideal_of_thomason,
    parse_term,
    reconstruct_from_dense,
    supp,
    supp_of_ideal,
)
from patchdense.support import ONE, ZERO, Gen, basic_constructible, generated_level, generates_opens


@pytest.fixture
def sdatum(sierpinski):
    return SupportDatum(sierpinski, {"g": {"1"}, "h": {"0", "1"}}, name="s")


@pytest.fixture(scope="module")
def chrom():
    X = chromatic(32)
    return chromatic_datum(X)


# terms


def test_parse_precedence():
    t = parse_term("g + h * k")
    assert str(t) == "(g+(h*k))"
    assert str(parse_term("S(g * 1) + 0")) == "(S((g*1))+0)"
    assert parse_term("(g)") == Gen("g")


@pytest.mark.parametrize("bad", ["", "g +", "(g", "g h", "S g", "*"])
def test_parse_errors(bad):
    with pytest.raises(SupportError):
        parse_term(bad)


@settings(max_examples=80, deadline=None)
@given(st.recursive(
    st.sampled_from(["g", "h", "0", "1"]),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: f"({p[0]}*{p[1]})"),
        st.tuples(inner, inner).map(lambda p: f"({p[0]}+{p[1]})"),
        inner.map(lambda s: f"S({s})"),
    ),
    max_leaves=6,
))
def test_parse_print_round_trip(text):
    t = parse_term(text)
    assert parse_term(str(t)) == t


# supports


def test_supp_examples(sdatum):
    g = Gen("g")
    assert supp(sdatum, g * ONE) == supp(sdatum, g) == {"1"}
    assert supp(sdatum, g + ZERO) == {"1"}
    assert supp(sdatum, parse_term("g*h")) == {"1"}
    assert supp(sdatum, parse_term("g+h")) == {"0", "1"}
    assert supp(sdatum, parse_term("S(S(g))")) == {"1"}


def test_unassigned_generator(sdatum):
    with pytest.raises(SupportError):
        supp(sdatum, Gen("q"))


def test_datum_validation(sierpinski):
    with pytest.raises(SupportError, match="Thomason"):
        SupportDatum(sierpinski, {"g": {"0"}})
    with pytest.raises(SupportError, match="reserved"):
        SupportDatum(sierpinski, {"1": {"1"}})


def test_basic_constructible(sdatum, chrom):
    k = parse_term("g")
    assert basic_constructible(sdatum, k, k) == frozenset()
    assert basic_constructible(sdatum, ONE, ZERO) == {"0", "1"}
    X = chrom.space
    for n in (1, 4, 20):
        got = basic_constructible(chrom, Gen(f"g{n}"), Gen(f"g{n + 1}"))
        assert got == LevelSet(X, n + 1, {f"C{n}"})


def test_enumerate_terms_one_per_support(sdatum):
    reps = enumerate_terms(sdatum, 6)
    supports = [s for _, s in reps]
    assert len(set(supports)) == len(supports) == 3
    for t, s in reps:
        assert supp(sdatum, t) == s and t.size <= 6


def test_enumerate_terms_bound_matters():
    X = FinPoset.antichain(["a", "b", "c"])
    d = SupportDatum(X, {"a": {"a"}, "b": {"b"}, "c": {"c"}})
    # {a,b} needs the three-symbol term a+b
    assert not generates_opens(d, 2)
    assert generates_opens(d, 3)


# distinguishing supports


def test_identity_family_distinguishes(sdatum, sierpinski):
    rep = distinguishes_supports(sdatum, [{x: x for x in sierpinski}])
    assert rep.distinguishes and rep.basis_dense and rep.dense and rep.agree


def test_sierpinski_open_point_fails(sierpinski):
    d = SupportDatum(sierpinski, {"g": {"1"}})
    rep = distinguishes_supports(d, [{"*": "0"}])
    assert not rep.distinguishes and not rep.basis_dense and not rep.dense
    assert tuple(map(str, rep.witness_distinguish)) == ("g", "0")
    assert tuple(map(str, rep.witness_basis)) == ("g", "0")


def test_chromatic_sections_distinguish(chrom):
    rep = distinguishes_supports(chrom, [builtin_sections(chrom.space, "top")])
    assert rep.distinguishes and rep.basis_dense and rep.dense and rep.generates


def test_random_data_agree():
    rng = random.Random(17)
    for _ in range(60):
        d = random_datum(rng)
        X = d.space
        D = [x for x in X if rng.random() < 0.7]
        rep = distinguishes_supports(d, [{x: x for x in D}])
        assert rep.agree and rep.basis_dense == rep.dense


def test_exhaustive_small_data_agree():
    spaces = [FinPoset.sierpinski(), FinPoset.chain(["a", "b"]), FinPoset.chain(["a", "b", "c"])]
    for X in spaces:
        closed = X.closed_sets()
        for r in range(len(closed) + 1):
            for gs in itertools.combinations(closed, r):
                d = SupportDatum(X, {f"g{k}": s for k, s in enumerate(gs)})
                gen = generates_opens(d)
                for mask in range(1 << len(X)):
                    D = [x for k, x in enumerate(X) if mask >> k & 1]
                    rep = distinguishes_supports(d, [{x: x for x in D}])
                    inj = dense_injectivity_check(d, D)
                    assert rep.agree
                    # relative to the realizable sublattice, injectivity is basis density
                    assert inj.injective == rep.basis_dense
                    if gen:
                        assert inj.agree and rep.dense == rep.basis_dense


# ideals and classification


def test_classify_examples(sierpinski):
    d = SupportDatum(sierpinski, {"g": {"1"}})
    c = classify(d, {"1"})
    assert c.exact and c.support == {"1"}
    assert {str(t) for t in c.ideal.members} == {"0", "g"}
    empty = ideal_of_thomason(d, set())
    assert ZERO in empty and {str(t) for t in empty.members} == {"0"}
    full = ideal_of_thomason(d, {"0", "1"})
    assert all(t in full for t, _ in enumerate_terms(d))
    with pytest.raises(SupportError):
        classify(d, {"0"})


def test_classify_inexact_without_generators(sierpinski):
    d = SupportDatum(sierpinski, {})
    c = classify(d, {"1"})
    assert not c.exact and c.support == frozenset()


def test_supp_of_ideal_round_trip_random():
    rng = random.Random(23)
    for _ in range(30):
        d = random_datum(rng)
        for T in d.space.closed_sets():
            assert supp_of_ideal(ideal_of_thomason(d, T)) == T


def test_chromatic_classify(chrom):
    X = chrom.space
    c = classify(chrom, LevelSet(X, 3, {"C3", "Cinf"}))
    assert c.exact and c.support == LevelSet(X, 2, {"Cinf"})


# injectivity


def test_injectivity_examples(sierpinski):
    d = SupportDatum(sierpinski, {"g": {"1"}})
    full = dense_injectivity_check(d, {"0", "1"})
    assert full.injective and full.dense
    part = dense_injectivity_check(d, {"0"})
    assert not part.injective and not part.dense and part.agree
    names = {frozenset(map(str, I.members)) for I in part.collision}
    assert names == {frozenset({"0"}), frozenset({"0", "g"})}


def test_chromatic_injectivity(chrom):
    rep = dense_injectivity_check(chrom, finite_points(chrom.space))
    assert rep.injective and rep.dense and rep.generates


def test_chromatic_without_a_point_not_injective():
    X = chromatic(8)
    d = chromatic_datum(X)
    F = finite_points(X).without(X.rule.point(3))
    rep = dense_injectivity_check(d, F)
    assert not rep.injective and not rep.dense


# reconstruction


def test_reconstruct_sierpinski(sierpinski):
    d = SupportDatum(sierpinski, {"g": {"1"}})
    rec = reconstruct_from_dense(d, {"0", "1"})
    assert dict(rec.iso) == {rec.closure.unit["0"]: "0", rec.closure.unit["1"]: "1"}
    assert find_isomorphism(rec.closure.space, sierpinski) is not None


def test_reconstruct_preconditions(sierpinski):
    d = SupportDatum(sierpinski, {"g": {"1"}})
    with pytest.raises(ReconstructionError, match="dense"):
        reconstruct_from_dense(d, {"0"})
    with pytest.raises(ReconstructionError, match="realize"):
        reconstruct_from_dense(SupportDatum(sierpinski, {}), {"0", "1"})


def test_reconstruct_random_identity():
    rng = random.Random(29)
    for _ in range(30):
        d = random_datum(rng)
        rec = reconstruct_from_dense(d, d.space.elements)
        assert all(rec.iso[rec.closure.unit[x]] == x for x in d.space)


def test_reconstruct_chromatic_levels(chrom):
    X = chrom.space
    recs = reconstruct_from_dense(chrom, finite_points(X), levels=range(6))
    assert [r.level for r in recs] == list(range(6))
    for r in recs:
        assert sorted(r.iso.values()) == sorted(X.level(r.level).elements)
        assert find_isomorphism(r.closure.space, X.level(r.level)) is not None


def test_generated_level(chrom):
    assert generated_level(chrom, 6, 32) == 32
    # the up-set {Cinf} of level 4 would need g5
    small = chromatic_datum(chrom.space, count=4)
    assert generated_level(small, 6, 32) == 3
