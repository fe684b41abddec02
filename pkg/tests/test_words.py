import random

import pytest

from smallcancel.words import (
    Context,
    FactorSpec,
    NormalForm,
    ParseError,
    SpecError,
    cyclic_factor,
    free_factor,
    parse_presentation,
    validate_symmetric_generating_sets,
)

from conftest import z2_factor, z3_factor


# -- factor validation --------------------------------------------------------


def test_finite_factor_rejects_non_group_table():
    with pytest.raises(SpecError, match="associative|identity|inverse"):
        FactorSpec(
            name="A", kind="finite", element_names=("1", "a", "b"),
            table=((0, 1, 2), (1, 0, 0), (2, 0, 0)), generating_set=(1,),
        )


def test_finite_factor_rejects_non_generating_set():
    # {b2} only reaches the order-2 subgroup of Z/4
    z4 = tuple(tuple((i + j) % 4 for j in range(4)) for i in range(4))
    with pytest.raises(SpecError, match="generate"):
        FactorSpec(
            name="B", kind="finite", element_names=("1", "b", "b2", "b3"),
            table=z4, generating_set=(2,),
        )
    with pytest.raises(SpecError, match="identity"):
        FactorSpec(
            name="B", kind="finite", element_names=("1", "b", "b2", "b3"),
            table=z4, generating_set=(0, 1, 3),
        )


def test_free_factor_requires_basis_letters_in_generators():
    with pytest.raises(SpecError, match="must contain letter"):
        FactorSpec(name="F", kind="free", letters=("x", "y"), generating_set=((1,),))


def test_unparseable_element_names_rejected():
    z2 = ((0, 1), (1, 0))
    # identity may keep a conventional non-token name like "1"
    FactorSpec(name="A", kind="finite", element_names=("1", "a"), table=z2, generating_set=(1,))
    with pytest.raises(SpecError, match="word tokens"):
        FactorSpec(name="A", kind="finite", element_names=("1", "a b"), table=z2, generating_set=(1,))
    with pytest.raises(SpecError, match="word tokens"):
        FactorSpec(name="A", kind="finite", element_names=("1", "2x"), table=z2, generating_set=(1,))


def test_factor_element_ops():
    b = z3_factor()
    assert b.identity() == 0
    assert b.mul(1, 1) == 2
    assert b.inv(1) == 2
    assert b.power(1, 3) == 0
    assert b.has_finite_order(1)
    f = free_factor("F", ["x", "y"])
    assert f.mul((1, -2), (2,)) == (1,)
    assert f.inv((1, 2)) == (-2, -1)
    assert not f.has_finite_order((1,))
    assert f.has_finite_order(())


# -- normalize ----------------------------------------------------------------


def test_normalize_kills_torsion_word(z2z3):
    w = z2z3.parse_word("A.a B.b B.b B.b A.a")
    assert w.is_identity


def test_normalize_keeps_alternating_word(z2z3):
    w = z2z3.parse_word("A.a B.b A.a B.b")
    assert len(w) == 4


def test_normalize_free_cancellation(fxfy):
    w = fxfy.parse_word("A.x A.x B.y B.y^-1 A.x^-1")
    assert len(w) == 1
    assert w.syllables[0].element == (1,)


def test_normalize_idempotent(z2z3):
    w = z2z3.parse_word("A.a B.b2 A.a B.b A.a")
    again = z2z3.normalize((s.factor, s.element) for s in w)
    assert again == w


def test_exponent_tokens(z2z3, fxfy):
    assert z2z3.parse_word("B.b^2") == z2z3.parse_word("B.b B.b")
    assert z2z3.parse_word("B.b^-1") == z2z3.parse_word("B.b2")
    assert fxfy.parse_word("A.x^3 A.x^-3").is_identity


def test_unknown_token_is_parse_error(z2z3):
    with pytest.raises(ParseError):
        z2z3.parse_word("A.q")
    with pytest.raises(SpecError):
        z2z3.parse_word("C.a")


def test_format_word_round_trip(z2z3, fxfy):
    for text in ["A.a B.b A.a B.b2", "B.b", "A.a"]:
        w = z2z3.parse_word(text)
        assert z2z3.parse_word(z2z3.format_word(w)) == w
    w = fxfy.parse_word("A.x^2 B.y^-3 A.x")
    assert fxfy.parse_word(fxfy.format_word(w)) == w


# -- group axioms on random words ----------------------------------------------


def random_word(ctx, rng, size):
    toks = []
    choices = []
    for fname, spec in ctx.factors.items():
        if spec.kind == "finite":
            choices += [f"{fname}.{spec.element_names[g]}" for g in spec.generating_set]
        else:
            for lt in spec.letters:
                choices += [f"{fname}.{lt}", f"{fname}.{lt}^-1"]
    for _ in range(size):
        toks.append(rng.choice(choices))
    return ctx.parse_word(" ".join(toks))


@pytest.mark.parametrize("fixture", ["z2z3", "fxfy"])
def test_group_axioms(fixture, request):
    ctx = request.getfixturevalue(fixture)
    rng = random.Random(0)
    for _ in range(50):
        u = random_word(ctx, rng, rng.randint(0, 8))
        v = random_word(ctx, rng, rng.randint(0, 8))
        w = random_word(ctx, rng, rng.randint(0, 8))
        assert ctx.mul(u, ctx.mul(v, w)) == ctx.mul(ctx.mul(u, v), w)
        assert ctx.mul(u, ctx.inv(u)).is_identity
        assert ctx.mul(ctx.inv(u), u).is_identity


def test_finite_factor_oracle_exhaustive(z2z3):
    # products via normal forms agree with direct table evaluation
    b = z2z3.factor("B")
    for x in b.elements():
        for y in b.elements():
            w = z2z3.normalize([("B", x), ("B", y)])
            expected = b.mul(x, y)
            if b.is_identity(expected):
                assert w.is_identity
            else:
                assert len(w) == 1 and w.syllables[0].element == expected


# -- lengths -------------------------------------------------------------------


def test_lengths_ab7(z2z3):
    w = z2z3.parse_word(" ".join(["A.a B.b"] * 7))
    rep = z2z3.lengths(w)
    assert rep.syllable_count == 14
    assert rep.generator_length == 14


def test_lengths_bfs_distance():
    # generating set {b} only: b2 needs two generator steps
    b = FactorSpec(
        name="B", kind="finite", element_names=("1", "b", "b2"),
        table=((0, 1, 2), (1, 2, 0), (2, 0, 1)), generating_set=(1,),
    )
    ctx = Context(z2_factor(), b)
    w = ctx.parse_word("B.b^2")
    rep = ctx.lengths(w)
    assert rep.syllable_count == 1
    assert rep.generator_length == 2


def test_lengths_identity(z2z3):
    rep = z2z3.lengths(NormalForm())
    assert rep.syllable_count == 0 and rep.generator_length == 0


def test_lengths_invariants(z2z3, fxfy):
    rng = random.Random(1)
    for ctx in (z2z3, fxfy):
        for _ in range(30):
            u = random_word(ctx, rng, rng.randint(0, 10))
            v = random_word(ctx, rng, rng.randint(0, 10))
            lu, lv = ctx.lengths(u), ctx.lengths(v)
            assert lu.generator_length >= lu.syllable_count
            assert (lu.generator_length == 0) == u.is_identity
            assert ctx.lengths(ctx.mul(u, v)).generator_length <= lu.generator_length + lv.generator_length


def test_free_geodesic_with_composite_generator():
    # adding x^2 as a generator shortens x^4 to two steps
    f = FactorSpec(
        name="F", kind="free", letters=("x",),
        generating_set=((1,), (-1,), (1, 1), (-1, -1)),
    )
    assert f.geodesic_length((1, 1, 1, 1)) == 2
    assert f.geodesic_length((1, 1, 1)) == 2  # x^2 * x


# -- cyclic reduction -----------------------------------------------------------


def test_cyclic_reduce_peels_matching_ends(fxfy):
    w = fxfy.parse_word("A.x B.y A.x B.y A.x^-1")
    core, conj = fxfy.cyclically_reduce(w)
    assert core == fxfy.parse_word("B.y A.x B.y")
    assert conj == fxfy.parse_word("A.x")
    assert fxfy.mul(conj, core, fxfy.inv(conj)) == w


def test_cyclic_reduce_fixed_point(z2z3):
    w = z2z3.parse_word("A.a B.b A.a B.b2")
    core, conj = z2z3.cyclically_reduce(w)
    assert core == w and conj.is_identity


def test_cyclic_reduce_single_syllable(fxfy):
    w = fxfy.parse_word("A.x B.y A.x^-1")
    core, conj = fxfy.cyclically_reduce(w)
    assert core == fxfy.parse_word("B.y")
    assert conj == fxfy.parse_word("A.x")


def test_cyclic_reduce_random_conjugation(z2z3, fxfy):
    rng = random.Random(2)
    for ctx in (z2z3, fxfy):
        for _ in range(40):
            w = random_word(ctx, rng, rng.randint(0, 10))
            core, conj = ctx.cyclically_reduce(w)
            assert ctx.mul(conj, core, ctx.inv(conj)) == w
            if len(core) >= 2:
                first, last = core.syllables[0], core.syllables[-1]
                if first.factor == last.factor:
                    spec = ctx.factor(first.factor)
                    assert not spec.is_identity(spec.mul(last.element, first.element))


def test_strong_cyclic_core(fxfy):
    w = fxfy.parse_word("A.x B.y A.x")
    core = fxfy.strong_cyclic_core(w)
    assert core == fxfy.parse_word("B.y A.x^2")


# -- presentation files -----------------------------------------------------------


AB7_PRES = """
# Z/2 * Z/3 with the 14-syllable relator
factor.A.kind = finite
factor.A.elements = 1 a
factor.A.table.1 = 1 a
factor.A.table.a = a 1
factor.A.generators = a

factor.B.kind = finite
factor.B.elements = 1 b b2
factor.B.table.1 = 1 b b2
factor.B.table.b = b b2 1
factor.B.table.b2 = b2 1 b
factor.B.generators = b b2

relator = A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b
"""


def test_parse_presentation_round_trip():
    pres = parse_presentation(AB7_PRES)
    assert sorted(pres.context.factors) == ["A", "B"]
    assert len(pres.relators) == 1
    assert len(pres.relators[0]) == 14
    validate_symmetric_generating_sets(pres.context)


def test_parse_presentation_free_factor():
    text = """
factor.A.kind = free
factor.A.letters = x
factor.A.generators = x x^-1
factor.B.kind = free
factor.B.letters = y
factor.B.generators = y y^-1
relator = A.x B.y
"""
    pres = parse_presentation(text)
    assert pres.context.factor("A").kind == "free"
    assert len(pres.relators[0]) == 2


def test_parse_presentation_errors():
    with pytest.raises(ParseError):
        parse_presentation("factor.A.kind = finite")
    with pytest.raises((ParseError, SpecError)):
        parse_presentation(AB7_PRES.replace("factor.B.table.b2 = b2 1 b", "factor.B.table.b2 = b2 1 q"))


def test_asymmetric_generating_set_flagged():
    b = FactorSpec(
        name="B", kind="finite", element_names=("1", "b", "b2"),
        table=((0, 1, 2), (1, 2, 0), (2, 0, 1)), generating_set=(1,),
    )
    ctx = Context(z2_factor(), b)
    with pytest.raises(SpecError, match="inverse"):
        validate_symmetric_generating_sets(ctx)


def test_cyclic_factor_constructor():
    z5 = cyclic_factor("A", 5)
    assert z5.order() == 5
    assert z5.generating_set == (1, 4)
    assert z5.geodesic_length(2) == 2
    assert z5.geodesic_length(4) == 1
