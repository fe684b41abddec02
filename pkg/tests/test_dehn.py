import random

import pytest

from smallcancel.cancellation import dehn_constants, symmetrized_closure
from smallcancel.dehn import (
    DehnConditionError,
    DehnSolver,
    FreeProductWordProblem,
    replay_trace,
)
from smallcancel.words import Context, NormalForm, free_factor

from conftest import ab7_relator
from oracles import FiniteQuotientOracle


@pytest.fixture(scope="module")
def quotient_oracle():
    return FiniteQuotientOracle()


@pytest.fixture
def ab7_solver(z2z3):
    closure = symmetrized_closure(z2z3, [ab7_relator(z2z3)])
    return DehnSolver(z2z3, closure)


def random_quotient_word(ctx, rng, size):
    toks = ["A.a", "B.b", "B.b2"]
    return ctx.parse_word(" ".join(rng.choice(toks) for _ in range(size)))


# -- single steps -----------------------------------------------------------------


def test_relator_reduces_in_one_step(z2z3, ab7_solver):
    trace = ab7_solver.dehn_reduce(ab7_relator(z2z3))
    assert trace.final.is_identity
    assert len(trace.steps) == 1
    assert replay_trace(z2z3, ab7_solver, trace)


def test_no_majority_no_step(z2z3, ab7_solver):
    w = z2z3.parse_word("A.a B.b A.a B.b")
    trace = ab7_solver.dehn_reduce(w)
    assert not trace.steps
    assert trace.final == w


def test_majority_subword_shortens(z2z3, ab7_solver):
    # 13 of the 14 relator syllables embedded between inert syllables
    s = NormalForm(ab7_relator(z2z3).syllables[:13])
    w = z2z3.mul(z2z3.parse_word("B.b2"), s, z2z3.parse_word("B.b2"))
    before = z2z3.generator_length(w)
    trace = ab7_solver.dehn_reduce(w)
    assert trace.steps
    assert z2z3.generator_length(trace.final) < before
    assert replay_trace(z2z3, ab7_solver, trace)


def test_single_step_interface(z2z3, ab7_solver):
    r = ab7_relator(z2z3)
    assert ab7_solver.greendlinger_step(r) == z2z3.parse_word("")  # one step to identity
    assert ab7_solver.greendlinger_step(z2z3.parse_word("A.a B.b")) is None
    w = z2z3.mul(r, r)
    stepped = ab7_solver.greendlinger_step(w)
    assert stepped is not None
    assert z2z3.generator_length(stepped) < z2z3.generator_length(w)


# -- full reduction -----------------------------------------------------------------


def test_relator_square_two_steps(z2z3, ab7_solver):
    r = ab7_relator(z2z3)
    trace = ab7_solver.dehn_reduce(z2z3.mul(r, r))
    assert trace.final.is_identity
    assert len(trace.steps) == 2
    assert replay_trace(z2z3, ab7_solver, trace)


def test_single_generator_unchanged(z2z3, ab7_solver):
    w = z2z3.parse_word("A.a")
    trace = ab7_solver.dehn_reduce(w)
    assert trace.final == w and not trace.steps


def test_conjugate_of_relator_is_trivial(z2z3, ab7_solver):
    r = ab7_relator(z2z3)
    g = z2z3.parse_word("B.b A.a")
    trace = ab7_solver.dehn_reduce(z2z3.conjugate(r, g))
    assert trace.final.is_identity
    assert replay_trace(z2z3, ab7_solver, trace)


def test_reduction_idempotent(z2z3, ab7_solver):
    rng = random.Random(5)
    for _ in range(20):
        w = random_quotient_word(z2z3, rng, rng.randint(0, 20))
        final = ab7_solver.dehn_reduce(w).final
        again = ab7_solver.dehn_reduce(final)
        assert again.final == final and not again.steps


def test_termination_bound(z2z3, ab7_solver):
    rng = random.Random(6)
    for _ in range(20):
        w = random_quotient_word(z2z3, rng, rng.randint(0, 30))
        trace = ab7_solver.dehn_reduce(w)
        assert len(trace.steps) <= max(1, z2z3.generator_length(w))


def test_replay_soundness_random(z2z3, ab7_solver):
    rng = random.Random(7)
    r = ab7_relator(z2z3)
    for _ in range(15):
        g = random_quotient_word(z2z3, rng, rng.randint(0, 4))
        w = z2z3.mul(z2z3.conjugate(r, g), random_quotient_word(z2z3, rng, rng.randint(0, 6)))
        assert replay_trace(z2z3, ab7_solver, ab7_solver.dehn_reduce(w))


# -- word problem --------------------------------------------------------------------


def test_members_trivial(z2z3, ab7_solver):
    for m in ab7_solver.members:
        assert ab7_solver.is_trivial(m)


def test_factor_elements_nontrivial(z2z3, ab7_solver):
    # the factors embed in the quotient
    for text in ("A.a", "B.b", "B.b2"):
        assert not ab7_solver.is_trivial(z2z3.parse_word(text))


def test_conjugate_products_trivial(z2z3, ab7_solver):
    rng = random.Random(8)
    r = ab7_relator(z2z3)
    members = ab7_solver.members
    for _ in range(25):
        w = NormalForm()
        for _ in range(rng.randint(1, 3)):
            g = random_quotient_word(z2z3, rng, rng.randint(0, 5))
            w = z2z3.mul(w, z2z3.conjugate(rng.choice(members), g))
        assert ab7_solver.is_trivial(w)


def test_nonmembers_nontrivial_against_oracle(z2z3, ab7_solver, quotient_oracle):
    rng = random.Random(9)
    checked = 0
    while checked < 25:
        w = random_quotient_word(z2z3, rng, rng.randint(1, 25))
        if w.is_identity or not quotient_oracle.certainly_nontrivial(w):
            continue
        checked += 1
        assert not ab7_solver.is_trivial(w)


def test_dehn_agrees_with_oracle_on_trivial_direction(z2z3, ab7_solver, quotient_oracle):
    # anything the solver calls trivial must die in every finite image
    rng = random.Random(10)
    r = ab7_relator(z2z3)
    for _ in range(10):
        g = random_quotient_word(z2z3, rng, rng.randint(0, 5))
        w = z2z3.conjugate(r, g)
        assert ab7_solver.is_trivial(w)
        assert not quotient_oracle.certainly_nontrivial(w)


# -- refusal and override --------------------------------------------------------------


def test_refuses_without_condition(z2z3):
    short = z2z3.parse_word("A.a B.b A.a B.b")  # (ab)^2: lambda* = 1/4, condition fails
    closure = symmetrized_closure(z2z3, [short])
    consts = dehn_constants(z2z3, closure)
    assert not consts.condition_holds
    with pytest.raises(DehnConditionError):
        DehnSolver(z2z3, closure)
    solver = DehnSolver(z2z3, closure, unsafe_override=True)
    assert solver.is_trivial(short)


# -- factor membership -------------------------------------------------------------------


def test_membership_single_generator(z2z3, ab7_solver):
    m = ab7_solver.factor_membership(z2z3.parse_word("A.a"), "A")
    assert m.kind == "in" and m.element == 1


def test_membership_two_syllables_not_in(z2z3, ab7_solver, quotient_oracle):
    w = z2z3.parse_word("A.a B.b")
    m = ab7_solver.factor_membership(w, "A")
    assert m.kind == "not_in"
    assert quotient_oracle.certainly_not_in_factor(w, "A")


def test_membership_relator_times_generator(z2z3, ab7_solver):
    w = z2z3.mul(ab7_relator(z2z3), z2z3.parse_word("A.a"))
    m = ab7_solver.factor_membership(w, "A")
    assert m.kind == "in" and m.element == 1


def test_membership_other_factor(z2z3, ab7_solver):
    m = ab7_solver.factor_membership(z2z3.parse_word("B.b"), "A")
    assert m.kind == "not_in"
    m = ab7_solver.factor_membership(z2z3.parse_word("B.b"), "B")
    assert m.kind == "in" and m.element == 1


def test_membership_exhaustive_matches_oracle(z2z3, ab7_solver, quotient_oracle):
    rng = random.Random(11)
    for _ in range(20):
        w = random_quotient_word(z2z3, rng, rng.randint(1, 10))
        m = ab7_solver.factor_membership(w, "A")
        assert m.kind in ("in", "not_in")  # finite factors are decided
        if quotient_oracle.certainly_not_in_factor(w, "A"):
            assert m.kind == "not_in"


def test_membership_free_factor_unknown():
    ctx = Context(free_factor("A", ["x"]), free_factor("B", ["y"]))
    r = ctx.parse_word(" ".join(["A.x B.y"] * 7))
    solver = DehnSolver(ctx, symmetrized_closure(ctx, [r]))
    m = solver.factor_membership(ctx.parse_word("A.x B.y"), "A")
    assert m.kind == "unknown"
    # but linear reduction still certifies easy In cases
    w = ctx.mul(r, ctx.parse_word("A.x"))
    m = solver.factor_membership(w, "A")
    assert m.kind == "in" and m.element == (1,)


def test_free_product_engine_without_relators(fxfy):
    engine = FreeProductWordProblem(fxfy)
    assert engine.is_trivial(fxfy.parse_word("A.x A.x^-1"))
    assert not engine.is_trivial(fxfy.parse_word("A.x"))
    assert engine.factor_membership(fxfy.parse_word("A.x"), "A").kind == "in"
    assert engine.factor_membership(fxfy.parse_word("A.x B.y"), "A").kind == "not_in"
