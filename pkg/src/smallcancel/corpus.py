"""Reproduction corpus: the acceptance checks behind the `corpus` verb.

Each check is a pure function returning a CorpusResult with a
deterministic record, so the emitted table and report are byte-identical
across runs with the same seed and budgets.  The word-problem check
validates its nonmember sample against a finite-quotient oracle built by
coset enumeration, a route fully independent of the Dehn solver.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .cancellation import (
    check_metric_condition,
    dehn_constants,
    pieces,
    symmetrized_closure,
    validate_seven_syllables,
)
from .coned import coned_ball, geometric_piece_ratio
from .coset_enum import todd_coxeter
from .dehn import DehnSolver
from .dims import (
    DimensionProfile,
    Flags,
    Interval,
    ProductHypotheses,
    eilenberg_ganea_verdict,
    scp_dimensions,
)
from .ends import ping_pong_trace
from .homotopy import Budget
from .taut import (
    FreeProductBacking,
    QuotientBacking,
    TruncatedSpectrum,
    cayley_ball,
    cycle_graph,
    path_graph,
    product_spectrum,
    quotient_bracket,
    taut_spectrum_bruteforce,
)
from .words import Context, NormalForm, parse_presentation


AB7_PRESENTATION = """\
# Z/2 * Z/3 with the alternating 14-syllable relator
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


def _zn_block(name: str, n: int, gen: str) -> str:
    names = ["1"] + [gen if k == 1 else f"{gen}{k}" for k in range(1, n)]
    lines = [f"factor.{name}.kind = finite", f"factor.{name}.elements = " + " ".join(names)]
    for i, nm in enumerate(names):
        row = " ".join(names[(i + j) % n] for j in range(n))
        lines.append(f"factor.{name}.table.{nm} = {row}")
    lines.append(f"factor.{name}.generators = {names[1]} {names[-1]}")
    return "\n".join(lines)


AB7_Z17_PRESENTATION = (
    "# Z/2 * Z/17 with the same alternating relator; ell0 = 14\n"
    "factor.A.kind = finite\n"
    "factor.A.elements = 1 a\n"
    "factor.A.table.1 = 1 a\n"
    "factor.A.table.a = a 1\n"
    "factor.A.generators = a\n\n"
    + _zn_block("B", 17, "b")
    + "\n\nrelator = A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b A.a B.b\n"
)

Z5_Z7_PRESENTATION = (
    "# free product of two cyclic factors, no relators\n"
    + _zn_block("A", 5, "s")
    + "\n\n"
    + _zn_block("B", 7, "t")
    + "\n"
)


def _ladder_relator_text() -> str:
    toks = []
    for i in range(1, 13):
        toks.extend(["A.a B.b1"] * i)
        toks.append("A.a B.b2")
    return " ".join(toks)


LADDER_PRESENTATION = (
    "# free factors with the escalating-run relator family member\n"
    "factor.A.kind = free\n"
    "factor.A.letters = a\n"
    "factor.A.generators = a a^-1\n"
    "factor.B.kind = free\n"
    "factor.B.letters = b1 b2\n"
    "factor.B.generators = b1 b1^-1 b2 b2^-1\n"
    f"relator = {_ladder_relator_text()}\n"
)

PRESENTATIONS = {
    "ab7.pres": AB7_PRESENTATION,
    "ab7_z17.pres": AB7_Z17_PRESENTATION,
    "z5z7.pres": Z5_Z7_PRESENTATION,
    "run_ladder.pres": LADDER_PRESENTATION,
}


@dataclass(frozen=True)
class CorpusResult:
    number: int
    name: str
    passed: bool
    details: str
    record: dict


def _ab7_solver():
    pres = parse_presentation(AB7_PRESENTATION)
    closure = symmetrized_closure(pres.context, pres.relators)
    constants = dehn_constants(pres.context, closure)
    return pres.context, closure, constants, DehnSolver(pres.context, closure, constants)


# -- 1: metric certification ---------------------------------------------------------


def check_metric_certification(seed: int, budget: Budget) -> CorpusResult:
    pres = parse_presentation(AB7_PRESENTATION)
    closure = symmetrized_closure(pres.context, pres.relators)
    report = pieces(pres.context, closure)
    verdict = check_metric_condition(pres.context, closure, Fraction(1, 7))
    ok = (
        len(closure) == 4
        and report.optimal_lambda == Fraction(1, 14)
        and verdict.holds
        and validate_seven_syllables(closure)
    )
    return CorpusResult(
        1, "metric-certification", ok,
        f"lambda* = {report.optimal_lambda}, metric condition at 1/7: {verdict.holds}",
        {
            "members": len(closure),
            "optimal_lambda": str(report.optimal_lambda),
            "max_piece_syllables": report.max_piece_syllables,
            "holds_at_1_7": verdict.holds,
        },
    )


# -- 2: geometric gap ------------------------------------------------------------------


def check_geometric_gap(seed: int, budget: Budget) -> CorpusResult:
    ctx, closure, constants, solver = _ab7_solver()
    ball = coned_ball(ctx, solver, closure, 7)
    strict = geometric_piece_ratio(ball, Fraction(1, 7))
    eps = geometric_piece_ratio(ball, Fraction(1, 7) + Fraction(1, 10**9))
    algebraic = pieces(ctx, closure).optimal_lambda
    ok = (
        strict.ratio == Fraction(1, 7)
        and strict.holds is False
        and eps.holds is True
        and algebraic == Fraction(1, 14)
    )
    return CorpusResult(
        2, "geometric-gap", ok,
        f"geometric ratio = {strict.ratio} (algebraic {algebraic}); "
        f"strict 1/7 fails, 1/7+eps holds",
        {
            "vertices": len(ball.vertex_types),
            "edges": len(ball.edges),
            "cells": len(ball.cells),
            "geometric_ratio": str(strict.ratio),
            "algebraic_ratio": str(algebraic),
            "strict_holds": strict.holds,
            "epsilon_holds": eps.holds,
        },
    )


# -- 3: word problem completeness ----------------------------------------------------------


class _QuotientImageOracle:
    """Finite image of the quotient via coset enumeration; no Dehn code."""

    def __init__(self):
        comm = [1, 2, -1, -2]
        table = todd_coxeter(2, [[1, 1], [2] * 3, [1, 2] * 7, comm * 4])
        assert table is not None and table.n_cosets == 168
        self.table = table

    def _encode(self, w: NormalForm) -> list[int]:
        out: list[int] = []
        for s in w.syllables:
            gen = 1 if s.factor == "A" else 2
            out.extend([gen] * s.element)
        return out

    def certainly_nontrivial(self, w: NormalForm) -> bool:
        return self.table.trace(0, self._encode(w)) != 0


def _random_word(ctx: Context, rng: random.Random, size: int) -> NormalForm:
    toks = ["A.a", "B.b", "B.b2"]
    return ctx.parse_word(" ".join(rng.choice(toks) for _ in range(size)))


def check_word_problem(seed: int, budget: Budget) -> CorpusResult:
    ctx, closure, constants, solver = _ab7_solver()
    rng = random.Random(seed)
    oracle = _QuotientImageOracle()
    members = solver.members
    trivial_ok = 0
    attempts = 0
    while trivial_ok < 200 and attempts < 5000:
        attempts += 1
        w = NormalForm()
        for _ in range(rng.randint(1, 3)):
            g = _random_word(ctx, rng, rng.randint(0, 8))
            w = ctx.mul(w, ctx.conjugate(rng.choice(members), g))
        if ctx.generator_length(w) > 120:
            continue  # resample within the stated length cap
        if solver.is_trivial(w):
            trivial_ok += 1
        else:
            break
    nontrivial_ok = 0
    attempts = 0
    while nontrivial_ok < 200 and attempts < 5000:
        attempts += 1
        w = _random_word(ctx, rng, rng.randint(1, 40))
        if w.is_identity or not oracle.certainly_nontrivial(w):
            continue  # oracle inconclusive or trivial: resample
        if solver.is_trivial(w):
            break
        nontrivial_ok += 1
    ok = trivial_ok == 200 and nontrivial_ok == 200
    return CorpusResult(
        3, "word-problem-completeness", ok,
        f"{trivial_ok}/200 member products recognized trivial; "
        f"{nontrivial_ok}/200 oracle-validated nonmembers recognized nontrivial",
        {"trivial_ok": trivial_ok, "nontrivial_ok": nontrivial_ok, "seed": seed},
    )


# -- 4: spectrum oracles ---------------------------------------------------------------------


def check_spectrum_oracles(seed: int, budget: Budget) -> CorpusResult:
    tree_spec = taut_spectrum_bruteforce(path_graph(6), 14, budget)
    ok = tree_spec.decided_in() == [] and all(
        e.verdict == "out" and e.certificate for e in tree_spec.entries.values()
    )
    cycle_values = {}
    for n in range(3, 13):
        spec = taut_spectrum_bruteforce(cycle_graph(n), 14, budget)
        cycle_values[n] = spec.decided_in()
        decided = all(e.verdict in ("in", "out") for e in spec.entries.values())
        certified = all(
            e.certificate is not None for e in spec.entries.values() if e.verdict != "unknown"
        )
        ok = ok and spec.decided_in() == [n] and decided and certified
    return CorpusResult(
        4, "spectrum-oracles", ok,
        "tree spectrum empty; cycle spectra are the singletons {n} for n = 3..12",
        {"tree": [], "cycles": {str(n): v for n, v in sorted(cycle_values.items())}},
    )


# -- 5: free product law -----------------------------------------------------------------------


def check_product_law(seed: int, budget: Budget) -> CorpusResult:
    pres = parse_presentation(Z5_Z7_PRESENTATION)
    backing = FreeProductBacking(pres.context)
    ball = cayley_ball(backing, 4)
    ball_spec = taut_spectrum_bruteforce(ball, 8, budget)
    union = product_spectrum(
        taut_spectrum_bruteforce(cycle_graph(5), 8, budget),
        taut_spectrum_bruteforce(cycle_graph(7), 8, budget),
    )
    disagreements = []
    unknowns = []
    for l in range(3, 9):
        va, vb = ball_spec.entries[l].verdict, union.entries[l].verdict
        if "unknown" in (va, vb):
            unknowns.append(l)
            continue
        if va != vb:
            disagreements.append(l)
    ok = not disagreements and all(l >= 7 for l in unknowns)
    return CorpusResult(
        5, "free-product-law", ok,
        f"ball spectrum equals factor union on 3..8 "
        f"({len(disagreements)} disagreements, unknowns at {unknowns or 'none'})",
        {
            "ball": {str(l): ball_spec.entries[l].verdict for l in range(3, 9)},
            "union": {str(l): union.entries[l].verdict for l in range(3, 9)},
            "ball_vertices": ball.n,
        },
    )


# -- 6: bracket consistency ----------------------------------------------------------------------


def check_bracket_consistency(seed: int, budget: Budget) -> CorpusResult:
    pres = parse_presentation(AB7_Z17_PRESENTATION)
    ctx = pres.context
    closure = symmetrized_closure(ctx, pres.relators)
    constants = dehn_constants(ctx, closure)
    solver = DehnSolver(ctx, closure, constants)
    backing = QuotientBacking(ctx, solver)
    horizon = 18
    quotient = taut_spectrum_bruteforce(cayley_ball(backing, 2), horizon, budget)
    factor_union = product_spectrum(
        TruncatedSpectrum.from_set((), horizon, source="order-2 factor"),
        taut_spectrum_bruteforce(cycle_graph(17), horizon, budget),
    )
    failures = []
    checked = 0
    for l in quotient.decided_in():
        if l <= constants.ell0:
            continue
        checked += 1
        lo, hi = quotient_bracket(l, "quotient-to-factors", constants)
        window = range(max(3, lo), min(hi, factor_union.horizon) + 1)
        verdicts = [factor_union.entries[k].verdict for k in window]
        if "in" not in verdicts and "unknown" not in verdicts and hi <= factor_union.horizon:
            failures.append(("quotient-to-factors", l))
    for l in factor_union.decided_in():
        if l <= constants.ell0:
            continue
        checked += 1
        lo, hi = quotient_bracket(l, "factors-to-quotient", constants)
        window = range(max(3, lo), min(hi, quotient.horizon) + 1)
        verdicts = [quotient.entries[k].verdict for k in window]
        if "in" not in verdicts and "unknown" not in verdicts and hi <= quotient.horizon:
            failures.append(("factors-to-quotient", l))
    ok = not failures and checked > 0
    return CorpusResult(
        6, "bracket-consistency", ok,
        f"ell0 = {constants.ell0}; {checked} decided lengths above ell0 checked, "
        f"{len(failures)} empty decided windows",
        {
            "ell0": constants.ell0,
            "quotient": {str(l): quotient.entries[l].verdict for l in range(3, horizon + 1)},
            "factor_union": {str(l): factor_union.entries[l].verdict for l in range(3, horizon + 1)},
            "checked": checked,
            "failures": [list(f) for f in failures],
        },
    )


# -- 7: dimension formulas ----------------------------------------------------------------------


def check_dimension_formulas(seed: int, budget: Budget) -> CorpusResult:
    hyp = ProductHypotheses(c_finite=True, relators_finite_c12=True, not_virtually_free=True)
    vc_flags = Flags(finitely_generated=True, small_centralizers=True, acc_finite_subgroups=True)
    # pattern 1: an Eilenberg-Ganea pair for the finite family propagates
    pa = DimensionProfile(name="A", cd_fin=Interval.point(2), gd_fin=Interval.point(3))
    pb = DimensionProfile(name="B", cd_fin=Interval.point(2), gd_fin=Interval.at_most(2))
    g1, _ = scp_dimensions(pa, pb, hyp)
    ok1 = (
        g1.cd_fin == Interval.point(2)
        and g1.gd_fin == Interval.point(3)
        and eilenberg_ganea_verdict(g1, "fin") == "true"
    )
    # pattern 2: vc intervals bracket to [2,3] and [2,2]
    pa2 = DimensionProfile(name="A", cd_fin=Interval.point(2), gd_fin=Interval.point(3),
                           cd_vc=Interval.at_most(2), gd_vc=Interval.at_most(3), flags=vc_flags)
    pb2 = DimensionProfile(name="B", cd_fin=Interval.point(2), gd_fin=Interval.point(2),
                           cd_vc=Interval.at_most(2), gd_vc=Interval.at_most(2), flags=vc_flags)
    g2, _ = scp_dimensions(pa2, pb2, hyp)
    ok2 = g2.gd_vc == Interval(2, 3) and g2.cd_vc == Interval(2, 2)
    # pattern 3: ring dimensions propagate per tag
    pa3 = DimensionProfile(name="A", cd_ring={"Q": Interval.point(2), "Z": Interval.point(3)})
    pb3 = DimensionProfile(name="B", cd_ring={"Q": Interval.at_most(2), "Z": Interval.at_most(3)})
    g3, _ = scp_dimensions(pa3, pb3, hyp)
    ok3 = g3.cd_ring["Q"] == Interval.point(2) and g3.cd_ring["Z"] == Interval.point(3)
    ok = ok1 and ok2 and ok3
    return CorpusResult(
        7, "dimension-formulas", ok,
        f"fin pattern: {ok1}; vc bracket pattern: {ok2}; ring pattern: {ok3}",
        {
            "fin": {"cd": g1.cd_fin.format(), "gd": g1.gd_fin.format(),
                    "eg": eilenberg_ganea_verdict(g1, "fin")},
            "vc": {"cd": g2.cd_vc.format(), "gd": g2.gd_vc.format()},
            "ring": {tag: iv.format() for tag, iv in sorted(g3.cd_ring.items())},
        },
    )


# -- 8: ping-pong totality -----------------------------------------------------------------------


def check_ping_pong(seed: int, budget: Budget) -> CorpusResult:
    from .words import free_factor

    rng = random.Random(seed)
    contexts = [
        Context(free_factor("A", ["x"]), free_factor("B", ["y"])),
        Context(free_factor("A", ["a"]), free_factor("B", ["b1", "b2"])),
    ]
    moved = 0
    monotone = True
    trial = 0
    while moved < 1000:
        trial += 1
        if trial > 5000:
            break
        ctx = contexts[trial % 2]
        letters = []
        for fname, spec in ctx.factors.items():
            for lt in spec.letters:
                letters += [f"{fname}.{lt}", f"{fname}.{lt}^-1"]
        w = ctx.parse_word(" ".join(rng.choice(letters) for _ in range(rng.randint(1, 12))))
        if w.is_identity:
            continue  # resample: the criterion wants nonempty normal forms
        res = ping_pong_trace(ctx, w)
        if res.kind != "moved":
            break
        depths = [s.depth for s in res.trace]
        if not all(b > a for a, b in zip(depths, depths[1:])):
            monotone = False
            break
        moved += 1
    pres = parse_presentation(AB7_PRESENTATION)
    offender = ping_pong_trace(pres.context, pres.context.parse_word("B.b A.a B.b2"))
    ok = moved == 1000 and monotone and offender.kind == "inconclusive"
    return CorpusResult(
        8, "ping-pong-totality", ok,
        f"{moved} random all-infinite-order words moved with strictly monotone depth; "
        "finite-order syllables are flagged inconclusive",
        {"moved": moved, "monotone": monotone, "offender": offender.kind, "seed": seed},
    )


# -- 9: escalating-run relator audit ------------------------------------------------------------


def check_ladder_audit(seed: int, budget: Budget) -> CorpusResult:
    pres = parse_presentation(LADDER_PRESENTATION)
    closure = symmetrized_closure(pres.context, pres.relators)
    report = pieces(pres.context, closure)
    at_1_12 = check_metric_condition(pres.context, closure, Fraction(1, 12))
    at_1_6 = check_metric_condition(pres.context, closure, Fraction(1, 6))
    witness = report.witnesses[0] if report.witnesses else None
    ok = (
        report.optimal_lambda == Fraction(23, 90)
        and at_1_12.holds is False
        and at_1_12.violation is not None
    )
    return CorpusResult(
        9, "escalating-run-audit", ok,
        f"lambda* = {report.optimal_lambda} (piece of {report.max_piece_syllables} syllables "
        f"in a {max(len(m) for m in closure.members)}-syllable relator); "
        f"metric condition: 1/12 {'holds' if at_1_12.holds else 'fails'}, "
        f"1/6 {'holds' if at_1_6.holds else 'fails'}",
        {
            "optimal_lambda": str(report.optimal_lambda),
            "max_piece_syllables": report.max_piece_syllables,
            "members": len(closure),
            "holds_at_1_12": at_1_12.holds,
            "holds_at_1_6": at_1_6.holds,
            "witness": None if witness is None else {
                "length": witness.length,
                "partial": witness.partial,
                "member_a": witness.member_a,
                "member_b": witness.member_b,
            },
        },
    )


CHECKS: list[Callable[[int, Budget], CorpusResult]] = [
    check_metric_certification,
    check_geometric_gap,
    check_word_problem,
    check_spectrum_oracles,
    check_product_law,
    check_bracket_consistency,
    check_dimension_formulas,
    check_ping_pong,
    check_ladder_audit,
]


def run_corpus(seed: int = 0, only: Optional[list[int]] = None, budget: Optional[Budget] = None) -> list[CorpusResult]:
    budget = budget or Budget()
    results = []
    for i, check in enumerate(CHECKS, 1):
        if only and i not in only:
            continue
        results.append(check(seed, budget))
    return results
