"""Request handlers shared by the FastAPI app and the in-process CLI client."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ..cancellation import (
    check_metric_condition,
    dehn_constants,
    pieces,
    symmetrized_closure,
    validate_seven_syllables,
)
from ..coned import coned_ball, geometric_piece_ratio, quotient_complex
from ..corpus import run_corpus
from ..dehn import DehnSolver, FreeProductWordProblem
from ..dims import (
    GraphOfGroupsSpec,
    eilenberg_ganea_verdict,
    graph_of_groups_bounds,
    parse_profile,
    scp_dimensions,
    vcyc_from_fin,
)
from ..ends import one_ended_verdict, ping_pong_trace, relator_torsion_hypothesis
from ..homotopy import Budget
from ..reports import build_report
from ..taut import (
    FreeProductBacking,
    QuotientBacking,
    TruncatedSpectrum,
    cayley_ball,
    cycle_graph,
    from_edge_list,
    k_related,
    path_graph,
    product_spectrum,
    quotient_bracket,
    taut_spectrum_bruteforce,
)
from ..words import ParseError, SpecError, parse_presentation, validate_symmetric_generating_sets
from .schemas import (
    BudgetModel,
    CheckCancellationRequest,
    ConedBallRequest,
    CorpusRequest,
    DehnReduceRequest,
    DimBoundsRequest,
    OneEndedRequest,
    OperationResponse,
    SpectrumBracketRequest,
    SpectrumEquivRequest,
    SpectrumInput,
    SpectrumUnionRequest,
    TautSpectrumRequest,
    WordProblemRequest,
)


def _budget(model: BudgetModel) -> Budget:
    return Budget(
        max_cells=model.max_cells,
        max_cosets=model.max_cosets,
        perm_degree=model.perm_degree,
        rewrite_slack=model.rewrite_slack,
        max_states=model.max_states,
        max_assignments=model.max_assignments,
    )


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {text!r}") from None


def _quotient_setup(presentation_text: str, unsafe: bool = False):
    pres = parse_presentation(presentation_text)
    validate_symmetric_generating_sets(pres.context)
    if not pres.relators:
        return pres, None, None, FreeProductWordProblem(pres.context)
    closure = symmetrized_closure(pres.context, pres.relators)
    constants = dehn_constants(pres.context, closure)
    solver = DehnSolver(pres.context, closure, constants, unsafe_override=unsafe)
    return pres, closure, constants, solver


def check_cancellation(req: CheckCancellationRequest) -> OperationResponse:
    pres = parse_presentation(req.presentation)
    closure = symmetrized_closure(pres.context, pres.relators)
    piece_report = pieces(pres.context, closure)
    constants = dehn_constants(pres.context, closure)
    seven = validate_seven_syllables(closure)
    records = [{
        "operation": "symmetrized-closure",
        "members": len(closure),
        "min_relator_syllables": piece_report.min_relator_syllables,
    }, {
        "operation": "pieces",
        "max_piece_syllables": piece_report.max_piece_syllables,
        "optimal_lambda": str(piece_report.optimal_lambda),
        "witnesses": [
            {"length": w.length, "partial": w.partial,
             "member_a": w.member_a, "member_b": w.member_b}
            for w in piece_report.witnesses[:8]
        ],
    }, {
        "operation": "seven-syllable-validation",
        "holds": seven,
    }, {
        "operation": "dehn-constants",
        "M": constants.M,
        "ell0": constants.ell0,
        "lambda": str(constants.lam),
        "condition_holds": constants.condition_holds,
        "citation": "solvability:three-lambda-m-plus-one",
    }]
    lines = [
        f"members: {len(closure)}",
        f"lambda* = {piece_report.optimal_lambda} "
        f"(max piece {piece_report.max_piece_syllables} syllables)",
        f"all members have >= 7 syllables: {seven}",
        f"M = {constants.M}, ell0 = {constants.ell0}, "
        f"solvability condition holds: {constants.condition_holds}",
    ]
    if req.lambda_value is not None:
        lam = _fraction(req.lambda_value)
        verdict = check_metric_condition(pres.context, closure, lam)
        records.append({
            "operation": "metric-condition",
            "lambda": str(lam),
            "holds": verdict.holds,
            "optimal_lambda": str(verdict.optimal_lambda),
            "violation": None if verdict.violation is None else {
                "length": verdict.violation.length,
                "member_a": verdict.violation.member_a,
                "member_b": verdict.violation.member_b,
            },
        })
        lines.insert(0, f"metric condition at {lam}: {verdict.holds}")
    report = build_report(
        "check-cancellation", {"presentation": req.presentation},
        {"lambda": req.lambda_value}, records, status="decided",
    )
    return OperationResponse(status="decided", summary="\n".join(lines), report=report)


def dehn_reduce(req: DehnReduceRequest) -> OperationResponse:
    pres, closure, constants, solver = _quotient_setup(req.presentation, req.unsafe_override)
    ctx = pres.context
    word = ctx.parse_word(req.word)
    if closure is None:
        raise SpecError("dehn-reduce needs relators; this presentation has none")
    trace = solver.dehn_reduce(word)
    record = {
        "operation": "dehn-reduce",
        "initial": ctx.format_word(trace.initial),
        "conjugator": ctx.format_word(trace.conjugator),
        "core": ctx.format_word(trace.core),
        "steps": [
            {
                "rotation_offset": s.rotation_offset,
                "member_index": s.member_index,
                "removed": ctx.format_word(s.removed),
                "inserted": ctx.format_word(s.inserted),
            }
            for s in trace.steps
        ],
        "final": ctx.format_word(trace.final),
        "stuck": trace.stuck,
    }
    lines = [
        f"initial: {ctx.format_word(word)}",
        f"steps: {len(trace.steps)}",
        f"final (cyclic representative): {ctx.format_word(trace.final)}",
    ]
    report = build_report(
        "dehn-reduce", {"presentation": req.presentation},
        {"word": req.word, "unsafe_override": req.unsafe_override},
        [record], status="decided",
    )
    return OperationResponse(status="decided", summary="\n".join(lines), report=report)


def word_problem(req: WordProblemRequest) -> OperationResponse:
    pres, closure, constants, solver = _quotient_setup(req.presentation, req.unsafe_override)
    ctx = pres.context
    word = ctx.parse_word(req.word)
    trivial = solver.is_trivial(word)
    record = {
        "operation": "word-problem",
        "word": ctx.format_word(word),
        "trivial": trivial,
        "engine": "dehn" if closure is not None else "normal-form",
    }
    report = build_report(
        "word-problem", {"presentation": req.presentation},
        {"word": req.word}, [record], status="decided",
    )
    summary = f"{ctx.format_word(word)} is {'trivial' if trivial else 'nontrivial'} in the quotient"
    return OperationResponse(status="decided", summary=summary, report=report)


def _load_graph(req: TautSpectrumRequest):
    sources = [s for s in (req.graph, req.graph_text, req.presentation) if s]
    if len(sources) != 1:
        raise ParseError("give exactly one of graph, graph_text, presentation")
    if req.graph:
        kind, _, arg = req.graph.partition(":")
        if kind == "cycle":
            return cycle_graph(int(arg))
        if kind == "path":
            return path_graph(int(arg))
        raise ParseError(f"unknown graph spec {req.graph!r} (use cycle:N or path:N)")
    if req.graph_text:
        return from_edge_list(req.graph_text)
    pres, closure, constants, solver = _quotient_setup(req.presentation)
    if closure is None:
        backing = FreeProductBacking(pres.context)
    else:
        backing = QuotientBacking(pres.context, solver)
    return cayley_ball(backing, req.radius)


def taut_spectrum(req: TautSpectrumRequest) -> OperationResponse:
    graph = _load_graph(req)
    spectrum = taut_spectrum_bruteforce(graph, req.horizon, _budget(req.budget))
    unknowns = [l for l in range(3, req.horizon + 1) if spectrum.entries[l].verdict == "unknown"]
    status = "unknown" if unknowns else "decided"
    record = {"operation": "taut-spectrum", **spectrum.to_record()}
    lines = [f"spectrum (3..{req.horizon}): {spectrum.decided_in()}"]
    if unknowns:
        lines.append(f"undecided lengths: {unknowns}")
    report = build_report(
        "taut-spectrum",
        {k: v for k, v in (("graph", req.graph), ("graph_text", req.graph_text),
                           ("presentation", req.presentation)) if v},
        {"horizon": req.horizon, "radius": req.radius},
        [record], status=status, seed=req.seed, budgets=req.budget.model_dump(),
    )
    return OperationResponse(status=status, summary="\n".join(lines), report=report)


def _spectrum_from_input(inp: SpectrumInput) -> TruncatedSpectrum:
    if inp.record is not None:
        return TruncatedSpectrum.from_record(inp.record)
    if inp.values is None or inp.horizon is None:
        raise ParseError("spectrum input needs either a record or values plus horizon")
    return TruncatedSpectrum.from_set(inp.values, inp.horizon)


def spectrum_union(req: SpectrumUnionRequest) -> OperationResponse:
    left = _spectrum_from_input(req.left)
    right = _spectrum_from_input(req.right)
    union = product_spectrum(left, right)
    unknowns = [l for l in range(3, union.horizon + 1) if union.entries[l].verdict == "unknown"]
    status = "unknown" if unknowns else "decided"
    record = {"operation": "spectrum-union", "citation": "law:free-product-union",
              **union.to_record()}
    report = build_report("spectrum-union", {}, {}, [record], status=status)
    return OperationResponse(
        status=status,
        summary=f"union spectrum (3..{union.horizon}): {union.decided_in()}",
        report=report,
    )


def spectrum_bracket(req: SpectrumBracketRequest) -> OperationResponse:
    if req.presentation:
        pres, closure, constants, _ = _quotient_setup(req.presentation)
        if constants is None:
            raise SpecError("bracket intervals need a relator set (ell0 is relator-derived)")
    elif req.ell0 is not None:
        from ..cancellation import DehnConstants

        constants = DehnConstants(M=1, ell0=req.ell0, lam=Fraction(0), condition_holds=True)
    else:
        raise ParseError("give a presentation or an explicit ell0")
    lo, hi = quotient_bracket(req.length, req.direction, constants)
    citation = (
        "bracket:quotient-to-factors" if req.direction == "quotient-to-factors"
        else "bracket:factors-to-quotient"
    )
    record = {
        "operation": "spectrum-bracket",
        "length": req.length,
        "direction": req.direction,
        "interval": [lo, hi],
        "ell0": constants.ell0,
        "citation": citation,
    }
    report = build_report(
        "spectrum-bracket",
        {"presentation": req.presentation} if req.presentation else {},
        {"length": req.length, "direction": req.direction, "ell0": req.ell0},
        [record], status="decided",
    )
    return OperationResponse(
        status="decided",
        summary=f"partner window for length {req.length} ({req.direction}): [{lo}, {hi}]",
        report=report,
    )


def spectrum_equiv(req: SpectrumEquivRequest) -> OperationResponse:
    left = _spectrum_from_input(req.left)
    right = _spectrum_from_input(req.right)
    verdict = k_related(left, right, req.k)
    status = "unknown" if verdict.related == "inconclusive" else "decided"
    record = {
        "operation": "spectrum-equiv",
        "k": req.k,
        "related": verdict.related,
        "witness": verdict.witness,
        "detail": verdict.detail,
        "threshold": req.k * req.k + 2 * req.k + 2,
    }
    report = build_report(
        "spectrum-equiv", {}, {"k": req.k}, [record], status=status,
    )
    return OperationResponse(
        status=status,
        summary=f"k = {req.k}: {verdict.related}" + (
            f" (witness length {verdict.witness})" if verdict.witness else ""
        ),
        report=report,
    )


def coned_ball_handler(req: ConedBallRequest) -> OperationResponse:
    pres, closure, constants, solver = _quotient_setup(req.presentation)
    ball = coned_ball(pres.context, solver, closure, req.radius)
    records = [{
        "operation": "coned-ball",
        "quotient_complex": quotient_complex(pres.context, closure),
        **ball.to_record(),
    }]
    lines = [
        f"coset ball radius {req.radius}: {len(ball.vertex_types)} vertices, "
        f"{len(ball.edges)} edges, {len(ball.cells)} cells",
    ]
    status = "decided"
    if len(ball.cells) >= 2:
        lam = _fraction(req.lambda_value) if req.lambda_value else None
        geo = geometric_piece_ratio(ball, lam)
        records.append({
            "operation": "geometric-piece-ratio",
            "ratio": str(geo.ratio),
            "lambda": None if lam is None else str(lam),
            "holds": geo.holds,
            "witnesses": [
                {"length": w.length, "cells": [w.cell_a, w.cell_b], "vertices": list(w.vertices)}
                for w in geo.witnesses[:4]
            ],
        })
        lines.append(f"geometric piece ratio: {geo.ratio}")
        if lam is not None:
            lines.append(f"metric condition at {lam} (geometric, strict): {geo.holds}")
    elif req.lambda_value:
        lines.append("too few cells in the ball to measure overlaps")
        status = "unknown"
    report = build_report(
        "coned-ball", {"presentation": req.presentation},
        {"radius": req.radius, "lambda": req.lambda_value},
        records, status=status,
    )
    return OperationResponse(status=status, summary="\n".join(lines), report=report)


def dim_bounds(req: DimBoundsRequest) -> OperationResponse:
    profile = parse_profile(req.profile)
    records = []
    lines = []
    status = "decided"
    if profile.mode == "product":
        a, b = (profile.groups[n] for n in profile.product_factors)
        result, report_ = scp_dimensions(a, b, profile.product_hypotheses)
        eg_fin = eilenberg_ganea_verdict(result, "fin")
        eg_vc = eilenberg_ganea_verdict(result, "vc")
        records.append({"operation": "scp-dimensions", **report_.to_record(),
                        "eg_fin": eg_fin, "eg_vc": eg_vc})
        lines.append(f"quotient profile: cd_fin = {result.cd_fin.format()}, "
                     f"gd_fin = {result.gd_fin.format()}, cd_vc = {result.cd_vc.format()}, "
                     f"gd_vc = {result.gd_vc.format()}")
        for tag, iv in sorted(result.cd_ring.items()):
            lines.append(f"cd_{tag} = {iv.format()}")
        lines.append(f"Eilenberg-Ganea (fin family): {eg_fin}; (vc family): {eg_vc}")
        for bound in report_.bounds:
            lines.append("  " + bound.format())
        for w in report_.withheld:
            lines.append("  withheld: " + w)
        if eg_fin == "unknown" and eg_vc == "unknown":
            status = "unknown"
    elif profile.mode == "graph":
        spec = GraphOfGroupsSpec(
            vertices=tuple(profile.groups[v] for v in profile.graph_vertices),
            edges_finite=profile.graph_edges_finite,
        )
        report_ = graph_of_groups_bounds(spec)
        records.append({"operation": "graph-of-groups-bounds", **report_.to_record()})
        for bound in report_.bounds:
            lines.append(bound.format())
        for w in report_.withheld:
            lines.append("withheld: " + w)
        if not report_.bounds:
            status = "unknown"
    elif profile.mode == "single":
        (name, prof), = profile.groups.items()
        tightened, report_ = vcyc_from_fin(prof)
        eg_fin = eilenberg_ganea_verdict(tightened, "fin")
        eg_vc = eilenberg_ganea_verdict(tightened, "vc")
        records.append({"operation": "vcyc-from-fin", **report_.to_record(),
                        "eg_fin": eg_fin, "eg_vc": eg_vc})
        lines.append(f"profile {name}: gd_vc = {tightened.gd_vc.format()}, "
                     f"cd_vc = {tightened.cd_vc.format()}")
        lines.append(f"Eilenberg-Ganea (fin family): {eg_fin}; (vc family): {eg_vc}")
        for bound in report_.bounds:
            lines.append("  " + bound.format())
        for w in report_.withheld:
            lines.append("  withheld: " + w)
        if eg_fin == "unknown" and eg_vc == "unknown":
            status = "unknown"
    else:
        raise ParseError("dim-bounds needs a product, graph, or single-group profile")
    report = build_report(
        "dim-bounds", {"profile": req.profile}, {"mode": profile.mode},
        records, status=status,
    )
    return OperationResponse(status=status, summary="\n".join(lines), report=report)


def one_ended(req: OneEndedRequest) -> OperationResponse:
    # no solver needed here: the criteria consume the closure and the
    # metric certificate, and must work even when the solvability
    # condition for the word problem fails
    pres = parse_presentation(req.presentation)
    closure = symmetrized_closure(pres.context, pres.relators) if pres.relators else None
    profile = parse_profile(req.profile)
    ctx = pres.context
    names = ctx.names
    missing = [n for n in names if n not in profile.groups]
    if missing:
        raise ParseError(f"profile must annotate the factors {missing}")
    flags_a = profile.groups[names[0]].flags
    flags_b = profile.groups[names[1]].flags
    quotient_flags = profile.groups["G"].flags if "G" in profile.groups else None
    cert = None
    if closure is not None:
        cert = check_metric_condition(ctx, closure, Fraction(1, 6))
    torsion = relator_torsion_hypothesis(ctx, closure)
    verdict = one_ended_verdict(ctx, flags_a, flags_b, closure, cert, quotient_flags)
    status = "unknown" if verdict.kind == "unknown" else "decided"
    record = {
        "operation": "one-ended",
        "verdict": verdict.kind,
        "rule": verdict.rule,
        "reason": verdict.reason,
        "torsion_hypothesis": torsion.holds,
        "offenders": [
            f"{s.factor}.{ctx.factor(s.factor).format_element(s.element)}"
            for s in torsion.offenders[:8]
        ],
        "metric_condition_at_1_6": None if cert is None else cert.holds,
    }
    report = build_report(
        "one-ended", {"presentation": req.presentation, "profile": req.profile},
        {}, [record], status=status,
    )
    lines = [f"verdict: {verdict.kind}"]
    if verdict.rule:
        lines.append(f"rule: {verdict.rule}")
    lines.append(f"reason: {verdict.reason}")
    return OperationResponse(status=status, summary="\n".join(lines), report=report)


def corpus(req: CorpusRequest) -> OperationResponse:
    results = run_corpus(seed=req.seed, only=req.only, budget=_budget(req.budget))
    records = [
        {"operation": "corpus-check", "number": r.number, "name": r.name,
         "passed": r.passed, "details": r.details, "record": r.record}
        for r in results
    ]
    all_pass = all(r.passed for r in results)
    lines = [
        f"[{'PASS' if r.passed else 'FAIL'}] {r.number:>2} {r.name}: {r.details}"
        for r in results
    ]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    report = build_report(
        "corpus", {}, {"only": req.only}, records,
        status="decided" if all_pass else "error",
        seed=req.seed, budgets=req.budget.model_dump(),
    )
    return OperationResponse(
        status="decided" if all_pass else "error",
        summary="\n".join(lines),
        report=report,
    )
