"""One-endedness criteria for small cancellation products.

The tree action is modelled by its two observables only: which factor's
fixed vertex the moving point currently points toward, and how many
strict distance increases have accumulated.  Each infinite-order
syllable flips the pointing state and pushes the point farther out, so a
nonempty all-infinite-order normal form can never fix the midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .cancellation import MetricConditionReport, SymmetrizedSet
from .dims import Flags
from .words import Context, NormalForm, Syllable


@dataclass(frozen=True)
class PingPongState:
    points_to: str  # factor name or "neither"
    depth: int


@dataclass(frozen=True)
class PingPongResult:
    kind: str  # "moved" | "fixed" | "inconclusive"
    trace: tuple[PingPongState, ...] = ()
    offender: Optional[Syllable] = None


def ping_pong_trace(ctx: Context, w: NormalForm) -> PingPongResult:
    """Apply syllables right to left from the midpoint state."""
    if w.is_identity:
        return PingPongResult(kind="fixed", trace=(PingPongState("neither", 0),))
    states = [PingPongState("neither", 0)]
    for s in reversed(w.syllables):
        spec = ctx.factor(s.factor)
        if spec.has_finite_order(s.element):
            return PingPongResult(kind="inconclusive", trace=tuple(states), offender=s)
        states.append(PingPongState(points_to=s.factor, depth=states[-1].depth + 1))
    return PingPongResult(kind="moved", trace=tuple(states))


@dataclass(frozen=True)
class TorsionHypothesisReport:
    holds: bool
    offenders: tuple[Syllable, ...]
    vacuous: bool = False


def relator_torsion_hypothesis(ctx: Context, relators: Optional[SymmetrizedSet]) -> TorsionHypothesisReport:
    """Every syllable of every member must have infinite order in its factor."""
    if relators is None or not relators.members:
        return TorsionHypothesisReport(holds=True, offenders=(), vacuous=True)
    offenders = []
    seen = set()
    for m in relators.members:
        for s in m.syllables:
            if ctx.factor(s.factor).has_finite_order(s.element) and s not in seen:
                seen.add(s)
                offenders.append(s)
    return TorsionHypothesisReport(holds=not offenders, offenders=tuple(offenders))


@dataclass(frozen=True)
class OneEndedVerdict:
    kind: str  # "one_ended" | "not_applicable" | "unknown"
    rule: str = ""
    reason: str = ""


def one_ended_verdict(
    ctx: Context,
    flags_a: Flags,
    flags_b: Flags,
    relators: Optional[SymmetrizedSet],
    cancellation_cert: Optional[MetricConditionReport],
    quotient_flags: Optional[Flags] = None,
) -> OneEndedVerdict:
    """Sufficient conditions only; Unknown is never upgraded.

    Rule 1 (product rule): both factors one-ended, metric condition at
    1/6 certified, and no relator syllable has finite order.
    Rule 2 (two-generator rule): the quotient is torsion-free,
    2-generated, and not free.  Quotient-level flags are user-asserted.
    """
    certified = cancellation_cert is not None and cancellation_cert.holds
    factors_one_ended = bool(flags_a.one_ended) and bool(flags_b.one_ended)
    if factors_one_ended and certified:
        torsion = relator_torsion_hypothesis(ctx, relators)
        if torsion.holds:
            return OneEndedVerdict(
                kind="one_ended",
                rule="one-ended:product-with-infinite-order-relators",
                reason="both factors one-ended, metric condition certified, "
                       "relator syllables all of infinite order",
            )
        offender = torsion.offenders[0]
        return OneEndedVerdict(
            kind="unknown",
            rule="one-ended:product-with-infinite-order-relators",
            reason=(
                "relator syllable "
                f"{offender.factor}.{ctx.factor(offender.factor).format_element(offender.element)} "
                "has finite order; the product criterion is silent in this case"
            ),
        )
    if quotient_flags is not None:
        if (
            quotient_flags.torsion_free
            and quotient_flags.two_generated
            and quotient_flags.free is False
        ):
            return OneEndedVerdict(
                kind="one_ended",
                rule="one-ended:two-generated-torsion-free-nonfree",
                reason="torsion-free 2-generated groups are free or one-ended",
            )
    missing = []
    if not factors_one_ended:
        missing.append("factor one-endedness not asserted for both factors")
    if not certified:
        missing.append("metric condition at 1/6 not certified")
    if quotient_flags is None or not (
        quotient_flags.torsion_free and quotient_flags.two_generated
    ):
        missing.append("quotient not asserted torsion-free and 2-generated")
    return OneEndedVerdict(
        kind="not_applicable",
        reason="; ".join(missing),
    )
