"""Symmetrized relator sets, piece inventories, and metric small cancellation.

Piece matching rule (documented because boundary conventions vary): a
piece is a maximal common prefix of two *distinct* members of the
symmetrized closure.  Whole syllables match only by equality.  At the
first position where the two members carry distinct elements of the
same factor, the match extends by exactly one more position iff the two
elements admit a common proper left divisor y (y, y^-1 s and y^-1 t all
nontrivial), which in a black-box group happens iff some element lies
outside {1, s, t}: always for a free factor, and iff the factor has
order >= 4 when finite.  A whole syllable never matches a proper part
of a syllable on one side only.  All ratio arithmetic is exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .words import (
    FREE,
    Context,
    NormalForm,
    SpecError,
    Syllable,
    element_key,
    word_key,
)


@dataclass(frozen=True)
class SymmetrizedSet:
    """Closure of the user relators under cyclic permutation and inversion.

    Members are weakly cyclically reduced; rotations of a weak word
    coalesce its boundary syllables, so members of one cyclic class may
    differ in syllable count.  Members are kept in a deterministic order.
    """

    members: tuple[NormalForm, ...]
    origin: tuple[NormalForm, ...]

    def __len__(self) -> int:
        return len(self.members)


def symmetrized_closure(ctx: Context, relators: Sequence[NormalForm]) -> SymmetrizedSet:
    if not relators:
        raise SpecError("symmetrized sets are nonempty; no relators given")
    seeds = []
    for r in relators:
        core, _ = ctx.cyclically_reduce(r)
        if core.is_identity:
            raise SpecError("identity relator rejected")
        seeds.append(core)
    seen: set[NormalForm] = set()
    queue = deque(seeds)
    while queue:
        w = queue.popleft()
        if w in seen:
            continue
        seen.add(w)
        queue.append(ctx.inv(w))
        queue.append(ctx.rotate(w, 1))
    members = tuple(sorted(seen, key=word_key))
    return SymmetrizedSet(members=members, origin=tuple(relators))


@dataclass(frozen=True)
class PieceWitness:
    length: int
    shared_prefix: NormalForm  # the aligned whole-syllable part
    partial: bool              # True when the count includes a shared part of the next syllable pair
    member_a: int
    member_b: int


@dataclass(frozen=True)
class PieceReport:
    max_piece_syllables: int
    min_relator_syllables: int
    optimal_lambda: Fraction
    witnesses: tuple[PieceWitness, ...]  # pairs achieving optimal_lambda


def _admits_common_proper_divisor(ctx: Context, s: Syllable, t: Syllable) -> bool:
    spec = ctx.factor(s.factor)
    if spec.kind == FREE:
        return True
    return len(spec.element_names) >= 4


def piece_prefix_length(ctx: Context, u: NormalForm, v: NormalForm) -> tuple[int, bool]:
    """Longest piece shared by distinct members u, v as a common prefix.

    Returns (syllable count, partial_flag).
    """
    us, vs = u.syllables, v.syllables
    n = min(len(us), len(vs))
    k = 0
    while k < n and us[k] == vs[k]:
        k += 1
    if k < n:
        a, b = us[k], vs[k]
        if a.factor == b.factor and _admits_common_proper_divisor(ctx, a, b):
            return k + 1, True
    return k, False


def pieces(ctx: Context, relator_set: SymmetrizedSet) -> PieceReport:
    members = relator_set.members
    best_len = 0
    best_ratio = Fraction(0)
    ratio_hits: list[PieceWitness] = []
    # straightforward ordered-pair scan; the oracle in the test suite
    # re-implements this rule independently
    for i, u in enumerate(members):
        for j, v in enumerate(members):
            if i == j:
                continue
            k, partial = piece_prefix_length(ctx, u, v)
            if k == 0:
                continue
            best_len = max(best_len, k)
            ratio = Fraction(k, len(u))
            wit = PieceWitness(
                length=k,
                shared_prefix=NormalForm(u.syllables[: k - 1 if partial else k]),
                partial=partial,
                member_a=i,
                member_b=j,
            )
            if ratio > best_ratio:
                best_ratio = ratio
                ratio_hits = [wit]
            elif ratio == best_ratio and best_ratio > 0:
                ratio_hits.append(wit)
    return PieceReport(
        max_piece_syllables=best_len,
        min_relator_syllables=min(len(m) for m in members),
        optimal_lambda=best_ratio,
        witnesses=tuple(ratio_hits),
    )


@dataclass(frozen=True)
class MetricConditionReport:
    holds: bool
    lambda_value: Fraction
    optimal_lambda: Fraction
    violation: Optional[PieceWitness]


def check_metric_condition(
    ctx: Context, relator_set: SymmetrizedSet, lam: Fraction
) -> MetricConditionReport:
    """C'(lam): every piece b inside a member r has |b| < lam * |r| (strict)."""
    lam = Fraction(lam)
    if not (0 < lam <= 1):
        raise SpecError(f"lambda must lie in (0, 1], got {lam}")
    report = pieces(ctx, relator_set)
    holds = report.optimal_lambda < lam
    violation = None if holds else (report.witnesses[0] if report.witnesses else None)
    return MetricConditionReport(
        holds=holds,
        lambda_value=lam,
        optimal_lambda=report.optimal_lambda,
        violation=violation,
    )


def validate_seven_syllables(relator_set: SymmetrizedSet) -> bool:
    """Every member must have at least seven syllables."""
    return all(len(m) >= 7 for m in relator_set.members)


@dataclass(frozen=True)
class DehnConstants:
    M: int
    ell0: int
    lam: Fraction
    condition_holds: bool


def dehn_constants(ctx: Context, relator_set: SymmetrizedSet) -> DehnConstants:
    """M = longest geodesic syllable over the members; ell0 = M * max |r|.

    condition_holds is the (non-strict) solvability test 1 >= 3*lambda*(M+1)
    evaluated at the optimal lambda.
    """
    m_const = 1
    max_len = 0
    for w in relator_set.members:
        max_len = max(max_len, len(w))
        for s in w.syllables:
            m_const = max(m_const, ctx.factor(s.factor).geodesic_length(s.element))
    lam = pieces(ctx, relator_set).optimal_lambda
    return DehnConstants(
        M=m_const,
        ell0=m_const * max_len,
        lam=lam,
        condition_holds=Fraction(1) >= 3 * lam * (m_const + 1),
    )


def augment_generating_sets(ctx: Context, relator_set: SymmetrizedSet) -> Context:
    """Add every relator syllable (and inverse) to its factor's generating set."""
    extra: dict[str, set] = {name: set() for name in ctx.names}
    for w in relator_set.members:
        for s in w.syllables:
            spec = ctx.factor(s.factor)
            extra[s.factor].add(s.element)
            extra[s.factor].add(spec.inv(s.element))
    new_specs = []
    for name in ctx.names:
        spec = ctx.factor(name)
        gens = set(spec.generating_set) | extra[name]
        gens.discard(spec.identity())
        new_specs.append(replace(spec, generating_set=tuple(sorted(gens, key=element_key))))
    return Context(new_specs[0], new_specs[1])
