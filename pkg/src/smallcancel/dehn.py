"""Greendlinger-style rewriting and the word problem in (A*B)/<<R>>.

A step locates a cyclic subword s of w that is a syllable-aligned prefix
of a member r = s t of the symmetrized set with |s| > (1 - 3*lam_use)|r|
in syllables, where lam_use = 1/(3(M+1)), and replaces s by t^-1.  Under
the solvability condition 1 >= 3*lambda*(M+1) every step strictly drops
the generator length, and for C'(lambda <= 1/6) sets the procedure is a
complete triviality test on cyclic words.  At the exact boundary
lambda* = 1/(3(M+1)) completeness is outside the cited sufficient
condition; the solver still runs there since the non-strict flag holds.

Because syllables are canonical factor elements, every word handled here
is automatically geodesic per syllable; no re-geodesication pass is
needed between steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cancellation import DehnConstants, SymmetrizedSet, dehn_constants
from .words import Context, NormalForm, SpecError, Syllable


class DehnConditionError(SpecError):
    """The solvability condition fails and no unsafe override was given."""


@dataclass(frozen=True)
class ReductionStep:
    rotation_offset: int
    member_index: int
    removed: NormalForm
    inserted: NormalForm


@dataclass(frozen=True)
class ReductionTrace:
    initial: NormalForm
    conjugator: NormalForm
    core: NormalForm
    steps: tuple[ReductionStep, ...]
    final: NormalForm
    stuck: bool = False  # only reachable with the unsafe override


@dataclass(frozen=True)
class Membership:
    kind: str  # "in" | "not_in" | "unknown"
    element: Optional[object] = None
    reason: str = ""


class FreeProductWordProblem:
    """Word problem engine for A*B with no relators (normal forms decide)."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.relators: Optional[SymmetrizedSet] = None

    def is_trivial(self, w: NormalForm) -> bool:
        return w.is_identity

    def reduce_linear(self, w: NormalForm) -> NormalForm:
        return w

    def factor_membership(self, w: NormalForm, factor_name: str) -> Membership:
        spec = self.ctx.factor(factor_name)
        if w.is_identity:
            return Membership("in", spec.identity(), "identity")
        if len(w) == 1 and w.syllables[0].factor == factor_name:
            return Membership("in", w.syllables[0].element, "single syllable")
        return Membership("not_in", None, "normal form leaves the factor")


class DehnSolver:
    """Shared read-only engine for one symmetrized set; safe to reuse."""

    def __init__(
        self,
        ctx: Context,
        relators: SymmetrizedSet,
        constants: Optional[DehnConstants] = None,
        unsafe_override: bool = False,
    ):
        self.ctx = ctx
        self.relators = relators
        self.constants = constants if constants is not None else dehn_constants(ctx, relators)
        if not self.constants.condition_holds and not unsafe_override:
            raise DehnConditionError(
                "1 >= 3*lambda*(M+1) fails "
                f"(lambda*={self.constants.lam}, M={self.constants.M}); "
                "pass unsafe_override=True to experiment anyway"
            )
        self.unsafe = unsafe_override
        self.lam_use = Fraction(1, 3 * (self.constants.M + 1))
        self.members = relators.members
        # subword lookup: first syllable -> member indices, plus per-member
        # majority thresholds (in syllables, exact)
        self.index: dict[Syllable, list[int]] = {}
        self.threshold: list[Fraction] = []
        for i, m in enumerate(self.members):
            self.index.setdefault(m.syllables[0], []).append(i)
            self.threshold.append((1 - 3 * self.lam_use) * len(m))

    # -- single step ---------------------------------------------------------

    def _best_step(self, sylls: tuple[Syllable, ...], cyclic: bool):
        """(match length, offset, member index) of the best qualifying step.

        Longest match wins, then smallest rotation offset, then member order.
        """
        n = len(sylls)
        if n == 0:
            return None
        doubled = sylls + sylls
        best = None
        for off in range(n):
            for mid in self.index.get(doubled[off], ()):
                member = self.members[mid].syllables
                limit = min(len(member), n if cyclic else n - off)
                k = 0
                while k < limit and doubled[off + k] == member[k]:
                    k += 1
                if k > self.threshold[mid]:
                    cand = (-k, off, mid)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            return None
        return (-best[0], best[1], best[2])

    def _apply_step(
        self, sylls: tuple[Syllable, ...], match, cyclic: bool
    ) -> tuple[tuple[Syllable, ...], ReductionStep]:
        k, off, mid = match
        n = len(sylls)
        member = self.members[mid]
        removed = NormalForm(member.syllables[:k])
        inserted = self.ctx.inv(NormalForm(member.syllables[k:]))
        if cyclic:
            doubled = sylls + sylls
            rest = doubled[off + k : off + n]
            new_word = self.ctx.mul(inserted, NormalForm(rest))
        else:
            new_word = self.ctx.mul(
                NormalForm(sylls[:off]), inserted, NormalForm(sylls[off + k :])
            )
        step = ReductionStep(rotation_offset=off, member_index=mid, removed=removed, inserted=inserted)
        return new_word.syllables, step

    # -- reduction loops -------------------------------------------------------

    def greendlinger_step(self, w: NormalForm) -> Optional[NormalForm]:
        """One majority replacement on the cyclic word, or None.

        The result is strictly shorter in generator length; it represents
        a conjugate of w times a relator, so triviality is preserved.
        """
        sylls = self.ctx.strong_cyclic_core(w).syllables
        match = self._best_step(sylls, cyclic=True)
        if match is None:
            return None
        new_sylls, _ = self._apply_step(sylls, match, cyclic=True)
        return self.ctx.strong_cyclic_core(NormalForm(new_sylls))

    def dehn_reduce(self, w: NormalForm) -> ReductionTrace:
        """Reduce the cyclic word of w to a fixed point."""
        core, conj = self.ctx.cyclically_reduce(w)
        sylls = self.ctx.strong_cyclic_core(core).syllables
        steps: list[ReductionStep] = []
        stuck = False
        prev_len = self.ctx.generator_length(NormalForm(sylls))
        while True:
            match = self._best_step(sylls, cyclic=True)
            if match is None:
                break
            sylls, step = self._apply_step(sylls, match, cyclic=True)
            sylls = self.ctx.strong_cyclic_core(NormalForm(sylls)).syllables
            steps.append(step)
            new_len = self.ctx.generator_length(NormalForm(sylls))
            if new_len >= prev_len:
                if self.unsafe:
                    stuck = True
                    break
                raise AssertionError("generator length failed to drop; constants are inconsistent")
            prev_len = new_len
        return ReductionTrace(
            initial=w, conjugator=conj, core=core,
            steps=tuple(steps), final=NormalForm(sylls), stuck=stuck,
        )

    def reduce_linear(self, w: NormalForm) -> NormalForm:
        """Element-preserving reduction: steps never wrap the word end."""
        sylls = w.syllables
        prev_len = self.ctx.generator_length(w)
        while True:
            match = self._best_step(sylls, cyclic=False)
            if match is None:
                return NormalForm(sylls)
            sylls, _ = self._apply_step(sylls, match, cyclic=False)
            new_len = self.ctx.generator_length(NormalForm(sylls))
            if new_len >= prev_len:
                if self.unsafe:
                    return NormalForm(sylls)
                raise AssertionError("generator length failed to drop; constants are inconsistent")
            prev_len = new_len

    def is_trivial(self, w: NormalForm) -> bool:
        """Complete for C'(1/6) sets satisfying the solvability condition."""
        return self.dehn_reduce(w).final.is_identity

    # -- coset membership -------------------------------------------------------

    def factor_membership(
        self, w: NormalForm, factor_name: str, free_search_bound: int = 4
    ) -> Membership:
        """Is w in the image of the named factor?

        Finite factors are decided exactly (exhausting a ranges over the
        factor).  Free factors get a bounded search and then Unknown: the
        not-in direction would need an argument beyond the implemented
        sufficient conditions.
        """
        spec = self.ctx.factor(factor_name)
        if self.is_trivial(w):
            return Membership("in", spec.identity(), "trivial in the quotient")
        reduced = self.reduce_linear(w)
        if len(reduced) == 1:
            s = reduced.syllables[0]
            if s.factor == factor_name:
                return Membership("in", s.element, "linear reduction to a single syllable")
            return Membership("not_in", None, "reduces into the other factor")
        if spec.kind == "finite":
            for a in spec.elements():
                if spec.is_identity(a):
                    continue
                cand = NormalForm((Syllable(factor_name, a),))
                if self.is_trivial(self.ctx.mul(self.ctx.inv(cand), w)):
                    return Membership("in", a, "exhaustive factor search")
            return Membership("not_in", None, "no factor element matches (exhaustive)")
        for length in range(1, free_search_bound + 1):
            for a in _free_elements_of_length(spec, length):
                cand = NormalForm((Syllable(factor_name, a),))
                if self.is_trivial(self.ctx.mul(self.ctx.inv(cand), w)):
                    return Membership("in", a, "bounded free-factor search")
        return Membership("unknown", None, "free factor: bounded search inconclusive")


def _free_elements_of_length(spec, length: int):
    rank = len(spec.letters)
    words: list[tuple[int, ...]] = [()]
    for _ in range(length):
        nxt = []
        for w in words:
            for x in range(1, rank + 1):
                for v in (x, -x):
                    if w and w[-1] == -v:
                        continue
                    nxt.append(w + (v,))
        words = nxt
    return words


def replay_trace(ctx: Context, solver: DehnSolver, trace: ReductionTrace) -> bool:
    """Re-derive the trace as explicit relator algebra in A*B.

    Each step replaces a subword s (a prefix of member r = s t) by t^-1;
    the old and new cyclic words must differ by conjugates of relators.
    This check multiplies everything out in the free product and never
    runs the solver's own search, so it is an independent soundness audit.
    """
    current = solver.ctx.strong_cyclic_core(trace.core)
    for step in trace.steps:
        n = len(current)
        doubled = current.syllables + current.syllables
        rotated = NormalForm(doubled[step.rotation_offset : step.rotation_offset + n])
        member = solver.members[step.member_index]
        k = len(step.removed)
        if rotated.syllables[:k] != member.syllables[:k]:
            return False
        new_word = ctx.mul(step.inserted, NormalForm(rotated.syllables[k:]))
        # rotated = member * new_word in A*B, so the images in G agree
        if ctx.mul(member, new_word) != rotated:
            return False
        current = ctx.strong_cyclic_core(new_word)
    return current == ctx.strong_cyclic_core(trace.final)
