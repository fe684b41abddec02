"""Bounded null-homotopy verdicts over finite presentations.

Three-valued by design: deciding triviality in a finite presentation is
only semi-decidable, so every answer is a checkable certificate and the
fallback is an honest Unknown.

Engines, in fixed order: free/cyclic reduction; bounded rewriting search
(each relator application is one disk-diagram cell); exhaustive search
for a permutation quotient killing the relators but not the loop; coset
enumeration as the last resort (decides both ways when it completes).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .coset_enum import todd_coxeter

Letter = tuple[str, int]
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class Budget:
    max_cells: int = 10
    max_cosets: int = 200_000
    perm_degree: int = 6
    rewrite_slack: int = 1
    max_states: int = 20_000
    max_assignments: int = 200_000

    def to_record(self) -> dict:
        return {
            "max_cells": self.max_cells,
            "max_cosets": self.max_cosets,
            "perm_degree": self.perm_degree,
            "rewrite_slack": self.rewrite_slack,
            "max_states": self.max_states,
            "max_assignments": self.max_assignments,
        }


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    involutions: frozenset[str] = frozenset()

    def inverse_letter(self, letter: Letter) -> Letter:
        gen, sign = letter
        return letter if gen in self.involutions else (gen, -sign)

    def normalize_letter(self, letter: Letter) -> Letter:
        gen, sign = letter
        return (gen, 1) if gen in self.involutions else letter

    def reduce(self, word: Iterable[Letter]) -> Word:
        out: list[Letter] = []
        for letter in word:
            letter = self.normalize_letter(letter)
            if out and out[-1] == self.inverse_letter(letter):
                out.pop()
            else:
                out.append(letter)
        return tuple(out)

    def invert(self, word: Word) -> Word:
        return tuple(self.inverse_letter(x) for x in reversed(word))

    def cyclic_reduce(self, word: Word) -> Word:
        w = list(self.reduce(word))
        while len(w) >= 2 and w[0] == self.inverse_letter(w[-1]):
            w = w[1:-1]
        return tuple(w)

    def canonical_cyclic(self, word: Word) -> Word:
        """Minimal rotation over the word and its inverse; identifies loops."""
        w = self.cyclic_reduce(word)
        if not w:
            return w
        best = None
        for cand in (w, self.invert(w)):
            n = len(cand)
            for i in range(n):
                rot = cand[i:] + cand[:i]
                if best is None or rot < best:
                    best = rot
        return best


def format_word(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(g if s > 0 else f"{g}^-1" for g, s in word)


@dataclass(frozen=True)
class HomotopyVerdict:
    kind: str  # "trivial" | "nontrivial" | "unknown"
    engine: str
    certificate: dict


def certificate_id(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return "c" + hashlib.sha256(blob.encode()).hexdigest()[:10]


# -- rewriting search ----------------------------------------------------------


def _moves(pres: Presentation, slack: int):
    """All (s, t_inv) substitutions from relator splits with |t| <= |s| + slack."""
    moves = []
    seen = set()
    for r in pres.relators:
        r = pres.cyclic_reduce(r)
        if not r:
            continue
        for base in (r, pres.invert(r)):
            n = len(base)
            for i in range(n):
                rot = base[i:] + base[:i]
                for k in range(1, n + 1):
                    s, t = rot[:k], rot[k:]
                    if len(t) > len(s) + slack:
                        continue
                    key = (s, t)
                    if key in seen:
                        continue
                    seen.add(key)
                    moves.append((s, pres.invert(t)))
    moves.sort(key=lambda m: (-len(m[0]), m[0], m[1]))
    return moves


def rewriting_search(pres: Presentation, word: Word, budget: Budget) -> Optional[list[dict]]:
    """Bounded search for a filling; returns a replayable move trace or None."""
    from collections import deque

    start = pres.canonical_cyclic(word)
    if not start:
        return []
    if not pres.relators:
        return None
    moves = _moves(pres, budget.rewrite_slack)
    max_len = len(start) + budget.rewrite_slack * budget.max_cells
    seen = {start}
    queue = deque([(start, ())])
    states = 0
    while queue:
        current, trace = queue.popleft()
        if len(trace) >= budget.max_cells:
            continue
        n = len(current)
        doubled = current + current
        for s, t_inv in moves:
            k = len(s)
            if k > n:
                continue
            for off in range(n):
                if doubled[off : off + k] != s:
                    continue
                rest = doubled[off + k : off + n]
                new = pres.canonical_cyclic(t_inv + rest)
                step = {
                    "offset": off,
                    "removed": format_word(s),
                    "inserted": format_word(t_inv),
                    "result": format_word(new),
                }
                if not new:
                    return list(trace) + [step]
                if new in seen or len(new) > max_len:
                    continue
                seen.add(new)
                states += 1
                if states > budget.max_states:
                    return None
                queue.append((new, trace + (step,)))
    return None


def replay_rewriting(pres: Presentation, word: Word, trace: list[dict]) -> bool:
    """Check a rewriting trace: each move must be a genuine relator split."""
    moves = {(s, t_inv) for s, t_inv in _moves(pres, slack=10_000)}
    current = pres.canonical_cyclic(word)
    for step in trace:
        s = _parse_word(step["removed"])
        t_inv = _parse_word(step["inserted"])
        if (s, t_inv) not in moves:
            return False
        n = len(current)
        off = step["offset"]
        doubled = current + current
        if doubled[off : off + len(s)] != s:
            return False
        current = pres.canonical_cyclic(t_inv + doubled[off + len(s) : off + n])
        if format_word(current) != step["result"]:
            return False
    return not current


def _parse_word(text: str) -> Word:
    if text == "1":
        return ()
    out = []
    for tok in text.split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


# -- permutation quotient search --------------------------------------------------


def _perm_mul(p: tuple, q: tuple) -> tuple:
    # apply p then q
    return tuple(q[p[i]] for i in range(len(p)))


def _word_image(word: Word, images: dict, degree: int) -> tuple:
    acc = tuple(range(degree))
    for gen, sign in word:
        p = images[gen]
        if sign < 0:
            inv = [0] * degree
            for i, v in enumerate(p):
                inv[v] = i
            p = tuple(inv)
        acc = _perm_mul(acc, p)
    return acc


def perm_quotient_search(pres: Presentation, word: Word, budget: Budget) -> Optional[dict]:
    """Exhaustive search for a finite permutation image that keeps the word alive.

    Generators not occurring in the relators or the word are sent to the
    identity, which keeps chord-heavy presentations tractable.
    """
    from itertools import permutations

    word = pres.reduce(word)
    active = sorted({g for g, _ in word} | {g for r in pres.relators for g, _ in r})
    if not active:
        return None
    relevant = [pres.reduce(r) for r in pres.relators]
    relevant = [r for r in relevant if r]
    relevant.sort(key=len)
    attempts = 0
    for degree in range(2, budget.perm_degree + 1):
        identity = tuple(range(degree))
        pool = list(permutations(range(degree)))
        involution_pool = [p for p in pool if _perm_mul(p, p) == identity]

        def extend(idx: int, images: dict) -> Optional[dict]:
            nonlocal attempts
            if idx == len(active):
                if _word_image(word, images, degree) == identity:
                    return None
                return dict(images)
            gen = active[idx]
            candidates = involution_pool if gen in pres.involutions else pool
            for p in candidates:
                attempts += 1
                if attempts > budget.max_assignments:
                    raise _BudgetExhausted
                images[gen] = p
                assigned = set(active[: idx + 1])
                ok = all(
                    _word_image(r, images, degree) == identity
                    for r in relevant
                    if {g for g, _ in r} <= assigned and any(g == gen for g, _ in r)
                )
                if ok:
                    found = extend(idx + 1, images)
                    if found is not None:
                        return found
            del images[gen]
            return None

        try:
            found = extend(0, {})
        except _BudgetExhausted:
            return None
        if found is not None:
            return {
                "degree": degree,
                "images": {g: list(p) for g, p in sorted(found.items())},
                "fixed_identity": sorted(set(pres.generators) - set(active)),
            }
    return None


class _BudgetExhausted(Exception):
    pass


def verify_perm_certificate(pres: Presentation, word: Word, cert: dict) -> bool:
    degree = cert["degree"]
    identity = tuple(range(degree))
    images = {g: tuple(p) for g, p in cert["images"].items()}
    for g in pres.generators:
        images.setdefault(g, identity)
    for g in pres.involutions:
        if g in images and _perm_mul(images[g], images[g]) != identity:
            return False
    if any(_word_image(r, images, degree) != identity for r in pres.relators):
        return False
    return _word_image(pres.reduce(word), images, degree) != identity


# -- coset enumeration bridge -------------------------------------------------------


def coset_verdict(pres: Presentation, word: Word, budget: Budget) -> Optional[HomotopyVerdict]:
    gen_index = {g: i + 1 for i, g in enumerate(pres.generators)}

    def encode(w: Word) -> list[int]:
        return [gen_index[g] * (1 if s > 0 else -1) for g, s in w]

    relators = [encode(r) for r in pres.relators]
    relators += [[gen_index[g], gen_index[g]] for g in sorted(pres.involutions)]
    table = todd_coxeter(len(pres.generators), relators, max_cosets=budget.max_cosets)
    if table is None:
        return None
    trivial = table.trace(0, encode(pres.reduce(word))) == 0
    cert = {"engine": "coset-enumeration", "group_order": table.n_cosets}
    return HomotopyVerdict(
        kind="trivial" if trivial else "nontrivial",
        engine="coset-enumeration",
        certificate=cert,
    )


# -- the combined verdict --------------------------------------------------------------


def nullhomotopy_verdict(pres: Presentation, word: Word, budget: Optional[Budget] = None) -> HomotopyVerdict:
    budget = budget or Budget()
    if budget.max_cells < 0 or budget.perm_degree < 1:
        raise ValueError("budget misconfiguration")
    reduced = pres.cyclic_reduce(word)
    if not reduced:
        return HomotopyVerdict("trivial", "free-reduction", {"engine": "free-reduction"})
    trace = rewriting_search(pres, reduced, budget)
    if trace is not None:
        return HomotopyVerdict(
            "trivial", "rewriting",
            {"engine": "rewriting", "cells": len(trace), "trace": trace},
        )
    cert = perm_quotient_search(pres, reduced, budget)
    if cert is not None:
        cert = {"engine": "perm-quotient", **cert}
        return HomotopyVerdict("nontrivial", "perm-quotient", cert)
    tc = coset_verdict(pres, reduced, budget)
    if tc is not None:
        return tc
    return HomotopyVerdict("unknown", "budget-exhausted", {"engine": "none"})
