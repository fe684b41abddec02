"""Coset enumeration over a finite presentation (HLT with row filling).

Generators are 1-based; a relator is a sequence of signed generator
indices.  Enumeration over the trivial subgroup yields the regular
permutation representation when the presented group is finite and the
coset budget suffices; otherwise the run reports failure instead of an
answer, so callers can only ever treat completion as evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

Word = Sequence[int]


@dataclass
class CosetTable:
    n_gens: int
    n_cosets: int
    action: list[list[int]]  # action[g-1][c] = c * g, a permutation per generator

    def trace(self, coset: int, word: Word) -> int:
        c = coset
        for x in word:
            if x > 0:
                c = self.action[x - 1][c]
            else:
                c = self.action[-x - 1].index(c)
        return c

    def word_is_identity(self, word: Word) -> bool:
        return all(self.trace(c, word) == c for c in range(self.n_cosets))


def todd_coxeter(
    n_gens: int,
    relators: Sequence[Word],
    subgroup: Sequence[Word] = (),
    max_cosets: int = 200_000,
) -> Optional[CosetTable]:
    """Enumerate cosets of <subgroup> in <gens | relators>; None if over budget."""
    ncols = 2 * n_gens

    def col(x: int) -> int:
        return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1

    labels: list[int] = []
    rows: list[list[int]] = []

    def new_coset() -> int:
        labels.append(len(labels))
        rows.append([-1] * ncols)
        return len(labels) - 1

    def find(c: int) -> int:
        root = c
        while labels[root] != root:
            root = labels[root]
        while labels[c] != root:
            labels[c], c = root, labels[c]
        return root

    def unify(a: int, b: int) -> None:
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            x, y = find(x), find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            labels[y] = x
            for d in range(ncols):
                ny = rows[y][d]
                if ny == -1:
                    continue
                nx = rows[x][d]
                if nx == -1:
                    rows[x][d] = ny
                else:
                    queue.append((nx, ny))

    def follow(c: int, d: int) -> int:
        c = find(c)
        if rows[c][d] == -1:
            nc = new_coset()
            rows[c][d] = nc
            rows[nc][d ^ 1] = c
        return find(rows[c][d])

    start = new_coset()
    for word in subgroup:
        c = start
        for x in word:
            c = follow(c, col(x))
        unify(c, find(start))

    cursor = 0
    while cursor < len(rows):
        if len(rows) > max_cosets:
            return None
        if labels[cursor] != cursor:
            cursor += 1
            continue
        # fill the row first so the finished table is complete
        for d in range(ncols):
            follow(cursor, d)
        for word in relators:
            c = cursor
            for x in word:
                c = follow(c, col(x))
            unify(c, find(cursor))
            if labels[cursor] != cursor:
                break  # this coset died in a coincidence
        cursor += 1

    live = [c for c in range(len(rows)) if labels[c] == c]
    renumber = {c: i for i, c in enumerate(live)}
    action = []
    for g in range(1, n_gens + 1):
        perm = []
        for c in live:
            target = rows[c][col(g)]
            if target == -1:
                return None
            perm.append(renumber[find(target)])
        action.append(perm)
    return CosetTable(n_gens=n_gens, n_cosets=len(live), action=action)
