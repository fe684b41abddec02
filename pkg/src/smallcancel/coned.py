"""Coned-off Cayley complex balls and the geometric piece ratio.

Vertices are cosets gA and gB, one edge {gA, gB} per group element, and
2-cells are attached along the loops traced by relator conjugates.  Both
factors must be finite: a free factor gives its cosets infinite degree
in the coset graph, so no finite ball exists past radius one.

The complex is where the algebraic and geometric small cancellation
measurements part ways: neighbouring cells can share longer boundary
paths than the relators share prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cancellation import SymmetrizedSet
from .dehn import DehnSolver, FreeProductWordProblem, Membership
from .words import FINITE, Context, NormalForm, SpecError, Syllable, word_key


class ConedBallError(SpecError):
    """Raised when coset identification cannot be decided."""


Engine = Union[DehnSolver, FreeProductWordProblem]


@dataclass(frozen=True)
class Cell:
    boundary: tuple[int, ...]  # vertex ids along the relator loop
    relator_class: int         # index into the cyclic-class representatives


@dataclass
class ConedComplex:
    ctx: Context
    vertex_types: list[str]       # factor name per vertex
    vertex_reps: list[NormalForm]  # coset representative per vertex
    edges: set[tuple[int, int]]
    cells: list[Cell]
    radius: int
    class_reps: list[NormalForm]

    def validate_bipartite(self) -> None:
        for u, v in self.edges:
            if self.vertex_types[u] == self.vertex_types[v]:
                raise SpecError("coset graph lost bipartiteness")

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertex_types) - 1 and not self.cells

    def to_record(self) -> dict:
        return {
            "radius": self.radius,
            "vertices": [
                {"id": i, "type": self.vertex_types[i], "rep": self.ctx.format_word(self.vertex_reps[i])}
                for i in range(len(self.vertex_types))
            ],
            "edges": sorted([list(e) for e in self.edges]),
            "cells": [
                {"boundary": list(c.boundary), "relator_class": c.relator_class}
                for c in self.cells
            ],
        }


def relator_classes(ctx: Context, relators: SymmetrizedSet) -> list[NormalForm]:
    """One representative per cyclic class up to inversion."""
    seen: dict = {}
    for m in relators.members:
        orbit = []
        for w in (m, ctx.inv(m)):
            for i in range(len(w)):
                orbit.append(ctx.rotate(w, i))
        key = min(word_key(w) for w in orbit)
        if key not in seen:
            seen[key] = min(orbit, key=word_key)
    return [seen[k] for k in sorted(seen)]


def quotient_complex(ctx: Context, relators: Optional[SymmetrizedSet]) -> dict:
    """Vertex/edge/cell counts of the compact quotient: one cell per class."""
    classes = relator_classes(ctx, relators) if relators is not None else []
    return {
        "vertices": 2,
        "edges": 1,
        "cells": [{"relator_class": i, "boundary_length": len(ctx.strong_cyclic_core(r))}
                  for i, r in enumerate(classes)],
    }


def _loop_track(ctx: Context, relator: NormalForm) -> list[tuple[str, NormalForm]]:
    """Vertex cosets visited by the relator loop from the base edge.

    After reading the prefix p_i, the loop sits at the coset p_i X where
    X is the factor of the next syllable.
    """
    sylls = ctx.strong_cyclic_core(relator).syllables
    track = []
    prefix = NormalForm()
    for i, s in enumerate(sylls):
        track.append((s.factor, prefix))
        prefix = ctx.mul(prefix, NormalForm((s,)))
    return track


def coned_ball(ctx: Context, engine: Engine, relators: Optional[SymmetrizedSet], radius: int) -> ConedComplex:
    """BFS ball of the coset graph with fully contained relator cells."""
    for name in ctx.names:
        if ctx.factor(name).kind != FINITE:
            raise SpecError("coned balls need finite factors (coset degree is the factor order)")
    if radius < 0:
        raise SpecError("radius must be nonnegative")

    a_name, b_name = ctx.names
    vertex_types: list[str] = [a_name, b_name]
    vertex_reps: list[NormalForm] = [NormalForm(), NormalForm()]
    edges: set[tuple[int, int]] = {(0, 1)}
    # nbr[v][element key] = (neighbour id, cocycle element of the neighbour's factor)
    nbr: dict[int, dict] = {}

    def membership(w: NormalForm, fname: str) -> Membership:
        m = engine.factor_membership(w, fname)
        if m.kind == "unknown":
            raise ConedBallError(
                f"cannot decide coset equality for {ctx.format_word(w)} in {fname}: {m.reason}"
            )
        return m

    def locate(fname: str, g: NormalForm, create: bool) -> Optional[tuple[int, object]]:
        """Vertex id of the coset g<fname> plus the offset h0^-1 g."""
        for vid in range(len(vertex_types)):
            if vertex_types[vid] != fname:
                continue
            m = membership(ctx.mul(ctx.inv(vertex_reps[vid]), g), fname)
            if m.kind == "in":
                return vid, m.element
        if not create:
            return None
        vertex_types.append(fname)
        vertex_reps.append(g)
        return len(vertex_types) - 1, ctx.factor(fname).identity()

    depth = {0: 0, 1: 0}
    frontier = [0, 1]
    for d in range(radius + 1):
        nxt = []
        for vid in frontier:
            fname = vertex_types[vid]
            other = ctx.other(fname)
            spec = ctx.factor(fname)
            table: dict = {}
            for x in spec.elements():
                if spec.is_identity(x):
                    g = vertex_reps[vid]
                else:
                    g = ctx.mul(vertex_reps[vid], NormalForm((Syllable(fname, x),)))
                before = len(vertex_types)
                found = locate(other, g, create=(d < radius))
                if found is None:
                    continue
                wid, cocycle = found
                table[x] = (wid, cocycle)
                if wid >= before:
                    depth[wid] = d + 1
                    nxt.append(wid)
                edges.add((min(vid, wid), max(vid, wid)))
            nbr[vid] = table
        frontier = nxt

    classes = relator_classes(ctx, relators) if relators is not None else []
    cells: list[Cell] = []
    seen_cells: set = set()
    for ci, rel in enumerate(classes):
        track = _loop_track(ctx, rel)
        if not track:
            continue
        start_factor = track[0][0]
        sylls = ctx.strong_cyclic_core(rel).syllables
        for vid in range(len(vertex_types)):
            if vertex_types[vid] != start_factor:
                continue
            spec = ctx.factor(start_factor)
            for delta in spec.elements():
                boundary = _trace_cell(ctx, nbr, vertex_types, vid, delta, sylls)
                if boundary is None:
                    continue
                key = _cell_key(boundary)
                if key not in seen_cells:
                    seen_cells.add(key)
                    cells.append(Cell(boundary=boundary, relator_class=ci))
    complex_ = ConedComplex(
        ctx=ctx, vertex_types=vertex_types, vertex_reps=vertex_reps,
        edges=edges, cells=cells, radius=radius, class_reps=classes,
    )
    complex_.validate_bipartite()
    return complex_


def _trace_cell(ctx, nbr, vertex_types, start_vid, delta, sylls):
    """Walk the relator loop through stored neighbour tables; None if it leaves the ball."""
    vid = start_vid
    offset = delta
    boundary = [start_vid]
    for s in sylls:
        spec = ctx.factor(vertex_types[vid])
        if s.factor != vertex_types[vid]:
            return None  # alternation mismatch: cannot happen for strong cores
        x = spec.mul(offset, s.element)
        table = nbr.get(vid)
        if table is None or x not in table:
            return None
        vid, offset = table[x]
        boundary.append(vid)
    if vid != start_vid:
        return None
    # closing offset must land back in the same coset translate? the cell is
    # a closed loop regardless; the boundary list keeps the traced order
    return tuple(boundary[:-1])


def _cell_key(boundary: tuple[int, ...]):
    cands = []
    for base in (boundary, tuple(reversed(boundary))):
        n = len(base)
        for i in range(n):
            cands.append(base[i:] + base[:i])
    return min(cands)


@dataclass(frozen=True)
class SharedPath:
    length: int
    cell_a: int
    cell_b: int
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class GeometricReport:
    ratio: Fraction
    witnesses: tuple[SharedPath, ...]
    lambda_value: Optional[Fraction] = None
    holds: Optional[bool] = None


def geometric_piece_ratio(complex_: ConedComplex, lam: Optional[Fraction] = None) -> GeometricReport:
    """Longest shared boundary path over boundary length, across distinct cells."""
    cells = complex_.cells
    if len(cells) < 2:
        raise SpecError("need at least two cells in the ball to measure overlaps")
    best = Fraction(0)
    witnesses: list[SharedPath] = []
    for i in range(len(cells)):
        for j in range(len(cells)):
            if i == j:
                continue
            run, verts = _longest_shared_run(cells[i].boundary, cells[j].boundary)
            if run == 0:
                continue
            ratio = Fraction(run, len(cells[i].boundary))
            wit = SharedPath(length=run, cell_a=i, cell_b=j, vertices=verts)
            if ratio > best:
                best = ratio
                witnesses = [wit]
            elif ratio == best:
                witnesses.append(wit)
    holds = None
    if lam is not None:
        lam = Fraction(lam)
        holds = best < lam
    return GeometricReport(ratio=best, witnesses=tuple(witnesses[:8]), lambda_value=lam, holds=holds)


def _directed_edges(boundary: tuple[int, ...]):
    n = len(boundary)
    return [(boundary[i], boundary[(i + 1) % n]) for i in range(n)]


def _longest_shared_run(ba: tuple[int, ...], bb: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    ea = _directed_edges(ba)
    na, nb = len(ba), len(bb)
    best, best_verts = 0, ()
    for direction in (bb, tuple(reversed(bb))):
        eb = _directed_edges(direction)
        eb_set = {}
        for j, e in enumerate(eb):
            eb_set.setdefault(e, []).append(j)
        for i in range(na):
            for j in eb_set.get(ea[i], ()):
                run = 0
                while run < min(na, nb) and ea[(i + run) % na] == eb[(j + run) % nb]:
                    run += 1
                if run > best:
                    best = run
                    verts = [ea[(i + t) % na][0] for t in range(run)]
                    verts.append(ea[(i + run - 1) % na][1])
                    best_verts = tuple(verts)
    return best, best_verts
