"""Taut loop length spectra.

A length l is in the spectrum when some length-l edge loop survives in
the complex whose cells fill every strictly shorter loop.  Two engines:

* graph mode: finite simplicial graphs; loops are enumerated as
  non-backtracking closed walks, and null-homotopy runs over the
  spanning-tree chord presentation of the filled complex.
* group mode (Cayley graphs handed over with their word problem): a
  length-l loop at the identity is a trivial word of length l, and it
  survives exactly when it is nontrivial in the one-relator-per-short-
  trivial-word presentation over the edge letters; certificates found
  there are valid for the full (infinite) graph, because the filled
  complex is the regular cover of that presentation's complex.

Verdicts are three-valued with certificate payloads throughout.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cancellation import DehnConstants, SymmetrizedSet
from .dehn import DehnSolver
from .homotopy import Budget, HomotopyVerdict, Presentation, Word, format_word, nullhomotopy_verdict
from .words import FINITE, Context, FactorSpec, NormalForm, SpecError, Syllable, element_key


# -- graphs -----------------------------------------------------------------------


class SimplicialGraph:
    """Simple connected graph; vertices 0..n-1."""

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        transitive: bool = False,
        basepoint: int = 0,
        group: Optional["GroupBacking"] = None,
        ball_radius: Optional[int] = None,
        vertex_words: Optional[list[str]] = None,
    ):
        self.n = n
        norm = set()
        for u, v in edges:
            if u == v:
                raise SpecError("loops are not allowed in a simplicial graph")
            if not (0 <= u < n and 0 <= v < n):
                raise SpecError(f"edge ({u},{v}) out of range")
            norm.add((min(u, v), max(u, v)))
        self.edges = tuple(sorted(norm))
        self.transitive = transitive
        self.basepoint = basepoint
        self.group = group
        self.ball_radius = ball_radius
        self.vertex_words = vertex_words
        self.adj: dict[int, list[int]] = {v: [] for v in range(n)}
        for u, v in self.edges:
            self.adj[u].append(v)
            self.adj[v].append(u)
        for v in self.adj:
            self.adj[v].sort()
        self._check_connected()

    def _check_connected(self) -> None:
        if self.n == 0:
            raise SpecError("empty graph")
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != self.n:
            raise SpecError("graph is not connected")


def cycle_graph(n: int) -> SimplicialGraph:
    if n < 3:
        raise SpecError("cycle graphs need n >= 3")
    return SimplicialGraph(n, [(i, (i + 1) % n) for i in range(n)], transitive=True)


def path_graph(n: int) -> SimplicialGraph:
    if n < 1:
        raise SpecError("path graphs need n >= 1")
    return SimplicialGraph(n, [(i, i + 1) for i in range(n - 1)])


def from_edge_list(text: str) -> SimplicialGraph:
    edges = []
    top = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SpecError(f"line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise SpecError(f"line {lineno}: vertices must be integers") from None
        edges.append((u, v))
        top = max(top, u, v)
    return SimplicialGraph(top + 1, edges)


# -- loop enumeration (graph mode) ---------------------------------------------------


def _canonical_cycle(vertices: tuple[int, ...]) -> tuple[int, ...]:
    best = None
    n = len(vertices)
    for cand in (vertices, tuple(reversed(vertices))):
        for i in range(n):
            rot = cand[i:] + cand[:i]
            if best is None or rot < best:
                best = rot
    return best


def enumerate_loops(graph: SimplicialGraph, max_len: int, max_nodes: int = 2_000_000) -> dict[int, list[tuple[int, ...]]]:
    """Cyclically non-backtracking closed walks up to rotation and reflection.

    Backtracking loops are freely homotopic to shorter ones, which the
    filled complexes already kill, so they never decide tautness.
    """
    out: dict[int, list[tuple[int, ...]]] = {l: [] for l in range(3, max_len + 1)}
    seen: set[tuple[int, ...]] = set()
    starts = [graph.basepoint] if graph.transitive else list(range(graph.n))
    nodes = 0
    for start in starts:
        stack: list[tuple[int, ...]] = [(start,)]
        while stack:
            path = stack.pop()
            nodes += 1
            if nodes > max_nodes:
                raise SpecError("loop enumeration budget exhausted; lower the horizon")
            length = len(path)
            for nxt in graph.adj[path[-1]]:
                if length >= 2 and nxt == path[-2]:
                    continue
                if nxt == start and length >= 3:
                    if path[1] != path[-1]:  # no seam backtrack
                        key = _canonical_cycle(path)
                        if key not in seen:
                            seen.add(key)
                            out[length].append(key)
                if length < max_len:
                    stack.append(path + (nxt,))
    for l in out:
        out[l].sort()
    return out


# -- chord presentations (graph mode) ---------------------------------------------------


@dataclass(frozen=True)
class ChordPresentation:
    presentation: Presentation
    tree_parent: dict
    chord_names: dict  # (u, v) sorted edge -> generator name


def _spanning_tree(graph: SimplicialGraph) -> dict[int, Optional[int]]:
    parent: dict[int, Optional[int]] = {graph.basepoint: None}
    queue = deque([graph.basepoint])
    while queue:
        u = queue.popleft()
        for w in graph.adj[u]:
            if w not in parent:
                parent[w] = u
                queue.append(w)
    return parent


def chord_word(chords: dict, walk: tuple[int, ...]) -> Word:
    word = []
    n = len(walk)
    for i in range(n):
        u, v = walk[i], walk[(i + 1) % n]
        key = (min(u, v), max(u, v))
        name = chords.get(key)
        if name is None:
            continue
        word.append((name, 1 if u < v else -1))
    return tuple(word)


def build_gamma_l(graph: SimplicialGraph, l: int, loops: Optional[dict] = None) -> ChordPresentation:
    """Spanning-tree presentation of the complex that fills loops shorter than l."""
    if l < 1:
        raise SpecError("l must be at least 1")
    parent = _spanning_tree(graph)
    tree_edges = {(min(u, p), max(u, p)) for u, p in parent.items() if p is not None}
    chords = {}
    for e in graph.edges:
        if e not in tree_edges:
            chords[e] = f"c{len(chords)}"
    if loops is None:
        loops = enumerate_loops(graph, max(2, l - 1))
    relators = []
    seen = set()
    probe = Presentation(generators=tuple(chords.values()), relators=())
    for ln in sorted(loops):
        if ln >= l:
            continue
        for walk in loops[ln]:
            w = probe.canonical_cyclic(chord_word(chords, walk))
            assert w, "non-backtracking cycles have nontrivial chord words"
            if w not in seen:
                seen.add(w)
                relators.append(w)
    pres = Presentation(generators=tuple(chords.values()), relators=tuple(relators))
    return ChordPresentation(presentation=pres, tree_parent=parent, chord_names=chords)


# -- spectra ------------------------------------------------------------------------------


IN, OUT, UNKNOWN = "in", "out", "unknown"


@dataclass(frozen=True)
class SpectrumEntry:
    verdict: str
    certificate: Optional[str] = None
    detail: str = ""


@dataclass
class TruncatedSpectrum:
    horizon: int
    entries: dict[int, SpectrumEntry]
    certificates: dict[str, dict] = field(default_factory=dict)
    source: str = ""

    def __post_init__(self):
        if self.horizon < 3:
            raise SpecError("horizon must be at least 3")
        for l in range(3, self.horizon + 1):
            if l not in self.entries:
                raise SpecError(f"missing entry for length {l}")

    @classmethod
    def from_set(cls, values: Iterable[int], horizon: int, source: str = "declared") -> "TruncatedSpectrum":
        values = set(values)
        entries = {
            l: SpectrumEntry(IN if l in values else OUT, detail=source)
            for l in range(3, horizon + 1)
        }
        return cls(horizon=horizon, entries=entries, source=source)

    def verdict(self, l: int) -> str:
        if l < 3:
            return OUT  # simplicial graphs have no loops shorter than 3
        if l > self.horizon:
            raise SpecError(f"length {l} beyond horizon {self.horizon}")
        return self.entries[l].verdict

    def decided_in(self) -> list[int]:
        return [l for l in range(3, self.horizon + 1) if self.entries[l].verdict == IN]

    def to_record(self) -> dict:
        return {
            "horizon": self.horizon,
            "source": self.source,
            "lengths": [
                {
                    "length": l,
                    "verdict": self.entries[l].verdict,
                    "certificate": self.entries[l].certificate,
                    "detail": self.entries[l].detail,
                }
                for l in range(3, self.horizon + 1)
            ],
            "certificates": {k: self.certificates[k] for k in sorted(self.certificates)},
        }

    @classmethod
    def from_record(cls, record: dict) -> "TruncatedSpectrum":
        entries = {
            row["length"]: SpectrumEntry(row["verdict"], row.get("certificate"), row.get("detail", ""))
            for row in record["lengths"]
        }
        return cls(
            horizon=record["horizon"],
            entries=entries,
            certificates=dict(record.get("certificates", {})),
            source=record.get("source", ""),
        )


def _cert_id(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return "c" + hashlib.sha256(blob.encode()).hexdigest()[:10]


def _store(spectrum_certs: dict, payload: dict) -> str:
    cid = _cert_id(payload)
    spectrum_certs[cid] = payload
    return cid


def product_spectrum(ha: TruncatedSpectrum, hb: TruncatedSpectrum) -> TruncatedSpectrum:
    """Pointwise three-valued union: the free-product spectrum law."""
    horizon = min(ha.horizon, hb.horizon)
    entries = {}
    certs: dict[str, dict] = {}
    for l in range(3, horizon + 1):
        va, vb = ha.entries[l].verdict, hb.entries[l].verdict
        if IN in (va, vb):
            side = "left" if va == IN else "right"
            cid = _store(certs, {"engine": "product-union", "length": l, "side": side})
            entries[l] = SpectrumEntry(IN, cid, f"union: {side} factor")
        elif va == OUT and vb == OUT:
            cid = _store(certs, {"engine": "product-union", "length": l, "side": "both-out"})
            entries[l] = SpectrumEntry(OUT, cid, "union: both factors out")
        else:
            entries[l] = SpectrumEntry(UNKNOWN, None, "union: undecided component")
    return TruncatedSpectrum(horizon=horizon, entries=entries, certificates=certs, source="product-union")


def quotient_bracket(l: int, direction: str, constants: DehnConstants) -> tuple[int, int]:
    """Partner intervals across the quotient map, valid above ell0 only."""
    if l <= constants.ell0:
        raise SpecError(f"partner windows are only valid above ell0 = {constants.ell0}")
    if direction == "quotient-to-factors":
        return (l, 2 * l - 1)
    if direction == "factors-to-quotient":
        return ((l + 1) // 2, l + 1)
    raise SpecError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class KRelationVerdict:
    k: int
    related: str  # "yes" | "no" | "inconclusive"
    witness: Optional[int] = None
    detail: str = ""


def k_related(ha: TruncatedSpectrum, hb: TruncatedSpectrum, k: int) -> KRelationVerdict:
    """Check the multiplicative-window relation on all decided lengths.

    A 'no' needs a fully decided empty partner window; windows that leak
    past a horizon or contain an Unknown only ever yield 'inconclusive'.
    """
    if k < 1:
        raise SpecError("k must be at least 1")
    start = k * k + 2 * k + 2
    inconclusive = None
    for h_from, h_to, tag in ((ha, hb, "left-to-right"), (hb, ha, "right-to-left")):
        for l in h_from.decided_in():
            if l < start:
                continue
            lo = (l + k - 1) // k
            hi = l * k
            found = False
            window_decided = True
            for lp in range(max(3, lo), hi + 1):
                if lp > h_to.horizon:
                    window_decided = False
                    break
                v = h_to.entries[lp].verdict
                if v == IN:
                    found = True
                    break
                if v == UNKNOWN:
                    window_decided = False
            if found:
                continue
            if window_decided:
                return KRelationVerdict(
                    k=k, related="no", witness=l,
                    detail=f"{tag}: length {l} has an empty decided window [{lo},{hi}]",
                )
            if inconclusive is None:
                inconclusive = f"{tag}: window for {l} is truncated or undecided"
    if inconclusive is not None:
        return KRelationVerdict(k=k, related="inconclusive", detail=inconclusive)
    return KRelationVerdict(k=k, related="yes", detail="all windows matched")


# -- group backings (Cayley graphs that know their word problem) -------------------------


_CHAR_POOL = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"


@dataclass(frozen=True)
class CayleyLetter:
    char: str
    inv_char: str
    gen_name: str     # presentation generator this spelling belongs to
    sign: int         # +1 / -1 relative to gen_name
    factor: str
    element: object


class GroupBacking:
    """Edge alphabet plus a triviality test; subclasses fill in is_trivial_word."""

    def __init__(self, letter_specs: list[tuple[str, object, object]], name: str):
        # letter_specs: (factor name, element, inverse element), deduplicated pairs
        self.name = name
        self.letters: list[CayleyLetter] = []
        pool = iter(_CHAR_POOL)
        seen = set()
        gen_count = 0
        for fname, elem, inv_elem in letter_specs:
            if (fname, elem) in seen:
                continue
            gen_name = f"g{gen_count}"
            gen_count += 1
            if elem == inv_elem:
                c = next(pool)
                seen.add((fname, elem))
                self.letters.append(CayleyLetter(c, c, gen_name, 1, fname, elem))
            else:
                c1, c2 = next(pool), next(pool)
                seen.add((fname, elem))
                seen.add((fname, inv_elem))
                self.letters.append(CayleyLetter(c1, c2, gen_name, 1, fname, elem))
                self.letters.append(CayleyLetter(c2, c1, gen_name, -1, fname, inv_elem))
        self.by_char = {lt.char: lt for lt in self.letters}
        self.involutions = frozenset(
            lt.gen_name for lt in self.letters if lt.char == lt.inv_char
        )
        self.generator_names = tuple(
            sorted({lt.gen_name for lt in self.letters}, key=lambda g: int(g[1:]))
        )

    # subclasses implement
    def is_trivial_word(self, chars: str) -> bool:
        raise NotImplementedError

    def presentation_word(self, chars: str) -> Word:
        return tuple((self.by_char[c].gen_name, self.by_char[c].sign) for c in chars)

    def canonical_chars(self, chars: str) -> str:
        """Minimal rotation over the cyclic word and its inverse."""
        cands = []
        inv = "".join(self.by_char[c].inv_char for c in reversed(chars))
        for w in (chars, inv):
            for i in range(len(w)):
                cands.append(w[i:] + w[:i])
        return min(cands)

    def is_canonical(self, chars: str) -> bool:
        return chars == self.canonical_chars(chars)

    def nb_ok(self, prev: str, nxt: str) -> bool:
        return self.by_char[prev].inv_char != nxt

    def enumerate_trivial_words(self, horizon: int) -> dict[int, list[str]]:
        """Canonical cyclically non-backtracking trivial words by length."""
        out: dict[int, list[str]] = {l: [] for l in range(1, horizon + 1)}
        chars = [lt.char for lt in self.letters]
        stack = [c for c in reversed(chars)]
        while stack:
            w = stack.pop()
            n = len(w)
            if n >= 1 and self.nb_ok(w[-1], w[0]):
                # cheap canonical pre-check before the full rotation scan
                if w[0] == min(w) and self.is_canonical(w) and self.is_trivial_word(w):
                    out[n].append(w)
            if n < horizon:
                for c in chars:
                    if self.nb_ok(w[-1], c):
                        stack.append(w + c)
        for l in out:
            out[l].sort()
        return out


class SingleFactorBacking(GroupBacking):
    """Cayley graph of one supported factor."""

    def __init__(self, spec: FactorSpec):
        self.spec = spec
        specs = []
        for g in sorted(spec.generating_set, key=element_key):
            specs.append((spec.name, g, spec.inv(g)))
        super().__init__(specs, name=f"cayley:{spec.name}")

    def is_trivial_word(self, chars: str) -> bool:
        acc = self.spec.identity()
        for c in chars:
            acc = self.spec.mul(acc, self.by_char[c].element)
        return self.spec.is_identity(acc)


class FreeProductBacking(GroupBacking):
    """Cayley graph of A*B on the disjoint union of the generating sets."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        specs = []
        for fname in ctx.names:
            spec = ctx.factor(fname)
            for g in sorted(spec.generating_set, key=element_key):
                specs.append((fname, g, spec.inv(g)))
        super().__init__(specs, name="cayley:free-product")

    def word_value(self, chars: str) -> NormalForm:
        return self.ctx.normalize(
            (self.by_char[c].factor, self.by_char[c].element) for c in chars
        )

    def is_trivial_word(self, chars: str) -> bool:
        return self.word_value(chars).is_identity


class QuotientBacking(FreeProductBacking):
    """Cayley graph of a small cancellation quotient, tested through Dehn.

    Triviality tests go through the Dehn solver, behind a sound letter-level
    prefilter: within the computed validity bound, a trivial word must show a
    geodesically spelled majority chunk of some member as a contiguous cyclic
    substring (collapse detours and non-geodesic respellings each cost more
    letters than the bound allows).
    """

    _CAP = 64

    def __init__(self, ctx: Context, solver: DehnSolver):
        super().__init__(ctx)
        self.name = "cayley:quotient"
        self.solver = solver
        self._patterns, self._valid_up_to = self._chunk_patterns()
        self.prefilter_limit = self._valid_up_to

    def _factor_nb_words(self, fname: str, length: int, max_nodes: int = 20_000):
        """Non-backtracking letter strings of one factor with their values."""
        spec = self.ctx.factor(fname)
        letters = [lt for lt in self.letters if lt.factor == fname]
        out = [(spec.identity(), "")]
        nodes = 0
        for _ in range(length):
            nxt = []
            for val, word in out:
                for lt in letters:
                    if word and not self.nb_ok(word[-1], lt.char):
                        continue
                    nodes += 1
                    if nodes > max_nodes:
                        raise _PatternOverflow
                    nxt.append((spec.mul(val, lt.element), word + lt.char))
            out = nxt
        return out

    def _spellings_by_length(self, fname: str, element, up_to: int) -> dict[int, list[str]]:
        spec = self.ctx.factor(fname)
        if spec.kind != FINITE:
            # single-letter free generators spell every element uniquely;
            # anything else disables the fast path upstream
            if any(len(g) > 1 for g in spec.generating_set):
                raise _PatternOverflow
            chars = {}
            for lt in self.letters:
                if lt.factor == fname:
                    chars[lt.element] = lt.char
            word = "".join(chars[(v,)] for v in element)
            return {len(word): [word]}
        found: dict[int, list[str]] = {}
        for d in range(1, up_to + 1):
            hits = [w for val, w in self._factor_nb_words(fname, d) if val == element]
            if hits:
                found[d] = sorted(hits)
            if len(found) >= 2:
                break
        return found

    def _shortest_detour(self) -> int:
        best = self._CAP
        for fname in self.ctx.names:
            spec = self.ctx.factor(fname)
            if spec.kind != FINITE:
                continue  # reduced words never collapse
            for d in range(1, min(best, self._CAP) + 1):
                if any(spec.is_identity(val) for val, _ in self._factor_nb_words(fname, d)):
                    best = min(best, d)
                    break
        return best

    def _chunk_patterns(self) -> tuple[list[str], int]:
        """Geodesic spellings of minimal majority chunks + validity bound."""
        try:
            patterns: list[str] = []
            chunk_letters = None
            premium = self._CAP
            for i, member in enumerate(self.solver.members):
                c = int(self.solver.threshold[i]) + 1
                spellings = [""]
                for syll in member.syllables[:c]:
                    by_len = self._spellings_by_length(syll.factor, syll.element, self._CAP)
                    lens = sorted(by_len)
                    geodesic = by_len[lens[0]]
                    if len(lens) > 1:
                        premium = min(premium, lens[1] - lens[0])
                    spellings = [w + p for w in spellings for p in geodesic]
                    if len(spellings) > 200:
                        raise _PatternOverflow
                patterns.extend(spellings)
                shortest = min(len(s) for s in spellings)
                chunk_letters = shortest if chunk_letters is None else min(chunk_letters, shortest)
            detour = self._shortest_detour()
            valid_up_to = chunk_letters + min(premium, detour) - 1
            return sorted(set(patterns)), valid_up_to
        except _PatternOverflow:
            return [], 0

    def is_trivial_word(self, chars: str) -> bool:
        value = self.word_value(chars)
        core = self.ctx.strong_cyclic_core(value)
        if core.is_identity:
            return True
        if self._patterns and len(chars) <= self._valid_up_to:
            doubled = chars + chars
            if not any(p in doubled for p in self._patterns):
                return False  # no majority chunk can be present (Greendlinger)
        return self.solver.is_trivial(value)


class _PatternOverflow(Exception):
    pass


# -- Cayley balls ---------------------------------------------------------------------


def cayley_ball(backing: GroupBacking, radius: int) -> SimplicialGraph:
    """Ball of the Cayley graph; vertices carry their discovery words.

    Vertex identification is exact: backings with canonical element keys
    use them directly, anything else falls back to pairwise triviality
    tests (with a reduced-form fast path).
    """
    if radius < 0:
        raise SpecError("radius must be nonnegative")
    reps: list[str] = [""]
    edges: set[tuple[int, int]] = set()
    exact: dict = {}
    fast: dict = {}

    def keys(word: str):
        if isinstance(backing, SingleFactorBacking):
            spec = backing.spec
            acc = spec.identity()
            for c in word:
                acc = spec.mul(acc, backing.by_char[c].element)
            return acc, None
        value = backing.word_value(word)
        if isinstance(backing, QuotientBacking):
            return None, backing.solver.reduce_linear(value)
        return value, None

    def find(word: str, create: bool) -> Optional[int]:
        exact_key, fast_key = keys(word)
        if exact_key is not None:
            vid = exact.get(exact_key)
            if vid is None and create:
                vid = _new_vertex(word)
                exact[exact_key] = vid
            return vid
        vid = fast.get(fast_key)
        if vid is not None:
            return vid
        inv = "".join(backing.by_char[c].inv_char for c in reversed(word))
        for i, rep in enumerate(reps):
            if backing.is_trivial_word(inv + rep):
                return i
        if create:
            vid = _new_vertex(word)
            fast[fast_key] = vid
            return vid
        return None

    def _new_vertex(word: str) -> int:
        reps.append(word)
        return len(reps) - 1

    first_key, first_fast = keys("")
    if first_key is not None:
        exact[first_key] = 0
    else:
        fast[first_fast] = 0

    frontier = [0]
    for d in range(radius + 1):
        nxt = []
        for vid in frontier:
            for lt in backing.letters:
                word = reps[vid] + lt.char
                before = len(reps)
                found = find(word, create=(d < radius))
                if found is None:
                    continue
                if found >= before:
                    nxt.append(found)
                if found != vid:
                    edges.add((min(vid, found), max(vid, found)))
        frontier = nxt
    return SimplicialGraph(
        len(reps), edges, transitive=True, basepoint=0,
        group=backing, ball_radius=radius, vertex_words=reps,
    )


# -- the brute-force spectrum ------------------------------------------------------------


def taut_spectrum_bruteforce(
    graph: SimplicialGraph, horizon: int, budget: Optional[Budget] = None
) -> TruncatedSpectrum:
    budget = budget or Budget()
    if horizon < 3:
        raise SpecError("horizon must be at least 3")
    if graph.group is not None:
        return _group_spectrum(graph.group, horizon, budget, graph.ball_radius)
    return _graph_spectrum(graph, horizon, budget)


def _graph_spectrum(graph: SimplicialGraph, horizon: int, budget: Budget) -> TruncatedSpectrum:
    loops = enumerate_loops(graph, horizon)
    entries: dict[int, SpectrumEntry] = {}
    certs: dict[str, dict] = {}
    downgrade = graph.ball_radius is not None and graph.group is None
    for l in range(3, horizon + 1):
        cands = loops[l]
        if not cands:
            cid = _store(certs, {"engine": "loop-enumeration", "length": l, "loops": 0})
            entries[l] = SpectrumEntry(OUT, cid, "no loops of this length")
            continue
        chord = build_gamma_l(graph, l, loops)
        verdicts = []
        for walk in cands:
            word = chord_word(chord.chord_names, walk)
            verdicts.append((walk, nullhomotopy_verdict(chord.presentation, word, budget)))
        entries[l] = _entry_from_verdicts(l, verdicts, certs, downgrade)
    return TruncatedSpectrum(horizon=horizon, entries=entries, certificates=certs, source="bruteforce-graph")


def _entry_from_verdicts(l: int, verdicts, certs: dict, downgrade_in: bool) -> SpectrumEntry:
    nontrivial = [(w, v) for w, v in verdicts if v.kind == "nontrivial"]
    unknown = [(w, v) for w, v in verdicts if v.kind == "unknown"]
    if nontrivial:
        witness, verdict = nontrivial[0]
        payload = {
            "engine": verdict.engine,
            "length": l,
            "witness": _witness_payload(witness),
            **verdict.certificate,
        }
        if downgrade_in:
            return SpectrumEntry(
                UNKNOWN, _store(certs, payload),
                "taut loop found on a ball without group backing; not valid globally",
            )
        return SpectrumEntry(IN, _store(certs, payload), f"taut loop via {verdict.engine}")
    if unknown:
        return SpectrumEntry(UNKNOWN, None, f"{len(unknown)} loop(s) undecided")
    payload = {"engine": "fillings", "length": l, "loops": len(verdicts)}
    return SpectrumEntry(OUT, _store(certs, payload), "all loops filled")


def _witness_payload(witness) -> object:
    if isinstance(witness, tuple):
        return list(witness)
    return witness


def _group_spectrum(
    backing: GroupBacking, horizon: int, budget: Budget, ball_radius: Optional[int]
) -> TruncatedSpectrum:
    words = backing.enumerate_trivial_words(horizon)
    entries: dict[int, SpectrumEntry] = {}
    certs: dict[str, dict] = {}
    margin_note = ""
    if ball_radius is not None and horizon > 2 * ball_radius:
        margin_note = " (horizon exceeds 2r; verdicts still valid: group mode works word-level)"
    for l in range(3, horizon + 1):
        cands = words.get(l, [])
        if not cands:
            cid = _store(certs, {"engine": "word-enumeration", "length": l, "loops": 0})
            entries[l] = SpectrumEntry(OUT, cid, "no loops of this length" + margin_note)
            continue
        relators = []
        for ln in range(3, l):
            relators.extend(backing.presentation_word(w) for w in words.get(ln, []))
        pres = Presentation(
            generators=backing.generator_names,
            relators=tuple(relators),
            involutions=backing.involutions,
        )
        verdicts = []
        for w in cands:
            verdicts.append((w, nullhomotopy_verdict(pres, backing.presentation_word(w), budget)))
        entries[l] = _entry_from_verdicts(l, verdicts, certs, downgrade_in=False)
    return TruncatedSpectrum(horizon=horizon, entries=entries, certificates=certs, source=f"bruteforce:{backing.name}")
