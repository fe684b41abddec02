"""Word algebra for free products A*B.

Elements are stored as normal forms: alternating sequences of nontrivial
factor syllables.  Factors are either finite groups given by a
multiplication table or free groups of finite rank, which keeps every
factor-level query (products, inverses, orders, geodesic lengths)
decidable.

Two length functions live here: the syllable count |g| and the generator
length |W|_X, the sum of per-syllable geodesic lengths with respect to
each factor's generating set.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union


class SpecError(ValueError):
    """Invalid factor or presentation data (bad table, non-generating set...)."""


class ParseError(ValueError):
    """Malformed token, word, or input file."""


FINITE = "finite"
FREE = "free"

# finite factor elements are table indices; free factor elements are
# reduced words of nonzero signed 1-based letter indices
FiniteElement = int
FreeElement = tuple[int, ...]
FactorElement = Union[FiniteElement, FreeElement]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def _reduce_free(word: Iterable[int]) -> FreeElement:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class FactorSpec:
    """One factor of the free product.

    kind "finite": `element_names` and a full multiplication `table`
    (table[i][j] = index of element i * element j), verified to be a
    group at construction.  kind "free": `letters` is the basis.
    `generating_set` lists factor elements; distances in lengths() are
    measured against it.
    """

    name: str
    kind: str
    element_names: tuple[str, ...] = ()
    table: tuple[tuple[int, ...], ...] = ()
    letters: tuple[str, ...] = ()
    generating_set: tuple[FactorElement, ...] = ()

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise SpecError(f"bad factor name {self.name!r}")
        if self.kind == FINITE:
            self._check_finite()
        elif self.kind == FREE:
            self._check_free()
        else:
            raise SpecError(f"unknown factor kind {self.kind!r}")

    def _check_finite(self) -> None:
        n = len(self.element_names)
        if n == 0:
            raise SpecError(f"factor {self.name}: no elements")
        if len(set(self.element_names)) != n:
            raise SpecError(f"factor {self.name}: duplicate element names")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise SpecError(f"factor {self.name}: table is not {n}x{n}")
        for row in self.table:
            for v in row:
                if not (0 <= v < n):
                    raise SpecError(f"factor {self.name}: table entry {v} out of range")
        t = self.table
        ident = None
        for e in range(n):
            if all(t[e][x] == x and t[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise SpecError(f"factor {self.name}: table has no identity")
        for x in range(n):
            if not any(t[x][y] == ident and t[y][x] == ident for y in range(n)):
                raise SpecError(f"factor {self.name}: element {self.element_names[x]} has no inverse")
        for x in range(n):
            # nonidentity names appear in word tokens, so they must parse;
            # the identity may keep a conventional name like "1"
            if x != ident and not _NAME_RE.match(self.element_names[x]):
                raise SpecError(
                    f"factor {self.name}: element name {self.element_names[x]!r} "
                    "is not usable in word tokens"
                )
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise SpecError(f"factor {self.name}: table is not associative")
        if not self.generating_set:
            raise SpecError(f"factor {self.name}: empty generating set")
        for g in self.generating_set:
            if not isinstance(g, int) or not (0 <= g < n):
                raise SpecError(f"factor {self.name}: bad generator {g!r}")
            if g == _finite_identity(self):
                raise SpecError(f"factor {self.name}: identity cannot be a generator")
        # generating check: BFS from the identity must reach every element
        if len(_finite_distances(self)) != n:
            raise SpecError(f"factor {self.name}: generating set does not generate")

    def _check_free(self) -> None:
        if not self.letters:
            raise SpecError(f"factor {self.name}: free factor needs at least one letter")
        if len(set(self.letters)) != len(self.letters):
            raise SpecError(f"factor {self.name}: duplicate letters")
        for nm in self.letters:
            if not _NAME_RE.match(nm):
                raise SpecError(f"factor {self.name}: bad letter name {nm!r}")
        if not self.generating_set:
            raise SpecError(f"factor {self.name}: empty generating set")
        r = len(self.letters)
        for g in self.generating_set:
            if not isinstance(g, tuple) or not g:
                raise SpecError(f"factor {self.name}: identity or malformed generator {g!r}")
            if _reduce_free(g) != g:
                raise SpecError(f"factor {self.name}: generator {g!r} is not reduced")
            for x in g:
                if x == 0 or abs(x) > r:
                    raise SpecError(f"factor {self.name}: letter index {x} out of range")
        # each basis letter (or its inverse) must be a generator: keeps the
        # factor generated and bounds geodesic searches
        for i in range(1, r + 1):
            if (i,) not in self.generating_set and (-i,) not in self.generating_set:
                raise SpecError(
                    f"factor {self.name}: generating set must contain letter "
                    f"{self.letters[i - 1]!r} or its inverse"
                )

    # -- element operations -------------------------------------------------

    def identity(self) -> FactorElement:
        return _finite_identity(self) if self.kind == FINITE else ()

    def is_identity(self, x: FactorElement) -> bool:
        return x == self.identity()

    def mul(self, x: FactorElement, y: FactorElement) -> FactorElement:
        if self.kind == FINITE:
            return self.table[x][y]
        return _reduce_free(tuple(x) + tuple(y))

    def inv(self, x: FactorElement) -> FactorElement:
        if self.kind == FINITE:
            return _finite_inverses(self)[x]
        return tuple(-v for v in reversed(x))

    def power(self, x: FactorElement, n: int) -> FactorElement:
        if n < 0:
            return self.power(self.inv(x), -n)
        acc = self.identity()
        for _ in range(n):
            acc = self.mul(acc, x)
        return acc

    def has_finite_order(self, x: FactorElement) -> bool:
        if self.kind == FINITE:
            return True
        return self.is_identity(x)

    def order(self) -> Optional[int]:
        """Group order; None for free factors (infinite)."""
        return len(self.element_names) if self.kind == FINITE else None

    def elements(self) -> Iterator[FactorElement]:
        if self.kind != FINITE:
            raise SpecError(f"factor {self.name}: cannot enumerate a free factor")
        return iter(range(len(self.element_names)))

    def geodesic_length(self, x: FactorElement) -> int:
        if self.is_identity(x):
            return 0
        if self.kind == FINITE:
            return _finite_distances(self)[x]
        if all(len(g) == 1 for g in self.generating_set):
            return len(x)
        return _free_geodesic(self, x)

    # -- element parsing / formatting ---------------------------------------

    def parse_element(self, text: str) -> FactorElement:
        """Parse an element expression: a name, `x^-2`, or `x*y^2` (free)."""
        if self.kind == FINITE:
            if text not in self.element_names:
                raise ParseError(f"factor {self.name}: unknown element {text!r}")
            return self.element_names.index(text)
        word: list[int] = []
        for atom in text.split("*"):
            m = re.match(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$", atom)
            if not m or m.group(1) not in self.letters:
                raise ParseError(f"factor {self.name}: bad element expression {text!r}")
            idx = self.letters.index(m.group(1)) + 1
            exp = int(m.group(2)) if m.group(2) else 1
            word.extend([idx if exp > 0 else -idx] * abs(exp))
        return _reduce_free(word)

    def format_element(self, x: FactorElement) -> str:
        if self.kind == FINITE:
            return self.element_names[x]
        if not x:
            return "1"
        parts = []
        i = 0
        while i < len(x):
            j = i
            while j < len(x) and x[j] == x[i]:
                j += 1
            base = self.letters[abs(x[i]) - 1]
            exp = (j - i) if x[i] > 0 else -(j - i)
            parts.append(base if exp == 1 else f"{base}^{exp}")
            i = j
        return "*".join(parts)


@lru_cache(maxsize=None)
def _finite_identity(spec: FactorSpec) -> int:
    n = len(spec.element_names)
    for e in range(n):
        if all(spec.table[e][x] == x for x in range(n)):
            return e
    raise SpecError(f"factor {spec.name}: no identity")


@lru_cache(maxsize=None)
def _finite_inverses(spec: FactorSpec) -> tuple[int, ...]:
    n = len(spec.element_names)
    e = _finite_identity(spec)
    out = [0] * n
    for x in range(n):
        out[x] = next(y for y in range(n) if spec.table[x][y] == e)
    return tuple(out)


@lru_cache(maxsize=None)
def _finite_distances(spec: FactorSpec) -> dict[int, int]:
    """BFS distances from the identity, right-multiplying by generators."""
    dist = {_finite_identity(spec): 0}
    queue = deque([_finite_identity(spec)])
    while queue:
        x = queue.popleft()
        for g in spec.generating_set:
            y = spec.table[x][g]
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


@lru_cache(maxsize=None)
def _free_geodesic(spec: FactorSpec, target: FreeElement) -> int:
    # any geodesic prefix p satisfies |p|_red <= m * |target|_red, m the
    # longest generator, so the BFS below is exact
    bound = max(len(g) for g in spec.generating_set) * len(target)
    dist = {(): 0}
    queue = deque([()])
    while queue:
        x = queue.popleft()
        for g in spec.generating_set:
            y = _reduce_free(x + g)
            if y == target:
                return dist[x] + 1
            if y not in dist and len(y) <= bound:
                dist[y] = dist[x] + 1
                queue.append(y)
    raise SpecError(f"factor {spec.name}: {target!r} not reached by generating set")


# -- normal forms ------------------------------------------------------------


@dataclass(frozen=True)
class Syllable:
    factor: str
    element: FactorElement


@dataclass(frozen=True)
class NormalForm:
    syllables: tuple[Syllable, ...] = ()

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self) -> Iterator[Syllable]:
        return iter(self.syllables)

    @property
    def is_identity(self) -> bool:
        return not self.syllables


IDENTITY = NormalForm()


@dataclass(frozen=True)
class LengthReport:
    syllable_count: int
    generator_length: int


def element_key(x: FactorElement):
    return (0, x) if isinstance(x, int) else (1, x)


def syllable_key(s: Syllable):
    return (s.factor, element_key(s.element))


def word_key(w: NormalForm):
    """Deterministic total order on normal forms: by length, then syllables."""
    return (len(w.syllables), tuple(syllable_key(s) for s in w.syllables))


_TOKEN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)\.([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


class Context:
    """The two factors of a free product, keyed by factor name."""

    def __init__(self, a: FactorSpec, b: FactorSpec):
        if a.name == b.name:
            raise SpecError("factor names must differ")
        self.factors = {a.name: a, b.name: b}
        self.names = (a.name, b.name)

    def factor(self, name: str) -> FactorSpec:
        try:
            return self.factors[name]
        except KeyError:
            raise SpecError(f"unknown factor {name!r}") from None

    def other(self, name: str) -> str:
        self.factor(name)
        return self.names[1] if name == self.names[0] else self.names[0]

    # -- construction --------------------------------------------------------

    def normalize(self, items: Iterable[tuple[str, FactorElement]]) -> NormalForm:
        """Fold factor elements into an alternating normal form."""
        stack: list[Syllable] = []
        for fname, elem in items:
            spec = self.factor(fname)
            if spec.is_identity(elem):
                continue
            if stack and stack[-1].factor == fname:
                merged = spec.mul(stack[-1].element, elem)
                stack.pop()
                if not spec.is_identity(merged):
                    stack.append(Syllable(fname, merged))
            else:
                stack.append(Syllable(fname, elem))
        return NormalForm(tuple(stack))

    def parse_token(self, token: str) -> tuple[str, FactorElement]:
        m = _TOKEN_RE.match(token)
        if not m:
            raise ParseError(f"bad token {token!r} (expected FACTOR.gen or FACTOR.gen^INT)")
        fname, gen, exp = m.group(1), m.group(2), m.group(3)
        spec = self.factor(fname)
        if spec.kind == FINITE:
            base = spec.parse_element(gen)
        else:
            if gen not in spec.letters:
                raise ParseError(f"factor {fname}: unknown generator {gen!r}")
            base = (spec.letters.index(gen) + 1,)
        return fname, spec.power(base, int(exp) if exp else 1)

    def parse_word(self, text: str) -> NormalForm:
        return self.normalize(self.parse_token(t) for t in text.split())

    def format_word(self, w: NormalForm) -> str:
        if w.is_identity:
            return "1"
        out = []
        for s in w.syllables:
            spec = self.factor(s.factor)
            if spec.kind == FINITE:
                out.append(f"{s.factor}.{spec.format_element(s.element)}")
            else:
                i = 0
                x = s.element
                while i < len(x):
                    j = i
                    while j < len(x) and x[j] == x[i]:
                        j += 1
                    base = spec.letters[abs(x[i]) - 1]
                    exp = (j - i) if x[i] > 0 else -(j - i)
                    out.append(f"{s.factor}.{base}" + ("" if exp == 1 else f"^{exp}"))
                    i = j
        return " ".join(out)

    # -- group operations ----------------------------------------------------

    def mul(self, *words: NormalForm) -> NormalForm:
        items: list[tuple[str, FactorElement]] = []
        for w in words:
            items.extend((s.factor, s.element) for s in w.syllables)
        return self.normalize(items)

    def inv(self, w: NormalForm) -> NormalForm:
        return NormalForm(
            tuple(
                Syllable(s.factor, self.factor(s.factor).inv(s.element))
                for s in reversed(w.syllables)
            )
        )

    def power(self, w: NormalForm, n: int) -> NormalForm:
        if n < 0:
            return self.power(self.inv(w), -n)
        acc = IDENTITY
        for _ in range(n):
            acc = self.mul(acc, w)
        return acc

    def conjugate(self, w: NormalForm, g: NormalForm) -> NormalForm:
        """g w g^-1."""
        return self.mul(g, w, self.inv(g))

    # -- lengths and cyclic reduction ----------------------------------------

    def lengths(self, w: NormalForm) -> LengthReport:
        total = sum(self.factor(s.factor).geodesic_length(s.element) for s in w.syllables)
        return LengthReport(syllable_count=len(w.syllables), generator_length=total)

    def generator_length(self, w: NormalForm) -> int:
        return self.lengths(w).generator_length

    def cyclically_reduce(self, w: NormalForm) -> tuple[NormalForm, NormalForm]:
        """Weak cyclic reduction: peel cancelling end pairs.

        Returns (core, conjugator) with w = conjugator * core * conjugator^-1.
        The core may still have same-factor first and last syllables when
        their product is nontrivial (weakly cyclically reduced).
        """
        sylls = list(w.syllables)
        conj: list[Syllable] = []
        while len(sylls) >= 2 and sylls[0].factor == sylls[-1].factor:
            spec = self.factor(sylls[0].factor)
            merged = spec.mul(sylls[-1].element, sylls[0].element)
            if not spec.is_identity(merged):
                break
            conj.append(sylls[0])
            sylls = sylls[1:-1]
        return NormalForm(tuple(sylls)), NormalForm(tuple(conj))

    def strong_cyclic_core(self, w: NormalForm) -> NormalForm:
        """Cyclic-word representative whose ends lie in distinct factors.

        Weakly reduces, then rotates a same-factor boundary pair together.
        Only valid for conjugation-invariant uses (the conjugator is not
        tracked across the final rotation).
        """
        core, _ = self.cyclically_reduce(w)
        sylls = list(core.syllables)
        while len(sylls) >= 2 and sylls[0].factor == sylls[-1].factor:
            spec = self.factor(sylls[0].factor)
            merged = spec.mul(sylls[-1].element, sylls[0].element)
            sylls = sylls[1:-1] + [Syllable(sylls[0].factor, merged)]
        return NormalForm(tuple(sylls))

    def rotate(self, w: NormalForm, i: int) -> NormalForm:
        """Cyclic permutation by i syllables, coalescing the seam if needed."""
        n = len(w.syllables)
        if n == 0:
            return w
        i %= n
        return self.normalize(
            (s.factor, s.element) for s in w.syllables[i:] + w.syllables[:i]
        )


# -- presentation files -------------------------------------------------------


def _parse_keyvals(text: str) -> list[tuple[str, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        out.append((key.strip(), val.strip()))
    return out


@dataclass(frozen=True)
class Presentation:
    """A parsed presentation file: the free product context plus relators."""

    context: Context
    relators: tuple[NormalForm, ...]
    relator_texts: tuple[str, ...]


def _build_factor(name: str, keys: dict[str, str]) -> FactorSpec:
    kind = keys.get("kind")
    if kind is None:
        raise ParseError(f"factor {name}: missing kind")
    if kind == FINITE:
        if "elements" not in keys:
            raise ParseError(f"factor {name}: missing elements")
        names = tuple(keys["elements"].split())
        rows = []
        for en in names:
            rk = f"table.{en}"
            if rk not in keys:
                raise SpecError(f"factor {name}: missing table row for {en!r}")
            row = keys[rk].split()
            if len(row) != len(names):
                raise SpecError(f"factor {name}: table row {en!r} has wrong width")
            try:
                rows.append(tuple(names.index(v) for v in row))
            except ValueError:
                raise SpecError(f"factor {name}: table row {en!r} names unknown element") from None
        gen_items = keys.get("generators", "").split()
        if not gen_items:
            raise ParseError(f"factor {name}: missing generators")
        for g in gen_items:
            if g not in names:
                raise ParseError(f"factor {name}: unknown generator {g!r}")
        gens = tuple(sorted({names.index(g) for g in gen_items}))
        return FactorSpec(name=name, kind=FINITE, element_names=names, table=tuple(rows), generating_set=gens)
    if kind == FREE:
        letters = tuple(keys.get("letters", "").split())
        if not letters:
            raise ParseError(f"factor {name}: missing letters")
        # a throwaway spec parses generator expressions
        probe = FactorSpec(
            name=name, kind=FREE, letters=letters,
            generating_set=tuple((i,) for i in range(1, len(letters) + 1)),
        )
        gens: list[FreeElement] = []
        for item in keys.get("generators", "").split():
            gens.append(probe.parse_element(item))
        if not gens:
            raise ParseError(f"factor {name}: missing generators")
        return FactorSpec(
            name=name, kind=FREE, letters=letters,
            generating_set=tuple(sorted(set(gens), key=element_key)),
        )
    raise ParseError(f"factor {name}: unknown kind {kind!r}")


def parse_presentation(text: str) -> Presentation:
    """Parse the key-value presentation schema.

    Keys: factor.<NAME>.kind, .elements, .table.<ELEM>, .letters,
    .generators, and repeatable `relator =` lines in the token syntax
    FACTOR.gen / FACTOR.gen^INT.  Keys may appear in any order.
    """
    factor_keys: dict[str, dict[str, str]] = {}
    relator_texts: list[str] = []
    for key, val in _parse_keyvals(text):
        if key == "relator":
            relator_texts.append(val)
            continue
        parts = key.split(".", 2)
        if parts[0] != "factor" or len(parts) < 3:
            raise ParseError(f"unknown key {key!r}")
        fname = parts[1]
        sub = parts[2]
        bucket = factor_keys.setdefault(fname, {})
        if sub in bucket:
            raise ParseError(f"duplicate key {key!r}")
        bucket[sub] = val
    if len(factor_keys) != 2:
        raise ParseError(f"expected exactly 2 factors, found {sorted(factor_keys)}")
    names = sorted(factor_keys)
    ctx = Context(_build_factor(names[0], factor_keys[names[0]]), _build_factor(names[1], factor_keys[names[1]]))
    relators = tuple(ctx.parse_word(t) for t in relator_texts)
    return Presentation(context=ctx, relators=relators, relator_texts=tuple(relator_texts))


def validate_symmetric_generating_sets(ctx: Context) -> None:
    """Cayley-graph and Dehn uses need inverse-closed generating sets."""
    for spec in ctx.factors.values():
        gens = set(spec.generating_set)
        for g in gens:
            if spec.inv(g) not in gens:
                raise SpecError(
                    f"factor {spec.name}: generating set not closed under "
                    f"inverse ({spec.format_element(g)})"
                )


# -- convenience constructors -------------------------------------------------


def cyclic_factor(name: str, n: int, generators: Optional[Iterable[int]] = None) -> FactorSpec:
    """Z/n as a table factor; elements named 1, g, g2, ... by power."""
    if n < 2:
        raise SpecError("cyclic factor needs order >= 2")
    names = tuple("1" if k == 0 else ("g" if k == 1 else f"g{k}") for k in range(n))
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    gens = tuple(sorted(set(generators))) if generators is not None else tuple(sorted({1 % n, (n - 1) % n}))
    return FactorSpec(name=name, kind=FINITE, element_names=names, table=table, generating_set=gens)


def free_factor(name: str, letters: Iterable[str]) -> FactorSpec:
    letters = tuple(letters)
    gens: list[FreeElement] = []
    for i in range(1, len(letters) + 1):
        gens.extend([(i,), (-i,)])
    return FactorSpec(name=name, kind=FREE, letters=letters, generating_set=tuple(gens))
