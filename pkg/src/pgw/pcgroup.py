"""Collection-based group arithmetic over a consistent pc presentation.

``AbstractGroup`` is the behavioral contract shared by the pc backend
(GroupCtx), the permutation backend, and the table backend in the oracle
module: identity, multiplication, inversion, canonical element enumeration.
Everything downstream (structure, automorphisms, witness search) runs
against this contract only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentPresentationError
from .presentation import (
    PcPresentation,
    _collect_letters,
    check_consistency,
    word_to_letters,
)


@dataclass(frozen=True)
class Element:
    """Normal-form word: an exponent vector over the pc generators."""

    exps: tuple[int, ...]

    def __repr__(self):
        return f"Element{self.exps}"


def iter_exponent_vectors(p: int, rank: int):
    """All exponent vectors in lexicographic order (last coordinate fastest)."""
    for tup in itertools.product(range(p), repeat=rank):
        yield tup


class AbstractGroup:
    """Shared contract for group backends.

    Subclasses provide ``prime``, ``order``, ``generators``, ``identity``,
    ``elements()`` in canonical order, ``index``/``at``, ``mul``, and a
    rendering.  Powers, commutators, inverses and element orders are derived
    here so every backend agrees on conventions ([u,v] = u^-1 v^-1 u v).
    """

    prime: int

    @property
    def order(self) -> int:
        raise NotImplementedError

    @property
    def identity(self):
        raise NotImplementedError

    @property
    def generators(self) -> list:
        raise NotImplementedError

    def elements(self) -> list:
        raise NotImplementedError

    def index(self, h) -> int:
        raise NotImplementedError

    def at(self, i: int):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def render(self, h) -> str:
        raise NotImplementedError

    # --- derived operations ---

    def power(self, h, k: int):
        """h^k by binary exponentiation; negative k uses the inverse."""
        if k < 0:
            return self.power(self.inv(h), -k)
        acc = self.identity
        base = h
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def inv(self, h):
        return self.power(h, self.order - 1)

    def commutator(self, u, v):
        return self.mul(self.mul(self.inv(u), self.inv(v)), self.mul(u, v))

    def element_order(self, h) -> int:
        """Least k >= 1 with h^k = e; always a power of the prime."""
        e = self.identity
        k = 1
        cur = h
        while cur != e:
            cur = self.power(cur, self.prime)
            k *= self.prime
        return k

    def table(self) -> np.ndarray:
        """Full multiplication table on canonical indices (lazily built)."""
        tab = getattr(self, "_table", None)
        if tab is None:
            tab = self._build_table()
            self._table = tab
        return tab

    def _build_table(self) -> np.ndarray:
        elts = self.elements()
        n = self.order
        tab = np.empty((n, n), dtype=np.int32)
        for i, a in enumerate(elts):
            for j, b in enumerate(elts):
                tab[i, j] = self.index(self.mul(a, b))
        return tab

    def mul_idx(self, i: int, j: int) -> int:
        return int(self.table()[i, j])

    def inverses_idx(self) -> np.ndarray:
        invs = getattr(self, "_inverses", None)
        if invs is None:
            tab = self.table()
            e = self.index(self.identity)
            invs = np.empty(self.order, dtype=np.int32)
            rows, cols = np.nonzero(tab == e)
            invs[rows] = cols
            self._inverses = invs
        return invs


class GroupCtx(AbstractGroup):
    """Arithmetic context over a consistency-checked pc presentation."""

    def __init__(self, presentation: PcPresentation, *, _checked: bool = False):
        if not _checked:
            report = check_consistency(presentation, mode="overlap-tests")
            if not report.consistent:
                raise InconsistentPresentationError(
                    f"presentation {presentation.name!r} fails overlap tests: "
                    f"{report.failures[0][0]}"
                )
        self.presentation = presentation
        self.prime = presentation.prime
        self.rank = presentation.rank
        self._identity = Element((0,) * self.rank)
        self._mul_cache: dict[tuple[tuple[int, ...], tuple[int, ...]], Element] = {}
        self._elements: list[Element] | None = None

    @classmethod
    def from_presentation(cls, presentation: PcPresentation) -> "GroupCtx":
        return cls(presentation)

    @property
    def order(self) -> int:
        return self.presentation.order

    @property
    def identity(self) -> Element:
        return self._identity

    @property
    def generators(self) -> list[Element]:
        gens = []
        for i in range(self.rank):
            vec = [0] * self.rank
            vec[i] = 1
            gens.append(Element(tuple(vec)))
        return gens

    def elements(self) -> list[Element]:
        if self._elements is None:
            self._elements = [
                Element(v) for v in iter_exponent_vectors(self.prime, self.rank)
            ]
        return self._elements

    def index(self, h: Element) -> int:
        idx = 0
        for e in h.exps:
            idx = idx * self.prime + e
        return idx

    def at(self, i: int) -> Element:
        vec = []
        for _ in range(self.rank):
            vec.append(i % self.prime)
            i //= self.prime
        return Element(tuple(reversed(vec)))

    def collect(self, letters, max_steps=None) -> Element:
        """Normal form of an arbitrary word given as generator-index letters."""
        for g in letters:
            if not 0 <= g < self.rank:
                raise ValueError(f"letter {g} references no generator")
        return Element(_collect_letters(self.presentation, letters, max_steps))

    def collect_word(self, word: tuple[int, ...]) -> Element:
        return self.collect(word_to_letters(word))

    def mul(self, a: Element, b: Element) -> Element:
        if len(a.exps) != self.rank or len(b.exps) != self.rank:
            raise ValueError("element rank does not match group context")
        tab = getattr(self, "_table", None)
        if tab is not None:
            return self.at(int(tab[self.index(a), self.index(b)]))
        key = (a.exps, b.exps)
        hit = self._mul_cache.get(key)
        if hit is None:
            hit = self.collect(word_to_letters(a.exps) + word_to_letters(b.exps))
            self._mul_cache[key] = hit
        return hit

    def _build_table(self) -> np.ndarray:
        # Column-by-column: each element v has a parent v' with v = v' * g_i
        # (i the last nonzero coordinate), so one generator-map application
        # per column suffices.  Correct because the presentation is consistent.
        n = self.order
        p = self.prime
        elts = self.elements()
        gen_maps = []
        for i in range(self.rank):
            gmap = np.empty(n, dtype=np.int32)
            for a, u in enumerate(elts):
                gmap[a] = self.index(self.collect(word_to_letters(u.exps) + [i]))
            gen_maps.append(gmap)
        tab = np.empty((n, n), dtype=np.int32)
        tab[:, 0] = np.arange(n, dtype=np.int32)
        for b in range(1, n):
            vec = elts[b].exps
            last = max(i for i, e in enumerate(vec) if e)
            parent = b - p ** (self.rank - 1 - last)
            tab[:, b] = gen_maps[last][tab[:, parent]]
        return tab

    def word(self, text: str) -> Element:
        """Collect a word written in file-format syntax, e.g. 'b a' or 'a^2 b'."""
        letters: list[int] = []
        names = {g: i for i, g in enumerate(self.presentation.gen_names)}
        for tok in text.split():
            if tok == "1":
                continue
            gname, _, etxt = tok.partition("^")
            if gname not in names:
                raise ValueError(f"unknown generator {gname!r}")
            exp = int(etxt) if etxt else 1
            letters.extend([names[gname]] * exp)
        return self.collect(letters)

    def render(self, h: Element) -> str:
        parts = [
            f"{self.presentation.gen_names[i]}^{e}"
            for i, e in enumerate(h.exps)
            if e
        ]
        return " ".join(parts) if parts else "1"
