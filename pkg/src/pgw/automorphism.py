"""Automorphisms as materialized element maps, with innerness testing."""

from __future__ import annotations

import math

import numpy as np

from .errors import AutomorphismError
from .pcgroup import AbstractGroup, Element, GroupCtx
from .structure import Subgroup, center


class Automorphism:
    """Bijective multiplicative self-map, materialized on every element.

    Equality compares the full element maps.  Construction verifies that
    images(e) = e, the map is a bijection, and img(h*g) = img(h)*img(g) for
    every h and every generator g, which forces multiplicativity on all
    pairs; ``verify_full`` redoes the check on all |G|^2 pairs.
    """

    def __init__(self, ambient: AbstractGroup, images: dict, *, _checked=False):
        self.ambient = ambient
        self.images = images
        if not _checked:
            self._verify_edges()
        self.generator_images = tuple(images[g] for g in ambient.generators)

    def _verify_edges(self):
        G = self.ambient
        if len(self.images) != G.order:
            raise AutomorphismError("image map is not total")
        if self.images[G.identity] != G.identity:
            raise AutomorphismError("identity is not fixed")
        if len(set(self.images.values())) != G.order:
            raise AutomorphismError("map is not bijective")
        for h in G.elements():
            ih = self.images[h]
            for g in G.generators:
                if self.images[G.mul(h, g)] != G.mul(ih, self.images[g]):
                    raise AutomorphismError(
                        f"multiplicative law fails at ({G.render(h)}, {G.render(g)})"
                    )

    def verify_full(self) -> bool:
        """Multiplicative law on all |G|^2 pairs (test-mode check)."""
        G = self.ambient
        for a in G.elements():
            ia = self.images[a]
            for b in G.elements():
                if self.images[G.mul(a, b)] != G.mul(ia, self.images[b]):
                    return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, Automorphism)
            and self.ambient is other.ambient
            and self.images == other.images
        )

    def __hash__(self):
        G = self.ambient
        return hash(tuple(G.index(self.images[h]) for h in G.elements()))

    def render(self) -> str:
        G = self.ambient
        return "; ".join(
            f"{G.render(g)} -> {G.render(img)}"
            for g, img in zip(G.generators, self.generator_images)
        )

    def perm_array(self) -> np.ndarray:
        G = self.ambient
        arr = np.empty(G.order, dtype=np.int32)
        for h, img in self.images.items():
            arr[G.index(h)] = G.index(img)
        return arr


def identity_automorphism(G: AbstractGroup) -> Automorphism:
    return Automorphism(G, {h: h for h in G.elements()}, _checked=True)


def _check_pc_relations(G: GroupCtx, imgs):
    """Relation preservation with named errors: powers first, then commutators."""
    pres = G.presentation
    p = G.prime
    for i in range(pres.rank):
        lhs = G.power(imgs[i], p)
        rhs = _image_of_word(G, imgs, pres.power_relations[i])
        if lhs != rhs:
            raise AutomorphismError(
                f"power relation 'pow {pres.gen_names[i]}' not preserved"
            )
    for (j, i), word in pres.commutator_relations:
        lhs = G.commutator(imgs[j], imgs[i])
        rhs = _image_of_word(G, imgs, word)
        if lhs != rhs:
            raise AutomorphismError(
                "commutator relation 'comm {} {}' not preserved".format(
                    pres.gen_names[j], pres.gen_names[i]
                )
            )


def _image_of_word(G: AbstractGroup, imgs, word) -> object:
    acc = G.identity
    for i, e in enumerate(word):
        acc = G.mul(acc, G.power(imgs[i], e))
    return acc


def from_generator_images(G: AbstractGroup, imgs) -> Automorphism:
    """Extend generator images multiplicatively to the whole group.

    For a pc-backed group the power and commutator relations are checked
    first (stable error messages); the breadth-first extension then doubles
    as a well-definedness check for any backend.
    """
    gens = G.generators
    if len(imgs) != len(gens):
        raise AutomorphismError("one image per generator required")
    if isinstance(G, GroupCtx):
        _check_pc_relations(G, list(imgs))
    images = {G.identity: G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for h in frontier:
            ih = images[h]
            for g, ig in zip(gens, imgs):
                prod = G.mul(h, g)
                iprod = G.mul(ih, ig)
                known = images.get(prod)
                if known is None:
                    images[prod] = iprod
                    nxt.append(prod)
                elif known != iprod:
                    raise AutomorphismError(
                        "generator images do not define a map "
                        f"(conflict at {G.render(prod)})"
                    )
        frontier = nxt
    if len(images) != G.order:
        raise AutomorphismError("generator images do not span the group")
    if len(set(images.values())) != G.order:
        raise AutomorphismError("map is not bijective")
    return Automorphism(G, images)


def apply(f: Automorphism, h) -> object:
    return f.images[h]


def compose(f: Automorphism, g: Automorphism) -> Automorphism:
    """(f o g)(h) = f(g(h))."""
    if f.ambient is not g.ambient:
        raise AutomorphismError("ambient groups differ")
    G = f.ambient
    return Automorphism(
        G, {h: f.images[g.images[h]] for h in G.elements()}, _checked=True
    )


def automorphism_order(f: Automorphism) -> int:
    """lcm of the cycle lengths of the underlying element permutation."""
    G = f.ambient
    arr = f.perm_array()
    n = G.order
    seen = np.zeros(n, dtype=bool)
    order = 1
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = int(arr[cur])
            length += 1
        order = order * length // math.gcd(order, length)
    return order


def inner_from(G: AbstractGroup, y) -> Automorphism:
    """Conjugation h -> y^-1 h y."""
    yinv = G.inv(y)
    return Automorphism(
        G,
        {h: G.mul(G.mul(yinv, h), y) for h in G.elements()},
        _checked=True,
    )


def is_inner(f: Automorphism):
    """Conjugating element (least in canonical order) if f is inner, else None.

    Searches one representative per coset of Z(G): conjugation is constant on
    those cosets, so the first matching element found in canonical order is
    the least one overall.
    """
    G = f.ambient
    Z = center(G).element_set
    gens = G.generators
    seen: set = set()
    for y in G.elements():
        if y in seen:
            continue
        seen.update(G.mul(y, z) for z in Z)
        yinv = G.inv(y)
        if all(
            f.images[g] == G.mul(G.mul(yinv, g), y) for g in gens
        ):
            cand = inner_from(G, y)
            if cand.images == f.images:
                return y
    return None


def fixes_elementwise(f: Automorphism, H: Subgroup) -> bool:
    return all(f.images[h] == h for h in H.element_set)
