"""Subgroup and series computations over any AbstractGroup backend.

Everything is explicit-enumeration based: subgroups are element sets with a
chosen generating subset, series are lists of such subgroups.  The second
upper-central term and beyond are computed through the commutator-membership
characterization, so no quotient machinery is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pcgroup import AbstractGroup


def _machinery(G: AbstractGroup):
    """Multiplication table, inverse map, and p-th-power map on indices."""
    tab = G.table()
    invs = G.inverses_idx()
    pmap = getattr(G, "_pmap", None)
    if pmap is None:
        n = G.order
        idx = np.arange(n, dtype=np.int32)
        pmap = idx.copy()
        for _ in range(G.prime - 1):
            pmap = tab[pmap, idx]
        G._pmap = pmap
    return tab, invs, pmap


@dataclass(frozen=True)
class Subgroup:
    """Explicit subgroup of a fixed ambient group."""

    ambient: AbstractGroup
    element_set: frozenset
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.element_set)

    def __contains__(self, h) -> bool:
        return h in self.element_set

    def sorted_elements(self) -> list:
        amb = self.ambient
        return sorted(self.element_set, key=amb.index)

    def render(self) -> str:
        amb = self.ambient
        gens = ", ".join(amb.render(g) for g in self.generators)
        return f"<{gens}> of order {self.order}" if gens else f"<1> of order {self.order}"


def subgroup_closure(G: AbstractGroup, gens) -> Subgroup:
    """Least subgroup containing gens, by breadth-first closure."""
    gens = list(gens)
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                prod = G.mul(h, g)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return Subgroup(G, frozenset(seen), tuple(gens))


def full_subgroup(G: AbstractGroup) -> Subgroup:
    return Subgroup(G, frozenset(G.elements()), tuple(G.generators))


def trivial_subgroup(G: AbstractGroup) -> Subgroup:
    return Subgroup(G, frozenset([G.identity]), ())


def center(G: AbstractGroup, *, full_check: bool = False) -> Subgroup:
    """Elements commuting with everything; generator test suffices."""
    others = G.elements() if full_check else G.generators
    central = [
        z for z in G.elements() if all(G.mul(z, h) == G.mul(h, z) for h in others)
    ]
    gens = _reduce_generators(G, central)
    return Subgroup(G, frozenset(central), gens)


def centralizer(G: AbstractGroup, x, *, full_check: bool = False) -> Subgroup:
    elems = [h for h in G.elements() if G.mul(h, x) == G.mul(x, h)]
    gens = _reduce_generators(G, elems)
    return Subgroup(G, frozenset(elems), gens)


def _reduce_generators(G: AbstractGroup, elems) -> tuple:
    """Greedy generating subset of a closed element set, in canonical order."""
    target = set(elems)
    chosen: list = []
    have = {G.identity}
    for h in sorted(target, key=G.index):
        if h not in have:
            chosen.append(h)
            have = subgroup_closure(G, chosen).element_set
            if len(have) == len(target):
                break
    return tuple(chosen)


@dataclass(frozen=True)
class SeriesReport:
    kind: str  # "lower-central" | "upper-central"
    terms: tuple[Subgroup, ...]

    @property
    def orders(self) -> list[int]:
        return [t.order for t in self.terms]


def _comm_rows(G: AbstractGroup, u_indices) -> set[int]:
    """Index set {[u, g] : u in u_indices, g in G}, vectorized over g."""
    tab, invs, _ = _machinery(G)
    n = G.order
    idx = np.arange(n, dtype=np.int32)
    out: set[int] = set()
    for u in u_indices:
        a = tab[invs[u], invs]          # u^-1 g^-1 for all g
        b = tab[a, u]                   # u^-1 g^-1 u
        c = tab[b, idx]                 # u^-1 g^-1 u g
        out.update(np.unique(c).tolist())
    return out


def lower_central_series(G: AbstractGroup) -> SeriesReport:
    """gamma_1 = G, gamma_{m+1} = [gamma_m, G], down to the trivial subgroup."""
    terms = [full_subgroup(G)]
    while terms[-1].order > 1:
        prev = terms[-1]
        comm_idx = _comm_rows(G, sorted(G.index(u) for u in prev.element_set))
        gens = [G.at(i) for i in sorted(comm_idx) if i != G.index(G.identity)]
        nxt = subgroup_closure(G, gens)
        if nxt.order == prev.order:
            break
        terms.append(nxt)
    return SeriesReport(kind="lower-central", terms=tuple(terms))


def upper_central_series(G: AbstractGroup) -> SeriesReport:
    """Z_0 = 1 ascending to G via the commutator-membership test."""
    terms = [trivial_subgroup(G)]
    tab, invs, _ = _machinery(G)
    n = G.order
    idx = np.arange(n, dtype=np.int32)
    gen_idx = [G.index(g) for g in G.generators]
    while terms[-1].order < G.order:
        prev = np.zeros(n, dtype=bool)
        for h in terms[-1].element_set:
            prev[G.index(h)] = True
        ok = np.ones(n, dtype=bool)
        for g in gen_idx:
            a = tab[invs, invs[g]]      # x^-1 g^-1 as x varies
            b = tab[a, idx]             # x^-1 g^-1 x
            c = tab[b, g]               # [x, g]
            ok &= prev[c]
        nxt_elems = [G.at(int(i)) for i in np.nonzero(ok)[0]]
        if len(nxt_elems) == terms[-1].order:
            break
        nxt = Subgroup(
            G, frozenset(nxt_elems), _reduce_generators(G, nxt_elems)
        )
        terms.append(nxt)
    return SeriesReport(kind="upper-central", terms=tuple(terms))


def derived_subgroup(G: AbstractGroup) -> Subgroup:
    series = lower_central_series(G)
    return series.terms[1] if len(series.terms) > 1 else trivial_subgroup(G)


def frattini(G: AbstractGroup) -> Subgroup:
    """Phi(G) = G^p * gamma_2(G) for p-groups."""
    p = G.prime
    pth = {G.power(h, p) for h in G.elements()}
    gamma2 = derived_subgroup(G).element_set
    gens = sorted((pth | gamma2) - {G.identity}, key=G.index)
    sub = subgroup_closure(G, gens)
    return Subgroup(G, sub.element_set, _reduce_generators(G, sub.element_set))


def subgroup_exponent(H: Subgroup) -> int:
    """Max element order (= lcm, since all orders are p-powers)."""
    G = H.ambient
    return max((G.element_order(h) for h in H.element_set), default=1)


def omega1(H: Subgroup) -> Subgroup:
    """Subgroup generated by the elements of H of order dividing p."""
    G = H.ambient
    p = G.prime
    gens = sorted(
        (h for h in H.element_set if G.power(h, p) == G.identity and h != G.identity),
        key=G.index,
    )
    sub = subgroup_closure(G, gens)
    return Subgroup(G, sub.element_set, _reduce_generators(G, sub.element_set))


def agemo1(H: Subgroup) -> Subgroup:
    """Subgroup generated by the p-th powers of elements of H."""
    G = H.ambient
    p = G.prime
    gens = sorted(
        {G.power(h, p) for h in H.element_set} - {G.identity}, key=G.index
    )
    sub = subgroup_closure(G, gens)
    return Subgroup(G, sub.element_set, _reduce_generators(G, sub.element_set))


def nilpotency_class(G: AbstractGroup) -> int:
    if G.order == 1:
        return 0
    return len(lower_central_series(G).terms) - 1


def coclass(G: AbstractGroup) -> int:
    if G.order == 1:
        raise ValueError("coclass undefined for the trivial group")
    m = 0
    n = G.order
    while n > 1:
        n //= G.prime
        m += 1
    return m - nilpotency_class(G)


def min_generators(G: AbstractGroup) -> int:
    """d(G) = log_p [G : Phi(G)]."""
    if G.order == 1:
        return 0
    idx = G.order // frattini(G).order
    d = 0
    while idx > 1:
        idx //= G.prime
        d += 1
    return d


def is_cyclic_subgroup(H: Subgroup) -> bool:
    G = H.ambient
    return any(G.element_order(h) == H.order for h in H.element_set)


def minimal_generating_set(G: AbstractGroup) -> tuple:
    """Canonical minimal generating set via the Frattini quotient.

    Greedily picks the least element outside <chosen, Phi(G)>; by the
    Burnside basis theorem the chosen elements alone generate G.
    """
    if G.order == 1:
        return ()
    phi = frattini(G)
    chosen: list = []
    covered = phi.element_set
    elems = G.elements()
    while len(covered) < G.order:
        nxt = next(h for h in elems if h not in covered)
        chosen.append(nxt)
        covered = subgroup_closure(
            G, list(chosen) + sorted(phi.element_set - {G.identity}, key=G.index)
        ).element_set
    return tuple(chosen)


@dataclass(frozen=True)
class GroupPredicates:
    is_abelian: bool
    is_elementary_abelian: bool
    is_cyclic: bool
    is_p_abelian: bool
    is_regular: bool
    has_cyclic_subgroup_of_index_p: bool
    has_cyclic_subgroup_of_index_p2: bool
    has_cyclic_subgroup_of_index_p3: bool

    def as_dict(self) -> dict:
        return {
            "is_abelian": self.is_abelian,
            "is_elementary_abelian": self.is_elementary_abelian,
            "is_cyclic": self.is_cyclic,
            "is_p_abelian": self.is_p_abelian,
            "is_regular": self.is_regular,
            "has_cyclic_subgroup_of_index_p": self.has_cyclic_subgroup_of_index_p,
            "has_cyclic_subgroup_of_index_p2": self.has_cyclic_subgroup_of_index_p2,
            "has_cyclic_subgroup_of_index_p3": self.has_cyclic_subgroup_of_index_p3,
        }


def has_cyclic_subgroup_of_index(G: AbstractGroup, index: int) -> bool:
    """True iff some cyclic subgroup has the exact index p^k given.

    Cyclic groups contain cyclic subgroups of every dividing order, so the
    max element order settles it without enumerating all subgroups.
    """
    if G.order % index:
        return False
    want = G.order // index
    return max(G.element_order(h) for h in G.elements()) >= want


def _regular_pair_ok(G: AbstractGroup, x, y, cache: dict) -> bool:
    H = subgroup_closure(G, [x, y])
    key = H.element_set
    allowed = cache.get(key)
    if allowed is None:
        allowed = agemo1(derived_of_subgroup(H)).element_set
        cache[key] = allowed
    p = G.prime
    t = G.mul(
        G.inv(G.mul(G.power(x, p), G.power(y, p))),
        G.power(G.mul(x, y), p),
    )
    return t in allowed


def derived_of_subgroup(H: Subgroup) -> Subgroup:
    """gamma_2 of H viewed as a group in its own right (inside the ambient)."""
    G = H.ambient
    elems = H.sorted_elements()
    comms = {G.commutator(u, v) for u in elems for v in elems}
    sub = subgroup_closure(G, sorted(comms - {G.identity}, key=G.index))
    return Subgroup(G, sub.element_set, sub.generators)


def predicates(G: AbstractGroup) -> GroupPredicates:
    """All hypothesis predicates, computed definitionally."""
    p = G.prime
    elems = G.elements()
    G.table()  # heavy pair scans ahead; make products table-backed
    is_abelian = all(
        G.mul(a, b) == G.mul(b, a) for a in G.generators for b in G.generators
    )
    exponent = max((G.element_order(h) for h in elems), default=1)
    is_elem_ab = is_abelian and exponent <= p
    is_cyclic = any(G.element_order(h) == G.order for h in elems)

    tab, invs, pmap = _machinery(G)
    n = G.order
    is_p_abelian = True
    is_regular = True
    cache: dict = {}
    eid = G.index(G.identity)
    for xi in range(n):
        row = tab[xi]                       # x*y over all y
        lhs = pmap[row]                     # (xy)^p
        rhs = tab[pmap[xi], pmap]           # x^p y^p
        bad = lhs != rhs
        if bad.any():
            is_p_abelian = False
            if is_regular:
                t = tab[invs[rhs[bad]], lhs[bad]]
                for yi, ti in zip(np.nonzero(bad)[0], t):
                    if ti == eid:
                        continue
                    if not _regular_pair_ok(G, G.at(xi), G.at(int(yi)), cache):
                        is_regular = False
                        break
        if not is_regular:
            # a regularity counterexample is already a p-abelian counterexample
            break

    return GroupPredicates(
        is_abelian=is_abelian,
        is_elementary_abelian=is_elem_ab,
        is_cyclic=is_cyclic,
        is_p_abelian=is_p_abelian,
        is_regular=is_regular,
        has_cyclic_subgroup_of_index_p=has_cyclic_subgroup_of_index(G, p),
        has_cyclic_subgroup_of_index_p2=has_cyclic_subgroup_of_index(G, p**2),
        has_cyclic_subgroup_of_index_p3=has_cyclic_subgroup_of_index(G, p**3),
    )
