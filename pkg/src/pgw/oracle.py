"""Independent ground truth: permutation groups, tables, naive recomputation.

Everything here deliberately re-derives structure quantities with the most
definitional code available (full-element scans, breadth-first closures),
so agreement with the structure module is meaningful evidence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import structure
from .automorphism import Automorphism
from .errors import ParseError, ResourceCapError
from .pcgroup import AbstractGroup

DEFAULT_ORDER_CAP = 3**7
DEFAULT_SEARCH_ORDER_CAP = 3**5
DEFAULT_SEARCH_GENERATOR_CAP = 3


def _odd_prime_power(n: int):
    """Return p if n = p^k for an odd prime p (n = 1 returns None)."""
    if n == 1:
        return None
    p = 3
    while p * p <= n:
        if n % p == 0:
            break
        p += 2
    else:
        p = n
    if p == 2 or n % p:
        return None
    while n % p == 0:
        n //= p
    return p if n == 1 else None


def compose_perms(a: tuple, b: tuple) -> tuple:
    """Apply a, then b."""
    return tuple(b[x] for x in a)


def invert_perm(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def perm_to_cycles(a: tuple) -> str:
    """1-based disjoint cycle notation; identity renders as '()'."""
    seen = [False] * len(a)
    parts = []
    for start in range(len(a)):
        if seen[start] or a[start] == start:
            seen[start] = True
            continue
        cyc = []
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cyc.append(cur + 1)
            cur = a[cur]
        parts.append("(" + " ".join(str(x) for x in cyc) + ")")
    return "".join(parts) if parts else "()"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int, line_no=None) -> tuple:
    """Disjoint cycle notation -> 0-based image tuple."""
    stripped = text.replace(" ", "")
    if stripped in ("", "()"):
        return tuple(range(degree))
    consumed = "".join(_CYCLE_RE.findall(text))
    if _CYCLE_RE.sub("", text).strip():
        raise ParseError(f"bad cycle notation {text!r}", line=line_no)
    images = list(range(degree))
    used = set()
    for cyc_txt in _CYCLE_RE.findall(text):
        pts = [int(t) for t in cyc_txt.split()]
        if any(not 1 <= pt <= degree for pt in pts):
            raise ParseError(f"point outside degree in {text!r}", line=line_no)
        if len(set(pts)) != len(pts) or used & set(pts):
            raise ParseError(f"repeated point in {text!r}", line=line_no)
        used.update(pts)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a - 1] = b - 1
    return tuple(images)


class PermGroup(AbstractGroup):
    """Closure-enumerated permutation group with a materialized table."""

    def __init__(self, name: str, degree: int, generators, order_cap=DEFAULT_ORDER_CAP):
        self.name = name
        self.degree = degree
        self._generators = [tuple(g) for g in generators]
        for g in self._generators:
            if sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g}")
        elems = self._closure(order_cap)
        self._elems = sorted(elems)
        self._index = {h: i for i, h in enumerate(self._elems)}
        p = _odd_prime_power(len(self._elems))
        if len(self._elems) > 1 and p is None:
            raise ValueError(
                f"group order {len(self._elems)} is not an odd prime power"
            )
        self.prime = p if p is not None else 3
        self._identity = tuple(range(degree))
        self._build_full_table()

    def _closure(self, cap):
        identity = tuple(range(self.degree))
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for h in frontier:
                for g in self._generators:
                    prod = compose_perms(h, g)
                    if prod not in seen:
                        if len(seen) >= cap:
                            raise ResourceCapError(
                                f"closure exceeds order cap {cap}"
                            )
                        seen.add(prod)
                        nxt.append(prod)
            frontier = nxt
        return seen

    def _build_full_table(self):
        n = len(self._elems)
        tab = np.empty((n, n), dtype=np.int32)
        for i, a in enumerate(self._elems):
            for j, b in enumerate(self._elems):
                tab[i, j] = self._index[compose_perms(a, b)]
        self._table = tab

    @property
    def order(self) -> int:
        return len(self._elems)

    @property
    def identity(self):
        return self._identity

    @property
    def generators(self) -> list:
        return list(self._generators)

    def elements(self) -> list:
        return self._elems

    def index(self, h) -> int:
        return self._index[h]

    def at(self, i: int):
        return self._elems[i]

    def mul(self, a, b):
        return compose_perms(a, b)

    def inv(self, h):
        return invert_perm(h)

    def render(self, h) -> str:
        return perm_to_cycles(h)


def perm_group_from_generators(
    perms, name="permgroup", order_cap=DEFAULT_ORDER_CAP
) -> PermGroup:
    perms = [tuple(g) for g in perms]
    degree = len(perms[0]) if perms else 1
    return PermGroup(name, degree, perms, order_cap=order_cap)


def parse_perm_file(text: str, order_cap=DEFAULT_ORDER_CAP) -> PermGroup:
    name = None
    degree = None
    gens = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, _, rest = line.partition(" ")
        rest = rest.strip()
        if kw == "permgroup":
            if name is not None:
                raise ParseError("duplicate 'permgroup' line", line=line_no)
            name = rest
        elif kw == "degree":
            if degree is not None:
                raise ParseError("duplicate 'degree' line", line=line_no)
            try:
                degree = int(rest)
            except ValueError:
                raise ParseError(f"bad degree {rest!r}", line=line_no)
        elif kw == "gen":
            if degree is None:
                raise ParseError("'degree' must appear before 'gen'", line=line_no)
            gens.append(parse_cycles(rest, degree, line_no))
        else:
            raise ParseError(f"unknown directive {kw!r}", line=line_no)
    if name is None or degree is None:
        raise ParseError("missing 'permgroup' or 'degree' line")
    return PermGroup(name, degree, gens, order_cap=order_cap)


class TableGroup(AbstractGroup):
    """AbstractGroup backed purely by an explicit multiplication table."""

    def __init__(self, table: np.ndarray, prime: int, generator_indices, labels=None):
        self._table = np.asarray(table, dtype=np.int32)
        n = self._table.shape[0]
        self.prime = prime
        self._n = n
        self._labels = labels
        # identity: the unique e with table[e, j] = j for all j
        eye = np.arange(n, dtype=np.int32)
        self._identity_idx = next(
            i for i in range(n) if (self._table[i] == eye).all()
        )
        self._gen_idx = list(generator_indices)

    @property
    def order(self) -> int:
        return self._n

    @property
    def identity(self):
        return self._identity_idx

    @property
    def generators(self) -> list:
        return list(self._gen_idx)

    def elements(self) -> list:
        return list(range(self._n))

    def index(self, h) -> int:
        return h

    def at(self, i: int):
        return i

    def mul(self, a, b):
        return int(self._table[a, b])

    def render(self, h) -> str:
        if self._labels is not None:
            return self._labels[h]
        return f"e{h}"


def tableize(G: AbstractGroup) -> TableGroup:
    """Materialize any backend into a table-backed group (same indexing)."""
    tab = G.table()
    gen_idx = [G.index(g) for g in G.generators]
    labels = [G.render(h) for h in G.elements()]
    return TableGroup(tab, G.prime, gen_idx, labels=labels)


# --- naive definitional recomputation ---


@dataclass(frozen=True)
class StructureSnapshot:
    order: int
    prime: int
    nilpotency_class: int
    coclass: int | None
    center_order: int
    gamma_orders: tuple[int, ...]
    zeta_orders: tuple[int, ...]
    frattini_order: int
    exponent: int
    d: int
    predicates: dict

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "prime": self.prime,
            "nilpotency_class": self.nilpotency_class,
            "coclass": self.coclass,
            "center_order": self.center_order,
            "gamma_orders": list(self.gamma_orders),
            "zeta_orders": list(self.zeta_orders),
            "frattini_order": self.frattini_order,
            "exponent": self.exponent,
            "d": self.d,
            "predicates": dict(self.predicates),
        }


def _naive_closure(G: AbstractGroup, gens) -> set:
    seen = {G.identity}
    frontier = [G.identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                prod = G.mul(h, g)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return seen


def _naive_order(G: AbstractGroup, h) -> int:
    e = G.identity
    cur = h
    k = 1
    while cur != e:
        cur = G.mul(cur, h)
        k += 1
    return k


def frattini_by_hom_kernels(G: AbstractGroup) -> set:
    """Phi as the intersection of kernels of all surjections onto C_p.

    Index-p subgroups are exactly those kernels; candidate homomorphisms are
    enumerated as generator-value tuples and validated by breadth-first
    well-definedness.
    """
    p = G.prime
    gens = G.generators
    if not gens or G.order == 1:
        return set(G.elements())
    import itertools

    common = set(G.elements())
    for values in itertools.product(range(p), repeat=len(gens)):
        if all(v == 0 for v in values):
            continue
        phi = {G.identity: 0}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for h in frontier:
                for g, v in zip(gens, values):
                    prod = G.mul(h, g)
                    val = (phi[h] + v) % p
                    known = phi.get(prod)
                    if known is None:
                        phi[prod] = val
                        nxt.append(prod)
                    elif known != val:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        if set(phi.values()) == set(range(p)):
            common &= {h for h, v in phi.items() if v == 0}
    return common


def frattini_by_powers_commutators(G: AbstractGroup) -> set:
    p = G.prime
    elems = G.elements()
    gens = set()
    for h in elems:
        acc = h
        for _ in range(p - 1):
            acc = G.mul(acc, h)
        gens.add(acc)
    for a in elems:
        for b in elems:
            gens.add(G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b)))
    gens.discard(G.identity)
    return _naive_closure(G, gens)


def oracle_recompute(G: AbstractGroup, order_cap=DEFAULT_ORDER_CAP) -> StructureSnapshot:
    """Recompute every structure quantity with naive definitional loops."""
    if G.order > order_cap:
        raise ResourceCapError(f"order {G.order} exceeds cap {order_cap}")
    p = G.prime
    elems = G.elements()
    e = G.identity

    center_set = {
        z for z in elems if all(G.mul(z, h) == G.mul(h, z) for h in elems)
    }

    gamma_orders = []
    term = set(elems)
    gamma_terms = [term]
    while len(term) > 1:
        comms = set()
        for u in term:
            for g in elems:
                comms.add(G.mul(G.mul(G.inv(u), G.inv(g)), G.mul(u, g)))
        nxt = _naive_closure(G, comms - {e})
        if len(nxt) == len(term):
            break
        gamma_terms.append(nxt)
        term = nxt
    gamma_orders = [len(t) for t in gamma_terms]

    zeta_terms = [{e}]
    while len(zeta_terms[-1]) < len(elems):
        prev = zeta_terms[-1]
        nxt = {
            x
            for x in elems
            if all(
                G.mul(G.mul(G.inv(x), G.inv(g)), G.mul(x, g)) in prev for g in elems
            )
        }
        if len(nxt) == len(prev):
            break
        zeta_terms.append(nxt)
    zeta_orders = [len(t) for t in zeta_terms]

    phi_kernels = frattini_by_hom_kernels(G)
    phi_powers = frattini_by_powers_commutators(G)
    if phi_kernels != phi_powers:
        raise AssertionError(
            "Frattini subgroup mismatch between hom-kernel and power-commutator routes"
        )

    orders = {h: _naive_order(G, h) for h in elems}
    exponent = max(orders.values())

    n_class = len(gamma_terms) - 1 if len(elems) > 1 else 0
    m = 0
    nn = len(elems)
    while nn > 1:
        nn //= p
        m += 1
    cocl = (m - n_class) if len(elems) > 1 else None

    d = 0
    idx = len(elems) // len(phi_kernels)
    while idx > 1:
        idx //= p
        d += 1

    is_abelian = len(center_set) == len(elems)
    is_cyclic = any(o == len(elems) for o in orders.values())
    is_elem_ab = is_abelian and exponent <= p

    is_p_abelian = True
    for x in elems:
        xp = G.power(x, p)
        for y in elems:
            if G.power(G.mul(x, y), p) != G.mul(xp, G.power(y, p)):
                is_p_abelian = False
                break
        if not is_p_abelian:
            break

    is_regular = _naive_is_regular(G, elems)

    max_order = exponent

    preds = {
        "is_abelian": is_abelian,
        "is_elementary_abelian": is_elem_ab,
        "is_cyclic": is_cyclic,
        "is_p_abelian": is_p_abelian,
        "is_regular": is_regular,
        "has_cyclic_subgroup_of_index_p": len(elems) % p == 0
        and max_order >= len(elems) // p,
        "has_cyclic_subgroup_of_index_p2": len(elems) % p**2 == 0
        and max_order >= len(elems) // p**2,
        "has_cyclic_subgroup_of_index_p3": len(elems) % p**3 == 0
        and max_order >= len(elems) // p**3,
    }

    return StructureSnapshot(
        order=len(elems),
        prime=p,
        nilpotency_class=n_class,
        coclass=cocl,
        center_order=len(center_set),
        gamma_orders=tuple(gamma_orders),
        zeta_orders=tuple(zeta_orders),
        frattini_order=len(phi_kernels),
        exponent=exponent,
        d=d,
        predicates=preds,
    )


def _naive_is_regular(G: AbstractGroup, elems) -> bool:
    p = G.prime
    e = G.identity
    cache: dict = {}
    for x in elems:
        xp = G.power(x, p)
        for y in elems:
            t = G.mul(G.inv(G.mul(xp, G.power(y, p))), G.power(G.mul(x, y), p))
            if t == e:
                continue
            H = frozenset(_naive_closure(G, [x, y]))
            allowed = cache.get(H)
            if allowed is None:
                comms = {
                    G.mul(G.mul(G.inv(a), G.inv(b)), G.mul(a, b))
                    for a in H
                    for b in H
                }
                gamma2 = _naive_closure(G, comms - {e})
                allowed = _naive_closure(
                    G, {G.power(h, p) for h in gamma2} - {e}
                )
                cache[H] = allowed
            if t not in allowed:
                return False
    return True


def snapshot_via_structure(G: AbstractGroup) -> StructureSnapshot:
    """The same snapshot, computed through the structure module's code paths."""
    lcs = structure.lower_central_series(G)
    ucs = structure.upper_central_series(G)
    phi = structure.frattini(G)
    preds = structure.predicates(G)
    n_class = structure.nilpotency_class(G)
    return StructureSnapshot(
        order=G.order,
        prime=G.prime,
        nilpotency_class=n_class,
        coclass=structure.coclass(G) if G.order > 1 else None,
        center_order=structure.center(G).order,
        gamma_orders=tuple(lcs.orders),
        zeta_orders=tuple(ucs.orders),
        frattini_order=phi.order,
        exponent=structure.subgroup_exponent(structure.full_subgroup(G)),
        d=structure.min_generators(G),
        predicates=preds.as_dict(),
    )


@dataclass(frozen=True)
class CrossValidationReport:
    fields: tuple[tuple[str, object, object, bool], ...]

    @property
    def all_equal(self) -> bool:
        return all(eq for _, _, _, eq in self.fields)


def cross_validate(G_pc: AbstractGroup, G_perm: AbstractGroup) -> CrossValidationReport:
    """Compare invariant vectors across backends, field by field."""
    left = snapshot_via_structure(G_pc).as_dict()
    right = oracle_recompute(G_perm).as_dict()
    rows = []
    for key in left:
        rows.append((key, left[key], right[key], left[key] == right[key]))
    return CrossValidationReport(fields=tuple(rows))


# --- exhaustive search for non-inner automorphisms of order p ---


def exhaustive_noninner_search(
    G: AbstractGroup,
    require_fix_frattini: bool = True,
    max_order: int = DEFAULT_SEARCH_ORDER_CAP,
    max_generators: int = DEFAULT_SEARCH_GENERATOR_CAP,
):
    """First non-inner automorphism of order exactly p, in canonical order.

    Enumerates generator-image tuples over a canonical minimal generating
    set, pruned by element order, centralizer size, and incremental
    injective-homomorphism checks on the prefix subgroups.
    """
    n = G.order
    if n > max_order:
        raise ResourceCapError(f"order {n} exceeds search cap {max_order}")
    if n == 1:
        return None
    p = G.prime
    tab = G.table()
    invs = G.inverses_idx()
    eid = G.index(G.identity)

    gens = structure.minimal_generating_set(G)
    d = len(gens)
    if d > max_generators:
        raise ResourceCapError(
            f"minimal generating set of size {d} exceeds cap {max_generators}"
        )
    gen_idx = [G.index(g) for g in gens]

    elem_order = [G.element_order(h) for h in G.elements()]
    cz_size = [int((tab[i] == tab[:, i]).sum()) for i in range(n)]

    candidates = [
        [
            i
            for i in range(n)
            if elem_order[i] == elem_order[g] and cz_size[i] == cz_size[g]
        ]
        for g in gen_idx
    ]

    inner_tuples = set()
    for y in range(n):
        inner_tuples.add(
            tuple(int(tab[int(tab[invs[y], g]), y]) for g in gen_idx)
        )

    phi_idx = [G.index(h) for h in structure.frattini(G).element_set]

    # prefix subgroups K_k = <g_0 .. g_k>
    prefix: list[list[int]] = []
    for k in range(d):
        members = {eid}
        frontier = [eid]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gen_idx[: k + 1]:
                    prod = int(tab[h, g])
                    if prod not in members:
                        members.add(prod)
                        nxt.append(prod)
            frontier = nxt
        prefix.append(sorted(members))

    def extend(depth, images):
        """BFS partial map on the prefix subgroup; None if not an injective hom."""
        m = {eid: eid}
        frontier = [eid]
        used_gens = gen_idx[: depth + 1]
        used_imgs = images[: depth + 1]
        while frontier:
            nxt = []
            for h in frontier:
                ih = m[h]
                for g, ig in zip(used_gens, used_imgs):
                    prod = int(tab[h, g])
                    iprod = int(tab[ih, ig])
                    known = m.get(prod)
                    if known is None:
                        m[prod] = iprod
                        nxt.append(prod)
                    elif known != iprod:
                        return None
            frontier = nxt
        if len(set(m.values())) != len(m):
            return None
        return m

    def dfs(depth, images):
        if depth == d:
            m = extend(d - 1, images)
            if m is None or len(m) != n:
                return None
            arr = np.empty(n, dtype=np.int32)
            for h, ih in m.items():
                arr[h] = ih
            if (arr == np.arange(n)).all():
                return None
            acc = arr.copy()
            for _ in range(p - 1):
                acc = arr[acc]
            if not (acc == np.arange(n)).all():
                return None
            if require_fix_frattini and any(arr[i] != i for i in phi_idx):
                return None
            if tuple(int(arr[g]) for g in gen_idx) in inner_tuples:
                return None
            images_map = {G.at(i): G.at(int(arr[i])) for i in range(n)}
            return Automorphism(G, images_map)
        for cand in candidates[depth]:
            images.append(cand)
            if extend(depth, images) is not None:
                hit = dfs(depth + 1, images)
                if hit is not None:
                    return hit
            images.pop()
        return None

    return dfs(0, [])
