"""Power-commutator presentations: parsing, validation, serialization, consistency.

File format (UTF-8, line oriented, '#' starts a comment):

    group <name>
    prime <p>
    gens <name1> ... <nameN>
    pow <gi> = <word>
    comm <gj> <gi> = <word>     # requires j > i

A <word> is either empty (the identity) or whitespace-separated factors
``gen^exp`` (bare ``gen`` means exponent 1) with exponents in [1, p) and
generators in strictly increasing index order.  Unspecified relations default
to the identity word, so generators commute unless stated otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, ResourceCapError

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

DEFAULT_FULL_ASSOC_CAP = 3**7


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PcPresentation:
    """A validated power-commutator presentation of a group of order p^rank.

    Relation words are exponent vectors of length ``rank`` with entries in
    [0, p).  ``power_relations[i]`` is the value of g_i^p; commutator
    relations map the pair (j, i), j > i, to the value of [g_j, g_i].
    Every relation word may reference only generators of index strictly
    greater than the smaller generator involved, which guarantees that
    collection terminates.
    """

    name: str
    prime: int
    gen_names: tuple[str, ...]
    power_relations: tuple[tuple[int, ...], ...]
    commutator_relations: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    @property
    def rank(self) -> int:
        return len(self.gen_names)

    @property
    def order(self) -> int:
        return self.prime**self.rank

    def commutator_word(self, j: int, i: int) -> tuple[int, ...]:
        """Exponent vector of [g_j, g_i] for 0-based indices j > i."""
        for (jj, ii), word in self.commutator_relations:
            if (jj, ii) == (j, i):
                return word
        return (0,) * self.rank

    def power_word(self, i: int) -> tuple[int, ...]:
        return self.power_relations[i]


def word_to_letters(word: tuple[int, ...]) -> list[int]:
    """Expand an exponent vector into a flat list of generator indices."""
    out: list[int] = []
    for i, e in enumerate(word):
        out.extend([i] * e)
    return out


def _parse_word(tokens, gen_index, prime, rank, line_no, min_index):
    """Parse word tokens into an exponent vector, enforcing shape rules."""
    vec = [0] * rank
    prev = -1
    for tok in tokens:
        if "^" in tok:
            gname, _, etxt = tok.partition("^")
            try:
                exp = int(etxt)
            except ValueError:
                raise ParseError(f"bad exponent {etxt!r}", line=line_no)
        else:
            gname, exp = tok, 1
        if gname not in gen_index:
            raise ParseError(f"unknown generator {gname!r}", line=line_no)
        idx = gen_index[gname]
        if not 0 < exp < prime:
            raise ParseError(
                f"exponent {exp} outside [1, {prime}) for generator {gname!r}",
                line=line_no,
            )
        if idx <= prev:
            raise ParseError(
                f"generator {gname!r} out of order in word (must be strictly increasing)",
                line=line_no,
            )
        if idx < min_index:
            raise ParseError(
                f"relation word references generator {gname!r} with disallowed (too-low) index",
                line=line_no,
            )
        vec[idx] = exp
        prev = idx
    return tuple(vec)


def parse_presentation(text: str, source: str = "<string>") -> PcPresentation:
    """Parse presentation source text into a shape-validated PcPresentation."""
    name = None
    prime = None
    gen_names: tuple[str, ...] | None = None
    gen_index: dict[str, int] = {}
    powers: dict[int, tuple[int, ...]] = {}
    comms: dict[tuple[int, int], tuple[int, ...]] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kw = tokens[0]
        if kw == "group":
            if name is not None:
                raise ParseError("duplicate 'group' line", line=line_no)
            if len(tokens) != 2 or not _NAME_RE.match(tokens[1]):
                raise ParseError("expected 'group <name>'", line=line_no)
            name = tokens[1]
        elif kw == "prime":
            if prime is not None:
                raise ParseError("duplicate 'prime' line", line=line_no)
            if len(tokens) != 2:
                raise ParseError("expected 'prime <p>'", line=line_no)
            try:
                prime = int(tokens[1])
            except ValueError:
                raise ParseError(f"bad prime {tokens[1]!r}", line=line_no)
            if prime == 2:
                raise ParseError("p = 2 is not supported (odd primes only)", line=line_no)
            if not _is_prime(prime):
                raise ParseError(f"{prime} is not prime", line=line_no)
        elif kw == "gens":
            if gen_names is not None:
                raise ParseError("duplicate 'gens' line", line=line_no)
            names = tokens[1:]
            for g in names:
                if not _NAME_RE.match(g):
                    raise ParseError(f"bad generator name {g!r}", line=line_no)
            if len(set(names)) != len(names):
                raise ParseError("duplicate generator name", line=line_no)
            gen_names = tuple(names)
            gen_index = {g: i for i, g in enumerate(gen_names)}
        elif kw in ("pow", "comm"):
            if gen_names is None or prime is None:
                raise ParseError(
                    "'gens' and 'prime' must appear before relations", line=line_no
                )
            if "=" not in tokens:
                raise ParseError("relation line missing '='", line=line_no)
            eq = tokens.index("=")
            lhs, rhs = tokens[1:eq], tokens[eq + 1 :]
            if kw == "pow":
                if len(lhs) != 1:
                    raise ParseError("expected 'pow <g> = <word>'", line=line_no)
                if lhs[0] not in gen_index:
                    raise ParseError(f"unknown generator {lhs[0]!r}", line=line_no)
                i = gen_index[lhs[0]]
                if i in powers:
                    raise ParseError(f"duplicate power relation for {lhs[0]!r}", line=line_no)
                powers[i] = _parse_word(
                    rhs, gen_index, prime, len(gen_names), line_no, min_index=i + 1
                )
            else:
                if len(lhs) != 2:
                    raise ParseError("expected 'comm <gj> <gi> = <word>'", line=line_no)
                for g in lhs:
                    if g not in gen_index:
                        raise ParseError(f"unknown generator {g!r}", line=line_no)
                j, i = gen_index[lhs[0]], gen_index[lhs[1]]
                if j <= i:
                    raise ParseError(
                        "malformed commutator relation: left generator must have "
                        "higher index than right",
                        line=line_no,
                    )
                if (j, i) in comms:
                    raise ParseError(
                        f"duplicate commutator relation for ({lhs[0]}, {lhs[1]})",
                        line=line_no,
                    )
                comms[(j, i)] = _parse_word(
                    rhs, gen_index, prime, len(gen_names), line_no, min_index=i + 1
                )
        else:
            raise ParseError(f"unknown directive {kw!r}", line=line_no)

    if name is None:
        raise ParseError("missing 'group' line")
    if prime is None:
        raise ParseError("missing 'prime' line")
    if gen_names is None:
        raise ParseError("missing 'gens' line")

    rank = len(gen_names)
    zero = (0,) * rank
    power_relations = tuple(powers.get(i, zero) for i in range(rank))
    commutator_relations = tuple(
        ((j, i), comms.get((j, i), zero))
        for j in range(rank)
        for i in range(j)
    )
    # canonical (j, i) lexicographic storage order
    commutator_relations = tuple(
        sorted(commutator_relations, key=lambda item: item[0])
    )
    return PcPresentation(
        name=name,
        prime=prime,
        gen_names=gen_names,
        power_relations=power_relations,
        commutator_relations=commutator_relations,
    )


def _word_text(pres: PcPresentation, word: tuple[int, ...]) -> str:
    parts = [
        f"{pres.gen_names[i]}^{e}" for i, e in enumerate(word) if e
    ]
    return " ".join(parts)


def serialize_presentation(pres: PcPresentation) -> str:
    """Emit the canonical text form (parse o serialize = identity)."""
    lines = [
        f"group {pres.name}",
        f"prime {pres.prime}",
        ("gens " + " ".join(pres.gen_names)).rstrip(),
    ]
    for i in range(pres.rank):
        w = _word_text(pres, pres.power_relations[i])
        lines.append(f"pow {pres.gen_names[i]} =" + (f" {w}" if w else ""))
    for (j, i), word in pres.commutator_relations:
        w = _word_text(pres, word)
        lines.append(
            f"comm {pres.gen_names[j]} {pres.gen_names[i]} =" + (f" {w}" if w else "")
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of a consistency check; consistent iff failures is empty."""

    consistent: bool
    failures: tuple[tuple[str, str, str], ...]
    method: str

    MAX_RECORDED = 25


def _collect_letters(pres: PcPresentation, letters, max_steps=None) -> tuple[int, ...]:
    """Collection from the left; returns the normal-form exponent vector.

    Rewrites the leftmost violation: an adjacent descending pair g_j g_i is
    replaced by g_i g_j [g_j, g_i], and a run of p equal letters g_i^p by the
    power relation word.  Terminates for shape-valid presentations.
    """
    p = pres.prime
    pow_letters = [word_to_letters(pres.power_relations[i]) for i in range(pres.rank)]
    comm_letters = {ji: word_to_letters(w) for ji, w in pres.commutator_relations}
    w = list(letters)
    steps = 0
    i = 0
    while i < len(w):
        if i + 1 < len(w) and w[i] > w[i + 1]:
            j, k = w[i], w[i + 1]
            w[i : i + 2] = [k, j] + comm_letters.get((j, k), [])
            steps += 1
            if max_steps is not None and steps > max_steps:
                raise ResourceCapError(
                    f"collection exceeded {max_steps} steps"
                )
            i = max(i - pres.prime, 0)
            continue
        if w[i : i + p] == [w[i]] * p:
            w[i : i + p] = pow_letters[w[i]]
            steps += 1
            if max_steps is not None and steps > max_steps:
                raise ResourceCapError(
                    f"collection exceeded {max_steps} steps"
                )
            i = max(i - pres.prime, 0)
            continue
        i += 1
    vec = [0] * pres.rank
    for g in w:
        vec[g] += 1
    return tuple(vec)


def collection_steps(pres: PcPresentation, letters) -> int:
    """Number of rewrite steps collection takes on the given letters."""
    p = pres.prime
    pow_letters = [word_to_letters(pres.power_relations[i]) for i in range(pres.rank)]
    comm_letters = {ji: word_to_letters(w) for ji, w in pres.commutator_relations}
    w = list(letters)
    steps = 0
    i = 0
    while i < len(w):
        if i + 1 < len(w) and w[i] > w[i + 1]:
            j, k = w[i], w[i + 1]
            w[i : i + 2] = [k, j] + comm_letters.get((j, k), [])
            steps += 1
            i = max(i - pres.prime, 0)
            continue
        if w[i : i + p] == [w[i]] * p:
            w[i : i + p] = pow_letters[w[i]]
            steps += 1
            i = max(i - pres.prime, 0)
            continue
        i += 1
    return steps


def _render_vec(pres: PcPresentation, vec: tuple[int, ...]) -> str:
    txt = _word_text(pres, vec)
    return txt if txt else "1"


def _overlap_failures(pres: PcPresentation):
    """Evaluate the standard consistency test words via collection."""
    p = pres.prime
    rank = pres.rank
    g = pres.gen_names
    failures = []

    def check(ident, left_letters, right_letters):
        lhs = _collect_letters(pres, left_letters)
        rhs = _collect_letters(pres, right_letters)
        if lhs != rhs:
            failures.append((ident, _render_vec(pres, lhs), _render_vec(pres, rhs)))

    for k in range(rank):
        for j in range(k):
            for i in range(j):
                # g_k (g_j g_i) vs (g_k g_j) g_i
                u = word_to_letters(_collect_letters(pres, [j, i]))
                v = word_to_letters(_collect_letters(pres, [k, j]))
                check(f"assoc({g[k]},{g[j]},{g[i]})", [k] + u, v + [i])
    for j in range(rank):
        for i in range(j):
            # g_j^p g_i two ways
            check(
                f"power-left({g[j]},{g[i]})",
                word_to_letters(pres.power_relations[j]) + [i],
                [j] * (p - 1) + [i, j] + word_to_letters(pres.commutator_word(j, i)),
            )
            # g_j g_i^p two ways
            check(
                f"power-right({g[j]},{g[i]})",
                [i, j]
                + word_to_letters(pres.commutator_word(j, i))
                + [i] * (p - 1),
                [j] + word_to_letters(pres.power_relations[i]),
            )
    for i in range(rank):
        # g_i^(p+1) two ways
        check(
            f"power({g[i]})",
            word_to_letters(pres.power_relations[i]) + [i],
            [i] + word_to_letters(pres.power_relations[i]),
        )
    return failures


def _full_associativity_failures(pres: PcPresentation):
    import numpy as np

    from . import pcgroup

    p = pres.prime
    rank = pres.rank
    n = p**rank
    vecs = list(pcgroup.iter_exponent_vectors(p, rank))
    index = {v: i for i, v in enumerate(vecs)}
    table = np.empty((n, n), dtype=np.int32)
    for a, u in enumerate(vecs):
        lu = word_to_letters(u)
        for b, v in enumerate(vecs):
            table[a, b] = index[_collect_letters(pres, lu + word_to_letters(v))]
    failures = []
    # (uv)w vs u(vw), chunked over u to bound memory
    chunk = max(1, (2**24) // (n * n + 1))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        lhs = table[table[start:stop], :]
        rhs = table[start:stop][:, table]
        bad = np.argwhere(lhs != rhs)
        for a_off, b, c in bad:
            a = start + int(a_off)
            ident = "assoc({},{},{})".format(
                _render_vec(pres, vecs[a]),
                _render_vec(pres, vecs[int(b)]),
                _render_vec(pres, vecs[int(c)]),
            )
            failures.append(
                (
                    ident,
                    _render_vec(pres, vecs[int(lhs[a_off, b, c])]),
                    _render_vec(pres, vecs[int(rhs[a_off, b, c])]),
                )
            )
            if len(failures) >= ConsistencyReport.MAX_RECORDED:
                return failures
    return failures


def check_consistency(
    pres: PcPresentation,
    mode: str = "overlap-tests",
    max_order: int = DEFAULT_FULL_ASSOC_CAP,
) -> ConsistencyReport:
    """Run overlap tests or exhaustive full-associativity on a presentation."""
    if mode == "overlap-tests":
        failures = _overlap_failures(pres)
    elif mode == "full-associativity":
        if pres.order > max_order:
            raise ResourceCapError(
                f"group order {pres.order} exceeds full-associativity cap {max_order}"
            )
        failures = _full_associativity_failures(pres)
    else:
        raise ValueError(f"unknown consistency mode {mode!r}")
    failures = tuple(failures[: ConsistencyReport.MAX_RECORDED])
    return ConsistencyReport(
        consistent=not failures, failures=failures, method=mode
    )
