"""Group presentations as explicit relation instances, plus a bounded
bidirectional rewriting search for word equivalence.

Words are rewritten as raw letter strings: one step is a single subword
substitution (either side of a relation, in either direction) or the
insertion/removal of a cancelling pair.  No implicit free reduction happens
between steps.  That keeps the one-step neighbor relation exactly symmetric
and makes every returned certificate replayable letter by letter.

Relations are materialized per strand count rather than kept schematic, so
the rewrite engine is a pure string matcher.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .words import (
    BraidWord,
    Category,
    Generator,
    Kind,
    parse_word,
)


class UnsupportedN(ValueError):
    pass


class Mismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# letter codec: one byte per letter, so subword scans ride on bytes.find

_KIND_CODE = {Kind.SIGMA: 0, Kind.SIGMA_INV: 1, Kind.V: 2, Kind.B: 3, Kind.C: 4}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}
_INDEX_SPAN = 48  # supports strand counts up to 47, far beyond desk scale


def encode_letters(letters: tuple[Generator, ...]) -> bytes:
    return bytes(_KIND_CODE[g.kind] * _INDEX_SPAN + g.index for g in letters)


def decode_letters(data: bytes) -> tuple[Generator, ...]:
    return tuple(
        Generator(_CODE_KIND[c // _INDEX_SPAN], c % _INDEX_SPAN) for c in data
    )


def encode_word(w: BraidWord) -> bytes:
    if w.n >= _INDEX_SPAN:
        raise UnsupportedN(f"rewriting engine supports n < {_INDEX_SPAN}")
    return encode_letters(w.letters)


def decode_word(data: bytes, n: int, category: Category) -> BraidWord:
    return BraidWord(n, decode_letters(data), category)


# ---------------------------------------------------------------------------
# relations and presentations


@dataclass(frozen=True)
class Relation:
    """One bidirectional relation instance, lhs = rhs."""

    name: str
    lhs: tuple[Generator, ...]
    rhs: tuple[Generator, ...]

    def __str__(self) -> str:
        left = " ".join(g.token() for g in self.lhs) or "1"
        right = " ".join(g.token() for g in self.rhs) or "1"
        return f"{self.name}: {left} = {right}"


class Family(enum.Enum):
    TB_FULL = "TB_full"
    FT_FULL = "FT_full"
    TB_REDUCED = "TB_reduced"
    FT_REDUCED = "FT_reduced"
    VB_REDUCED = "VB_reduced"
    FV_REDUCED = "FV_reduced"


FAMILY_CATEGORY = {
    Family.TB_FULL: Category.TWISTED,
    Family.FT_FULL: Category.FLAT_TWISTED,
    Family.TB_REDUCED: Category.TWISTED,
    Family.FT_REDUCED: Category.FLAT_TWISTED,
    Family.VB_REDUCED: Category.VIRTUAL,
    Family.FV_REDUCED: Category.FLAT_VIRTUAL,
}

REDUCED_OF_FULL = {Family.TB_FULL: Family.TB_REDUCED, Family.FT_FULL: Family.FT_REDUCED}


@dataclass(frozen=True)
class Presentation:
    family: Family
    n: int
    relations: tuple[Relation, ...]
    alphabet: frozenset[Generator]

    @property
    def category(self) -> Category:
        return FAMILY_CATEGORY[self.family]

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def dump(self) -> str:
        """One relation per line, for golden files."""
        return "\n".join(str(r) for r in self.relations) + "\n"


def _gens(text: str, n: int, category: Category) -> tuple[Generator, ...]:
    return parse_word(text, n, category).letters


def _full_alphabet(n: int, category: Category) -> frozenset[Generator]:
    out = set()
    classical = (
        [Kind.SIGMA, Kind.SIGMA_INV]
        if category is Category.TWISTED or category is Category.VIRTUAL
        else [Kind.C]
    )
    for k in classical:
        out.update(Generator(k, i) for i in range(1, n))
    out.update(Generator(Kind.V, i) for i in range(1, n))
    if category in (Category.TWISTED, Category.FLAT_TWISTED):
        out.update(Generator(Kind.B, i) for i in range(1, n + 1))
    return frozenset(out)


def _reduced_alphabet(n: int, category: Category) -> frozenset[Generator]:
    out = {Generator(Kind.V, i) for i in range(1, n)}
    if category in (Category.TWISTED, Category.VIRTUAL):
        out.add(Generator(Kind.SIGMA, 1))
        out.add(Generator(Kind.SIGMA_INV, 1))
    else:
        out.add(Generator(Kind.C, 1))
    if category in (Category.TWISTED, Category.FLAT_TWISTED):
        out.add(Generator(Kind.B, 1))
    return frozenset(out)


def full_presentation(family: Family, n: int) -> Presentation:
    """Every defining relation instance of the full presentation, over all
    index-valid instantiations, including both equivalent variants of the
    bar-slide and bar-sandwich families."""
    if family not in (Family.TB_FULL, Family.FT_FULL):
        raise ValueError(f"{family} is not a full presentation family")
    if n < 2:
        raise UnsupportedN("full presentations need n >= 2")
    cat = FAMILY_CATEGORY[family]
    flat = family is Family.FT_FULL
    x = "c" if flat else "s"  # the classical-ish crossing letter
    rels: list[Relation] = []

    def add(name: str, lhs: str, rhs: str) -> None:
        rels.append(Relation(name, _gens(lhs, n, cat), _gens(rhs, n, cat)))

    if flat:
        for i in range(1, n):
            add(f"flat.involution[{i}]", f"c{i} c{i}", "")
        for i in range(1, n - 1):
            add(f"flat.braid[{i}]", f"c{i} c{i+1} c{i}", f"c{i+1} c{i} c{i+1}")
        for i in range(1, n - 1):
            for j in range(i + 2, n):
                add(f"flat.commute[{i},{j}]", f"c{i} c{j}", f"c{j} c{i}")
    else:
        for i in range(1, n):
            add(f"braid.cancel[{i}]", f"s{i} S{i}", "")
        for i in range(1, n - 1):
            add(f"braid.braid[{i}]", f"s{i} s{i+1} s{i}", f"s{i+1} s{i} s{i+1}")
        for i in range(1, n - 1):
            for j in range(i + 2, n):
                add(f"braid.commute[{i},{j}]", f"s{i} s{j}", f"s{j} s{i}")

    for i in range(1, n):
        add(f"virtual.involution[{i}]", f"v{i} v{i}", "")
    for i in range(1, n - 1):
        for j in range(i + 2, n):
            add(f"virtual.commute[{i},{j}]", f"v{i} v{j}", f"v{j} v{i}")
    for i in range(1, n - 1):
        add(f"virtual.braid[{i}]", f"v{i} v{i+1} v{i}", f"v{i+1} v{i} v{i+1}")

    for i in range(1, n + 1):
        add(f"twisted.involution[{i}]", f"b{i} b{i}", "")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            add(f"twisted.commute[{i},{j}]", f"b{i} b{j}", f"b{j} b{i}")

    mixed = "flat" if flat else "sigma"
    for i in range(1, n):
        for j in range(1, n):
            if abs(i - j) >= 2:
                add(f"mixed.{mixed}-v[{i},{j}]", f"{x}{i} v{j}", f"v{j} {x}{i}")
    for i in range(1, n - 1):
        add(
            f"mixed.v-{mixed}-v[{i}]",
            f"v{i} {x}{i+1} v{i}",
            f"v{i+1} {x}{i} v{i+1}",
        )
    for i in range(1, n):
        add(f"mixed.bar-slide[{i}]", f"b{i} v{i}", f"v{i} b{i+1}")
        add(f"mixed.bar-slide-var[{i}]", f"v{i} b{i}", f"b{i+1} v{i}")
    for i in range(1, n):
        add(
            f"mixed.bar-sandwich[{i}]",
            f"b{i} b{i+1} {x}{i} b{i+1} b{i}",
            f"v{i} {x}{i} v{i}",
        )
        add(
            f"mixed.bar-sandwich-var[{i}]",
            f"b{i+1} b{i} {x}{i} b{i} b{i+1}",
            f"v{i} {x}{i} v{i}",
        )
    for i in range(1, n + 1):
        for j in range(1, n):
            if j > i or j < i - 1:
                add(f"mixed.bar-v[{i},{j}]", f"b{i} v{j}", f"v{j} b{i}")
    for i in range(1, n + 1):
        for j in range(1, n):
            if j > i or j < i - 1:
                add(f"mixed.bar-{mixed}[{i},{j}]", f"b{i} {x}{j}", f"{x}{j} b{i}")

    return Presentation(family, n, tuple(rels), _full_alphabet(n, cat))


def reduced_presentation(family: Family, n: int) -> Presentation:
    """The reduced presentation on generators {s1 or c1, b1, v1..v(n-1)},
    instantiated over indices that exist at this n."""
    if family not in (
        Family.TB_REDUCED,
        Family.FT_REDUCED,
        Family.VB_REDUCED,
        Family.FV_REDUCED,
    ):
        raise ValueError(f"{family} is not a reduced presentation family")
    if n < 2:
        raise UnsupportedN("reduced presentations need n >= 2")
    cat = FAMILY_CATEGORY[family]
    flat = family in (Family.FT_REDUCED, Family.FV_REDUCED)
    barred = family in (Family.TB_REDUCED, Family.FT_REDUCED)
    x = "c1" if flat else "s1"
    rels: list[Relation] = []

    def add(name: str, lhs: str, rhs: str) -> None:
        rels.append(Relation(name, _gens(lhs, n, cat), _gens(rhs, n, cat)))

    for i in range(1, n - 1):
        add(f"red.v-braid[{i}]", f"v{i} v{i+1} v{i}", f"v{i+1} v{i} v{i+1}")
    for i in range(1, n - 1):
        for j in range(i + 2, n):
            add(f"red.v-commute[{i},{j}]", f"v{i} v{j}", f"v{j} v{i}")
    for i in range(1, n):
        add(f"red.v-involution[{i}]", f"v{i} v{i}", "")
    for j in range(3, n):
        add(f"red.{'flat' if flat else 'sigma'}-v[{j}]", f"{x} v{j}", f"v{j} {x}")
    if flat:
        add("red.flat-involution", f"{x} {x}", "")
    if barred:
        add("red.bar-involution", "b1 b1", "")
        for j in range(2, n):
            add(f"red.bar-v[{j}]", f"b1 v{j}", f"v{j} b1")
    if n >= 3:
        a, b = f"v1 {x} v1", f"v2 {x} v2"
        add(
            f"red.{'flat' if flat else 'sigma'}-braid",
            f"{a} {b} {a}",
            f"{b} {a} {b}",
        )
    if n >= 4:
        t = f"v2 v3 v1 v2 {x} v2 v1 v3 v2"
        add(f"red.{'flat' if flat else 'sigma'}-commute", f"{x} {t}", f"{t} {x}")
    if barred:
        add("red.bar-commute", "b1 v1 b1 v1", "v1 b1 v1 b1")
        if n >= 3:
            k = "v2 v1 b1 v1 v2"
            add(
                f"red.{'flat' if flat else 'sigma'}-bar-commute",
                f"{x} {k}",
                f"{k} {x}",
            )
        add(
            "red.bar-sandwich",
            f"v1 b1 v1 b1 {x} b1 v1 b1 v1",
            f"v1 {x} v1",
        )

    return Presentation(family, n, tuple(rels), _reduced_alphabet(n, cat))


# ---------------------------------------------------------------------------
# rewrite rules, steps, replay


@dataclass(frozen=True)
class RewriteStep:
    """One substitution: replace `rule`'s source side at `pos` by the other
    side.  forward means lhs -> rhs.  Insertions are rl-steps of a rule whose
    rhs is empty."""

    rule: str
    forward: bool
    pos: int

    def inverse(self) -> RewriteStep:
        return RewriteStep(self.rule, not self.forward, self.pos)


RuleTable = dict[str, tuple[bytes, bytes]]


def pair_rules(alphabet: frozenset[Generator]) -> RuleTable:
    """Cancelling-pair rules gg' = 1 for every alphabet letter.

    For self-inverse kinds these coincide with the involution relations; for
    classical crossings both orders are materialized, which substitution by
    the cancel relation alone would miss.
    """
    table: RuleTable = {}
    for g in sorted(alphabet, key=lambda g: (g.kind.value, g.index)):
        pair = encode_letters((g, g.inverse()))
        table[f"pair.{g.token()}"] = (pair, b"")
    return table


def rule_table(p: Presentation, include_pairs: bool = True) -> RuleTable:
    table: RuleTable = {}
    for r in p.relations:
        table[r.name] = (encode_letters(r.lhs), encode_letters(r.rhs))
    if include_pairs:
        for name, sides in pair_rules(p.alphabet).items():
            table.setdefault(name, sides)
    return table


def apply_step(data: bytes, step: RewriteStep, table: RuleTable) -> bytes:
    if step.rule not in table:
        raise Mismatch(f"unknown rule {step.rule!r}")
    lhs, rhs = table[step.rule]
    src, dst = (lhs, rhs) if step.forward else (rhs, lhs)
    if data[step.pos : step.pos + len(src)] != src or step.pos > len(data):
        raise Mismatch(
            f"rule {step.rule!r} does not match at position {step.pos}"
        )
    return data[: step.pos] + dst + data[step.pos + len(src) :]


def replay_path(
    w: BraidWord, path: tuple[RewriteStep, ...], table: RuleTable
) -> BraidWord:
    """Apply a certificate step by step; raises Mismatch if it does not fit."""
    data = encode_word(w)
    for step in path:
        data = apply_step(data, step, table)
    return decode_word(data, w.n, w.category)


# ---------------------------------------------------------------------------
# neighbor generation and bidirectional search


def _occurrences(data: bytes, sub: bytes) -> list[int]:
    if not sub:
        return list(range(len(data) + 1))
    out = []
    start = data.find(sub)
    while start != -1:
        out.append(start)
        start = data.find(sub, start + 1)
    return out


def _neighbor_steps(
    data: bytes,
    rules: list[tuple[str, bytes, bytes]],
    max_length: int,
    allow_insertions: bool,
):
    """Yield (step, result) pairs in a deterministic order."""
    for name, lhs, rhs in rules:
        for src, dst, fwd in ((lhs, rhs, True), (rhs, lhs, False)):
            if not src and not allow_insertions:
                continue
            if len(data) - len(src) + len(dst) > max_length:
                continue
            for pos in _occurrences(data, src):
                yield (
                    RewriteStep(name, fwd, pos),
                    data[:pos] + dst + data[pos + len(src) :],
                )


def rewrite_neighbors(w: BraidWord, p: Presentation) -> set[BraidWord]:
    """All words one substitution away, plus all cancelling-pair insertions.

    Raw one-step semantics: the result of a substitution is *not* freely
    reduced, so the relation is symmetric (w' is a neighbor of w exactly when
    w is a neighbor of w').  Multi-step consequences like collapsing the
    freshly created pairs belong to the search, not to the neighbor set.
    """
    if w.n != p.n:
        raise Mismatch(f"word has n={w.n}, presentation has n={p.n}")
    if w.category != p.category:
        raise Mismatch(
            f"word category {w.category.value} does not match {p.family.value}"
        )
    data = encode_word(w)
    rules = [(name, a, b) for name, (a, b) in rule_table(p).items()]
    longest = max((max(len(a), len(b)) for _, a, b in rules), default=0)
    limit = len(data) + max(2, longest)
    out = set()
    for _, result in _neighbor_steps(data, rules, limit, True):
        out.add(decode_word(result, w.n, w.category))
    return out


@dataclass(frozen=True)
class SearchOutcome:
    """Equal carries a replayable path; Unknown asserts nothing."""

    equal: bool
    path: tuple[RewriteStep, ...] = ()
    explored: int = 0

    @property
    def label(self) -> str:
        return "Equal" if self.equal else "Unknown"

    def __bool__(self) -> bool:
        return self.equal


def _reconstruct(
    meeting: bytes,
    fwd_seen: dict[bytes, tuple[bytes | None, RewriteStep | None]],
    bwd_seen: dict[bytes, tuple[bytes | None, RewriteStep | None]],
) -> tuple[RewriteStep, ...]:
    steps: list[RewriteStep] = []
    node = meeting
    while True:
        parent, step = fwd_seen[node]
        if parent is None:
            break
        steps.append(step)
        node = parent
    steps.reverse()
    node = meeting
    while True:
        parent, step = bwd_seen[node]
        if parent is None:
            break
        steps.append(step.inverse())
        node = parent
    return tuple(steps)


def _bidirectional(
    start: bytes,
    goal: bytes,
    rules: list[tuple[str, bytes, bytes]],
    max_length: int,
    max_nodes: int,
    allow_insertions: bool,
) -> tuple[tuple[RewriteStep, ...] | None, int]:
    if start == goal:
        return (), 0
    fwd_seen: dict = {start: (None, None)}
    bwd_seen: dict = {goal: (None, None)}
    fwd_frontier, bwd_frontier = [start], [goal]
    explored = 0
    while fwd_frontier and bwd_frontier and explored < max_nodes:
        # expand the smaller frontier; sort for deterministic tie-breaking
        forward = len(fwd_frontier) <= len(bwd_frontier)
        frontier = fwd_frontier if forward else bwd_frontier
        seen, other = (fwd_seen, bwd_seen) if forward else (bwd_seen, fwd_seen)
        frontier.sort()
        next_frontier = []
        for node in frontier:
            explored += 1
            if explored > max_nodes:
                break
            for step, result in _neighbor_steps(
                node, rules, max_length, allow_insertions
            ):
                if result in seen:
                    continue
                seen[result] = (node, step)
                if result in other:
                    # _reconstruct walks the forward chain back to the start
                    # and the backward chain out to the goal, so it applies
                    # no matter which frontier produced the meeting word
                    return _reconstruct(result, fwd_seen, bwd_seen), explored
                next_frontier.append(result)
        if forward:
            fwd_frontier = next_frontier
        else:
            bwd_frontier = next_frontier
    return None, explored


def equivalent_bounded(
    w1: BraidWord,
    w2: BraidWord,
    p: Presentation,
    max_length: int | None = None,
    max_nodes: int = 10**6,
) -> SearchOutcome:
    """Bounded bidirectional search for a rewrite path from w1 to w2.

    Equal outcomes carry a certificate that replays exactly; Unknown means
    the bounds were exhausted and asserts nothing about inequality (use the
    quotient invariants for disequality certificates).

    The search runs in two stages: substitutions and removals only, then,
    if needed, with cancelling-pair insertions as well.  Both stages respect
    max_length; node budgets are split between them.
    """
    if w1.n != w2.n or w1.n != p.n:
        raise Mismatch("strand counts differ")
    if w1.category != w2.category or w1.category != p.category:
        raise Mismatch("categories differ")
    if max_length is None:
        max_length = len(w1) + len(w2) + 8
    a, b = encode_word(w1), encode_word(w2)
    rules = [(name, lhs, rhs) for name, (lhs, rhs) in rule_table(p).items()]
    budget_a = max_nodes // 4
    path, seen_a = _bidirectional(a, b, rules, max_length, budget_a, False)
    total = seen_a
    if path is None:
        path, seen_b = _bidirectional(
            a, b, rules, max_length, max_nodes - budget_a, True
        )
        total += seen_b
    if path is None:
        return SearchOutcome(False, (), total)
    return SearchOutcome(True, path, total)
