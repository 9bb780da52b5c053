"""Braid words over the twisted/flat/virtual generator alphabets.

A word is a strand count ``n`` plus a finite sequence of generators read
left to right, which is top to bottom on the braid.  Everything here is an
immutable value; operations return new words.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class WordError(ValueError):
    """Base class for word construction and parsing failures."""


class UnknownToken(WordError):
    pass


class IndexOutOfRange(WordError):
    pass


class CategoryViolation(WordError):
    pass


class StrandMismatch(WordError):
    pass


class CategoryMismatch(WordError):
    pass


class Kind(enum.Enum):
    """Generator kinds: classical crossing and its inverse, virtual crossing,
    bar, flat crossing."""

    SIGMA = "s"
    SIGMA_INV = "S"
    V = "v"
    B = "b"
    C = "c"


class Category(enum.Enum):
    TWISTED = "twisted"
    FLAT_TWISTED = "flat_twisted"
    VIRTUAL = "virtual"
    FLAT_VIRTUAL = "flat_virtual"
    CLASSICAL = "classical"


ALLOWED_KINDS: dict[Category, frozenset[Kind]] = {
    Category.TWISTED: frozenset({Kind.SIGMA, Kind.SIGMA_INV, Kind.V, Kind.B}),
    Category.FLAT_TWISTED: frozenset({Kind.C, Kind.V, Kind.B}),
    Category.VIRTUAL: frozenset({Kind.SIGMA, Kind.SIGMA_INV, Kind.V}),
    Category.FLAT_VIRTUAL: frozenset({Kind.C, Kind.V}),
    Category.CLASSICAL: frozenset({Kind.SIGMA, Kind.SIGMA_INV}),
}

#: Kinds that exchange the two strands they touch; bars stay on one strand.
SWAP_KINDS = frozenset({Kind.SIGMA, Kind.SIGMA_INV, Kind.V, Kind.C})

_INVERSE_KIND = {
    Kind.SIGMA: Kind.SIGMA_INV,
    Kind.SIGMA_INV: Kind.SIGMA,
    Kind.V: Kind.V,
    Kind.B: Kind.B,
    Kind.C: Kind.C,
}

_KIND_BY_LETTER = {k.value: k for k in Kind}


def max_index(kind: Kind, n: int) -> int:
    """Largest legal index for a generator kind on n strands.

    Bars sit on strands (1..n); every other kind sits between adjacent
    strands (1..n-1).
    """
    return n if kind is Kind.B else n - 1


@dataclass(frozen=True)
class Generator:
    kind: Kind
    index: int

    def token(self) -> str:
        return f"{self.kind.value}{self.index}"

    def inverse(self) -> Generator:
        return Generator(_INVERSE_KIND[self.kind], self.index)

    def __repr__(self) -> str:
        return f"Generator({self.token()!r})"


@dataclass(frozen=True)
class BraidWord:
    n: int
    letters: tuple[Generator, ...]
    category: Category

    def __post_init__(self) -> None:
        if self.n < 1:
            raise WordError(f"strand count must be >= 1, got {self.n}")
        allowed = ALLOWED_KINDS[self.category]
        for g in self.letters:
            if g.kind not in allowed:
                raise CategoryViolation(
                    f"{g.token()} is not allowed in category {self.category.value}"
                )
            if not 1 <= g.index <= max_index(g.kind, self.n):
                raise IndexOutOfRange(
                    f"{g.token()} out of range for n={self.n} "
                    f"(max index {max_index(g.kind, self.n)})"
                )

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(g.token() for g in self.letters)

    def __repr__(self) -> str:
        return f"BraidWord(n={self.n}, {str(self) or 'empty'!r}, {self.category.value})"

    def with_letters(self, letters: tuple[Generator, ...]) -> BraidWord:
        """Same strand count and category, different letter sequence."""
        return BraidWord(self.n, letters, self.category)


_TOKEN_RE = re.compile(r"([sSvbc])([0-9]+)\Z")


def parse_word(text: str, n: int, category: Category | str = Category.TWISTED) -> BraidWord:
    """Parse a whitespace-separated token string (``s2 S1 v1 b3 c1`` style).

    Raises UnknownToken for malformed tokens; index and category checks are
    enforced by the BraidWord constructor.
    """
    cat = Category(category) if isinstance(category, str) else category
    letters = []
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if m is None:
            raise UnknownToken(f"cannot read token {tok!r}")
        letters.append(Generator(_KIND_BY_LETTER[m.group(1)], int(m.group(2))))
    return BraidWord(n, tuple(letters), cat)


def invert(w: BraidWord) -> BraidWord:
    """Group inverse: reverse the letters and invert each one."""
    return w.with_letters(tuple(g.inverse() for g in reversed(w.letters)))


def concat(w1: BraidWord, w2: BraidWord) -> BraidWord:
    if w1.n != w2.n:
        raise StrandMismatch(f"cannot concatenate words on {w1.n} and {w2.n} strands")
    if w1.category != w2.category:
        raise CategoryMismatch(
            f"cannot concatenate {w1.category.value} with {w2.category.value}"
        )
    return w1.with_letters(w1.letters + w2.letters)


def cancels(a: Generator, b: Generator) -> bool:
    """True when ``a b`` is a cancelling pair (ss'/s's, vv, bb, cc on one index)."""
    if a.index != b.index:
        return False
    if a.kind in (Kind.V, Kind.B, Kind.C):
        return b.kind is a.kind
    return b.kind is _INVERSE_KIND[a.kind]


def free_reduce(w: BraidWord) -> BraidWord:
    """Delete adjacent cancelling pairs until none remain.

    The rules are length-reducing and overlap-free, so the normal form is
    unique; a single stack pass computes it.
    """
    out: list[Generator] = []
    for g in w.letters:
        if out and cancels(out[-1], g):
            out.pop()
        else:
            out.append(g)
    return w.with_letters(tuple(out))


@dataclass(frozen=True)
class ClosurePermutation:
    """Strand permutation of a word plus its cycle partition.

    ``mapping[i-1]`` is the bottom position reached by the strand entering at
    top position ``i``.  Cycles are the closure's link components: each cycle
    starts at its smallest element and cycles are sorted by those minima.
    """

    mapping: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]

    @property
    def component_count(self) -> int:
        return len(self.cycles)


def _cycles_of(mapping: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(mapping)
    cycles = []
    for start in range(1, len(mapping) + 1):
        if seen[start - 1]:
            continue
        cyc = []
        x = start
        while not seen[x - 1]:
            seen[x - 1] = True
            cyc.append(x)
            x = mapping[x - 1]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def closure_permutation(w: BraidWord) -> ClosurePermutation:
    """Permutation induced by the word, composed top to bottom.

    Every crossing kind acts as the transposition of the two positions it
    touches; bars act as the identity.  Cycle count equals the number of link
    components of the word's closure.
    """
    where = list(range(w.n))  # where[p] = strand currently at position p (0-based)
    for g in w.letters:
        if g.kind in SWAP_KINDS:
            i = g.index - 1
            where[i], where[i + 1] = where[i + 1], where[i]
    mapping = [0] * w.n
    for pos, strand in enumerate(where):
        mapping[strand] = pos + 1
    return ClosurePermutation(tuple(mapping), _cycles_of(tuple(mapping)))


# ---------------------------------------------------------------------------
# word files: a header line `n=<int> category=<name>` and one token line

_HEADER_RE = re.compile(r"n=([0-9]+)\s+category=([a-z_]+)\Z")


def format_word_file(w: BraidWord) -> str:
    return f"n={w.n} category={w.category.value}\n{w}\n"


def parse_word_file(text: str) -> BraidWord:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise WordError("empty word file")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise WordError(f"bad word-file header: {lines[0]!r}")
    n = int(m.group(1))
    try:
        cat = Category(m.group(2))
    except ValueError:
        raise WordError(f"unknown category {m.group(2)!r}") from None
    return parse_word(" ".join(lines[1:]), n, cat)


def read_word_file(path) -> BraidWord:
    with open(path, encoding="utf-8") as fh:
        return parse_word_file(fh.read())


def write_word_file(path, w: BraidWord) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_word_file(w))
