"""Words over {0, ..., n}, lexicographic combinatorics and Champernowne-type blocks.

The blocks ``W_0, ..., W_n`` are cyclic rotations of the concatenation of all
length-``k`` words in increasing lexicographic order.  Any infinite
concatenation of them is ``k``-simply normal; the helpers here generate such
sequences and count block occurrences in finite prefixes.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import NoSuccessorError, PreconditionError

__all__ = [
    "Alphabet",
    "Word",
    "ChampernowneBlocks",
    "FrequencyTable",
    "MissingZerosReport",
    "lex_words",
    "word_successor",
    "word_predecessor",
    "champernowne_blocks",
    "count_block_occurrences",
    "verify_missing_zeros",
    "block_frequency",
    "k_normal_defect",
    "champernowne_stream",
]

_DENSE_LIMIT = 255


@dataclass(frozen=True)
class Alphabet:
    """The digit set {0, ..., n}."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise PreconditionError(f"alphabet bound must be an integer >= 0, got {self.n!r}")

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def digits(self) -> range:
        return range(self.n + 1)


def _alphabet(a) -> Alphabet:
    return a if isinstance(a, Alphabet) else Alphabet(int(a))


def _pack(digits: Iterable[int], n: int):
    if n <= _DENSE_LIMIT:
        return bytes(digits)
    return tuple(int(d) for d in digits)


@dataclass(frozen=True, init=False)
class Word:
    """A finite word over {0, ..., n}.

    Digits are stored as ``bytes`` when ``n <= 255`` and as a tuple otherwise;
    indexing and iteration yield ints either way.
    """

    digits: bytes | tuple
    n: int

    def __init__(self, digits: Iterable[int] = (), n: int | Alphabet = 1):
        n = _alphabet(n).n
        ds = list(digits)
        for d in ds:
            if not 0 <= d <= n:
                raise PreconditionError(f"digit {d} outside alphabet {{0,...,{n}}}")
        object.__setattr__(self, "digits", _pack(ds, n))
        object.__setattr__(self, "n", n)

    @classmethod
    def _raw(cls, packed, n: int) -> "Word":
        w = object.__new__(cls)
        object.__setattr__(w, "digits", packed)
        object.__setattr__(w, "n", n)
        return w

    @classmethod
    def parse(cls, text: str, n: int | Alphabet) -> "Word":
        """Inverse of ``str``: ASCII digits for n <= 9, comma separated otherwise."""
        n = _alphabet(n).n
        text = text.strip()
        if not text:
            return cls((), n)
        if "," in text or n > 9:
            return cls((int(t) for t in text.split(",")), n)
        return cls((int(c) for c in text), n)

    @classmethod
    def constant(cls, digit: int, length: int, n: int | Alphabet) -> "Word":
        return cls([digit] * length, n)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n)

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word._raw(self.digits[idx], self.n)
        return self.digits[idx]

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if other.n != self.n:
            raise PreconditionError("cannot concatenate words over different alphabets")
        return Word._raw(self.digits + other.digits, self.n)

    def __mul__(self, times: int) -> "Word":
        return Word._raw(self.digits * times, self.n)

    def __lt__(self, other: "Word") -> bool:
        # a < b iff a0^inf < b0^inf
        m = max(len(self), len(other))
        return tuple(self) + (0,) * (m - len(self)) < tuple(other) + (0,) * (m - len(other))

    def __str__(self) -> str:
        if self.n <= 9:
            return "".join(str(d) for d in self.digits)
        return ",".join(str(d) for d in self.digits)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, n={self.n})"

    def count(self, digit: int) -> int:
        return sum(1 for d in self.digits if d == digit)

    def contains(self, sub: "Word") -> bool:
        """Plain subword search."""
        if self.n <= _DENSE_LIMIT and sub.n <= _DENSE_LIMIT:
            return bytes(sub.digits) in self.digits
        s, t = tuple(self), tuple(sub)
        return any(s[j:j + len(t)] == t for j in range(len(s) - len(t) + 1))


def _check_k(k: int) -> None:
    if k < 1:
        raise PreconditionError(f"block length k must be >= 1, got {k}")


def lex_words(alphabet: Alphabet | int, k: int) -> list[Word]:
    """All (n+1)^k words of length k in increasing lexicographic order."""
    alphabet = _alphabet(alphabet)
    _check_k(k)
    return [Word._raw(_pack(t, alphabet.n), alphabet.n)
            for t in itertools.product(alphabet.digits, repeat=k)]


def word_successor(w: Word) -> Word:
    """Lexicographically next word of the same length (a^+)."""
    ds = list(w)
    j = len(ds) - 1
    while j >= 0 and ds[j] == w.n:
        ds[j] = 0
        j -= 1
    if j < 0:
        raise NoSuccessorError(f"{w} is the largest word of its length; no successor")
    ds[j] += 1
    return Word(ds, w.n)


def word_predecessor(w: Word) -> Word:
    """Lexicographically previous word of the same length (a^-)."""
    ds = list(w)
    j = len(ds) - 1
    while j >= 0 and ds[j] == 0:
        ds[j] = w.n
        j -= 1
    if j < 0:
        raise NoSuccessorError(f"{w} is the smallest word of its length; no predecessor")
    ds[j] -= 1
    return Word(ds, w.n)


@dataclass(frozen=True)
class ChampernowneBlocks:
    alphabet: Alphabet
    k: int
    blocks: tuple[Word, ...]

    @property
    def block_length(self) -> int:
        return self.k * self.alphabet.size ** self.k

    def __getitem__(self, i: int) -> Word:
        return self.blocks[i]

    def __len__(self) -> int:
        return len(self.blocks)

    def check_invariants(self) -> None:
        n, k = self.alphabet.n, self.k
        per_digit = k * (n + 1) ** (k - 1)
        for i, b in enumerate(self.blocks):
            if len(b) != self.block_length:
                raise AssertionError(f"W_{i} has length {len(b)}")
            if list(b[:k]) != [0] * (k - 1) + [i]:
                raise AssertionError(f"W_{i} does not begin with 0^(k-1) {i}")
            for digit in self.alphabet.digits:
                if b.count(digit) != per_digit:
                    raise AssertionError(f"digit {digit} occurs {b.count(digit)} times in W_{i}")


def champernowne_blocks(alphabet: Alphabet | int, k: int) -> ChampernowneBlocks:
    """Blocks W_i = w_i w_{i+1} ... w_last w_0 ... w_{i-1} for i = 0..n."""
    alphabet = _alphabet(alphabet)
    words = lex_words(alphabet, k)
    blocks = []
    for i in alphabet.digits:
        rotated = words[i:] + words[:i]
        blocks.append(Word._raw(b"".join(w.digits for w in rotated) if alphabet.n <= _DENSE_LIMIT
                                else sum((w.digits for w in rotated), ()), alphabet.n))
    return ChampernowneBlocks(alphabet, k, tuple(blocks))


def _windows(c: Word, k: int, limit: int | None = None) -> Counter:
    total = len(c) - k + 1 if limit is None else limit
    ds = c.digits
    return Counter(ds[j:j + k] for j in range(max(total, 0)))


def count_block_occurrences(c: Word, target: Word) -> int:
    """Number of (possibly overlapping) start positions at which target occurs in c."""
    k = len(target)
    if k < 1:
        raise PreconditionError("target must be non-empty")
    t = bytes(target.digits) if c.n <= _DENSE_LIMIT else tuple(target)
    ds = c.digits
    return sum(1 for j in range(len(ds) - k + 1) if ds[j:j + k] == t)


@dataclass(frozen=True)
class MissingZerosReport:
    """Per (block, word) counts over the first k*(n+1)^k windows of W_i 0^(k-1)."""

    n: int
    k: int
    entries: tuple[tuple[int, int, int], ...]  # (i, l, count)

    @property
    def failures(self) -> list[tuple[int, int, int]]:
        return [e for e in self.entries if e[2] != self.k]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        ok = len(self.entries) - len(self.failures)
        return f"{ok}/{len(self.entries)} pass"


def verify_missing_zeros(alphabet: Alphabet | int, k: int) -> MissingZerosReport:
    alphabet = _alphabet(alphabet)
    blocks = champernowne_blocks(alphabet, k)
    words = lex_words(alphabet, k)
    pad = Word.constant(0, k - 1, alphabet.n)
    entries = []
    for i, block in enumerate(blocks.blocks):
        # the appended zeros are lookahead only: exactly |W_i| windows are counted
        counts = _windows(block + pad, k, limit=blocks.block_length)
        for l, w in enumerate(words):
            entries.append((i, l, counts.get(w.digits, 0)))
    return MissingZerosReport(alphabet.n, k, tuple(entries))


@dataclass(frozen=True)
class FrequencyTable:
    n: int
    k: int
    counts: dict = field(hash=False)
    window_total: int

    def count(self, block: Word) -> int:
        return self.counts.get(block, 0)

    def frequency(self, block: Word) -> float:
        return self.count(block) / self.window_total

    def to_csv(self, include_zero: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["block", "count", "frequency"])
        blocks = lex_words(self.n, self.k) if include_zero else sorted(self.counts, key=tuple)
        for b in blocks:
            c = self.counts.get(b, 0)
            writer.writerow([str(b), c, repr(c / self.window_total)])
        return buf.getvalue()


def block_frequency(prefix: Word, k: int) -> FrequencyTable:
    """Sliding-window counts of every length-k block of prefix."""
    _check_k(k)
    if len(prefix) < k:
        raise PreconditionError(f"prefix of length {len(prefix)} is shorter than k={k}")
    raw = _windows(prefix, k)
    counts = {Word._raw(key, prefix.n): v for key, v in raw.items()}
    return FrequencyTable(prefix.n, k, counts, len(prefix) - k + 1)


def k_normal_defect(prefix: Word, k: int) -> float:
    """max_b |freq_b(prefix) - (n+1)^-k| over all length-k words b."""
    table = block_frequency(prefix, k)
    uniform = (prefix.n + 1) ** -k
    worst = max(abs(c / table.window_total - uniform) for c in table.counts.values())
    if len(table.counts) < (prefix.n + 1) ** k:
        worst = max(worst, uniform)
    return worst


def champernowne_stream(alphabet: Alphabet | int, k: int, index_source: Iterable[int]) -> Iterator[int]:
    """Lazily yield the digits of W_{i_1} W_{i_2} ... for indices drawn from index_source."""
    blocks = champernowne_blocks(alphabet, k)
    n = blocks.alphabet.n
    for i in index_source:
        if not 0 <= i <= n:
            raise PreconditionError(f"block index {i} outside 0..{n}")
        yield from blocks.blocks[i]


def take(stream: Iterator[int], m: int, n: int | Alphabet) -> Word:
    """First m digits of a digit stream as a Word."""
    return Word(itertools.islice(stream, m), n)


def words_up_to(alphabet: Alphabet | int, max_len: int, min_len: int = 1) -> list[Word]:
    return [w for length in range(min_len, max_len + 1) for w in lex_words(alphabet, length)]


def as_word(w: Word | str | Sequence[int], n: int) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w, n)
    return Word(w, n)
