"""Words in the free semigroup on ``d`` generators and graded word tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import AlphabetMismatch, CapacityExceeded, OutOfRange

DEFAULT_CAPACITY = 100_000


@dataclass(frozen=True, order=False)
class Word:
    """A word ``i_1 ... i_k`` with 1-based letters; ``()`` is the neutral word."""

    letters: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(i) for i in self.letters))
        if self.d < 1:
            raise OutOfRange(f"alphabet size must be >= 1, got {self.d}")
        for i in self.letters:
            if not 1 <= i <= self.d:
                raise OutOfRange(f"letter {i} outside 1..{self.d}")

    @classmethod
    def empty(cls, d: int) -> "Word":
        return cls((), d)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return concat(self, other)

    def reversed(self) -> "Word":
        return reverse(self)

    def parent(self) -> "Word":
        """Drop the last letter."""
        return Word(self.letters[:-1], self.d)

    def render(self) -> str:
        return render_word(self)

    def __str__(self) -> str:
        return self.render()


def concat(alpha: Word, beta: Word) -> Word:
    if alpha.d != beta.d:
        raise AlphabetMismatch(f"alphabet sizes {alpha.d} and {beta.d} differ")
    return Word(alpha.letters + beta.letters, alpha.d)


def reverse(alpha: Word) -> Word:
    return Word(alpha.letters[::-1], alpha.d)


def render_word(alpha: Word) -> str:
    if not alpha.letters:
        return "e"
    if alpha.d <= 9:
        return "".join(str(i) for i in alpha.letters)
    return ".".join(str(i) for i in alpha.letters)


def parse_word(text: str, d: int) -> Word:
    text = text.strip()
    if text in ("e", ""):
        return Word.empty(d)
    if "." in text or d > 9:
        return Word(tuple(int(t) for t in text.split(".")), d)
    return Word(tuple(int(c) for c in text), d)


def count_words(d: int, N: int) -> int:
    """Number of words of length <= N over d letters."""
    if N < 0:
        return 0
    if d == 1:
        return N + 1
    return (d ** (N + 1) - 1) // (d - 1)


@dataclass(frozen=True)
class WordTable:
    """All words of length <= N in graded lexicographic order."""

    d: int
    N: int
    words: tuple[Word, ...]
    index: dict = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, k: int) -> Word:
        return self.words[k]

    def __iter__(self):
        return iter(self.words)

    def __contains__(self, w: Word) -> bool:
        return w in self.index

    def position(self, w: Word) -> int:
        return self.index[w]

    def level_size(self, N: int) -> int:
        """Number of leading entries with length <= N (a prefix of ``words``)."""
        return count_words(self.d, min(N, self.N))

    def restrict(self, N: int) -> "WordTable":
        return enumerate_words(self.d, N)

    def parent_index(self, k: int) -> int:
        """Table position of ``words[k]`` with its last letter removed (k > 0)."""
        return self.index[self.words[k].parent()]


def enumerate_words(d: int, N: int, capacity: int = DEFAULT_CAPACITY) -> WordTable:
    if d < 1 or N < 0:
        raise OutOfRange(f"need d >= 1 and N >= 0, got d={d}, N={N}")
    size = count_words(d, N)
    if size > capacity:
        raise CapacityExceeded(f"{size} words for d={d}, N={N} exceeds capacity {capacity}")
    words = []
    for length in range(N + 1):
        for letters in itertools.product(range(1, d + 1), repeat=length):
            words.append(Word(letters, d))
    index = {w: k for k, w in enumerate(words)}
    return WordTable(d, N, tuple(words), index)


def word_offset(d: int, length: int) -> int:
    """Position of the first word of the given length in graded order."""
    return count_words(d, length - 1)


def word_position(letters, d: int) -> int:
    """Graded-lex position computed arithmetically (no table needed)."""
    value = 0
    for i in letters:
        value = value * d + (i - 1)
    return word_offset(d, len(letters)) + value
