"""Alphabets, words and subshifts of finite type.

Words are plain tuples of symbol indices.  A :class:`Subshift` is the set of
flows avoiding a finite list of forbidden factors; since that set is
factor-closed, admissibility of a word can be checked incrementally by
looking only at the suffixes ending at its last symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, ConfigError

Word = tuple[int, ...]

#: Longest word any search may build unless the caller raises the cap.
MAX_WORD_LENGTH = 24
#: Largest number of admissible words of one length a search may enumerate.
MAX_WORDS = 1 << 22


@dataclass(frozen=True)
class Limits:
    """Guards against accidental exponential blowup."""

    max_word_length: int = MAX_WORD_LENGTH
    max_words: int = MAX_WORDS

    def check_length(self, n: int) -> None:
        if n > self.max_word_length:
            raise CapExceeded(
                f"word length {n} exceeds the cap of {self.max_word_length}"
            )


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class Alphabet:
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ConfigError(f"alphabet size must be >= 1, got {self.size}")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise ConfigError("alphabet needs exactly one label per symbol")
            if len(set(self.labels)) != self.size:
                raise ConfigError("alphabet labels must be distinct")

    def check(self, word: Sequence[int]) -> Word:
        """Return ``word`` as a tuple, raising if any symbol is out of range."""
        w = tuple(int(s) for s in word)
        for s in w:
            if not 0 <= s < self.size:
                raise ConfigError(f"symbol {s} outside alphabet of size {self.size}")
        return w

    def label(self, word: Sequence[int]) -> str:
        if self.labels is None:
            return format_word(word)
        return "".join(self.labels[s] for s in word)


def parse_word(text: str) -> Word:
    """Parse ``"0110"`` or, for alphabets past 10 symbols, ``"0,11,3"``."""
    text = text.strip()
    if not text:
        return ()
    try:
        if "," in text:
            return tuple(int(part) for part in text.split(","))
        return tuple(int(ch) for ch in text)
    except ValueError:
        raise ConfigError(f"cannot parse word {text!r}") from None


def format_word(word: Sequence[int]) -> str:
    if all(s < 10 for s in word):
        return "".join(str(s) for s in word)
    return ",".join(str(s) for s in word)


def repeat(word: Sequence[int], n: int) -> Word:
    """The length-``n`` prefix of the periodic flow ``word word word ...``."""
    if not word:
        raise ConfigError("period word must be non-empty")
    w = tuple(word)
    return tuple(w[k % len(w)] for k in range(n))


@dataclass(frozen=True)
class Subshift:
    alphabet: Alphabet
    forbidden: frozenset[Word] = field(default_factory=frozenset)

    def __post_init__(self):
        words = frozenset(self.alphabet.check(w) for w in self.forbidden)
        if any(len(w) == 0 for w in words):
            raise ConfigError("forbidden words must be non-empty")
        object.__setattr__(self, "forbidden", words)

    @classmethod
    def from_strings(cls, alphabet: Alphabet, words: Iterable[str]) -> "Subshift":
        return cls(alphabet, frozenset(parse_word(w) for w in words))

    @property
    def max_forbidden_length(self) -> int:
        return max((len(w) for w in self.forbidden), default=0)

    def allows(self, word: Sequence[int]) -> bool:
        """True iff no forbidden word occurs as a contiguous factor of ``word``."""
        w = self.alphabet.check(word)
        return all(self.allows_extension(w[: k + 1]) for k in range(len(w)))

    def allows_extension(self, word: Word) -> bool:
        """Check only the factors ending at the last symbol of ``word``.

        Sufficient when ``word[:-1]`` is already known to be admissible.
        """
        n = len(word)
        for f in self.forbidden:
            if len(f) <= n and word[n - len(f):] == f:
                return False
        return True

    def allows_periodic(self, period: Sequence[int]) -> bool:
        """True iff the periodic flow ``period^infinity`` avoids every forbidden word."""
        p = tuple(period)
        reps = self.max_forbidden_length // len(p) + 2
        return self.allows(p * reps)


def allowed(subshift: Subshift | None, word: Word) -> bool:
    return subshift is None or subshift.allows_extension(word)


def count_admissible(alphabet_size: int, n: int, subshift: Subshift | None = None) -> int:
    """Number of admissible words of length ``n``.

    Dynamic programming over the last ``L - 1`` symbols, ``L`` the longest
    forbidden word, so the cost never depends on the count itself.
    """
    if subshift is None or not subshift.forbidden:
        return alphabet_size**n
    keep = subshift.max_forbidden_length - 1
    counts: dict[Word, int] = {(): 1}
    for _ in range(n):
        nxt: dict[Word, int] = {}
        for tail, c in counts.items():
            for s in range(alphabet_size):
                w = tail + (s,)
                if subshift.allows_extension(w):
                    key = w[len(w) - keep:] if keep else ()
                    nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    return sum(counts.values())


def iter_words(
    alphabet_size: int, n: int, subshift: Subshift | None = None
) -> Iterator[Word]:
    """All admissible words of length ``n`` in lexicographic order."""

    def rec(prefix: Word) -> Iterator[Word]:
        if len(prefix) == n:
            yield prefix
            return
        for s in range(alphabet_size):
            w = prefix + (s,)
            if allowed(subshift, w):
                yield from rec(w)

    yield from rec(())
