"""The incremental word-functional contract.

A functional maps words to positive reals.  Searches never evaluate a word
from scratch: they carry an opaque *state* down the enumeration tree and call
:meth:`Functional.extend` once per symbol.  States are treated as immutable
values (``extend`` returns a new one), so a search can branch freely.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Sequence

from .errors import ConfigError
from .words import Alphabet, Word


class Functional:
    """Base class; subclasses implement ``init``, ``extend`` and ``value``.

    Obligations, not enforced here: ``eval(()) == 1``, ``eval(w) > 0`` and
    ``eval(u + v) <= eval(u) * eval(v)``.  The last one is checked by
    :func:`subfekete.fekete.check_submultiplicative`.
    """

    alphabet: Alphabet

    def init(self) -> Any:
        raise NotImplementedError

    def extend(self, state: Any, symbol: int) -> Any:
        raise NotImplementedError

    def value(self, state: Any) -> float:
        raise NotImplementedError

    @property
    def size(self) -> int:
        return self.alphabet.size

    def state_of(self, word: Sequence[int]) -> Any:
        state = self.init()
        for s in self.alphabet.check(word):
            state = self.extend(state, s)
        return state

    def eval(self, word: Sequence[int]) -> float:
        return self.value(self.state_of(word))

    def rate(self, word: Sequence[int]) -> float:
        """Per-symbol growth ``eval(word) ** (1 / len(word))``."""
        if not word:
            raise ConfigError("rate of the empty word is undefined")
        return self.eval(word) ** (1.0 / len(word))


class ScalarFunctional(Functional):
    """``eval(w) = prod(weights[s] for s in w)``; multiplicative, hence submultiplicative."""

    def __init__(self, weights: Sequence[float]):
        weights = tuple(float(x) for x in weights)
        if not weights or any(not (x > 0 and math.isfinite(x)) for x in weights):
            raise ConfigError("scalar weights must be positive and finite")
        self.weights = weights
        self.alphabet = Alphabet(len(weights))

    def init(self) -> float:
        return 1.0

    def extend(self, state: float, symbol: int) -> float:
        return state * self.weights[symbol]

    def value(self, state: float) -> float:
        return state


class WordFunctional(Functional):
    """Wrap an arbitrary ``fn(word) -> float``; the state is the word itself.

    Handy for counterexamples and tests.  Not picklable when ``fn`` is a
    lambda, so it cannot be used with ``workers > 1``.
    """

    def __init__(self, fn: Callable[[Word], float], alphabet_size: int):
        self.fn = fn
        self.alphabet = Alphabet(alphabet_size)

    def init(self) -> Word:
        return ()

    def extend(self, state: Word, symbol: int) -> Word:
        return state + (symbol,)

    def value(self, state: Word) -> float:
        return float(self.fn(state))
