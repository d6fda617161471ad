"""Depth-first maximisation shared by the Phi_n and max-min-rate searches.

Results must not depend on enumeration order or on how the tree is split
between workers.  :class:`Records` keeps the strict running maxima seen in
lexicographic order; the reported word is the lexicographically smallest one
whose value lies within ``TIE_RTOL`` of the overall maximum.  Both the
maximum and that word are properties of the full word set, so merging
per-subtree records in subtree order reproduces the sequential answer.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

from .errors import CapExceeded, EmptyLanguageError
from .functional import Functional
from .words import DEFAULT_LIMITS, Limits, Subshift, Word, allowed, count_admissible

TIE_RTOL = 1e-12
# Headroom on branch-and-bound pruning for rounding in submultiplicative bounds.
BOUND_SLACK = 1e-9

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class Records:
    items: list[tuple[float, Word]] = field(default_factory=list)

    @property
    def best(self) -> float:
        return self.items[-1][0]

    def offer(self, value: float, word: Word) -> None:
        if not self.items or value > self.items[-1][0]:
            self.items.append((value, word))

    def extend(self, other: "Records") -> None:
        """Absorb records of a subtree lying lexicographically after this one."""
        for value, word in other.items:
            self.offer(value, word)

    def result(self) -> tuple[float, Word]:
        top = self.best
        for value, word in self.items:
            if value >= top * (1.0 - TIE_RTOL):
                return top, word
        raise AssertionError("unreachable: the maximum is itself a record")


def check_language(
    f: Functional, n: int, subshift: Subshift | None, limits: Limits = DEFAULT_LIMITS
) -> int:
    if n < 1:
        raise EmptyLanguageError(f"word length must be >= 1, got {n}")
    limits.check_length(n)
    count = count_admissible(f.size, n, subshift)
    if count == 0:
        raise EmptyLanguageError(f"empty language: no admissible word of length {n}")
    if count > limits.max_words:
        raise CapExceeded(
            f"{count} admissible words of length {n} exceed the cap of {limits.max_words}"
        )
    return count


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> list[R]:
    """Map ``fn`` over ``tasks`` preserving order, optionally in worker processes."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def root_tasks(f: Functional, subshift: Subshift | None, workers: int) -> list[Word]:
    """Subtree roots: the whole tree, or one subtree per admissible first symbol."""
    if workers <= 1:
        return [()]
    return [(s,) for s in range(f.size) if allowed(subshift, (s,))]


def max_value_search(
    f: Functional,
    n: int,
    subshift: Subshift | None,
    root: Word = (),
    bound: Callable[[float, int], float] | None = None,
) -> Records:
    """Maximise ``f.eval`` over admissible length-``n`` words extending ``root``.

    ``bound(prefix_value, remaining)`` must dominate the value of every
    admissible completion; subtrees that cannot beat the incumbent hold no
    record and are skipped.
    """
    recs = Records()
    width = f.size

    def rec(word: Word, state) -> None:
        if len(word) == n:
            recs.offer(f.value(state), word)
            return
        if bound is not None and recs.items and word:
            reach = bound(f.value(state), n - len(word)) * (1.0 + BOUND_SLACK)
            if reach <= recs.best:
                return
        for s in range(width):
            w = word + (s,)
            if allowed(subshift, w):
                rec(w, f.extend(state, s))

    rec(root, f.state_of(root))
    return recs


def max_min_rate_search(
    f: Functional, n: int, subshift: Subshift | None, root: Word = ()
) -> Records:
    """Maximise ``min_k eval(w[:k]) ** (1/k)`` over admissible length-``n`` words.

    The prefix minimum can only fall as a word grows, so any prefix already
    at or below the incumbent is cut.
    """
    recs = Records()
    width = f.size

    def rec(word: Word, state, floor: float) -> None:
        if len(word) == n:
            recs.offer(floor, word)
            return
        for s in range(width):
            w = word + (s,)
            if not allowed(subshift, w):
                continue
            st = f.extend(state, s)
            m = min(floor, f.value(st) ** (1.0 / len(w)))
            if recs.items and m <= recs.best:
                continue
            rec(w, st, m)

    state = f.init()
    floor = float("inf")
    for k, s in enumerate(root, start=1):
        state = f.extend(state, s)
        floor = min(floor, f.value(state) ** (1.0 / k))
    rec(root, state, floor)
    return recs
