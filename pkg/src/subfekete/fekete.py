"""Maximal values Phi_n, Fekete limits and the submultiplicativity check.

For a submultiplicative functional the maxima ``Phi_n`` over admissible
words of length ``n`` form a submultiplicative sequence, so
``Phi_n ** (1/n)`` converges to its infimum ``Phi*``.  Every computed root is
therefore an upper bound on ``Phi*``; the running minimum of the roots is
the best such bound available at depth ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

from ._search import (
    BOUND_SLACK,
    TIE_RTOL,
    Records,
    check_language,
    max_value_search,
    root_tasks,
    run_tasks,
)
from .errors import ConfigError
from .functional import Functional
from .words import DEFAULT_LIMITS, Limits, Subshift, Word, allowed, format_word, repeat

SUBMULT_RTOL = 1e-12


@dataclass(frozen=True)
class Violation:
    u: Word
    v: Word
    eval_uv: float
    product: float


@dataclass(frozen=True)
class BoundRecord:
    n: int
    phi_n: float
    root: float
    running_upper: float
    argmax_word: Word


@dataclass(frozen=True)
class LowerEstimate:
    """``eval(period^reps) ** (1 / (reps * len(period)))``; certifies nothing."""

    period: Word
    repetitions: int
    estimate: float
    label: str = "HEURISTIC"


@dataclass
class BoundsReport:
    records: list[BoundRecord] = field(default_factory=list)
    lower_estimates: list[LowerEstimate] = field(default_factory=list)

    @property
    def running_upper(self) -> float:
        return self.records[-1].running_upper

    @property
    def phi(self) -> list[float]:
        return [r.phi_n for r in self.records]

    def to_dict(self) -> dict:
        return {
            "records": [
                {
                    "n": r.n,
                    "phi_n": r.phi_n,
                    "root": r.root,
                    "running_upper": r.running_upper,
                    "argmax_word": format_word(r.argmax_word),
                }
                for r in self.records
            ],
            "lower_estimates": [
                {
                    "period": format_word(e.period),
                    "repetitions": e.repetitions,
                    "estimate": e.estimate,
                    "label": e.label,
                }
                for e in self.lower_estimates
            ],
        }


def _admissible_values(f: Functional, n_max: int, subshift: Subshift | None) -> dict[Word, float]:
    values: dict[Word, float] = {}

    def rec(word: Word, state) -> None:
        if word:
            values[word] = f.value(state)
        if len(word) == n_max:
            return
        for s in range(f.size):
            w = word + (s,)
            if allowed(subshift, w):
                rec(w, f.extend(state, s))

    rec((), f.init())
    return values


def check_submultiplicative(
    f: Functional,
    n_max: int,
    subshift: Subshift | None = None,
    *,
    rtol: float = SUBMULT_RTOL,
    limits: Limits = DEFAULT_LIMITS,
) -> list[Violation]:
    """Every split ``uv`` of an admissible word of length <= ``n_max`` violating
    ``eval(uv) <= eval(u) * eval(v) * (1 + rtol)``.

    Factors of admissible words are admissible, so only admissible ``uv`` are
    enumerated.  An empty list means the contract holds at this scale.
    """
    if n_max < 2:
        raise ConfigError(f"n_max must be >= 2, got {n_max}")
    check_language(f, n_max, subshift, limits)
    values = _admissible_values(f, n_max, subshift)
    found = []
    for w, value in values.items():
        for k in range(1, len(w)):
            u, v = w[:k], w[k:]
            prod = values[u] * values[v]
            if value > prod * (1.0 + rtol):
                found.append(Violation(u, v, value, prod))
    return found


def _phi_task(args) -> Records:
    f, n, subshift, root, bound = args
    return max_value_search(f, n, subshift, root=root, bound=bound)


def _merge(parts: Sequence[Records]) -> tuple[float, Word]:
    out = Records()
    for p in parts:
        out.extend(p)
    return out.result()


def phi_n_exact(
    f: Functional,
    n: int,
    subshift: Subshift | None = None,
    *,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[float, Word]:
    """``(Phi_n, argmax)`` by full depth-first enumeration.

    The argmax is the lexicographically smallest word within a relative
    ``1e-12`` of the maximum, which keeps it stable under rounding noise.
    """
    check_language(f, n, subshift, limits)
    tasks = [(f, n, subshift, r, None) for r in root_tasks(f, subshift, workers)]
    return _merge(run_tasks(_phi_task, tasks, workers))


class _PowerBound:
    """``prefix * min(upper ** r, Phi_r)``; a class so it pickles for workers."""

    def __init__(self, upper: float, table: Sequence[float] | None):
        self.upper = upper
        self.table = table

    def __call__(self, prefix_value: float, remaining: int) -> float:
        b = self.upper**remaining
        if self.table is not None and remaining <= len(self.table):
            b = min(b, self.table[remaining - 1])
        return prefix_value * b


def phi_n_pruned(
    f: Functional,
    n: int,
    subshift: Subshift | None = None,
    known_upper: float | None = None,
    *,
    phi_table: Sequence[float] | None = None,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[float, Word]:
    """Same result as :func:`phi_n_exact`, by branch and bound.

    A prefix ``p`` can complete to at most ``eval(p) * known_upper ** r`` with
    ``r`` symbols left, which needs ``known_upper >= Phi_1``.  A running Fekete
    bound is *not* enough (``Phi_3`` may exceed ``(Phi_2 ** (1/2)) ** 3``).
    When ``phi_table[r - 1] = Phi_r`` is known for shorter lengths the bound
    ``eval(p) * Phi_r`` is used as well.
    """
    check_language(f, n, subshift, limits)
    phi_1 = max(f.eval((s,)) for s in range(f.size) if allowed(subshift, (s,)))
    if known_upper is None:
        known_upper = phi_1
    elif known_upper * (1.0 + BOUND_SLACK) < phi_1:
        raise ConfigError(
            f"known_upper={known_upper!r} is below the largest single-symbol value {phi_1!r}"
        )
    bound = _PowerBound(known_upper, phi_table)
    tasks = [(f, n, subshift, r, bound) for r in root_tasks(f, subshift, workers)]
    return _merge(run_tasks(_phi_task, tasks, workers))


def bounds_report(
    f: Functional,
    n_max: int,
    subshift: Subshift | None = None,
    periods: Sequence[Word] = (),
    *,
    reps: int | None = None,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> BoundsReport:
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1, got {n_max}")
    limits.check_length(n_max)
    report = BoundsReport()
    table: list[float] = []
    upper = float("inf")
    for n in range(1, n_max + 1):
        known = table[0] if table else None
        phi, word = phi_n_pruned(
            f, n, subshift, known, phi_table=table, workers=workers, limits=limits
        )
        table.append(phi)
        root = phi ** (1.0 / n)
        upper = min(upper, root)
        report.records.append(BoundRecord(n, phi, root, upper, word))
    for period in periods:
        period = f.alphabet.check(period)
        if subshift is not None and not subshift.allows_periodic(period):
            raise ConfigError(f"periodic flow of {format_word(period)!r} is not admissible")
        k = reps if reps is not None else max(1, n_max // len(period))
        w = repeat(period, k * len(period))
        report.lower_estimates.append(
            LowerEstimate(period, k, f.eval(w) ** (1.0 / len(w)))
        )
    return report


def fekete_limit_additive(a: Sequence[float]) -> tuple[float, int]:
    """``(min_n a_n / n, n)`` over the given terms, ``a[0]`` being ``a_1``.

    For a subadditive sequence this is the best available estimate of the
    limit ``lim a_n / n``.  Ratios within ``1e-12`` of the minimum count as
    ties and the smallest index wins, so ``a_n = n log 3`` reports ``n = 1``
    despite rounding.  Pass ``log c_n`` for the multiplicative form.
    """
    if len(a) == 0:
        raise ConfigError("fekete_limit_additive needs at least one term")
    ratios = [x / n for n, x in enumerate(a, start=1)]
    best = min(ratios)
    band = TIE_RTOL * max(1.0, abs(best))
    for n, r in enumerate(ratios, start=1):
        if r <= best + band:
            return best, n
    raise AssertionError("unreachable")


def fekete_limit_multiplicative(c: Sequence[float]) -> tuple[float, int]:
    """``(min_n c_n ** (1/n), n)`` via the log bridge ``a_n = log c_n``."""
    if any(x <= 0 for x in c):
        raise ConfigError("submultiplicative terms must be positive")
    value, n = fekete_limit_additive([math.log(x) for x in c])
    return math.exp(value), n
