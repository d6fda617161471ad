"""Survivor trees and the max-min growth rate.

A word *survives* threshold ``t`` when every prefix of length ``k`` has
``eval >= t ** k``.  The survivor sets are nested in depth; if the tree dies
at some depth then no flow keeps pace with ``t`` and, for a submultiplicative
functional, ``Phi* < t``.  Conversely some flow keeps pace with ``Phi*``
forever, so the best worst-prefix rate

    t_n = max_w min_{k <= n} eval(w[:k]) ** (1/k)

never drops below ``Phi*`` and decreases to it as ``n`` grows.  Note that
the per-length maximisers of ``eval`` need not be prefixes of one flow;
the max-min witnesses are the ones that stabilise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._search import Records, check_language, max_min_rate_search, root_tasks, run_tasks
from .errors import ConfigError
from .functional import Functional
from .words import DEFAULT_LIMITS, Limits, Subshift, Word, allowed, format_word

SURVIVOR_RTOL = 1e-12
SURVIVOR_CAP = 100_000


@dataclass
class SurvivorSet:
    threshold: float
    depth: int
    words: list[Word] = field(default_factory=list)
    empty_at: int | None = None
    truncated: bool = False
    slack: float = SURVIVOR_RTOL

    @property
    def nonempty(self) -> bool:
        return self.empty_at is None

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "depth": self.depth,
            "nonempty": self.nonempty,
            "empty_at": self.empty_at,
            "truncated": self.truncated,
            "slack": self.slack,
            "count": len(self.words),
            "words": [format_word(w) for w in self.words],
        }


@dataclass(frozen=True)
class RateCertificate:
    depth: int
    t_n: float
    witness: Word
    per_prefix_values: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "t_n": self.t_n,
            "witness": format_word(self.witness),
            "per_prefix_values": list(self.per_prefix_values),
        }


def survivors(
    f: Functional,
    t: float,
    n: int,
    subshift: Subshift | None = None,
    cap: int = SURVIVOR_CAP,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> SurvivorSet:
    """Admissible length-``n`` words all of whose prefixes satisfy
    ``eval >= t ** k * (1 - 1e-12)``.

    ``empty_at = k`` means no word survives to depth ``k``.  At most ``cap``
    words are stored; past that the set is flagged ``truncated`` and the
    search stops, since non-emptiness is already settled.
    """
    if not t > 0:
        raise ConfigError(f"threshold must be positive, got {t}")
    if n < 1:
        raise ConfigError(f"depth must be >= 1, got {n}")
    if cap < 1:
        raise ConfigError(f"cap must be >= 1, got {cap}")
    limits.check_length(n)
    out = SurvivorSet(threshold=t, depth=n)
    deepest = 0
    scale = 1.0 - SURVIVOR_RTOL

    def rec(word: Word, state) -> bool:
        nonlocal deepest
        deepest = max(deepest, len(word))
        if len(word) == n:
            if len(out.words) >= cap:
                out.truncated = True
                return False
            out.words.append(word)
            return True
        k = len(word) + 1
        need = t**k * scale
        for s in range(f.size):
            w = word + (s,)
            if not allowed(subshift, w):
                continue
            st = f.extend(state, s)
            if f.value(st) >= need and not rec(w, st):
                return False
        return True

    rec((), f.init())
    if not out.words and not out.truncated:
        out.empty_at = deepest + 1
    return out


def _rate_task(args) -> Records:
    f, n, subshift, root = args
    return max_min_rate_search(f, n, subshift, root=root)


def max_min_rate(
    f: Functional,
    n: int,
    subshift: Subshift | None = None,
    *,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> RateCertificate:
    """``t_n`` and the lexicographically first witness within ``1e-12`` of it."""
    check_language(f, n, subshift, limits)
    tasks = [(f, n, subshift, r) for r in root_tasks(f, subshift, workers)]
    merged = Records()
    for part in run_tasks(_rate_task, tasks, workers):
        merged.extend(part)
    t_n, witness = merged.result()
    values = []
    state = f.init()
    for s in witness:
        state = f.extend(state, s)
        values.append(f.value(state))
    return RateCertificate(n, t_n, witness, tuple(values))


def extremal_prefix(
    f: Functional,
    n: int,
    subshift: Subshift | None = None,
    *,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> Word:
    """Length-``n`` prefix of a candidate extremal flow (the max-min witness)."""
    return max_min_rate(f, n, subshift, workers=workers, limits=limits).witness


def threshold_bisect(
    f: Functional,
    n: int,
    subshift: Subshift | None = None,
    lo: float = 0.0,
    hi: float = 0.0,
    tol: float = 1e-9,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[float, float]:
    """Bracket ``t_n`` by bisecting on survivor-tree emptiness.

    Independent of :func:`max_min_rate`: it only asks whether a survivor
    exists.  Requires survivors at ``lo`` and none at ``hi``.
    """
    if not (0 < lo < hi):
        raise ConfigError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")

    def alive(t: float) -> bool:
        return survivors(f, t, n, subshift, cap=1, limits=limits).nonempty

    if not alive(lo):
        raise ConfigError(f"no survivors at lo={lo}; lower the bracket")
    if alive(hi):
        raise ConfigError(f"survivors remain at hi={hi}; raise the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if alive(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi
