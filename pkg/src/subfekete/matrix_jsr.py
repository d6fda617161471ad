"""Matrix-product norms and joint spectral radius bounds.

``eval(w) = ||A_{w1} A_{w2} ... A_{wn}||`` is submultiplicative for any
submultiplicative matrix norm, and its growth rate ``Phi*`` is the joint
spectral radius.  Upper bounds come from the Fekete roots; lower bounds from
spectral radii of periodic products, ``rho(A_w) ** (1/|w|) <= Phi*``, which
hold exactly because the periodic flow ``w w w ...`` is admissible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._search import Records, check_language
from .errors import ConfigError
from .extremal import max_min_rate
from .fekete import BoundsReport, bounds_report, phi_n_exact, phi_n_pruned
from .functional import Functional
from .words import (
    DEFAULT_LIMITS,
    Alphabet,
    Limits,
    Subshift,
    Word,
    allowed,
    format_word,
    repeat,
)

BOUNDARY_ATOL = 1e-12
# Eigenvector condition number flagging a (numerically) defective matrix.
DEFECTIVE_COND = 1e6
CLUSTER_RTOL = 1e-4


class NormKind(enum.Enum):
    SPECTRAL = "spectral"
    FROBENIUS = "frobenius"
    ONE = "one"
    INF = "inf"

    @property
    def ord(self):
        return {"spectral": 2, "frobenius": "fro", "one": 1, "inf": np.inf}[self.value]


@dataclass(frozen=True)
class MatrixSet:
    """Square matrices of one dimension, one per symbol.

    Frobenius is submultiplicative but gives ``||I|| = sqrt(d)``, so with
    ``d > 1`` it breaks ``eval(()) == 1`` and only shifts ``Phi_n`` by a
    bounded factor; the induced norms are the default for that reason.
    """

    matrices: tuple[np.ndarray, ...]
    norm_kind: NormKind = NormKind.SPECTRAL

    def __post_init__(self):
        if len(self.matrices) == 0:
            raise ConfigError("a matrix set needs at least one matrix")
        mats = []
        for m in self.matrices:
            a = np.array(m, dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ConfigError(f"matrices must be square, got shape {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ConfigError("matrix entries must be finite")
            a.setflags(write=False)
            mats.append(a)
        if len({a.shape for a in mats}) != 1:
            raise ConfigError("all matrices must share one dimension")
        object.__setattr__(self, "matrices", tuple(mats))
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))

    @classmethod
    def from_lists(cls, matrices, norm: str | NormKind = NormKind.SPECTRAL) -> "MatrixSet":
        return cls(tuple(np.array(m, dtype=float) for m in matrices), NormKind(norm))

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(len(self.matrices))

    def product(self, word: Sequence[int]) -> np.ndarray:
        p = np.eye(self.dim)
        for s in self.alphabet.check(word):
            p = p @ self.matrices[s]
        return p

    def scaled(self, c: float) -> "MatrixSet":
        return MatrixSet(tuple(c * m for m in self.matrices), self.norm_kind)


class MatrixFunctional(Functional):
    """State is the accumulated left-to-right product."""

    def __init__(self, ms: MatrixSet):
        self.ms = ms
        self.alphabet = ms.alphabet
        self._ord = ms.norm_kind.ord

    def init(self) -> np.ndarray:
        return np.eye(self.ms.dim)

    def extend(self, state: np.ndarray, symbol: int) -> np.ndarray:
        return state @ self.ms.matrices[symbol]

    def value(self, state: np.ndarray) -> float:
        return float(np.linalg.norm(state, self._ord))


def matrix_functional(ms: MatrixSet) -> MatrixFunctional:
    return MatrixFunctional(ms)


def power_radius(a: np.ndarray, squarings: int = 60) -> float:
    """Spectral radius as ``lim ||A^(2^j)|| ** (2^-j)`` with renormalised squaring.

    Converges even for Jordan blocks, where the error after ``j`` squarings
    is only ``O(j 2^-j)``, but squaring a dense near-nilpotent part cancels
    digits; used as an independent cross-check, not the primary route.
    """
    a = np.asarray(a, dtype=float)
    nrm = np.linalg.norm(a, 2)
    if nrm == 0:
        return 0.0
    b = a / nrm
    log_rho = math.log(nrm)
    weight = 0.5
    for _ in range(squarings):
        b = b @ b
        nb = np.linalg.norm(b, 2)
        if nb == 0:
            return 0.0
        b = b / nb
        log_rho += weight * math.log(nb)
        weight *= 0.5
    return math.exp(log_rho)


def _cluster_means(vals: np.ndarray, rtol: float) -> list[complex]:
    scale = max(1.0, float(np.max(np.abs(vals))))
    groups: list[list[complex]] = []
    for v in vals:
        for g in groups:
            if any(abs(v - u) <= rtol * scale for u in g):
                g.append(v)
                break
        else:
            groups.append([v])
    return [sum(g) / len(g) for g in groups]


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus.

    A defective eigenvalue comes back from the solver as a ring of nearby
    values split by roughly ``eps ** (1/k)``; when the eigenbasis is that ill
    conditioned, each tight cluster is replaced by its mean, which is well
    conditioned.  The averaging can only lower the result, so lower bounds
    built on it stay valid.
    """
    a = np.asarray(a, dtype=float)
    vals, vecs = np.linalg.eig(a)
    if a.shape[0] > 1 and np.linalg.cond(vecs) > DEFECTIVE_COND:
        vals = np.array(_cluster_means(vals, CLUSTER_RTOL))
    return float(np.max(np.abs(vals)))


@dataclass
class JsrReport:
    bounds: BoundsReport
    certified_lower: float
    lower_word: Word
    norm_kind: NormKind = NormKind.SPECTRAL

    @property
    def running_upper(self) -> float:
        return self.bounds.running_upper

    @property
    def gap(self) -> float:
        return self.running_upper - self.certified_lower

    def to_dict(self) -> dict:
        return {
            "bounds": self.bounds.to_dict(),
            "certified_lower": self.certified_lower,
            "lower_word": format_word(self.lower_word),
            "running_upper": self.running_upper,
            "gap": self.gap,
            "norm": self.norm_kind.value,
        }


def certified_lower_bound(
    ms: MatrixSet, period_len_max: int, subshift: Subshift | None = None,
    *, limits: Limits = DEFAULT_LIMITS,
) -> tuple[float, Word]:
    """Best ``rho(A_w) ** (1/|w|)`` over admissible periodic words, shortest first."""
    if period_len_max < 1:
        raise ConfigError(f"period_len_max must be >= 1, got {period_len_max}")
    limits.check_length(period_len_max)
    by_length: list[list[tuple[float, Word]]] = [[] for _ in range(period_len_max)]

    def rec(word: Word, prod: np.ndarray) -> None:
        if word and (subshift is None or subshift.allows_periodic(word)):
            by_length[len(word) - 1].append(
                (spectral_radius(prod) ** (1.0 / len(word)), word)
            )
        if len(word) == period_len_max:
            return
        for s, m in enumerate(ms.matrices):
            w = word + (s,)
            if allowed(subshift, w):
                rec(w, prod @ m)

    rec((), np.eye(ms.dim))
    recs = Records()
    for group in by_length:
        for value, word in group:
            recs.offer(value, word)
    if not recs.items:
        raise ConfigError("no admissible periodic word up to the requested length")
    return recs.result()


def jsr_bounds(
    ms: MatrixSet,
    n_max: int,
    period_len_max: int,
    subshift: Subshift | None = None,
    *,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> JsrReport:
    f = matrix_functional(ms)
    report = bounds_report(f, n_max, subshift, workers=workers, limits=limits)
    lower, word = certified_lower_bound(ms, period_len_max, subshift, limits=limits)
    return JsrReport(report, lower, word, ms.norm_kind)


@dataclass(frozen=True)
class BoundaryCase:
    n: int
    word: Word
    norm: float


@dataclass(frozen=True)
class Found:
    """Every admissible product of length ``n`` has norm below ``1``."""

    n: int
    worst_word: Word
    worst_norm: float
    boundary: tuple[BoundaryCase, ...] = ()

    def to_dict(self) -> dict:
        return _outcome_dict("FOUND", self.n, self.worst_word, self.worst_norm, self.boundary)


@dataclass(frozen=True)
class NotUpTo:
    """No length up to ``n_max`` makes every product contract."""

    n_max: int
    worst_word: Word
    worst_norm: float
    boundary: tuple[BoundaryCase, ...] = ()

    def to_dict(self) -> dict:
        return _outcome_dict("NOT_UP_TO", self.n_max, self.worst_word, self.worst_norm, self.boundary)


def _outcome_dict(status, n, word, norm, boundary) -> dict:
    return {
        "status": status,
        "n": n,
        "worst_word": format_word(word),
        "worst_norm": norm,
        "boundary": [
            {"n": b.n, "word": format_word(b.word), "norm": b.norm} for b in boundary
        ],
    }


def check_all_products_contract(
    ms: MatrixSet,
    n_max: int,
    subshift: Subshift | None = None,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Found | NotUpTo:
    """Smallest ``N <= n_max`` with every admissible length-``N`` product of norm < 1.

    Each length is enumerated in full (a contracting prefix says nothing
    about its extensions) and abandoned at the first product with norm
    ``>= 1 - 1e-12``.  Norms within ``1e-12`` of ``1`` are reported as
    boundary cases rather than classified.
    """
    if n_max < 1:
        raise ConfigError(f"n_max must be >= 1, got {n_max}")
    f = matrix_functional(ms)
    boundary: list[BoundaryCase] = []
    for n in range(1, n_max + 1):
        check_language(f, n, subshift, limits)
        recs = Records()
        bad: tuple[Word, float] | None = None

        def rec(word: Word, state) -> bool:
            nonlocal bad
            if len(word) == n:
                v = f.value(state)
                if v >= 1.0 - BOUNDARY_ATOL:
                    bad = (word, v)
                    return False
                recs.offer(v, word)
                return True
            for s in range(f.size):
                w = word + (s,)
                if allowed(subshift, w) and not rec(w, f.extend(state, s)):
                    return False
            return True

        rec((), f.init())
        if bad is None:
            worst, word = recs.result()
            return Found(n, word, worst, tuple(boundary))
        if abs(bad[1] - 1.0) <= BOUNDARY_ATOL:
            boundary.append(BoundaryCase(n, bad[0], bad[1]))
    worst, word = phi_n_pruned(f, n_max, subshift, limits=limits)
    return NotUpTo(n_max, word, worst, tuple(boundary))


@dataclass(frozen=True)
class DiagnosticLine:
    item: str
    computed: float
    claimed: float
    status: str
    note: str = ""


@dataclass
class DiagnosticReport:
    lines: list[DiagnosticLine] = field(default_factory=list)

    def add(self, item: str, computed: float, claimed: float, note: str = "") -> None:
        close = abs(computed - claimed) <= 1e-9 * max(1.0, abs(claimed))
        self.lines.append(
            DiagnosticLine(item, computed, claimed, "MATCH" if close else "DISCREPANCY", note)
        )

    @property
    def discrepancies(self) -> list[DiagnosticLine]:
        return [ln for ln in self.lines if ln.status == "DISCREPANCY"]

    def to_dict(self) -> dict:
        return {
            "lines": [
                {
                    "item": ln.item,
                    "computed": ln.computed,
                    "claimed": ln.claimed,
                    "status": ln.status,
                    "note": ln.note,
                }
                for ln in self.lines
            ],
            "discrepancies": len(self.discrepancies),
        }


DIAGONAL_PAIR = MatrixSet.from_lists([[[0.3, 0.0], [0.0, 0.3]], [[100.0, 0.0], [0.0, 100.0]]])


def reproduce_remark_example() -> DiagnosticReport:
    """Evaluate the diagonal pair ``{0.3 I, 100 I}`` against the values claimed for it.

    The claimed values are ``||(A0 A1)^n|| = 30^(2n)``, that those products
    realise ``Phi_(2n)``, ``Phi* = 30`` and the tail products
    ``||(A0 A1)^m A0^(n-2m)|| = 30^(2m) 0.3^(n-2m)``.  Direct evaluation
    disagrees; the forbid-"11" subshift and a per-period rate are the
    readings under which a growth rate of 30 does appear.
    """
    ms = DIAGONAL_PAIR
    f = matrix_functional(ms)
    rep = DiagnosticReport()
    for n in range(1, 7):
        w = repeat((0, 1), 2 * n)
        rep.add(f"norm (A0 A1)^{n}", f.eval(w), 30.0 ** (2 * n), "computed 30^n")
    for n in (1, 2):
        phi, word = phi_n_exact(f, 2 * n)
        rep.add(
            f"Phi_{2 * n} unconstrained", phi, 30.0 ** (2 * n),
            f"attained by {format_word(word)}",
        )
    upper = bounds_report(f, 4).running_upper
    lower, word = certified_lower_bound(ms, 2)
    rep.add("Phi* unconstrained, upper bound n=4", upper, 30.0, "all-1 words dominate")
    rep.add("Phi* unconstrained, certified lower", lower, 30.0, f"rho of word {format_word(word)}")
    n = 6
    for m in range(1, 4):
        w = repeat((0, 1), 2 * m) + (0,) * (n - 2 * m)
        rep.add(
            f"tail norm (A0 A1)^{m} A0^{n - 2 * m}", f.eval(w),
            30.0 ** (2 * m) * 0.3 ** (n - 2 * m), "computed 30^m 0.3^(n-2m)",
        )
    no11 = Subshift.from_strings(ms.alphabet, ["11"])
    upper2 = bounds_report(f, 2, no11).records[1].running_upper
    rate8 = max_min_rate(f, 8, no11)
    lower2, word2 = certified_lower_bound(ms, 2, no11)
    rep.add("forbid 11: running upper n=2, per letter", upper2, 30.0, "sqrt(30)")
    rep.add(
        "forbid 11: max-min rate n=8, per letter", rate8.t_n, 30.0,
        f"witness {format_word(rate8.witness)}",
    )
    rep.add(
        "forbid 11: certified lower, per letter", lower2, 30.0,
        f"rho of word {format_word(word2)}",
    )
    rep.add(
        "forbid 11: certified lower, per period of length 2", lower2**2, 30.0,
        "rate squared",
    )
    return rep
