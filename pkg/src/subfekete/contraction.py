"""Affine map families: Lipschitz growth, joint contraction and divergence.

For affine maps ``F_i(x) = L_i x + b_i`` the composition
``F_{w1} o F_{w2} o ... o F_{wn}`` is affine with linear part
``L_{w1} L_{w2} ... L_{wn}``, so its exact Lipschitz constant is the induced
2-norm of that product.  Everything reduces to the matrix module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .extremal import extremal_prefix
from .matrix_jsr import (
    Found,
    MatrixFunctional,
    MatrixSet,
    NormKind,
    NotUpTo,
    check_all_products_contract,
)
from .words import DEFAULT_LIMITS, Alphabet, Limits, Subshift, Word, format_word, repeat


@dataclass(frozen=True)
class AffineMap:
    linear: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        lin = np.atleast_2d(np.array(self.linear, dtype=float))
        off = np.atleast_1d(np.array(self.offset, dtype=float))
        if lin.shape[0] != lin.shape[1] or off.shape != (lin.shape[0],):
            raise ConfigError(
                f"affine map needs a d x d linear part and a d offset, got {lin.shape} and {off.shape}"
            )
        if not (np.all(np.isfinite(lin)) and np.all(np.isfinite(off))):
            raise ConfigError("affine map entries must be finite")
        lin.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "offset", off)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.linear @ x + self.offset


@dataclass(frozen=True)
class AffineMapSet:
    maps: tuple[AffineMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise ConfigError("an affine map set needs at least one map")
        if len({m.linear.shape for m in self.maps}) != 1:
            raise ConfigError("all affine maps must share one dimension")
        object.__setattr__(self, "maps", tuple(self.maps))

    @classmethod
    def from_pairs(cls, pairs) -> "AffineMapSet":
        return cls(tuple(AffineMap(lin, off) for lin, off in pairs))

    @property
    def dim(self) -> int:
        return self.maps[0].linear.shape[0]

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(len(self.maps))

    def linear_parts(self) -> MatrixSet:
        return MatrixSet(tuple(m.linear for m in self.maps), NormKind.SPECTRAL)

    def compose(self, word: Sequence[int]) -> AffineMap:
        """``F_{w1} o ... o F_{wn}`` as a single affine map."""
        p = np.eye(self.dim)
        q = np.zeros(self.dim)
        for s in self.alphabet.check(word):
            q = p @ self.maps[s].offset + q
            p = p @ self.maps[s].linear
        return AffineMap(p, q)


@dataclass(frozen=True)
class ContractionCertificate:
    m: int
    max_lipschitz: float
    worst_word: Word

    def to_dict(self) -> dict:
        return {
            "status": "CERTIFIED",
            "M": self.m,
            "max_lipschitz": self.max_lipschitz,
            "worst_word": format_word(self.worst_word),
        }


def lipschitz_functional(s: AffineMapSet) -> MatrixFunctional:
    """Exact Lipschitz constant of the composition spelled by a word."""
    return MatrixFunctional(s.linear_parts())


def certify_joint_contraction(
    s: AffineMapSet,
    m_max: int,
    subshift: Subshift | None = None,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> ContractionCertificate | NotUpTo:
    out = check_all_products_contract(s.linear_parts(), m_max, subshift, limits=limits)
    if isinstance(out, Found):
        return ContractionCertificate(out.n, out.worst_norm, out.worst_word)
    return out


def iterate_composition(
    s: AffineMapSet, flow: Sequence[int], x0: Sequence[float], n: int
) -> list[np.ndarray]:
    """Points ``F_{s1} o ... o F_{sk} (x0)`` for ``k = 1..n`` along ``flow^infinity``.

    The outermost map is the first symbol.  Carried incrementally as the
    affine pair ``(P_k, q_k)``: ``P_k = P_{k-1} L_{sk}``,
    ``q_k = P_{k-1} b_{sk} + q_{k-1}``.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    x = np.atleast_1d(np.array(x0, dtype=float))
    if x.shape != (s.dim,):
        raise ConfigError(f"x0 must have dimension {s.dim}, got shape {x.shape}")
    word = s.alphabet.check(repeat(flow, n))
    p = np.eye(s.dim)
    q = np.zeros(s.dim)
    out = []
    for sym in word:
        f = s.maps[sym]
        q = p @ f.offset + q
        p = p @ f.linear
        out.append(p @ x + q)
    return out


@dataclass(frozen=True)
class DivergenceWitness:
    """Word, unit direction and per-step growth of the worst composition.

    Images of ``x0`` and ``x0 + eps * direction`` under the composition sit
    exactly ``eps * lipschitz`` apart; with ``growth > 1`` that separation
    grows exponentially in the depth.
    """

    word: Word
    direction: np.ndarray
    growth: float
    lipschitz: float

    @property
    def diverges(self) -> bool:
        return self.growth > 1.0

    def separation(self, s: AffineMapSet, x0: Sequence[float], eps: float) -> float:
        g = s.compose(self.word)
        x = np.atleast_1d(np.array(x0, dtype=float))
        return float(np.linalg.norm(g(x + eps * self.direction) - g(x)))

    def to_dict(self) -> dict:
        return {
            "word": format_word(self.word),
            "direction": [float(v) for v in self.direction],
            "growth": self.growth,
            "lipschitz": self.lipschitz,
            "diverges": self.diverges,
        }


def divergence_witness(
    s: AffineMapSet,
    depth: int,
    subshift: Subshift | None = None,
    *,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> DivergenceWitness:
    f = lipschitz_functional(s)
    word = extremal_prefix(f, depth, subshift, workers=workers, limits=limits)
    p = s.linear_parts().product(word)
    _, sv, vt = np.linalg.svd(p)
    u = vt[0]
    # Sign convention: first non-negligible component positive.
    nz = np.flatnonzero(np.abs(u) > 1e-12)
    if nz.size and u[nz[0]] < 0:
        u = -u
    lip = float(sv[0])
    return DivergenceWitness(word, u, lip ** (1.0 / depth), lip)
