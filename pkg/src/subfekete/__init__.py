"""Extremal growth rates of submultiplicative word functionals."""

from .errors import (
    CapExceeded,
    ConfigError,
    EmptyLanguageError,
    InvariantViolation,
    SubfeketeError,
)
from .extremal import (
    RateCertificate,
    SurvivorSet,
    extremal_prefix,
    max_min_rate,
    survivors,
    threshold_bisect,
)
from .fekete import (
    BoundsReport,
    bounds_report,
    check_submultiplicative,
    fekete_limit_additive,
    fekete_limit_multiplicative,
    phi_n_exact,
    phi_n_pruned,
)
from .functional import Functional, ScalarFunctional, WordFunctional
from .words import Alphabet, Limits, Subshift, Word, format_word, parse_word

__version__ = "0.1.0"
