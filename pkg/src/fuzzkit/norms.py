"""Triangular norms, co-norms, implication and defuzzifier kinds.

Scalar forms drive antecedent evaluation; the array forms drive curve
aggregation.  The code generator emits the scalar expressions verbatim, so
each formula's operation order is part of the package contract and must stay
in lockstep with ``codegen``.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class TNorm(Enum):
    """Conjunction operators (t-norms) on [0, 1]."""

    MIN = "min"
    PROD = "prod"
    LUKASIEWICZ = "lukasiewicz"
    DRASTIC = "drastic"
    NILPOTENT = "nilpotent"
    HAMACHER = "hamacher"


class SNorm(Enum):
    """Disjunction/aggregation operators (s-norms) on [0, 1]."""

    MAX = "max"
    PROB_SUM = "prob_sum"
    BOUNDED_SUM = "bounded_sum"
    DRASTIC = "drastic"
    NILPOTENT = "nilpotent"
    EINSTEIN = "einstein"


class Implication(Enum):
    """How a rule's activation shapes its consequent curve."""

    MIN = "min"
    PROD = "prod"


class Defuzzifier(Enum):
    """Crisp-value extraction from an aggregated curve."""

    CENTROID = "centroid"
    BISECTOR = "bisector"
    MEAN_OF_MAXIMA = "mean_of_maxima"
    FIRST_OF_MAXIMA = "first_of_maxima"
    LAST_OF_MAXIMA = "last_of_maxima"


def _t_min(a, b):
    return a if a < b else b


def _t_prod(a, b):
    return a * b


def _t_luka(a, b):
    s = a + b - 1.0
    return s if s > 0.0 else 0.0


def _t_drastic(a, b):
    if a == 1.0:
        return b
    if b == 1.0:
        return a
    return 0.0


def _t_nilpotent(a, b):
    if a + b > 1.0:
        return a if a < b else b
    return 0.0


def _t_hamacher(a, b):
    if a == 0.0 and b == 0.0:
        return 0.0
    return a * b / (a + b - a * b)


def _s_max(a, b):
    return a if a > b else b


def _s_prob(a, b):
    return a + b - a * b


def _s_bounded(a, b):
    s = a + b
    return s if s < 1.0 else 1.0


def _s_drastic(a, b):
    if a == 0.0:
        return b
    if b == 0.0:
        return a
    return 1.0


def _s_nilpotent(a, b):
    if a + b < 1.0:
        return a if a > b else b
    return 1.0


def _s_einstein(a, b):
    return (a + b) / (1.0 + a * b)


_TNORMS = {
    TNorm.MIN: _t_min,
    TNorm.PROD: _t_prod,
    TNorm.LUKASIEWICZ: _t_luka,
    TNorm.DRASTIC: _t_drastic,
    TNorm.NILPOTENT: _t_nilpotent,
    TNorm.HAMACHER: _t_hamacher,
}

_SNORMS = {
    SNorm.MAX: _s_max,
    SNorm.PROB_SUM: _s_prob,
    SNorm.BOUNDED_SUM: _s_bounded,
    SNorm.DRASTIC: _s_drastic,
    SNorm.NILPOTENT: _s_nilpotent,
    SNorm.EINSTEIN: _s_einstein,
}


def tnorm(kind: TNorm, a: float, b: float) -> float:
    """Apply the t-norm ``kind`` to two degrees."""
    return _TNORMS[kind](a, b)


def snorm(kind: SNorm, a: float, b: float) -> float:
    """Apply the s-norm ``kind`` to two degrees."""
    return _SNORMS[kind](a, b)


def snorm_arrays(kind: SNorm, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise s-norm of two sampled curves.

    Rounding behaviour matches the scalar forms: each branch performs the
    same IEEE operations in the same order.
    """
    if kind is SNorm.MAX:
        return np.maximum(a, b)
    if kind is SNorm.PROB_SUM:
        return a + b - a * b
    if kind is SNorm.BOUNDED_SUM:
        return np.minimum(a + b, 1.0)
    if kind is SNorm.DRASTIC:
        return np.where(a == 0.0, b, np.where(b == 0.0, a, 1.0))
    if kind is SNorm.NILPOTENT:
        return np.where(a + b < 1.0, np.maximum(a, b), 1.0)
    if kind is SNorm.EINSTEIN:
        return (a + b) / (1.0 + a * b)
    raise ValueError(f"unknown s-norm {kind!r}")


def implicate(kind: Implication, activation: float, curve: np.ndarray) -> np.ndarray:
    """Shape a consequent ``curve`` by a rule ``activation``."""
    if kind is Implication.MIN:
        return np.minimum(curve, activation)
    if kind is Implication.PROD:
        return activation * curve
    raise ValueError(f"unknown implication {kind!r}")
