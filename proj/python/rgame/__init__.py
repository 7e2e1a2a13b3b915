"""Exact solver for zero-sum repeated games with a more informed controller."""

from fractions import Fraction

from ._rgcore import (
    BDependenceError,
    BudgetError,
    Game,
    ParseError,
    PreconditionError,
    ValidationError,
    audit,
    initial_hierarchy,
    wasserstein,
)
from . import _rgcore

__all__ = [
    "BDependenceError",
    "BudgetError",
    "Game",
    "ParseError",
    "PreconditionError",
    "ValidationError",
    "audit",
    "aux_value",
    "initial_hierarchy",
    "matrix_game",
    "oracle_value",
    "shifted_window_value",
    "wasserstein",
]


def _theta(theta):
    if isinstance(theta, str):
        return theta
    return ",".join(str(Fraction(w)) for w in theta)


def oracle_value(game, theta, initial="", budget=1000000):
    return Fraction(_rgcore.oracle_value(game, _theta(theta), initial, budget))


def shifted_window_value(game, m, n, initial=""):
    return Fraction(_rgcore.shifted_window_value(game, m, n, initial))


def aux_value(game, theta, initial=""):
    lo, hi = _rgcore.aux_value(game, _theta(theta), initial)
    return Fraction(lo), Fraction(hi)


def matrix_game(rows):
    value, s1, s2 = _rgcore.matrix_game([[str(Fraction(x)) for x in row] for row in rows])
    return Fraction(value), [Fraction(x) for x in s1], [Fraction(x) for x in s2]
