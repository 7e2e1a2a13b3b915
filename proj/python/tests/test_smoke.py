import os
from fractions import Fraction

import pytest

import rgame

GAMES = os.path.join(os.path.dirname(__file__), "..", "..", "games")


def load(name):
    return rgame.Game.load(os.path.join(GAMES, name))


def test_secondorder_values():
    g = load("secondorder.game")
    assert g.initial_laws == ["pi", "prime"]
    assert rgame.oracle_value(g, [1], "pi") == Fraction(7, 8)
    assert rgame.oracle_value(g, "1", "prime") == Fraction(11, 12)


def test_aux_value_matches_oracle():
    g = load("observed-actions.game")
    theta = [Fraction(1, 2), Fraction(1, 2)]
    lo, hi = rgame.aux_value(g, theta)
    assert lo <= rgame.oracle_value(g, theta) <= hi


def test_audit_verdicts():
    assert rgame.audit(load("pomdp-small.game"))["overall"]
    report = rgame.audit(load("2etpas1.game"))
    assert report["A1a"] == "fail" and report["A1b"] == "fail"


def test_matrix_game_and_wasserstein():
    value, s1, s2 = rgame.matrix_game([[1, -1], [-1, 1]])
    assert value == 0 and s1 == [Fraction(1, 2)] * 2
    assert rgame.wasserstein("1 : 1/2 1/2", "1/2 : 3/8 5/8\n1/2 : 5/8 3/8") == "1/4"


def test_errors_are_mapped():
    with pytest.raises(ValueError):
        rgame.Game.parse("[game]\nstates = k\n")
