"""Smoke tests for the python bindings: a few exact end-to-end values."""

import pytest

import qmms


def test_generate_discrete_space():
    space, card = qmms.generate("discrete_N", {"n": 20.0})
    assert space.n == 20
    assert card["generator"] == "discrete_N"
    assert space.total_mass == pytest.approx(1.0 - 2.0**-20, rel=1e-15)
    assert qmms.doubling_constant(space, 2.0, 0.5) == 1.0
    assert qmms.h_value(space, 0.5) == 2.0**-20


def test_minimal_norm_matches_hand_value():
    space = qmms.Space([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    result = qmms.minimal_norm(space, [0.0, 1.0], "sobolev", 1.0, 2.0)
    assert result["seminorm"] == pytest.approx(0.5, rel=1e-6)


def test_l0_distance_of_a_unit_shift():
    space, _ = qmms.generate("discrete_N", {"n": 10.0})
    f = [0.0] * 10
    g = [1.0] * 10
    assert qmms.l0_distance(space, f, g) == pytest.approx(space.total_mass / 2.0, rel=1e-12)


def test_separated_witness_gap():
    space, _ = qmms.generate("discrete_N", {"n": 10.0})
    witness = qmms.separated_bump_witness(space, 0.4, 0.5, 2.0, 1.0)
    assert witness["balls_disjoint"]
    assert witness["gap_at_least_two"]
    assert witness["min_gap_p"] == pytest.approx(2.0, abs=1e-10)


def test_validation_errors_are_typed():
    with pytest.raises(qmms.ValidationError):
        qmms.Space([[0.0, 1.0], [1.0, 0.5]], [1.0, 1.0])
