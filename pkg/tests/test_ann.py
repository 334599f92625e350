import math
import random

import pytest
from hypothesis import given, strategies as st

from metasim.ann import PerceptronWeights, ann_phi, ann_psi, feedforward_milieu, train_epoch

import oracles


@pytest.mark.parametrize(
    "weights, bias, x, expected",
    [
        ((0.5, 0.5), -0.6, (1, 1), 1),
        ((0.5, 0.5), -0.6, (1, 0), 0),
        ((0.0, 0.0), 0.0, (1, 1), 0),  # exactly zero is not above threshold
    ],
)
def test_ann_phi(weights, bias, x, expected):
    assert ann_phi(x, PerceptronWeights(weights, bias)) == expected


def test_ann_phi_length_mismatch():
    with pytest.raises(ValueError):
        ann_phi((1, 0, 1), PerceptronWeights((0.1, 0.1)))


def test_ann_psi_update():
    new = ann_psi(PerceptronWeights((0.0, 0.0), 0.0, 0.1), (1, 0), target=1, output=0)
    assert new.weights == pytest.approx((0.1, 0.0))
    assert new.bias == pytest.approx(0.1)
    assert new.learning_rate == 0.1


def test_ann_psi_negative_update():
    new = ann_psi(PerceptronWeights((0.1, 0.1), 0.1, 0.1), (1, 1), target=0, output=1)
    assert new.weights == pytest.approx((0.0, 0.0), abs=1e-12)
    assert new.bias == pytest.approx(0.0, abs=1e-12)


def test_ann_psi_shape_mismatch():
    with pytest.raises(ValueError):
        ann_psi(PerceptronWeights((0.0,)), (1, 1), 1, 0)


finite = st.floats(-10, 10, allow_nan=False)
binary = st.integers(0, 1)


@given(st.lists(finite, min_size=1, max_size=5), finite, st.floats(0.001, 1), st.data())
def test_ann_psi_fixpoint_and_bounded(weights, bias, alpha, data):
    rules = PerceptronWeights(tuple(weights), bias, alpha)
    x = tuple(data.draw(binary) for _ in weights)
    target = data.draw(binary)
    assert ann_psi(rules, x, target, target) == rules
    output = data.draw(binary)
    new = ann_psi(rules, x, target, output)
    for old_w, new_w in zip(rules.weights, new.weights):
        assert abs(new_w - old_w) <= alpha + 1e-12
    assert abs(new.bias - rules.bias) <= alpha + 1e-12


def test_feedforward_milieu():
    assert feedforward_milieu(2).neighbours == ((0,), (1,), (0, 1))
    assert feedforward_milieu(1).neighbours == ((0,), (0,))
    with pytest.raises(ValueError):
        feedforward_milieu(0)


@pytest.mark.parametrize("name", ["AND", "OR", "NAND", "NOR"])
def test_separable_functions_converge(name):
    patterns = oracles.patterns_for(name)
    inputs = [x for x, _ in patterns]
    targets = [t for _, t in patterns]
    rules = PerceptronWeights((0.0, 0.0), 0.0, 0.1)
    for _ in range(1000):
        if all(ann_phi(x, rules) == t for x, t in patterns):
            break
        rules = train_epoch(rules, inputs, targets)
    assert oracles.separates(rules.weights, rules.bias, patterns)


def test_random_initial_weights_converge():
    rng = random.Random(11)
    patterns = oracles.patterns_for("OR")
    rules = PerceptronWeights(tuple(rng.uniform(-0.5, 0.5) for _ in range(2)), rng.uniform(-0.5, 0.5))
    for _ in range(1000):
        rules = train_epoch(rules, [x for x, _ in patterns], [t for _, t in patterns])
    assert oracles.separates(rules.weights, rules.bias, patterns)
    assert all(math.isfinite(w) for w in rules.weights)


def test_xor_has_no_separator_on_grid():
    assert oracles.grid_separator(oracles.patterns_for("XOR")) is None
