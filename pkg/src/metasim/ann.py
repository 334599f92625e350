"""Single-layer perceptron as a system model.

Entities ``0..n-1`` are input neurons whose update function is the
identity (their milieu is themselves), so an input pattern persists over
time. Entity ``n`` is the output neuron, reading all inputs through a
strict threshold unit. Adaptation is the perceptron learning rule, applied
online over the training patterns once per adaptation iteration.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from metasim.config import ExperimentConfig
from metasim.engine import Trace
from metasim.metamodel import (
    AdaptationSpec,
    Adapter,
    Configuration,
    MilieuTopology,
    ModelError,
    ModelFamily,
    StateAlphabet,
    SystemModel,
    register_family,
)
from metasim.textio import format_real

DEFAULT_LEARNING_RATE = 0.1


@dataclass(frozen=True)
class PerceptronWeights:
    weights: tuple[float, ...]
    bias: float = 0.0
    learning_rate: float = DEFAULT_LEARNING_RATE

    def __str__(self) -> str:
        ws = ",".join(format_real(w) for w in self.weights)
        return f"w:{ws};b:{format_real(self.bias)}"


@dataclass(frozen=True)
class TrainingSet:
    """Input tuples, in presentation order; their targets form the end."""

    inputs: tuple[tuple[int, ...], ...]


def ann_phi(milieu_states: Sequence[int], rules: PerceptronWeights) -> int:
    if len(milieu_states) != len(rules.weights):
        raise ValueError(
            f"{len(milieu_states)} activations for {len(rules.weights)} weights"
        )
    total = sum(w * x for w, x in zip(rules.weights, milieu_states)) + rules.bias
    return 1 if total > 0 else 0


def ann_psi(
    rules: PerceptronWeights, x: Sequence[int], target: int, output: int
) -> PerceptronWeights:
    """One perceptron-learning-rule update; a no-op when output == target."""
    if len(x) != len(rules.weights):
        raise ValueError(f"{len(x)} activations for {len(rules.weights)} weights")
    if target == output:
        return rules
    delta = rules.learning_rate * (target - output)
    return PerceptronWeights(
        weights=tuple(w + delta * xj for w, xj in zip(rules.weights, x)),
        bias=rules.bias + delta,
        learning_rate=rules.learning_rate,
    )


def feedforward_milieu(input_count: int) -> MilieuTopology:
    if input_count < 1:
        raise ValueError(f"need at least one input, got {input_count}")
    frozen = tuple((i,) for i in range(input_count))
    return MilieuTopology(frozen + (tuple(range(input_count)),))


def train_epoch(rules: PerceptronWeights, inputs: Sequence[Sequence[int]], targets: Sequence[int]) -> PerceptronWeights:
    for x, target in zip(inputs, targets):
        rules = ann_psi(rules, x, target, ann_phi(x, rules))
    return rules


class Perceptron(ModelFamily):
    tag = "ann"
    rules_type = PerceptronWeights

    def phi(self, index, centre, milieu_states, step_index, rules):
        if index < len(rules.weights):
            return centre
        return ann_phi(milieu_states, rules)

    def build(self, config: ExperimentConfig, init_rng: random.Random) -> SystemModel:
        n = config.inputs
        problems = []
        alpha = DEFAULT_LEARNING_RATE if config.learning_rate is None else config.learning_rate

        if config.weights is None or config.weights == "zeros":
            weights = (0.0,) * n
            bias = 0.0
        elif config.weights == "random":
            weights = tuple(init_rng.uniform(-0.5, 0.5) for _ in range(n))
            bias = init_rng.uniform(-0.5, 0.5)
        else:
            weights = tuple(float(w) for w in config.weights)
            bias = 0.0
            if len(weights) != n:
                problems.append(f"{len(weights)} weights given for {n} inputs")
        if config.bias is not None:
            bias = config.bias
        rules = PerceptronWeights(weights, bias, alpha)

        spec = None
        if config.adaptation is not None:
            a = config.adaptation
            patterns = a.patterns or ()
            if not patterns:
                problems.append("training needs at least one pattern")
            for p in patterns:
                if len(p.inputs) != n:
                    problems.append(f"pattern {list(p.inputs)} has {len(p.inputs)} inputs, expected {n}")
            spec = AdaptationSpec(
                rules=TrainingSet(tuple(tuple(p.inputs) for p in patterns)),
                end=tuple(p.target for p in patterns),
                budget=a.iterations,
                tolerance=a.tolerance,
                keep_traces=a.keep_traces,
            )

        if config.initial is None:
            first = spec.rules.inputs[0] if spec and spec.rules.inputs else (0,) * n
            initial = tuple(first) + (0,)
        elif config.initial == "random":
            initial = tuple(init_rng.randrange(2) for _ in range(n)) + (0,)
        elif config.initial == "centre":
            problems.append("'centre' initial configuration applies only to cellular automata")
            initial = (0,) * (n + 1)
        else:
            initial = tuple(config.initial)

        if config.milieus is not None:
            milieus = MilieuTopology(tuple(tuple(m) for m in config.milieus))
        else:
            milieus = feedforward_milieu(n)

        if problems:
            raise ModelError(problems)
        return SystemModel(
            alphabet=StateAlphabet(2),
            initial=initial,
            milieus=milieus,
            update_rules=rules,
            steps=config.steps,
            family=self.tag,
            adaptation=spec,
        )

    def check(self, model: SystemModel) -> list[str]:
        problems = []
        rules: PerceptronWeights = model.update_rules
        n = len(rules.weights)
        if model.alphabet.k != 2:
            problems.append("perceptron activations require k = 2")
        if not all(math.isfinite(v) for v in (*rules.weights, rules.bias, rules.learning_rate)):
            problems.append("weights must be finite")
        if not rules.learning_rate > 0:
            problems.append("learning rate must be > 0")
        if model.e != n + 1:
            problems.append(f"{model.e} entities for {n} inputs, expected {n + 1}")
        elif len(model.milieus[n]) != n:
            problems.append("output milieu size must equal the number of weights")
        spec = model.adaptation
        if spec is not None:
            if not isinstance(spec.rules, TrainingSet):
                problems.append("perceptron adaptation needs a training set")
            elif len(spec.end) != len(spec.rules.inputs):
                problems.append("end must hold one target per training pattern")
            elif any(len(x) != n or any(s not in model.alphabet for s in x) for x in spec.rules.inputs):
                problems.append("training inputs must be binary and match the weight count")
        return problems

    def episodes(self, model: SystemModel) -> list[Configuration]:
        if model.adaptation is None:
            return [model.initial]
        return [tuple(x) + (0,) for x in model.adaptation.rules.inputs]

    def observe(self, model: SystemModel, traces: Sequence[Trace]) -> Configuration:
        return tuple(trace.final[-1] for trace in traces)

    def adapter(self, model: SystemModel, rng: random.Random) -> Adapter:
        spec = model.adaptation

        def psi(rules: PerceptronWeights, traces: Sequence[Trace]) -> PerceptronWeights:
            return train_epoch(rules, spec.rules.inputs, spec.end)

        return psi

    def rules_id(self, rules: PerceptronWeights) -> str:
        return str(rules)


ANN = register_family(Perceptron())
