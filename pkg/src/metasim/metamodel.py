"""Abstract system-model tuple and the concretisation step.

A model is described abstractly by its component types (entities, states,
milieus, update rules, adaptation rules, end), parameterised from an
:class:`~metasim.config.ExperimentConfig` by :func:`build_system_model`,
and executed by :mod:`metasim.engine` and :mod:`metasim.adaptation`.

Family-specific behaviour (the concrete update and adaptation functions)
lives behind :class:`ModelFamily`; the engines only ever talk to that
interface, so a new family plugs in via :func:`register_family`.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Callable, Mapping, Sequence

if TYPE_CHECKING:
    from metasim.config import ExperimentConfig
    from metasim.engine import Trace

# Snapshot of every entity state at one time step.
Configuration = tuple[int, ...]

# Family-specific payloads (CaRuleTable, PerceptronWeights, ...).
UpdateRules = Any


class ModelError(ValueError):
    """Raised when a model cannot be concretised from its parameters."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class StateAlphabet:
    """The integer states ``0..k-1``."""

    k: int = 2

    def __contains__(self, state: object) -> bool:
        return isinstance(state, int) and 0 <= state < self.k

    @property
    def states(self) -> range:
        return range(self.k)


@dataclass(frozen=True)
class MilieuTopology:
    """Neighbour indices per entity; entry ``i`` is the milieu of entity ``i``."""

    neighbours: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.neighbours)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.neighbours[i]

    def __iter__(self):
        return iter(self.neighbours)


@dataclass(frozen=True)
class AdaptationSpec:
    """What the adaptation loop needs on top of a runnable model.

    ``rules`` is the family's adaptation payload (candidate pool for CA,
    training patterns for ANN). ``end`` is the target the compared states
    are scored against.
    """

    rules: Any
    end: Configuration
    budget: int
    tolerance: float = 0.0
    keep_traces: bool = True


@dataclass(frozen=True)
class SystemModel:
    alphabet: StateAlphabet
    initial: Configuration
    milieus: MilieuTopology
    update_rules: UpdateRules
    steps: int
    family: str
    adaptation: AdaptationSpec | None = None
    # further structures / operations; no shipped family uses them
    extensions: Mapping[str, Any] = field(default_factory=dict, hash=False)

    @property
    def e(self) -> int:
        return len(self.initial)

    def with_rules(self, rules: UpdateRules) -> "SystemModel":
        return replace(self, update_rules=rules)

    def with_initial(self, initial: Configuration) -> "SystemModel":
        return replace(self, initial=tuple(initial))


# An adapter maps (current rules, traces of the last actualisation) to new rules.
Adapter = Callable[[UpdateRules, Sequence["Trace"]], UpdateRules]


class ModelFamily(ABC):
    """Concrete update/adaptation functions for one kind of model."""

    tag: str
    rules_type: type

    @abstractmethod
    def phi(
        self,
        index: int,
        centre: int,
        milieu_states: tuple[int, ...],
        step_index: int,
        rules: UpdateRules,
    ) -> int:
        """New state of entity ``index`` from its own and its milieu's states."""

    @abstractmethod
    def build(self, config: "ExperimentConfig", init_rng: random.Random) -> SystemModel:
        """Concretise a model from a parsed config."""

    @abstractmethod
    def adapter(self, model: SystemModel, rng: random.Random) -> Adapter:
        """Fresh adaptation function for one adaptation run."""

    def check(self, model: SystemModel) -> list[str]:
        return []

    def episodes(self, model: SystemModel) -> list[Configuration]:
        """Initial configurations actualised in one adaptation iteration."""
        return [model.initial]

    def observe(self, model: SystemModel, traces: Sequence["Trace"]) -> Configuration:
        """States compared against the end after one actualisation."""
        return traces[0].final

    def rules_id(self, rules: UpdateRules) -> str:
        return str(rules)


_FAMILIES: dict[str, ModelFamily] = {}


def register_family(family: ModelFamily) -> ModelFamily:
    _FAMILIES[family.tag] = family
    return family


def family_of(model_or_tag: SystemModel | str) -> ModelFamily:
    tag = model_or_tag if isinstance(model_or_tag, str) else model_or_tag.family
    try:
        return _FAMILIES[tag]
    except KeyError:
        raise ModelError([f"unknown model family {tag!r}"]) from None


def families() -> list[str]:
    return sorted(_FAMILIES)


def validate(model: SystemModel) -> list[str]:
    """Return every invariant violation of ``model``; never raises."""
    problems: list[str] = []
    k = model.alphabet.k
    if not isinstance(k, int) or k < 1:
        problems.append("alphabet size k must be ≥ 1")
    if not isinstance(model.steps, int) or model.steps < 1:
        problems.append("t must be ≥ 1")
    e = len(model.initial)
    if e < 1:
        problems.append("initial configuration must hold at least one entity")
    if any(s not in model.alphabet for s in model.initial):
        problems.append("initial state out of alphabet")
    if len(model.milieus) != e:
        problems.append("milieu count must equal entity count")
    for i, milieu in enumerate(model.milieus):
        if not milieu:
            problems.append(f"milieu of entity {i} is empty")
        if any(not isinstance(j, int) or not 0 <= j < e for j in milieu):
            problems.append("milieu index out of range")
            break

    spec = model.adaptation
    if spec is not None:
        if not isinstance(spec.budget, int) or spec.budget < 1:
            problems.append("g must be ≥ 1")
        if not spec.tolerance >= 0:
            problems.append("loss tolerance l must be ≥ 0")
        if any(s not in model.alphabet for s in spec.end):
            problems.append("end state out of alphabet")

    family = _FAMILIES.get(model.family)
    if family is None:
        problems.append(f"unknown model family {model.family!r}")
    elif not isinstance(model.update_rules, family.rules_type):
        problems.append(
            f"update rules of type {type(model.update_rules).__name__} "
            f"do not match family {model.family}"
        )
    elif not problems:
        problems.extend(family.check(model))
    return problems


def build_system_model(config: "ExperimentConfig") -> SystemModel:
    """Concretise ``config`` into a runnable, validated model.

    Any randomness needed for initialisation (seeded-random initial
    states, random weights, a random starting rule) comes from a stream
    derived from ``config.seed`` and kept apart from the adaptation stream.
    """
    family = family_of(config.family)
    model = family.build(config, init_stream(config.seed))
    problems = validate(model)
    if problems:
        raise ModelError(problems)
    return model


def init_stream(seed: int) -> random.Random:
    return random.Random(f"init:{seed}")


def adaptation_stream(seed: int) -> random.Random:
    return random.Random(seed)
