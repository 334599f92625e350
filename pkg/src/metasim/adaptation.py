"""The adaptation loop: actualise, score against the end, adapt the rules, repeat.

Each adaptation iteration re-runs the model from the same initial
configuration with the current update rules. A run whose loss is within
tolerance is a *society* and ends the loop; any other run is a *nexus*
and the family's adaptation function proposes new rules for the next
iteration. The loop also stops once the iteration budget is spent.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from typing import Sequence

from metasim.engine import Trace, run_actual
from metasim.metamodel import Configuration, ModelError, SystemModel, UpdateRules, family_of


class Outcome(str, enum.Enum):
    NEXUS = "nexus"
    SOCIETY = "society"


class Termination(str, enum.Enum):
    LOSS_REACHED = "loss-reached"
    ITERATION_BUDGET = "iteration-budget"


@dataclass(frozen=True)
class IterationRecord:
    index: int
    rules_used: UpdateRules
    traces: tuple[Trace, ...] | None
    observed: Configuration
    loss: float
    outcome: Outcome

    @property
    def trace(self) -> Trace | None:
        """The single trace for one-episode families (CA)."""
        return self.traces[0] if self.traces else None


@dataclass(frozen=True)
class AdaptationHistory:
    iterations: tuple[IterationRecord, ...]
    terminated_by: Termination
    budget: int
    tolerance: float

    def __len__(self) -> int:
        return len(self.iterations)

    @property
    def final(self) -> IterationRecord:
        return self.iterations[-1]

    @property
    def succeeded(self) -> bool:
        return self.terminated_by is Termination.LOSS_REACHED


def mse_loss(final: Sequence[int], end: Sequence[int]) -> float:
    """Mean square error between two equally long state sequences."""
    if len(final) != len(end):
        raise ValueError(f"length mismatch: {len(final)} states vs end of {len(end)}")
    if not end:
        raise ValueError("cannot score an empty end")
    return sum((a - b) ** 2 for a, b in zip(final, end)) / len(end)


def classify(loss: float, tolerance: float) -> Outcome:
    return Outcome.SOCIETY if loss <= tolerance else Outcome.NEXUS


def actualise(model: SystemModel) -> tuple[tuple[Trace, ...], Configuration]:
    """Run every episode of ``model`` and return traces plus compared states."""
    family = family_of(model)
    traces = tuple(run_actual(model.with_initial(c)) for c in family.episodes(model))
    return traces, tuple(family.observe(model, traces))


def adapt_loop(model: SystemModel, rng: random.Random) -> AdaptationHistory:
    """Adapt ``model``'s update rules until the end is attained or the budget runs out.

    All randomness is drawn from ``rng``; the same model and seed give the
    same history.
    """
    spec = model.adaptation
    if spec is None:
        raise ModelError(["model has no adaptation spec"])
    family = family_of(model)
    psi = family.adapter(model, rng)

    rules = model.update_rules
    records: list[IterationRecord] = []
    for index in range(1, spec.budget + 1):
        current = model.with_rules(rules)
        traces, observed = actualise(current)
        loss = mse_loss(observed, spec.end)
        outcome = classify(loss, spec.tolerance)
        # summary mode: only the latest iteration keeps its traces
        if records and not spec.keep_traces:
            records[-1] = replace(records[-1], traces=None)
        records.append(
            IterationRecord(
                index=index,
                rules_used=rules,
                traces=traces,
                observed=observed,
                loss=loss,
                outcome=outcome,
            )
        )
        if outcome is Outcome.SOCIETY:
            terminated = Termination.LOSS_REACHED
            break
        if index < spec.budget:
            rules = psi(rules, traces)
    else:
        terminated = Termination.ITERATION_BUDGET

    return AdaptationHistory(tuple(records), terminated, spec.budget, spec.tolerance)
