"""Synchronous execution of a model's update function over time."""

from __future__ import annotations

from dataclasses import dataclass

from metasim.metamodel import Configuration, SystemModel, family_of


@dataclass(frozen=True)
class Trace:
    """All snapshots of one run; ``snapshots[0]`` is the initial configuration."""

    snapshots: tuple[Configuration, ...]

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, j: int) -> Configuration:
        return self.snapshots[j]

    def __iter__(self):
        return iter(self.snapshots)

    @property
    def final(self) -> Configuration:
        return self.snapshots[-1]

    @property
    def steps(self) -> int:
        return len(self.snapshots) - 1


def step(model: SystemModel, current: Configuration, step_index: int) -> Configuration:
    """Apply the update function once to every entity.

    Every entity reads from ``current`` only, so the result does not depend
    on evaluation order and no entity sees a half-updated configuration.
    """
    phi = family_of(model).phi
    rules = model.update_rules
    return tuple(
        phi(i, current[i], tuple(current[j] for j in milieu), step_index, rules)
        for i, milieu in enumerate(model.milieus)
    )


def run_actual(model: SystemModel) -> Trace:
    """Run ``model`` from its initial configuration for ``model.steps`` steps."""
    current = tuple(model.initial)
    snapshots = [current]
    for j in range(model.steps):
        current = step(model, current, j)
        snapshots.append(current)
    return Trace(tuple(snapshots))
