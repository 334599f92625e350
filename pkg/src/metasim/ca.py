"""Elementary cellular automata: binary states, radius-1 ring, 256 rules.

Neighbourhoods are coded Wolfram-style as ``4*left + 2*centre + right``;
bit ``j`` of a rule number is the output for neighbourhood code ``j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from metasim.adaptation import actualise, mse_loss
from metasim.config import ExperimentConfig
from metasim.engine import Trace
from metasim.metamodel import (
    AdaptationSpec,
    Adapter,
    MilieuTopology,
    ModelError,
    ModelFamily,
    StateAlphabet,
    SystemModel,
    register_family,
)

RULE_COUNT = 256
ALL_RULES = tuple(range(RULE_COUNT))


@dataclass(frozen=True)
class CaRuleTable:
    outputs: tuple[int, ...]

    def __str__(self) -> str:
        return str(encode_rule(self))


@dataclass(frozen=True)
class RulePool:
    """Candidate rule numbers the adaptation function draws from."""

    rules: tuple[int, ...] = ALL_RULES
    without_replacement: bool = False


def decode_rule(rule_number: int) -> CaRuleTable:
    if isinstance(rule_number, bool) or not isinstance(rule_number, int) or not 0 <= rule_number < RULE_COUNT:
        raise ValueError(f"rule number must be in 0..255, got {rule_number!r}")
    return CaRuleTable(tuple((rule_number >> j) & 1 for j in range(8)))


def encode_rule(table: CaRuleTable) -> int:
    if len(table.outputs) != 8 or any(b not in (0, 1) for b in table.outputs):
        raise ValueError(f"not an elementary rule table: {table.outputs}")
    return sum(b << j for j, b in enumerate(table.outputs))


def ca_phi(centre: int, milieu_states: tuple[int, int], rules: CaRuleTable) -> int:
    left, right = milieu_states
    return rules.outputs[4 * left + 2 * centre + right]


def ring_milieu(e: int, radius: int = 1) -> MilieuTopology:
    if radius != 1:
        raise ValueError("only radius-1 neighbourhoods are supported")
    if e < 3:
        raise ValueError(f"a ring needs at least 3 entities, got {e}")
    return MilieuTopology(tuple(((i - 1) % e, (i + 1) % e) for i in range(e)))


def ca_psi(pool: Sequence[int], rng: random.Random) -> CaRuleTable:
    """Pick a rule uniformly from ``pool``, ignoring any error signal."""
    if not pool:
        raise ValueError("candidate rule pool is empty")
    return decode_rule(pool[rng.randrange(len(pool))])


class RuleSampler:
    """Stateful ``ca_psi`` over a pool, optionally without replacement.

    Without replacement, rules already tried (including the starting rule)
    are not drawn again until the pool is exhausted; the pool then refills.
    """

    def __init__(self, pool: RulePool, rng: random.Random, tried: Sequence[int] = ()):
        self.pool = tuple(pool.rules)
        self.without_replacement = pool.without_replacement
        self.rng = rng
        self._remaining: list[int] = []
        if self.without_replacement:
            self._refill()
            for rule in tried:
                self._discard(rule)

    def _refill(self) -> None:
        self._remaining = list(self.pool)

    def _discard(self, rule: int) -> None:
        if rule in self._remaining:
            self._remaining.remove(rule)
        if not self._remaining:
            self._refill()

    def draw(self) -> CaRuleTable:
        if not self.without_replacement:
            return ca_psi(self.pool, self.rng)
        table = ca_psi(self._remaining, self.rng)
        self._discard(encode_rule(table))
        return table

    def __call__(self, rules: CaRuleTable, traces: Sequence[Trace]) -> CaRuleTable:
        return self.draw()


def centre_seed(e: int) -> tuple[int, ...]:
    return tuple(1 if i == e // 2 else 0 for i in range(e))


class ElementaryCA(ModelFamily):
    tag = "ca"
    rules_type = CaRuleTable

    def phi(self, index, centre, milieu_states, step_index, rules):
        return ca_phi(centre, milieu_states, rules)

    def build(self, config: ExperimentConfig, init_rng: random.Random) -> SystemModel:
        e = config.entities
        problems = []
        spec = None
        pool = RulePool()
        if config.adaptation is not None:
            a = config.adaptation
            if a.pool is not None:
                pool = RulePool(tuple(a.pool))
            pool = RulePool(pool.rules, a.sampling == "without-replacement")
            bad = [r for r in pool.rules if not 0 <= r < RULE_COUNT]
            if bad:
                problems.append(f"pool rule numbers out of range: {bad}")
            if not pool.rules:
                problems.append("candidate rule pool is empty")
            spec = AdaptationSpec(
                rules=pool,
                end=tuple(a.end),
                budget=a.iterations,
                tolerance=a.tolerance,
                keep_traces=a.keep_traces,
            )

        if config.milieus is not None:
            milieus = MilieuTopology(tuple(tuple(m) for m in config.milieus))
        elif e is not None and e >= 3:
            milieus = ring_milieu(e)
        else:
            problems.append(f"a ring needs at least 3 entities, got {e}")
            milieus = MilieuTopology(())

        if config.initial is None or config.initial == "centre":
            initial = centre_seed(e)
        elif config.initial == "random":
            initial = tuple(init_rng.randrange(2) for _ in range(e))
        else:
            initial = tuple(config.initial)
            if len(initial) != e:
                problems.append(f"initial configuration has {len(initial)} states, expected {e}")

        if config.rule == "random":
            rules = ca_psi(pool.rules, init_rng) if not problems else decode_rule(0)
        elif 0 <= config.rule < RULE_COUNT:
            rules = decode_rule(config.rule)
        else:
            problems.append(f"rule number must be in 0..255, got {config.rule}")
            rules = decode_rule(0)

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
        if model.alphabet.k != 2:
            problems.append("elementary CA requires k = 2")
        outputs = model.update_rules.outputs
        if len(outputs) != 8:
            problems.append("rule table must have exactly 8 entries")
        if any(s not in model.alphabet for s in outputs):
            problems.append("rule table state out of alphabet")
        if any(len(m) != 2 for m in model.milieus):
            problems.append("every CA milieu must be a (left, right) pair")
        spec = model.adaptation
        if spec is not None:
            if len(spec.end) != model.e:
                problems.append(f"end has {len(spec.end)} states, expected {model.e}")
            if not isinstance(spec.rules, RulePool) or not spec.rules.rules:
                problems.append("CA adaptation needs a non-empty rule pool")
        return problems

    def adapter(self, model: SystemModel, rng: random.Random) -> Adapter:
        return RuleSampler(model.adaptation.rules, rng, tried=[encode_rule(model.update_rules)])

    def rules_id(self, rules: CaRuleTable) -> str:
        return str(encode_rule(rules))


CA = register_family(ElementaryCA())


def brute_force(model: SystemModel, pool: Sequence[int] = ALL_RULES) -> dict[int, float]:
    """Loss against the model's end for every rule in ``pool``."""
    if model.adaptation is None:
        raise ModelError(["brute force needs an end to compare against"])
    losses = {}
    for rule in pool:
        _, observed = actualise(model.with_rules(decode_rule(rule)))
        losses[rule] = mse_loss(observed, model.adaptation.end)
    return losses


def zero_loss_rules(model: SystemModel, pool: Sequence[int] = ALL_RULES) -> list[int]:
    """Rules whose run attains the end within tolerance."""
    tolerance = model.adaptation.tolerance if model.adaptation else 0.0
    return [r for r, loss in brute_force(model, pool).items() if loss <= tolerance]
