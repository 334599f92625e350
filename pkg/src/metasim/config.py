"""Experiment configuration: YAML text <-> :class:`ExperimentConfig`.

A CA search looks like::

    family: ca
    entities: 11
    steps: 5
    initial: centre
    rule: random
    seed: 7
    adaptation:
      end: [1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0]
      iterations: 256
      tolerance: 0
      sampling: without-replacement

and a perceptron training run::

    family: ann
    inputs: 2
    weights: zeros
    learning_rate: 0.1
    adaptation:
      iterations: 1000
      patterns:
        - {inputs: [0, 0], target: 0}
        - {inputs: [0, 1], target: 1}
        - {inputs: [1, 0], target: 1}
        - {inputs: [1, 1], target: 1}

Schema problems are collected (not raised one at a time) and reported
with the line they occur on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Union

import yaml

DEFAULT_SEED = 0
DEFAULT_OUTPUT_DIR = "out"
SAMPLING_MODES = ("with-replacement", "without-replacement")

# "centre" | "random" | explicit states
InitialSpec = Union[str, tuple[int, ...]]


@dataclass(frozen=True)
class Pattern:
    inputs: tuple[int, ...]
    target: int


@dataclass(frozen=True)
class AdaptationConfig:
    iterations: int
    tolerance: float = 0.0
    end: tuple[int, ...] | None = None
    pool: tuple[int, ...] | None = None
    sampling: str = "with-replacement"
    patterns: tuple[Pattern, ...] | None = None
    keep_traces: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    steps: int = 1
    entities: int | None = None
    inputs: int | None = None
    initial: InitialSpec | None = None
    rule: int | str | None = None
    weights: tuple[float, ...] | str | None = None
    bias: float | None = None
    learning_rate: float | None = None
    milieus: tuple[tuple[int, ...], ...] | None = None
    adaptation: AdaptationConfig | None = None
    seed: int = DEFAULT_SEED
    output_dir: str = DEFAULT_OUTPUT_DIR


@dataclass(frozen=True)
class ConfigIssue:
    line: int | None
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}" if self.line else self.message


class ConfigError(ValueError):
    def __init__(self, issues: list[ConfigIssue]):
        self.issues = issues
        super().__init__("\n".join(str(i) for i in issues))


_COMMON_KEYS = {"family", "steps", "initial", "milieus", "adaptation", "seed", "output_dir"}
_FAMILY_KEYS = {
    "ca": {"entities", "rule"},
    "ann": {"inputs", "weights", "bias", "learning_rate"},
}
_ADAPT_KEYS = {
    "ca": {"iterations", "tolerance", "end", "pool", "sampling", "keep_traces"},
    "ann": {"iterations", "tolerance", "patterns", "keep_traces"},
}
_REQUIRED = {"ca": ("entities", "rule"), "ann": ("inputs",)}


class _Reader:
    """Walks a composed YAML node tree, converting values and collecting issues."""

    def __init__(self) -> None:
        self.issues: list[ConfigIssue] = []

    def fail(self, node: yaml.Node | None, message: str) -> None:
        line = node.start_mark.line + 1 if node is not None else None
        self.issues.append(ConfigIssue(line, message))

    def mapping(self, node: yaml.Node, where: str) -> dict[str, tuple[yaml.Node, yaml.Node]]:
        if not isinstance(node, yaml.MappingNode):
            self.fail(node, f"{where} must be a mapping")
            return {}
        out = {}
        for key_node, value_node in node.value:
            key = key_node.value
            if key in out:
                self.fail(key_node, f"duplicate key {key!r}")
            out[key] = (key_node, value_node)
        return out

    def scalar(self, node: yaml.Node, name: str) -> Any:
        if not isinstance(node, yaml.ScalarNode):
            self.fail(node, f"{name} must be a scalar")
            return None
        return yaml.safe_load(yaml.serialize(node))

    def integer(self, node: yaml.Node, name: str, minimum: int | None = None) -> int | None:
        value = self.scalar(node, name)
        if isinstance(value, bool) or not isinstance(value, int):
            if value is not None:
                self.fail(node, f"{name} must be an integer, got {value!r}")
            return None
        if minimum is not None and value < minimum:
            self.fail(node, f"{name} must be ≥ {minimum}, got {value}")
            return None
        return value

    def real(self, node: yaml.Node, name: str, minimum: float | None = None) -> float | None:
        value = self.scalar(node, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            if value is not None:
                self.fail(node, f"{name} must be a finite number, got {value!r}")
            return None
        if minimum is not None and value < minimum:
            self.fail(node, f"{name} must be ≥ {minimum}, got {value}")
            return None
        return float(value)

    def boolean(self, node: yaml.Node, name: str) -> bool | None:
        value = self.scalar(node, name)
        if not isinstance(value, bool):
            self.fail(node, f"{name} must be true or false, got {value!r}")
            return None
        return value

    def sequence(self, node: yaml.Node, name: str, item: Callable[[yaml.Node, str], Any]) -> tuple | None:
        if not isinstance(node, yaml.SequenceNode):
            self.fail(node, f"{name} must be a list")
            return None
        before = len(self.issues)
        values = tuple(item(child, f"{name}[{i}]") for i, child in enumerate(node.value))
        return None if len(self.issues) > before else values

    def states(self, node: yaml.Node, name: str) -> tuple[int, ...] | None:
        return self.sequence(node, name, lambda n, nm: self.integer(n, nm, minimum=0))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and schema-check config text; raises :class:`ConfigError` listing every problem."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError([ConfigIssue(line, f"malformed config: {getattr(exc, 'problem', exc)}")]) from None
    if root is None:
        raise ConfigError([ConfigIssue(None, "empty config")])

    r = _Reader()
    top = r.mapping(root, "config")
    if "family" not in top:
        r.fail(root, "missing required field 'family'")
        raise ConfigError(r.issues)
    family = r.scalar(top["family"][1], "family")
    if family not in _FAMILY_KEYS:
        r.fail(top["family"][1], f"family must be one of {sorted(_FAMILY_KEYS)}, got {family!r}")
        raise ConfigError(r.issues)

    allowed = _COMMON_KEYS | _FAMILY_KEYS[family]
    for key, (key_node, _) in top.items():
        if key not in allowed:
            r.fail(key_node, f"unknown key {key!r} for family {family}")
    for key in _REQUIRED[family]:
        if key not in top:
            r.fail(root, f"missing required field {key!r}")

    values: dict[str, Any] = {"family": family}
    for key, (_, node) in top.items():
        if key not in allowed or key == "family":
            continue
        reader = _TOP_READERS[key]
        values[key] = reader(r, node, family) if key == "adaptation" else reader(r, node)

    if r.issues:
        raise ConfigError(r.issues)
    return ExperimentConfig(**{k: v for k, v in values.items() if v is not None})


def _read_initial(r: _Reader, node: yaml.Node) -> InitialSpec | None:
    if isinstance(node, yaml.ScalarNode):
        value = r.scalar(node, "initial")
        if value in ("centre", "random"):
            return value
        r.fail(node, f"initial must be 'centre', 'random' or a list of states, got {value!r}")
        return None
    return r.states(node, "initial")


def _read_rule(r: _Reader, node: yaml.Node) -> int | str | None:
    value = r.scalar(node, "rule")
    if value == "random":
        return value
    return r.integer(node, "rule")


def _read_weights(r: _Reader, node: yaml.Node) -> tuple[float, ...] | str | None:
    if isinstance(node, yaml.ScalarNode):
        value = r.scalar(node, "weights")
        if value in ("zeros", "random"):
            return value
        r.fail(node, f"weights must be 'zeros', 'random' or a list of numbers, got {value!r}")
        return None
    return r.sequence(node, "weights", r.real)


def _read_milieus(r: _Reader, node: yaml.Node) -> tuple[tuple[int, ...], ...] | None:
    return r.sequence(node, "milieus", r.states)


def _read_pattern(r: _Reader, node: yaml.Node, name: str) -> Pattern | None:
    fields_ = r.mapping(node, name)
    for key, (key_node, _) in fields_.items():
        if key not in ("inputs", "target"):
            r.fail(key_node, f"unknown key {key!r} in {name}")
    missing = [k for k in ("inputs", "target") if k not in fields_]
    for key in missing:
        r.fail(node, f"missing required field {key!r} in {name}")
    if missing:
        return None
    inputs = r.states(fields_["inputs"][1], f"{name}.inputs")
    target = r.integer(fields_["target"][1], f"{name}.target", minimum=0)
    if inputs is None or target is None:
        return None
    return Pattern(inputs, target)


def _read_adaptation(r: _Reader, node: yaml.Node, family: str) -> AdaptationConfig | None:
    block = r.mapping(node, "adaptation")
    allowed = _ADAPT_KEYS[family]
    before = len(r.issues)
    for key, (key_node, _) in block.items():
        if key not in allowed:
            r.fail(key_node, f"unknown key {key!r} in adaptation block for family {family}")
    required = ("iterations", "end") if family == "ca" else ("iterations", "patterns")
    for key in required:
        if key not in block:
            r.fail(node, f"missing required field {key!r} in adaptation block")

    def get(key: str, read: Callable[[yaml.Node], Any]) -> Any:
        return read(block[key][1]) if key in block and key in allowed else None

    values = {
        "iterations": get("iterations", lambda n: r.integer(n, "iterations", minimum=1)),
        "tolerance": get("tolerance", lambda n: r.real(n, "tolerance", minimum=0.0)),
        "end": get("end", lambda n: r.states(n, "end")),
        "pool": get("pool", lambda n: _read_pool(r, n)),
        "sampling": get("sampling", lambda n: _read_sampling(r, n)),
        "patterns": get(
            "patterns", lambda n: r.sequence(n, "patterns", lambda c, nm: _read_pattern(r, c, nm))
        ),
        "keep_traces": get("keep_traces", lambda n: r.boolean(n, "keep_traces")),
    }
    if len(r.issues) > before:
        return None
    return AdaptationConfig(**{k: v for k, v in values.items() if v is not None})


def _read_pool(r: _Reader, node: yaml.Node) -> tuple[int, ...] | None:
    if isinstance(node, yaml.ScalarNode) and r.scalar(node, "pool") == "all":
        return None
    return r.sequence(node, "pool", lambda n, nm: r.integer(n, nm, minimum=0))


def _read_sampling(r: _Reader, node: yaml.Node) -> str | None:
    value = r.scalar(node, "sampling")
    if value not in SAMPLING_MODES:
        r.fail(node, f"sampling must be one of {list(SAMPLING_MODES)}, got {value!r}")
        return None
    return value


_TOP_READERS: dict[str, Callable[..., Any]] = {
    "steps": lambda r, n: r.integer(n, "steps", minimum=1),
    "entities": lambda r, n: r.integer(n, "entities", minimum=1),
    "inputs": lambda r, n: r.integer(n, "inputs", minimum=1),
    "initial": _read_initial,
    "rule": _read_rule,
    "weights": _read_weights,
    "bias": lambda r, n: r.real(n, "bias"),
    "learning_rate": lambda r, n: r.real(n, "learning_rate"),
    "milieus": _read_milieus,
    "adaptation": _read_adaptation,
    "seed": lambda r, n: r.integer(n, "seed", minimum=0),
    "output_dir": lambda r, n: str(r.scalar(n, "output_dir")),
}


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    """Plain-data form of ``config`` (defaults included, unset fields dropped)."""

    def plain(value: Any) -> Any:
        if isinstance(value, tuple):
            return [plain(v) for v in value]
        if isinstance(value, Pattern):
            return {"inputs": list(value.inputs), "target": value.target}
        return value

    out: dict[str, Any] = {}
    for name in ExperimentConfig.__dataclass_fields__:
        value = getattr(config, name)
        if value is None:
            continue
        if name == "adaptation":
            allowed = _ADAPT_KEYS.get(config.family, ())
            value = {
                k: plain(getattr(value, k))
                for k in AdaptationConfig.__dataclass_fields__
                if k in allowed and getattr(value, k) is not None
            }
        out[name] = plain(value)
    return out


def serialise_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=None)


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def with_overrides(config: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
