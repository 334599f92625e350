"""Command line front door.

    metasim run CONFIG           build, run/adapt, write trace.txt, history.txt, report.txt
    metasim brute-force CONFIG   evaluate all 256 CA rules against the config's end
    metasim render TRACE         print one iteration of a trace file as a diagram

Exit codes: 0 on a society or a plain run, 2 when the iteration budget ran
out, 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from metasim.adaptation import AdaptationHistory, Outcome, adapt_loop
from metasim.ca import ALL_RULES, brute_force
from metasim.config import ConfigError, ExperimentConfig, load_config, serialise_config, with_overrides
from metasim.engine import run_actual
from metasim.metamodel import ModelError, SystemModel, adaptation_stream, build_system_model, family_of
from metasim.textio import (
    UnsupportedRendering,
    format_real,
    history_lines,
    read_trace_lines,
    render_trace,
    trace_lines,
)

log = logging.getLogger("metasim")

TRACE_FILE = "trace.txt"
HISTORY_FILE = "history.txt"
REPORT_FILE = "report.txt"

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2
COMPLETED = "completed"


@dataclass(frozen=True)
class RunReport:
    config: ExperimentConfig
    outcome: str
    terminated_by: str | None
    iterations: int
    final_loss: float | None
    winning_rules: str | None
    duration: float

    @property
    def exit_code(self) -> int:
        return EXIT_BUDGET if self.outcome == Outcome.NEXUS.value else EXIT_OK

    def lines(self) -> list[str]:
        # wall-clock duration is left out so reruns stay byte-identical
        return [
            f"family={self.config.family}",
            f"seed={self.config.seed}",
            f"outcome={self.outcome}",
            f"terminated_by={self.terminated_by or 'none'}",
            f"iterations={self.iterations}",
            f"final_loss={'none' if self.final_loss is None else format_real(self.final_loss)}",
            f"winning_rules={self.winning_rules or 'none'}",
            "--- config ---",
            serialise_config(self.config).rstrip("\n"),
        ]


def report_from_history(
    config: ExperimentConfig, model: SystemModel, history: AdaptationHistory, duration: float = 0.0
) -> RunReport:
    final = history.final
    return RunReport(
        config=config,
        outcome=final.outcome.value,
        terminated_by=history.terminated_by.value,
        iterations=len(history),
        final_loss=final.loss,
        winning_rules=family_of(model).rules_id(final.rules_used) if history.succeeded else None,
        duration=duration,
    )


def _write(path: Path, lines: Sequence[str]) -> None:
    path.write_text("".join(line + "\n" for line in lines))


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Build the model, run or adapt it, and persist trace/history/report files."""
    started = time.perf_counter()
    model = build_system_model(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    if model.adaptation is None:
        trace = run_actual(model)
        _write(out / TRACE_FILE, trace_lines(0, [trace]))
        (out / HISTORY_FILE).unlink(missing_ok=True)
        report = RunReport(config, COMPLETED, None, 0, None, None, time.perf_counter() - started)
    else:
        history = adapt_loop(model, adaptation_stream(config.seed))
        lines = []
        for rec in history.iterations:
            if rec.traces is not None:
                lines.extend(trace_lines(rec.index, rec.traces))
        _write(out / TRACE_FILE, lines)
        _write(out / HISTORY_FILE, history_lines(history, family_of(model).rules_id))
        report = report_from_history(config, model, history, time.perf_counter() - started)

    _write(out / REPORT_FILE, report.lines())
    log.info("run finished in %.3fs", report.duration)
    return report


def _load(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config)
    return with_overrides(config, seed=args.seed, output_dir=args.out_dir)


def cmd_run(args: argparse.Namespace) -> int:
    report = run_experiment(_load(args))
    if not args.quiet:
        print("\n".join(report.lines()[:7]))
    return report.exit_code


def cmd_brute_force(args: argparse.Namespace) -> int:
    config = _load(args)
    model = build_system_model(config)
    if model.family != "ca":
        raise ModelError(["brute-force applies only to cellular automata"])
    if model.adaptation is None:
        raise ModelError(["brute-force needs an adaptation block with an end"])
    losses = brute_force(model, ALL_RULES)
    tolerance = model.adaptation.tolerance
    winners = [r for r, loss in losses.items() if loss <= tolerance]
    if not args.quiet:
        for rule, loss in losses.items():
            log.info("rule=%d loss=%s", rule, format_real(loss))
    print(" ".join(str(r) for r in winners))
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    rows = read_trace_lines(Path(args.trace).read_text().splitlines())
    if not rows:
        raise UnsupportedRendering("trace file holds no rows")
    iteration = rows[-1].iteration if args.iter is None else args.iter
    chosen = [r.states for r in rows if r.iteration == iteration and r.pattern == args.pattern]
    if not chosen:
        raise ValueError(f"no rows for iter={iteration} pattern={args.pattern}")
    print(render_trace(chosen))
    return EXIT_OK


def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--seed", type=int, default=default, help="override the config seed")
    parser.add_argument("--out-dir", default=default, help="override the output directory")
    parser.add_argument("--quiet", action="store_true", default=default or False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metasim", description=__doc__.splitlines()[0])
    _global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run or adapt the model described by a config")
    run.add_argument("config")
    run.set_defaults(func=cmd_run)

    bf = sub.add_parser("brute-force", help="list every CA rule that attains the end")
    bf.add_argument("config")
    bf.set_defaults(func=cmd_brute_force)

    render = sub.add_parser("render", help="draw one iteration of a trace file")
    render.add_argument("trace")
    render.add_argument("--iter", type=int, default=None, help="iteration (default: last)")
    render.add_argument("--pattern", type=int, default=0, help="training pattern for perceptron traces")
    render.set_defaults(func=cmd_render)

    for p in (run, bf, render):
        _global_flags(p, argparse.SUPPRESS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, ModelError, UnsupportedRendering, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
