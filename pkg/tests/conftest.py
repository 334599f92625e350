import textwrap
from pathlib import Path

import pytest

from metasim.config import parse_config

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = (marker.args[0], marker.args[1])
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        _ACCEPTANCE.setdefault(key, []).append(not failed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), results in sorted(_ACCEPTANCE.items()):
        verdict = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number}. {title} ({sum(results)}/{len(results)} checks)")


def write_config(directory: Path, text: str, name="config.yaml") -> Path:
    path = directory / name
    path.write_text(textwrap.dedent(text).lstrip())
    return path


def config_from(text: str, **overrides):
    config = parse_config(textwrap.dedent(text).lstrip())
    if overrides:
        from metasim.config import with_overrides

        config = with_overrides(config, **overrides)
    return config


CA_SEARCH = """
    family: ca
    entities: 11
    steps: 5
    initial: centre
    rule: random
    seed: 3
    adaptation:
      end: [1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0]
      iterations: 256
      tolerance: 0
      sampling: without-replacement
"""


def ann_config(table, iterations=1000, learning_rate=0.1):
    from oracles import INPUTS

    lines = "\n".join(
        f"      - {{inputs: [{x[0]}, {x[1]}], target: {t}}}" for x, t in zip(INPUTS, table)
    )
    return (
        "    family: ann\n"
        "    inputs: 2\n"
        "    weights: zeros\n"
        f"    learning_rate: {learning_rate}\n"
        "    adaptation:\n"
        f"      iterations: {iterations}\n"
        "      tolerance: 0\n"
        "      patterns:\n" + lines + "\n"
    )
