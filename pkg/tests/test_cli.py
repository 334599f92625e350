from pathlib import Path

import pytest

from metasim.cli import HISTORY_FILE, REPORT_FILE, TRACE_FILE, main, report_from_history, run_experiment
from metasim.adaptation import adapt_loop
from metasim.metamodel import adaptation_stream, build_system_model
from metasim.textio import format_real, read_history_lines, read_trace_lines

import oracles
from conftest import CA_SEARCH, ann_config, config_from, write_config


def test_ca_search_reaches_society(tmp_path):
    config = config_from(CA_SEARCH, output_dir=str(tmp_path))
    assert oracles.zero_loss_rules(oracles.centre_row(11), 5, config.adaptation.end) == [110]
    report = run_experiment(config)
    assert report.outcome == "society"
    assert report.exit_code == 0
    assert report.winning_rules == "110"
    assert report.final_loss == 0.0
    header, records = read_history_lines((tmp_path / HISTORY_FILE).read_text().splitlines())
    assert header["terminated_by"] == "loss-reached"
    assert len(records) == report.iterations
    assert records[-1].rule == "110" and records[-1].outcome == "society"


def test_trace_file_matches_history(tmp_path):
    config = config_from(CA_SEARCH, output_dir=str(tmp_path))
    run_experiment(config)
    rows = read_trace_lines((tmp_path / TRACE_FILE).read_text().splitlines())
    _, records = read_history_lines((tmp_path / HISTORY_FILE).read_text().splitlines())
    assert len(rows) == 6 * len(records)
    for rec in records:
        got = [r.states for r in rows if r.iteration == rec.iteration]
        assert got == oracles.evolve(int(rec.rule), oracles.centre_row(11), 5)


def test_xor_exhausts_budget(tmp_path):
    config = config_from(ann_config(oracles.TRUTH_TABLES["XOR"], iterations=100), output_dir=str(tmp_path))
    report = run_experiment(config)
    assert report.outcome == "nexus"
    assert report.terminated_by == "iteration-budget"
    assert report.exit_code == 2
    assert report.iterations == 100
    assert report.winning_rules is None


def test_plain_run_writes_no_history(tmp_path):
    (tmp_path / HISTORY_FILE).write_text("stale\n")
    config = config_from(
        """
        family: ca
        entities: 11
        steps: 5
        rule: 110
        """,
        output_dir=str(tmp_path),
    )
    report = run_experiment(config)
    assert report.outcome == "completed" and report.exit_code == 0
    assert not (tmp_path / HISTORY_FILE).exists()
    rows = read_trace_lines((tmp_path / TRACE_FILE).read_text().splitlines())
    assert [r.states for r in rows] == oracles.evolve(110, oracles.centre_row(11), 5)
    assert {r.iteration for r in rows} == {0}


def test_report_recomputable_from_history(tmp_path):
    config = config_from(CA_SEARCH, output_dir=str(tmp_path), seed=11)
    report = run_experiment(config)
    header, records = read_history_lines((tmp_path / HISTORY_FILE).read_text().splitlines())
    assert report.iterations == len(records)
    assert format_real(report.final_loss) == format_real(records[-1].loss)
    assert report.outcome == records[-1].outcome
    assert report.terminated_by == header["terminated_by"]
    assert report.winning_rules == (records[-1].rule if records[-1].outcome == "society" else None)
    model = build_system_model(config)
    again = report_from_history(config, model, adapt_loop(model, adaptation_stream(config.seed)))
    assert again.lines() == report.lines()


def test_report_file_contents(tmp_path):
    config = config_from(CA_SEARCH, output_dir=str(tmp_path))
    run_experiment(config)
    text = (tmp_path / REPORT_FILE).read_text()
    assert "outcome=society\n" in text
    assert "winning_rules=110\n" in text
    assert "--- config ---\nfamily: ca\n" in text


def test_main_run_and_exit_codes(tmp_path, capsys):
    ok = write_config(tmp_path, CA_SEARCH, "ca.yaml")
    assert main(["--out-dir", str(tmp_path / "a"), "run", str(ok)]) == 0
    assert "outcome=society" in capsys.readouterr().out
    xor = write_config(tmp_path, ann_config(oracles.TRUTH_TABLES["XOR"], iterations=100), "xor.yaml")
    assert main(["--quiet", "run", str(xor), "--out-dir", str(tmp_path / "b")]) == 2
    assert capsys.readouterr().out == ""
    bad = write_config(tmp_path, "family: ca\nentities: 2\nrule: 9\n", "bad.yaml")
    assert main(["run", str(bad), "--out-dir", str(tmp_path / "c")]) == 1
    assert "ring needs at least 3" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.yaml")]) == 1


def test_seed_override(tmp_path):
    path = write_config(tmp_path, CA_SEARCH.replace("without-replacement", "with-replacement"))
    main(["--quiet", "--seed", "1", "--out-dir", str(tmp_path / "s1"), "run", str(path)])
    main(["--quiet", "--seed", "2", "--out-dir", str(tmp_path / "s2"), "run", str(path)])
    assert "seed=1\n" in (tmp_path / "s1" / REPORT_FILE).read_text()
    assert (tmp_path / "s1" / HISTORY_FILE).read_text() != (tmp_path / "s2" / HISTORY_FILE).read_text()


def test_brute_force_command(tmp_path, capsys):
    path = write_config(tmp_path, CA_SEARCH)
    assert main(["--quiet", "brute-force", str(path)]) == 0
    assert capsys.readouterr().out.split() == ["110"]
    ann = write_config(tmp_path, ann_config((0, 1, 1, 1)), "ann.yaml")
    assert main(["--quiet", "brute-force", str(ann)]) == 1


def test_brute_force_lists_all_winners(tmp_path, capsys):
    end = oracles.evolve(0, oracles.centre_row(11), 5)[-1]
    text = CA_SEARCH.replace("[1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0]", str(list(end)))
    main(["--quiet", "brute-force", str(write_config(tmp_path, text))])
    expected = oracles.zero_loss_rules(oracles.centre_row(11), 5, end)
    assert [int(r) for r in capsys.readouterr().out.split()] == expected
    assert len(expected) > 1


def test_render_command(tmp_path, capsys):
    path = write_config(tmp_path, CA_SEARCH)
    main(["--quiet", "--out-dir", str(tmp_path / "o"), "run", str(path)])
    capsys.readouterr()
    assert main(["render", str(tmp_path / "o" / TRACE_FILE)]) == 0
    assert capsys.readouterr().out.splitlines() == [
        ".....#.....",
        "....##.....",
        "...###.....",
        "..##.#.....",
        ".#####.....",
        "##...#.....",
    ]
    assert main(["render", str(tmp_path / "o" / TRACE_FILE), "--iter", "999"]) == 1


def test_render_ann_pattern(tmp_path, capsys):
    path = write_config(tmp_path, ann_config(oracles.TRUTH_TABLES["AND"]))
    main(["--quiet", "--out-dir", str(tmp_path / "o"), "run", str(path)])
    capsys.readouterr()
    main(["render", str(tmp_path / "o" / TRACE_FILE), "--pattern", "3"])
    assert capsys.readouterr().out.splitlines() == ["##.", "###"]


def test_summary_mode_trace_file(tmp_path):
    text = CA_SEARCH.rstrip() + "\n      keep_traces: false\n"
    config = config_from(text, output_dir=str(tmp_path))
    report = run_experiment(config)
    rows = read_trace_lines((tmp_path / TRACE_FILE).read_text().splitlines())
    assert {r.iteration for r in rows} == {report.iterations}


CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.mark.parametrize(
    "name, code", [("rule110_search", 0), ("rule30_plain", 0), ("or_perceptron", 0), ("xor_perceptron", 2)]
)
def test_shipped_configs(tmp_path, name, code):
    assert main(["--quiet", "--out-dir", str(tmp_path), "run", str(CONFIGS / f"{name}.yaml")]) == code
