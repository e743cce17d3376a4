#!/usr/bin/env python3
"""
Tests for the command-line surface: configuration validation, subset
selection, curve files and exit codes.
"""
import json
import logging
import sys

import pytest
from rich.console import Console

from hexagonal.cli import (
    CURVE_FORMAT,
    RunConfig,
    betti_positions,
    build_parser,
    choose_subsets,
    configure_logging,
    curve_document,
    load_curve,
    main,
    make_config,
    parse_subsets,
)
from hexagonal.config import Settings
from hexagonal.errors import ConfigurationError, UnsupportedModelError
from hexagonal.geometry.canon import canonical_ideal
from hexagonal.geometry.plane import random_model

console = Console()

P = 12347


@pytest.fixture
def settings(tmp_path):
    return Settings(log_file=str(tmp_path / "run.log"), workers=1)


def config_for(settings, *argv):
    return make_config(build_parser(settings).parse_args(list(argv)))


@pytest.mark.parametrize("prime", [9, 12345, 7])
def test_rejects_bad_primes(settings, prime):
    with pytest.raises(ConfigurationError):
        config_for(settings, "--prime", str(prime), "construct", "10")


def test_rejects_unsupported_k(settings):
    with pytest.raises(UnsupportedModelError) as err:
        config_for(settings, "construct", "12")
    assert err.value.exit_code == 2


def test_m_selects_a_nonic_model(settings):
    config = config_for(settings, "verify", "severi-tangent", "--m", "3")
    assert config.resolved_k() == 8
    with pytest.raises(ConfigurationError):
        config_for(settings, "verify", "severi-tangent", "--m", "5")
    with pytest.raises(ConfigurationError):
        config_for(settings, "verify", "no-such-claim", "--k", "10")


def test_stage_streams_are_independent():
    config = RunConfig(command="betti", seed=5)
    first = config.rng(1).integers(0, P, size=4)
    again = config.rng(1).integers(0, P, size=4)
    other = config.rng(2).integers(0, P, size=4)
    assert (first == again).all()
    assert not (first == other).all()


def test_parse_subsets():
    assert parse_subsets(["1,2,3", "4, 5"]) == [[1, 2, 3], [4, 5]]
    with pytest.raises(ConfigurationError):
        parse_subsets(["1,x"])


def test_betti_positions(settings):
    strand = config_for(settings, "betti", "--k", "10")
    assert betti_positions(strand) == [(1, 2), (2, 3), (4, 6), (5, 6)]
    full = config_for(settings, "--full-resolution", "betti", "--k", "10")
    assert len(betti_positions(full)) == 40


def test_strand_length_is_validated(settings):
    assert config_for(settings, "tables", "--k", "9", "--size", "2").strand_length == 9
    assert config_for(settings, "tables", "--k", "9", "--strand-length", "3").strand_length == 3
    with pytest.raises(ConfigurationError):
        config_for(settings, "tables", "--k", "9", "--strand-length", "10")


def test_configure_logging_adds_a_file_handler(settings):
    configure_logging(settings, "debug")
    logger = logging.getLogger("hexagonal")
    assert logger.level == logging.DEBUG
    assert any(isinstance(h, logging.FileHandler) for h in logger.handlers)
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()


def test_exit_codes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as err:
        main(["construct", "12"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["--prime", "12345", "construct", "10"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["--retries", "0", "construct", "10"])
    assert err.value.code == 2


def test_curve_files_are_checked(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ConfigurationError):
        load_curve(str(bad))
    with pytest.raises(ConfigurationError):
        load_curve(str(tmp_path / "missing.json"))
    truncated = tmp_path / "truncated.json"
    truncated.write_text(json.dumps({"format": CURVE_FORMAT, "model": {}}))
    with pytest.raises(ConfigurationError):
        load_curve(str(truncated))


@pytest.mark.slow
def test_curve_file_round_trip_and_subsets(tmp_path, settings):
    curve = canonical_ideal(random_model(10, P, 42))
    path = tmp_path / "octic.json"
    path.write_text(json.dumps(curve_document(curve)))
    restored = load_curve(str(path))
    assert restored.quadrics == curve.quadrics
    assert restored.model.k == 10

    config = config_for(settings, "tables", str(path), "--subset", "1,2", "--size", "2")
    subsets = choose_subsets(config, restored.model)
    assert len(subsets) == 1 + 45
    assert subsets[0] == [p.label for p in restored.model.pencils[:2]]
    with pytest.raises(ConfigurationError):
        choose_subsets(config_for(settings, "tables", str(path), "--subset", "1"), restored.model)
    with pytest.raises(ConfigurationError):
        choose_subsets(config_for(settings, "tables", str(path), "--subset", "1,11"), restored.model)
    with pytest.raises(ConfigurationError):
        choose_subsets(config_for(settings, "tables", str(path)), restored.model)


@pytest.mark.slow
def test_construct_then_betti(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as err:
        main(["--out", "octic.json", "construct", "10"])
    assert err.value.code == 0
    assert json.loads((tmp_path / "octic.json").read_text())["format"] == CURVE_FORMAT
    with pytest.raises(SystemExit) as err:
        main(["--out", "betti.json", "betti", "octic.json"])
    assert err.value.code == 0
    table = json.loads((tmp_path / "betti.json").read_text())
    assert table["1,2"] == 36
    assert table["5,6"] == 50


@pytest.mark.slow
def test_verify_writes_a_report_without_wall_time(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as err:
        main(["--out", "severi.json", "verify", "severi-tangent", "--k", "10"])
    assert err.value.code == 0
    report = json.loads((tmp_path / "severi.json").read_text())
    assert report["passed"]
    assert report["values"]["kernel_dimension"] == 34
    assert "wall_time" not in report


if __name__ == "__main__":
    console.print("[bold cyan]Command-line tests[/bold cyan]\n")
    sys.exit(pytest.main([__file__, "-v"]))
