"""Tests for range parsing and the run configuration."""

import argparse

import pytest

from ptrinom.ptrinom_cli.commands import build_parser
from ptrinom.ptrinom_cli.config import (
    DEFAULT_SEED,
    WORKERS_ENV,
    RunConfig,
    parse_ids,
    parse_range,
    workers_from_env,
)


@pytest.mark.parametrize(
    ["text", "expected"],
    [
        ["1..6", (1, 2, 3, 4, 5, 6)],
        ["4", (4,)],
        ["1,3,5", (1, 3, 5)],
        ["5,1..3", (1, 2, 3, 5)],
        ["0..0", (0,)],
        [" 2 , 2 ", (2,)],
    ]
)
def test_parse_range(text, expected):
    """Tests the accepted range forms."""
    assert parse_range(text) == expected


@pytest.mark.parametrize("text", ["", "a", "1..", "3..1", "-1", "1..2..3"])
def test_parse_range_rejects(text):
    """Tests malformed, empty and negative ranges."""
    with pytest.raises(argparse.ArgumentTypeError):
        parse_range(text)


def test_parse_ids():
    """Tests ids are split and lowered."""
    assert parse_ids("TH3, tab1") == ("th3", "tab1")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_ids(" , ")


def test_workers_from_env(monkeypatch):
    """Tests the environment override and its validation."""
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert workers_from_env() == 1
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert workers_from_env() == 4
    for value in ("0", "many"):
        monkeypatch.setenv(WORKERS_ENV, value)
        with pytest.raises(ValueError):
            workers_from_env()


def test_run_config_defaults():
    """Tests the defaults of a bare config."""
    config = RunConfig(command="verify")
    assert config.l_range == tuple(range(11))
    assert config.mode == "lemma1"
    assert config.format == "json"
    assert config.workers == 1
    assert config.seed == DEFAULT_SEED == 20170101


@pytest.mark.parametrize(
    "overrides",
    [{"mode": "fast"}, {"format": "xml"}, {"workers": 0}, {"k_range": ()}]
)
def test_run_config_validation(overrides):
    """Tests invalid options raise."""
    with pytest.raises(ValueError):
        RunConfig(command="verify", **overrides)


def test_run_config_from_args(monkeypatch):
    """Tests parsed arguments and the workers environment variable."""
    monkeypatch.setenv(WORKERS_ENV, "3")
    args = build_parser().parse_args(
        ["verify", "--family", "th3,tab1", "--k", "2..4", "--negative"]
    )
    config = RunConfig.from_args(args)
    assert config.families == ("th3", "tab1")
    assert config.k_range == (2, 3, 4)
    assert config.l_range == tuple(range(11))
    assert config.negative
    assert config.workers == 3

    args = build_parser().parse_args(
        ["verify", "--family", "th3", "--k", "2", "--workers", "2"]
    )
    assert RunConfig.from_args(args).workers == 2
