"""Tests for the utils module."""

import threading
import time

import pytest

from wavelock.utils import (console_out, format_float, format_time,
                            number_workers_from_environment, parallel_map,
                            spawn_seeds)


@pytest.mark.parametrize("value, expected", [
    (0.1, "0.10000000000000001"),
    (1.0, "1"),
    (3, "3"),
])
def test_format_float(value, expected):
    assert format_float(value) == expected


def test_format_float_round_trips():
    value = 0.1 + 0.2
    assert float(format_float(value)) == value


@pytest.mark.parametrize("seconds, expected", [
    (2.5, "2.50s"),
    (75.0, "1min 15.00s"),
    (0.0025, "2.50ms"),
])
def test_format_time(seconds, expected):
    assert format_time(seconds) == expected


def test_console_out_heading(capsys):
    console_out("Example 1", heading=True)
    assert capsys.readouterr().out == "\n=========\nExample 1\n=========\n\n"


@pytest.mark.parametrize("number_workers", [1, 3, 8])
def test_parallel_map_preserves_order(number_workers):
    def slow_square(value):
        time.sleep(0.001 * (5 - value % 5))
        return value * value

    assert parallel_map(slow_square, range(10), number_workers) == [
        value * value for value in range(10)]


def test_parallel_map_uses_threads():
    seen = set()

    def record(value):
        seen.add(threading.get_ident())
        time.sleep(0.01)
        return value

    parallel_map(record, range(4), 4)
    assert len(seen) > 1


def test_spawn_seeds_deterministic_and_distinct():
    seeds = spawn_seeds(7, 5)
    assert seeds == spawn_seeds(7, 5)
    assert len(set(seeds)) == 5
    assert spawn_seeds(8, 5) != seeds
    assert all(isinstance(seed, int) and seed >= 0 for seed in seeds)


def test_spawn_seeds_prefix_stable():
    assert spawn_seeds(3, 2) == spawn_seeds(3, 4)[:2]


def test_workers_default_without_environment(monkeypatch):
    monkeypatch.delenv("WAVELOCK_THREADS", raising=False)
    assert number_workers_from_environment() == 1
    assert number_workers_from_environment(default=4) == 4


def test_workers_blank_environment(monkeypatch):
    monkeypatch.setenv("WAVELOCK_THREADS", "  ")
    assert number_workers_from_environment() == 1
