"""Tests for the sweep coordinator."""

from __future__ import annotations

import threading
import time

import pytest

from kleinsim.coordinator import SweepCoordinator, SweepJob
from kleinsim.exceptions import InvalidParameterError


def test_results_sorted_by_key() -> None:
    jobs = [SweepJob((float(key),), lambda key=key: key * 10) for key in (3, 1, 2)]
    assert SweepCoordinator("test", workers=3).run(jobs) == [10, 20, 30]


def test_concurrency_is_bounded() -> None:
    lock = threading.Lock()
    active = 0
    peak = 0

    def work() -> None:
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.02)
        with lock:
            active -= 1

    SweepCoordinator("bounded", workers=2).run([SweepJob((float(i),), work) for i in range(6)])
    assert 1 <= peak <= 2


def test_empty_sweep() -> None:
    assert SweepCoordinator("empty").run([]) == []


@pytest.mark.parametrize("workers", [0, 65])
def test_worker_count_validated(workers: int) -> None:
    with pytest.raises(InvalidParameterError):
        SweepCoordinator("bad", workers=workers)


def test_job_errors_propagate() -> None:
    def fail() -> None:
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError, match="boom"):
        SweepCoordinator("failing").run([SweepJob((0.0,), fail)])
