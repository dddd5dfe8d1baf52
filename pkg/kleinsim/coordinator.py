"""Bounded concurrent execution of independent sweep points."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from time import perf_counter

from .const import CONF_WORKERS_MAX, DEFAULT_WORKERS
from .exceptions import InvalidParameterError

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepJob[T]:
    """One sweep point: a sort key and a blocking callable producing its row."""

    key: tuple[float, ...]
    run: Callable[[], T]


class SweepCoordinator:
    """Coordinator for sweep points.

    Points run in worker threads, at most `workers` at a time. Results are
    returned sorted by job key so the output does not depend on scheduling.
    """

    def __init__(self, name: str, workers: int = DEFAULT_WORKERS) -> None:
        if not 1 <= workers <= CONF_WORKERS_MAX:
            raise InvalidParameterError(
                f"workers must lie in [1, {CONF_WORKERS_MAX}], got {workers}"
            )
        self.name = name
        self.workers = workers
        self._done = 0

    async def _async_run_job[T](
        self, job: SweepJob[T], semaphore: asyncio.Semaphore, total: int
    ) -> tuple[tuple[float, ...], T]:
        async with semaphore:
            result = await asyncio.to_thread(job.run)
        self._done += 1
        _LOGGER.debug("%s: point %s done (%d/%d)", self.name, job.key, self._done, total)
        return job.key, result

    async def async_run[T](self, jobs: Sequence[SweepJob[T]]) -> list[T]:
        """Run every job and return the results ordered by key."""
        semaphore = asyncio.Semaphore(self.workers)
        self._done = 0
        started = perf_counter()
        _LOGGER.info(
            "%s: running %d points on %d worker(s)", self.name, len(jobs), self.workers
        )
        finished = await asyncio.gather(
            *(self._async_run_job(job, semaphore, len(jobs)) for job in jobs)
        )
        _LOGGER.info("%s: finished in %.1f s", self.name, perf_counter() - started)
        return [result for _, result in sorted(finished, key=lambda item: item[0])]

    def run[T](self, jobs: Sequence[SweepJob[T]]) -> list[T]:
        """Blocking entry point for callers without an event loop."""
        return asyncio.run(self.async_run(jobs))
