"""
A small worker pool for embarrassingly parallel work sets.

Items are evaluated on worker threads (through asyncer's asyncify) under
an anyio capacity limiter, and results are always returned in input order,
so that callers never depend on completion order or on the worker count.
"""

from collections.abc import Callable, Sequence
from functools import partial
from typing import TypeVar

import anyio
from asyncer import asyncify
from loguru import logger

T = TypeVar("T")
R = TypeVar("R")


async def _gather(
    function: Callable[[T], R], items: Sequence[T], threads: int
) -> list[R]:
    limiter = anyio.CapacityLimiter(threads)
    results: list[R | None] = [None] * len(items)
    failures: dict[int, Exception] = {}

    async def run(index: int, item: T):
        # Failures are collected rather than raised so that the caller sees
        # the same exception (the first by input order) as a serial run.
        try:
            results[index] = await asyncify(function, limiter=limiter)(item)
        except Exception as e:
            failures[index] = e

    async with anyio.create_task_group() as task_group:
        for index, item in enumerate(items):
            task_group.start_soon(run, index, item)

    if failures:
        raise failures[min(failures)]

    return results


def parallel_map(
    function: Callable[[T], R], items: Sequence[T], threads: int = 1
) -> list[R]:
    """
    Apply ``function`` to every item, using up to ``threads`` worker threads.

    Parameters
    ----------
    function: Callable
        A pure function of one argument.
    items: Sequence
        The work set.
    threads: int
        Maximum number of concurrent workers. One (or fewer) evaluates
        serially in the calling thread.

    Returns
    -------
    list
        ``[function(item) for item in items]``, in input order.
    """

    items = list(items)

    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]

    logger.debug("Dispatching {} items to {} workers", len(items), threads)

    return anyio.run(partial(_gather, function, items, threads))
