"""
Multiprocessing worker for identity checks.

IMPORTANT: This module must contain only top-level importable functions.
On macOS/Windows, multiprocessing uses 'spawn' which requires worker
targets to be importable by name from a module.
"""

import queue

from fibtheta.checks import run_check


def check_worker(
    task_queue,
    result_queue,
    stop_event,
    counter,
    precision_digits: int,
    order: int,
):
    """Worker process: pull check names and push their reports.

    Runs until a None sentinel arrives, the task queue stays empty, or
    stop_event is set.

    Args:
        task_queue: multiprocessing.Queue of registered check names, None-terminated.
        result_queue: multiprocessing.Queue - push CheckReport per finished check.
        stop_event: multiprocessing.Event - signals all workers to stop.
        counter: multiprocessing.Value('Q') - shared finished-checks counter.
        precision_digits: Working precision handed to run_check.
        order: q-series order for series checks.
    """
    while not stop_event.is_set():
        try:
            name = task_queue.get(timeout=1.0)
        except queue.Empty:
            return
        if name is None:
            return

        report = run_check(name, precision_digits, order)
        result_queue.put(report)
        with counter.get_lock():
            counter.value += 1
