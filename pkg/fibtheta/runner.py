"""
Check runner: manages multiprocessing workers and report collection.
"""

import logging
import os
import queue
import time
from dataclasses import dataclass
from multiprocessing import Event, Process, Queue, Value
from typing import Callable, Mapping, Optional, Sequence

from fibtheta.checks import Check, CheckReport, run_check
from fibtheta.worker import check_worker

logger = logging.getLogger(__name__)


@dataclass
class RunStats:
    """Live stats during a run."""
    completed: int = 0
    total: int = 0
    elapsed: float = 0.0
    is_running: bool = False
    failures: int = 0


class CheckRunner:
    """Runs a list of checks, in worker processes or inline.

    Usage:
        runner = CheckRunner(["thm1_xi1", "eq453a"], precision_digits=40, num_workers=4)
        runner.on_progress = lambda stats: print(f"{stats.completed}/{stats.total}")
        runner.on_report = lambda report: print(report.name, report.status.value)
        reports = runner.run_blocking()

    With one worker, or with a custom registry (which cannot cross a process
    boundary by name), checks run in the calling process.
    """

    def __init__(
        self,
        names: Sequence[str],
        precision_digits: int,
        order: int,
        num_workers: int = 0,
        registry: Optional[Mapping[str, Check]] = None,
    ):
        self.names = list(names)
        self.precision_digits = precision_digits
        self.order = order
        self.registry = registry
        wanted = num_workers if num_workers > 0 else max(1, (os.cpu_count() or 2) - 1)
        self.num_workers = max(1, min(wanted, len(self.names) or 1))
        self.inline = self.num_workers == 1 or registry is not None

        # Callbacks
        self.on_progress: Optional[Callable[[RunStats], None]] = None
        self.on_report: Optional[Callable[[CheckReport], None]] = None
        self.on_complete: Optional[Callable[[], None]] = None

        # Internal state
        self._workers: list[Process] = []
        self._task_queue: Optional[Queue] = None
        self._result_queue: Optional[Queue] = None
        self._stop_event: Optional[Event] = None
        self._counter: Optional[Value] = None
        self._start_time: float = 0
        self._reports: list[CheckReport] = []
        self._is_running = False

    def _accept(self, report: CheckReport) -> None:
        self._reports.append(report)
        if self.on_report:
            self.on_report(report)

    def _stats(self) -> RunStats:
        return RunStats(
            completed=len(self._reports),
            total=len(self.names),
            elapsed=time.time() - self._start_time,
            is_running=self._is_running,
            failures=sum(1 for r in self._reports if r.status.value == "fail"),
        )

    def start(self) -> None:
        """Start worker processes (non-blocking)."""
        if self._is_running:
            raise RuntimeError("Runner is already running")
        if self.inline:
            raise RuntimeError("Inline runs go through run_blocking()")

        self._task_queue = Queue()
        self._result_queue = Queue()
        self._stop_event = Event()
        self._counter = Value("Q", 0)
        self._start_time = time.time()
        self._reports = []
        self._is_running = True

        for name in self.names:
            self._task_queue.put(name)
        for _ in range(self.num_workers):
            self._task_queue.put(None)

        for i in range(self.num_workers):
            p = Process(
                target=check_worker,
                args=(
                    self._task_queue,
                    self._result_queue,
                    self._stop_event,
                    self._counter,
                    self.precision_digits,
                    self.order,
                ),
                daemon=True,
                name=f"fibtheta-worker-{i}",
            )
            p.start()
            self._workers.append(p)
        logger.debug("started %d workers for %d checks", self.num_workers, len(self.names))

    def _drain(self) -> None:
        while True:
            try:
                report = self._result_queue.get_nowait()
            except queue.Empty:
                break
            self._accept(report)

    def poll(self) -> RunStats:
        """Poll for progress and reports. Call periodically from the CLI."""
        if not self._is_running:
            return self._stats()

        self._drain()
        stats = self._stats()
        if self.on_progress:
            self.on_progress(stats)

        if len(self._reports) >= len(self.names) or all(not w.is_alive() for w in self._workers):
            self._drain()
            self._is_running = False
            if self.on_complete:
                self.on_complete()
        return self._stats()

    def stop(self) -> list[CheckReport]:
        """Stop all workers and return collected reports."""
        if self._stop_event:
            self._stop_event.set()

        for w in self._workers:
            w.join(timeout=2.0)
            if w.is_alive():
                w.terminate()

        if self._result_queue:
            self._drain()

        self._workers = []
        self._is_running = False
        return self.reports

    @property
    def reports(self) -> list[CheckReport]:
        return list(self._reports)

    @property
    def is_running(self) -> bool:
        return self._is_running

    def _run_inline(self) -> list[CheckReport]:
        self._start_time = time.time()
        self._reports = []
        self._is_running = True
        try:
            for name in self.names:
                self._accept(run_check(name, self.precision_digits, self.order, self.registry))
                if self.on_progress:
                    self.on_progress(self._stats())
        finally:
            self._is_running = False
        if self.on_complete:
            self.on_complete()
        return self.reports

    def run_blocking(self, progress_interval: float = 0.5) -> list[CheckReport]:
        """Run synchronously with periodic progress callbacks. For CLI use."""
        if self.inline:
            return self._run_inline()
        self.start()
        try:
            while self._is_running:
                time.sleep(progress_interval)
                self.poll()
        except KeyboardInterrupt:
            pass
        finally:
            return self.stop()
