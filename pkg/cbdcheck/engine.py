"""
engine.py
=========

Thread-pool orchestration of independent analyses.

Workers run one task each and publish messages; a single
:class:`~cbdcheck.collector.ReportCollector` consumes them. Results come back in
input order no matter which worker finishes first.
"""

from __future__ import annotations

import logging
import os
import queue
import signal
import threading
import time
from collections.abc import Callable, Sequence
from concurrent.futures import CancelledError, ThreadPoolExecutor, as_completed
from typing import Protocol

from .collector import ReportCollector, TaskRecord
from .messages import SENTINEL, Msg
from .progress import make_overall_progress, make_task_progress, preregister_task_bars

LOG = logging.getLogger(__name__)


class EngineTask(Protocol):
    task_id: int
    name: str


def pick_workers(num_tasks: int, explicit: int | None) -> int:
    """Explicit count if given, else ``min(cpu, num_tasks)``."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError("workers must be >= 1")
        return explicit
    cpu = os.cpu_count() or 4
    return max(1, min(cpu, num_tasks)) if num_tasks > 0 else 1


def run_analyses[T: EngineTask](
    tasks: Sequence[T],
    *,
    worker_fn: Callable[[T, queue.Queue[Msg]], None],
    workers: int | None = None,
) -> list[TaskRecord]:
    """
    Run ``worker_fn`` on every task and return one record per task, in input order.

    Parameters
    ----------
    tasks : Sequence[T]
        Tasks with 1-based ``task_id`` equal to their position and a display ``name``.
    worker_fn : Callable[[T, queue.Queue[Msg]], None]
        Runs one task and publishes ``MsgTaskStarted``/``MsgTaskProgress``/``MsgTaskFinished``.
    workers : int | None
        Max concurrent workers. Defaults to min(len(tasks), CPU count).

    Notes
    -----
    Tasks never started because of SIGINT come back with status ``cancelled``.
    """
    all_tasks = list(tasks)
    n = len(all_tasks)
    workers = pick_workers(n, workers)

    msg_q: queue.Queue[Msg] = queue.Queue(maxsize=max(64, workers * 8))
    stop_event = threading.Event()

    def handle_sigint(signum, frame):  # type: ignore[no-untyped-def]
        LOG.warning("SIGINT received; finishing in-flight analyses, then exiting…")
        stop_event.set()

    previous = None
    try:
        if threading.current_thread() is threading.main_thread():
            previous = signal.signal(signal.SIGINT, handle_sigint)
    except ValueError as e:
        LOG.debug("signal handler not installed: %r", e)

    overall_p = make_overall_progress()
    task_p = make_task_progress()

    start = time.perf_counter()
    collector: ReportCollector | None = None

    try:
        with overall_p:
            overall = overall_p.add_task("[cyan]All systems", total=n)
            with task_p:
                bar_map = preregister_task_bars(task_p, [t.name for t in all_tasks])
                collector = ReportCollector(msg_q, task_progress=task_p, task_bar_map=bar_map)
                collector.start()

                with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="analysis") as ex:
                    futures = [ex.submit(worker_fn, t, msg_q) for t in all_tasks]
                    try:
                        for fut in as_completed(futures):
                            if stop_event.is_set():
                                ex.shutdown(wait=False, cancel_futures=True)
                                break
                            fut.result()
                            overall_p.advance(overall, 1)
                    except KeyboardInterrupt:
                        LOG.warning("KeyboardInterrupt; requesting graceful stop…")
                        stop_event.set()
                        ex.shutdown(wait=False, cancel_futures=True)
                        for fut in futures:
                            if fut.done():
                                try:
                                    fut.result()
                                except (CancelledError, Exception) as e:
                                    LOG.error("Analysis error during shutdown: %s", e)
            task_p.refresh()
    finally:
        if collector is not None and collector.is_alive():
            msg_q.put(SENTINEL)
            collector.join(timeout=30)
        if previous is not None:
            signal.signal(signal.SIGINT, previous)
        LOG.info("Elapsed: %.2fs", time.perf_counter() - start)

    records = collector.records if collector is not None else {}
    out = []
    for t in all_tasks:
        rec = records.get(t.task_id) or TaskRecord(name=t.name)
        if rec.status in {"pending", "running"}:
            rec.status = "cancelled"
        out.append(rec)
    return out
