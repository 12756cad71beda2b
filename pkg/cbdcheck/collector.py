"""
collector.py
============

The **single** consumer thread of an analysis run. It:

- Consumes messages from the worker queue until the SENTINEL arrives.
- Drives and removes the transient per-task Rich bars.
- Keeps every finished task's result (or error) keyed by task id.

Workers only ever publish; all shared state lives here.
"""

from __future__ import annotations

import logging
import queue
import threading
from dataclasses import dataclass
from typing import Any

from rich.progress import Progress, TaskID

from .messages import SENTINEL, Msg, MsgTaskFinished, MsgTaskProgress, MsgTaskStarted, TaskStatus

LOG = logging.getLogger(__name__)


@dataclass
class TaskRecord:
    """What the collector knows about one task."""

    name: str = ""
    status: str = "pending"
    stage: str = ""
    started_at: str = ""
    finished_at: str = ""
    result: Any = None
    error: BaseException | None = None


class ReportCollector(threading.Thread):
    """
    Dedicated thread that owns per-task bars and results.

    Args:
        msg_q (queue.Queue[Msg]): Queue the workers publish to.
        task_progress (Progress | None): Rich Progress manager for per-task bars.
        task_bar_map (dict[int, TaskID] | None): Pre-registered ``task_id -> TaskID``.
    """

    def __init__(
        self,
        msg_q: queue.Queue[Msg],
        *,
        task_progress: Progress | None = None,
        task_bar_map: dict[int, TaskID] | None = None,
    ) -> None:
        super().__init__(daemon=True, name="collector")
        self.msg_q = msg_q
        self.records: dict[int, TaskRecord] = {}
        self._progress = task_progress
        self._progress_tasks: dict[int, TaskID] = dict(task_bar_map or {})
        self._stop_flag = threading.Event()

    def _record(self, task_id: int) -> TaskRecord:
        return self.records.setdefault(task_id, TaskRecord())

    # --- message handlers --------------------------------------------------------------
    def _on_started(self, m: MsgTaskStarted) -> None:
        """Mark a task as running.

        Args:
            m (MsgTaskStarted): Start message; carries the display name used in error lines.
        """
        rec = self._record(m.task_id)
        rec.name, rec.status, rec.started_at = m.name, "running", m.started_at
        LOG.debug("%s started", m.name)

    def _on_progress(self, m: MsgTaskProgress) -> None:
        """Record the current stage and advance the task's bar.

        Args:
            m (MsgTaskProgress): Stage name plus step/total.
        """
        self._record(m.task_id).stage = m.message
        pct = round(100.0 * (m.step / max(1, m.total)), 2)
        # Rich TaskID can be 0
        if self._progress:
            tid = self._progress_tasks.get(m.task_id)
            if tid is not None:
                self._progress.update(tid, completed=int(pct))

    def _on_finished(self, m: MsgTaskFinished) -> None:
        """Store the report or the exception and drop the task's bar.

        The exception is kept, not logged at error level: the CLI decides how
        to print it and which exit code it maps to.

        Args:
            m (MsgTaskFinished): Final message for the task.
        """
        rec = self._record(m.task_id)
        rec.status = m.status.value
        rec.finished_at = m.finished_at
        rec.result = m.result
        rec.error = m.error
        if m.status is TaskStatus.error:
            LOG.debug("%s failed: %s", rec.name or m.task_id, m.error)

        if self._progress:
            tid = self._progress_tasks.pop(m.task_id, None)
            if tid is not None:
                self._progress.update(tid, completed=100)
                self._progress.remove_task(tid)
                self._progress.refresh()

    def handle(self, item: Msg) -> None:
        """Dispatch one message; unknown objects are logged and skipped."""
        if isinstance(item, MsgTaskStarted):
            self._on_started(item)
        elif isinstance(item, MsgTaskProgress):
            self._on_progress(item)
        elif isinstance(item, MsgTaskFinished):
            self._on_finished(item)
        else:
            LOG.warning("Unknown message: %r", type(item))

    def stop(self) -> None:
        """Ask the run loop to exit at its next queue timeout."""
        self._stop_flag.set()

    # --- thread run loop ---------------------------------------------------------------
    def run(self) -> None:
        """Consume messages until SENTINEL arrives or :meth:`stop` is called."""
        LOG.debug("Collector started")
        while not self._stop_flag.is_set():
            try:
                item = self.msg_q.get(timeout=0.5)
            except queue.Empty:
                continue

            if item is SENTINEL:
                self.msg_q.task_done()
                break

            self.handle(item)  # type: ignore[arg-type]
            self.msg_q.task_done()
        LOG.debug("Collector stopped with %d records", len(self.records))
