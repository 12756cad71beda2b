"""
messages.py
===========

Typed messages on the in-memory queue between analysis workers and the single
collector thread.

Workers never touch the progress bars or the result table themselves; they
publish small immutable messages and the collector applies them in order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

# Placed on the queue to ask the collector to stop.
SENTINEL: object = object()


class TaskStatus(str, Enum):
    done = "done"
    error = "error"
    cancelled = "cancelled"


@dataclass(frozen=True)
class MsgTaskStarted:
    """
    An analysis was picked up by a worker.

    Attributes:
        task_id (int): 1-based position of the task in the input.
        name (str): Display name (file name or scenario).
        started_at (str): ISO 8601 UTC timestamp.
    """

    task_id: int
    name: str
    started_at: str


@dataclass(frozen=True)
class MsgTaskProgress:
    """
    Stage ``step`` of ``total`` has been reached (load, connectedness, decision, oracle, report).

    Attributes:
        task_id (int): 1-based position of the task in the input.
        step (int): Current stage (1-based).
        total (int): Number of stages for this task.
        message (str): Stage name.
    """

    task_id: int
    step: int
    total: int
    message: str = ""


@dataclass(frozen=True)
class MsgTaskFinished:
    """
    Final status of an analysis.

    Attributes:
        task_id (int): 1-based position of the task in the input.
        status (TaskStatus): done, error or cancelled.
        finished_at (str): ISO 8601 UTC timestamp.
        result (Any): The report when status is done.
        error (BaseException | None): The failure when status is error.
    """

    task_id: int
    status: TaskStatus
    finished_at: str
    result: Any = None
    error: BaseException | None = None


Msg = MsgTaskStarted | MsgTaskProgress | MsgTaskFinished
