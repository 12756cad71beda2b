"""
progress.py
===========

Factory helpers for Rich progress managers.

The overall bar stays on screen after the run; per-analysis bars are transient.
Both render on the stderr console from :mod:`cbdcheck.rlog` and switch
themselves off when stderr is not a terminal.
"""

from __future__ import annotations

from collections.abc import Sequence

from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TaskProgressColumn,
    TimeElapsedColumn,
)

from .rlog import console


def make_overall_progress() -> Progress:
    """Sticky "All systems" progress, one step per finished analysis."""
    return Progress(
        SpinnerColumn(),
        "[progress.description]{task.description}",
        BarColumn(),
        TaskProgressColumn(),
        MofNCompleteColumn(),
        "•",
        TimeElapsedColumn(),
        transient=False,
        console=console,
        refresh_per_second=8,
        disable=not console.is_terminal,
    )


def make_task_progress() -> Progress:
    """Transient per-analysis bars; hidden when the context exits."""
    return Progress(
        SpinnerColumn(),
        "[progress.description]{task.description}",
        BarColumn(),
        TaskProgressColumn(),
        TimeElapsedColumn(),
        transient=True,
        console=console,
        refresh_per_second=8,
        disable=not console.is_terminal,
    )


def preregister_task_bars(task_progress: Progress, names: Sequence[str]) -> dict[int, TaskID]:
    """
    Create one bar per analysis before any worker starts and return ``{task_id -> TaskID}``.

    Task ids are 1-based positions in ``names``. Registering up front means a
    progress message can never arrive for a bar that does not exist yet.
    """
    return {i: task_progress.add_task(f"[bold]{name}", total=100) for i, name in enumerate(names, start=1)}
