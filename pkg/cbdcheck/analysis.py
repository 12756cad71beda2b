"""
analysis.py
===========

One analysis = one system (from a file or a scenario) -> one :class:`Report`.
Each analysis walks the same stages, each published as a progress step:

- ``load``: parse the file (scenario tasks already carry their system).
- ``connectedness``: total-variation check of every connection.
- ``decision``: verdict, degree and witness via the exact simplex.
- ``oracle`` (optional): the same decision through the brute-force oracle;
  any difference in verdict or degree is an :class:`OracleDisagreementError`.
- ``report``: package the results; nothing is rendered here.

:func:`analysis_worker` is the engine's ``worker_fn``: it publishes a start
message, one progress message per stage, and always finishes with a
``MsgTaskFinished`` carrying either the report or the exception.
"""

from __future__ import annotations

import logging
import queue
import time
from collections.abc import Callable
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path

from .contextuality import Mode, decide_noncontextuality, is_consistently_connected
from .errors import OracleDisagreementError
from .lp import DEFAULT_MAX_ASSIGNMENTS
from .messages import Msg, MsgTaskFinished, MsgTaskProgress, MsgTaskStarted, TaskStatus
from .model import System
from .report import OracleCheck, Report
from .sysfile import load_system

LOG = logging.getLogger(__name__)

StageCallback = Callable[[str], None]


@dataclass(frozen=True)
class AnalysisOptions:
    """
    Flags shared by every analysis of one CLI invocation.

    Attributes:
        mode (Mode): strict or extended.
        degree (bool): Render achieved pair probabilities.
        witness (bool): Render the witness coupling when one exists.
        oracle (bool): Rerun the decision with the brute-force oracle and compare.
        max_assignments (int): Cap on the product space.
        timing (bool): Put elapsed time into the report.
    """

    mode: Mode = Mode.extended
    degree: bool = False
    witness: bool = False
    oracle: bool = False
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS
    timing: bool = False

    @property
    def stages(self) -> tuple[str, ...]:
        return ("load", "connectedness", "decision", *(("oracle",) if self.oracle else ()), "report")


@dataclass(frozen=True)
class AnalysisTask:
    """
    A system to analyze: either a file ``path`` or an in-memory ``system``.

    Attributes:
        task_id (int): 1-based position in the run.
        name (str): Display name.
        options (AnalysisOptions): Flags.
        path (Path | None): System file.
        system (System | None): Prebuilt system (scenarios).
    """

    task_id: int
    name: str
    options: AnalysisOptions
    path: Path | None = None
    system: System | None = None

    def load(self) -> System:
        """
        The task's system: the in-memory one for scenarios, else parsed from ``path``.

        Loading happens inside the worker so that a bad file fails its own task
        and leaves the rest of the batch running.
        """
        if self.system is not None:
            return self.system
        if self.path is None:
            raise ValueError(f"task {self.name!r} has neither a path nor a system")
        return load_system(self.path)


def analyze_system(
    s: System,
    options: AnalysisOptions,
    *,
    name: str = "system",
    on_stage: StageCallback | None = None,
) -> Report:
    """
    Connectedness, decision, optional oracle rerun.

    Raises:
        InconsistentConnectednessError: Strict mode on inconsistent input.
        SystemTooLargeError: Product space over the cap.
        OracleScaleError: ``--oracle`` on an LP beyond the oracle's guard.
        OracleDisagreementError: The oracle's verdict or degree differs.
    """
    stage = on_stage or (lambda _: None)
    start = time.perf_counter()

    stage("connectedness")
    connectedness = is_consistently_connected(s)

    stage("decision")
    verdict = decide_noncontextuality(s, options.mode, max_assignments=options.max_assignments)

    check = None
    if options.oracle:
        stage("oracle")
        other = decide_noncontextuality(s, options.mode, max_assignments=options.max_assignments, oracle=True)
        agrees = other.noncontextual == verdict.noncontextual and other.degree == verdict.degree
        if not agrees:
            raise OracleDisagreementError(
                f"{name}: simplex says {_word(verdict.noncontextual)} with degree {verdict.degree}, "
                f"oracle says {_word(other.noncontextual)} with degree {other.degree}",
            )
        check = OracleCheck(noncontextual=other.noncontextual, degree=other.degree)

    stage("report")
    elapsed = time.perf_counter() - start
    LOG.info("%s analyzed in %.3fs", name, elapsed)
    return Report.of(
        name,
        s,
        connectedness,
        verdict,
        show_achieved=options.degree,
        witness=verdict.witness if options.witness and verdict.noncontextual else None,
        oracle=check,
        elapsed=elapsed if options.timing else None,
    )


def _word(noncontextual: bool) -> str:
    return "noncontextual" if noncontextual else "contextual"


def _now() -> str:
    return datetime.now(UTC).isoformat(timespec="seconds")


def analysis_worker(task: AnalysisTask, msg_q: queue.Queue[Msg]) -> None:
    """Run one analysis and report over ``msg_q``; never raises."""
    stages = task.options.stages
    msg_q.put(MsgTaskStarted(task_id=task.task_id, name=task.name, started_at=_now()))

    def on_stage(stage_name: str) -> None:
        msg_q.put(MsgTaskProgress(task.task_id, stages.index(stage_name) + 1, len(stages), stage_name))

    try:
        on_stage("load")
        s = task.load()
        report = analyze_system(s, task.options, name=task.name, on_stage=on_stage)
    except Exception as e:
        LOG.debug("%s: %s", task.name, e, exc_info=True)
        msg_q.put(MsgTaskFinished(task.task_id, TaskStatus.error, _now(), error=e))
        return
    msg_q.put(MsgTaskFinished(task.task_id, TaskStatus.done, _now(), result=report))
