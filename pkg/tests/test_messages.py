from dataclasses import FrozenInstanceError

import pytest

from cbdcheck.messages import SENTINEL, MsgTaskFinished, MsgTaskProgress, MsgTaskStarted, TaskStatus


def test_messages_are_frozen() -> None:
    s = MsgTaskStarted(task_id=1, name="pr_box.system", started_at="2024-01-01T00:00:00Z")
    with pytest.raises(FrozenInstanceError):
        # type: ignore[attr-defined]
        s.task_id = 2
    p = MsgTaskProgress(task_id=1, step=1, total=4)
    with pytest.raises(FrozenInstanceError):
        # type: ignore[attr-defined]
        p.step = 2
    f = MsgTaskFinished(task_id=1, status=TaskStatus.done, finished_at="2024-01-01T00:00:01Z")
    with pytest.raises(FrozenInstanceError):
        # type: ignore[attr-defined]
        f.status = TaskStatus.error


def test_message_defaults() -> None:
    assert MsgTaskProgress(1, 1, 4).message == ""
    f = MsgTaskFinished(1, TaskStatus.error, "t")
    assert f.result is None
    assert f.error is None
    assert TaskStatus("cancelled") is TaskStatus.cancelled
    assert SENTINEL is not None
