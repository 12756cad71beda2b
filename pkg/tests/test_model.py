from __future__ import annotations

from dataclasses import FrozenInstanceError
from fractions import Fraction as F

import pytest

from cbdcheck.errors import (
    ContentNotInBunchError,
    DuplicateLabelError,
    InvalidSystemError,
    PmfSumError,
    UnknownContextError,
    UnknownOutcomeError,
)
from cbdcheck.model import (
    Bunch,
    Content,
    Context,
    Label,
    System,
    connections_of,
    marginal,
    relabel_system,
    render_matrix,
)

PM = ("+1", "-1")


@pytest.mark.model
def test_content_needs_two_distinct_outcomes() -> None:
    with pytest.raises(InvalidSystemError):
        Content("q", ("+1",))
    with pytest.raises(DuplicateLabelError):
        Content("q", ("a", "a"))
    with pytest.raises(InvalidSystemError):
        Content("bad id", PM)


@pytest.mark.model
def test_context_label_rejects_quotes() -> None:
    assert Context("c1", "both slits are open").label == "both slits are open"
    with pytest.raises(InvalidSystemError):
        Context("c1", 'say "hi"')


@pytest.mark.model
def test_label_str_and_order() -> None:
    assert str(Label("A1", "c1")) == "A1^c1"
    assert sorted([Label("B", "c1"), Label("A", "c2")])[0] == Label("A", "c2")


@pytest.mark.model
def test_bunch_drops_zero_cells_and_orders_keys() -> None:
    q = Content("q", PM)
    r = Content("r", PM)
    b = Bunch.of("c", [q, r], {("-1", "-1"): F(1, 2), ("+1", "+1"): F(1, 2), ("+1", "-1"): 0})
    assert list(b.pmf) == [("+1", "+1"), ("-1", "-1")]
    assert dict(b.cells()) == {
        ("+1", "+1"): F(1, 2),
        ("+1", "-1"): F(0),
        ("-1", "+1"): F(0),
        ("-1", "-1"): F(1, 2),
    }
    assert b.labels() == (Label("q", "c"), Label("r", "c"))


@pytest.mark.model
def test_bunch_equality_ignores_declaration_order() -> None:
    q = Content("q", PM)
    b1 = Bunch.of("c", [q], {("+1",): F(1, 3), ("-1",): F(2, 3)})
    b2 = Bunch.of("c", [q], {("-1",): F(2, 3), ("+1",): F(1, 3)})
    assert b1 == b2


@pytest.mark.model
@pytest.mark.parametrize(
    "pmf,error",
    [
        ({("+1",): F(1, 2), ("-1",): F(2, 5)}, PmfSumError),
        ({("+1",): F(3, 2), ("-1",): F(-1, 2)}, InvalidSystemError),
        ({("0",): F(1)}, UnknownOutcomeError),
        ({("+1", "+1"): F(1)}, InvalidSystemError),
    ],
)
def test_bunch_validation(pmf, error) -> None:
    with pytest.raises(error):
        Bunch.of("c", [Content("q", PM)], pmf)


@pytest.mark.model
def test_marginal_covers_full_outcome_set() -> None:
    q, r = Content("q", PM), Content("r", ("a", "b", "c"))
    b = Bunch.of("c", [q, r], {("+1", "a"): F(1, 4), ("-1", "a"): F(1, 4), ("+1", "b"): F(1, 2)})
    assert marginal(b, "q") == {"+1": F(3, 4), "-1": F(1, 4)}
    assert b.marginal("r") == {"a": F(1, 2), "b": F(1, 2), "c": F(0)}
    assert sum(marginal(b, "r").values()) == 1
    with pytest.raises(ContentNotInBunchError):
        marginal(b, "z")


@pytest.mark.model
def test_system_sorts_and_validates(two_context_system: System) -> None:
    s = two_context_system
    assert [c.id for c in s.contexts] == ["c1", "c2"]
    assert s.labels() == (Label("x", "c1"), Label("x", "c2"))
    assert s.bunch("c2").context == "c2"
    assert s.outcomes_of(Label("x", "c1")) == PM
    with pytest.raises(UnknownContextError):
        s.bunch("c9")
    with pytest.raises(FrozenInstanceError):
        s.contents = ()  # type: ignore[misc]


@pytest.mark.model
def test_system_rejects_structural_errors() -> None:
    x = Content("x", PM)
    b = Bunch.of("c1", [x], {("+1",): F(1)})
    with pytest.raises(InvalidSystemError):
        System(contents=(x,), contexts=(), bunches=())
    with pytest.raises(UnknownContextError):
        System(contents=(x,), contexts=(Context("c2"),), bunches=(b,))
    with pytest.raises(DuplicateLabelError):
        System(contents=(x, x), contexts=(Context("c1"),), bunches=(b,))
    with pytest.raises(DuplicateLabelError):
        System(contents=(x,), contexts=(Context("c1"),), bunches=(b, b))
    with pytest.raises(InvalidSystemError, match="without a bunch"):
        System(contents=(x,), contexts=(Context("c1"), Context("c2")), bunches=(b,))
    other = Content("x", ("a", "b"))
    with pytest.raises(UnknownOutcomeError):
        System(contents=(other,), contexts=(Context("c1"),), bunches=(b,))


@pytest.mark.model
def test_connections_of(pr: System) -> None:
    conns = connections_of(pr)
    assert [c.content for c in conns] == ["A1", "A2", "B1", "B2"]
    a1 = conns[0]
    assert a1.contexts() == ("c1", "c4")
    assert a1.pairs() == [("c1", "c4")]
    assert a1.distribution("c1") == {"+1": F(1, 2), "-1": F(1, 2)}
    with pytest.raises(UnknownContextError):
        a1.distribution("c2")


@pytest.mark.model
def test_relabel_system_renames_everywhere(two_context_system: System) -> None:
    renamed = relabel_system(
        two_context_system,
        contents={"x": "y"},
        contexts={"c1": "k2", "c2": "k1"},
        outcomes={"x": {"+1": "hit", "-1": "miss"}},
    )
    assert [c.id for c in renamed.contexts] == ["k1", "k2"]
    assert renamed.content("y").outcomes == ("hit", "miss")
    assert marginal(renamed.bunch("k2"), "y") == {"hit": F(3, 5), "miss": F(2, 5)}
    back = relabel_system(
        renamed,
        contents={"y": "x"},
        contexts={"k2": "c1", "k1": "c2"},
        outcomes={"y": {"hit": "+1", "miss": "-1"}},
    )
    assert back == two_context_system


@pytest.mark.model
def test_render_matrix(pr: System) -> None:
    header, rows = render_matrix(pr)
    assert header == ["A1", "A2", "B1", "B2"]
    assert rows[0] == ("c1", ["A1^c1", "", "B1^c1", ""])
    assert rows[3] == ("c4", ["A1^c4", "", "", "B2^c4"])
