from __future__ import annotations

from fractions import Fraction as F

import pytest

from cbdcheck.errors import InvalidParameterError, SystemTooLargeError, UnknownContextError
from cbdcheck.lp import (
    add_equality_probability_constraint,
    add_shortfall_constraint,
    build_coupling_lp,
    dump_lp,
    equality_objective,
    set_objective,
)
from cbdcheck.model import Label, System, connections_of
from cbdcheck.oracle import brute_force_feasible
from cbdcheck.simplex import simplex_solve


@pytest.mark.lp
def test_coupling_lp_shape(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    assert lp.labels == (Label("x", "c1"), Label("x", "c2"))
    assert lp.num_assignments == 4
    assert len(lp.constraints_of("mass")) == 1
    assert [c.name for c in lp.constraints_of("bunch")] == ["c1: x=+1", "c1: x=-1", "c2: x=+1", "c2: x=-1"]
    first = lp.constraints_of("bunch")[0]
    assert dict(first.coefficients) == {0: 1, 1: 1}
    assert first.rhs == F(3, 5)


@pytest.mark.lp
def test_assignment_decoding_matches_product_order(pr: System) -> None:
    lp = build_coupling_lp(pr)
    assert lp.num_assignments == 256
    decoded = [lp.assignment(i) for i in range(lp.num_assignments)]
    assert decoded == list(lp.assignments())
    a = lp.assignment(1)
    assert a[lp.labels[-1]] == "-1"
    assert set(a.outcomes[:-1]) == {"+1"}
    with pytest.raises(IndexError):
        lp.assignment(256)


@pytest.mark.lp
def test_global_assignment_rendering(two_context_system: System) -> None:
    a = build_coupling_lp(two_context_system).assignment(2)
    assert str(a) == "x^c1=-1 x^c2=+1"
    assert a.as_dict() == {Label("x", "c1"): "-1", Label("x", "c2"): "+1"}


@pytest.mark.lp
def test_size_cap(pr: System) -> None:
    with pytest.raises(SystemTooLargeError, match="system too large for exact method"):
        build_coupling_lp(pr, max_assignments=255)
    assert build_coupling_lp(pr, max_assignments=256).num_assignments == 256


@pytest.mark.lp
def test_equality_constraint(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    lp2 = add_equality_probability_constraint(lp, conn, ("c1", "c2"), F(4, 5))
    (eq,) = lp2.constraints_of("equality")
    assert dict(eq.coefficients) == {0: 1, 3: 1}
    assert eq.rhs == F(4, 5)
    assert eq.name == "Pr[x^c1 = x^c2] = 4/5"
    assert len(lp.constraints) == 5  # original untouched


@pytest.mark.lp
@pytest.mark.parametrize(
    "value,feasible",
    [(F(4, 5), True), (F(2, 5), True), (F(9, 10), False), (F(1, 3), False), (F(0), False)],
)
def test_equality_constraint_feasibility(two_context_system: System, value: F, feasible: bool) -> None:
    # marginals 3/5 and 4/5 allow Pr[x^c1 = x^c2] anywhere in [2/5, 4/5]
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    lp = add_equality_probability_constraint(lp, conn, ("c1", "c2"), value)
    assert simplex_solve(lp).feasible is feasible
    assert brute_force_feasible(lp).feasible is feasible


@pytest.mark.lp
def test_equality_constraint_validation(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    with pytest.raises(InvalidParameterError):
        add_equality_probability_constraint(lp, conn, ("c1", "c2"), F(6, 5))
    with pytest.raises(UnknownContextError):
        add_equality_probability_constraint(lp, conn, ("c1", "c9"), F(1))
    with pytest.raises(InvalidParameterError):
        add_equality_probability_constraint(lp, conn, ("c1", "c1"), F(1))


@pytest.mark.lp
def test_shortfall_constraint_adds_a_slack(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    lp2, slack = add_shortfall_constraint(lp, conn, ("c1", "c2"), F(4, 5))
    assert slack == 4
    assert lp2.num_unknowns == 5
    assert lp2.unknown_name(4) == "shortfall[x:c1,c2]"
    (row,) = lp2.constraints_of("shortfall")
    assert dict(row.coefficients) == {0: 1, 3: 1, 4: 1}


@pytest.mark.lp
def test_violations_and_objective(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    good = [F(3, 5), F(0), F(1, 5), F(1, 5)]
    assert lp.violations(good) == []
    assert lp.violations([F(1), F(0), F(0), F(0)]) == ["c1: x=+1", "c1: x=-1", "c2: x=+1", "c2: x=-1"]
    assert lp.violations([F(4, 5), F(-1, 5), F(0), F(2, 5)])[0] == "x1 < 0"
    obj = equality_objective(lp, conn, ("c1", "c2"))
    assert obj.objective_value(good) == F(4, 5)
    assert set_objective(lp, {0: F(2), 1: F(0)}).objective == {0: F(2)}


@pytest.mark.lp
def test_dump_lp(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    (conn,) = connections_of(two_context_system)
    text = dump_lp(equality_objective(lp, conn, ("c1", "c2")))
    lines = text.splitlines()
    assert lines[0] == "# unknowns: 4  constraints: 5"
    assert lines[1] == "# x0: x^c1=+1 x^c2=+1"
    assert "maximize: 1*x0 + 1*x3" in lines
    assert "# mass: total mass" in lines
    assert "1*x0 + 1*x1 + 1*x2 + 1*x3 = 1/1" in lines
    assert "1*x0 + 1*x2 = 4/5" in lines
    assert text.endswith("\n")
