from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cbdcheck.simplex as simplex
from cbdcheck.contextuality import constrained_pairs, pair_targets
from cbdcheck.errors import LpInconsistencyError
from cbdcheck.lp import (
    Constraint,
    LinearProgram,
    add_equality_probability_constraint,
    build_coupling_lp,
    equality_objective,
)
from cbdcheck.model import System, connections_of, marginal
from cbdcheck.oracle import brute_force_feasible
from cbdcheck.scenarios import Cyclic4Params, SystemShape, make_cyclic4, sample_random_system
from cbdcheck.simplex import LpStatus, finish, simplex_solve, witness_of


def _strict_lp(s: System) -> LinearProgram:
    lp = build_coupling_lp(s)
    for conn in connections_of(s):
        for pair in conn.pairs():
            lp = add_equality_probability_constraint(lp, conn, pair, F(1))
    return lp


@pytest.mark.simplex
def test_feasible_witness_reproduces_bunches(chsh_3_4: System) -> None:
    lp = build_coupling_lp(chsh_3_4)
    out = simplex_solve(lp)
    assert out.status is LpStatus.feasible
    assert out.feasible
    assert out.witness is not None
    assert sum(out.witness.values()) == 1
    assert all(p > 0 for p in out.witness.values())
    for b in chsh_3_4.bunches:
        for key, p in b.cells():
            mass = sum(
                (w for a, w in out.witness.items() if tuple(a[lab] for lab in b.labels()) == key),
                F(0),
            )
            assert mass == p


@pytest.mark.simplex
def test_maximizes_pair_equality(two_context_system: System) -> None:
    (conn,) = connections_of(two_context_system)
    out = simplex_solve(equality_objective(build_coupling_lp(two_context_system), conn, ("c1", "c2")))
    assert out.status is LpStatus.optimal
    assert out.objective_value == F(4, 5)
    assert out.solution is not None and len(out.solution) == 4


@pytest.mark.simplex
def test_infeasible_identification(two_context_system: System, pr: System) -> None:
    assert simplex_solve(_strict_lp(two_context_system)).status is LpStatus.infeasible
    out = simplex_solve(_strict_lp(pr))
    assert out.status is LpStatus.infeasible
    assert not out.feasible
    assert out.witness is None


@pytest.mark.simplex
def test_strict_chsh_below_bound_is_feasible() -> None:
    s = make_cyclic4(Cyclic4Params((F(1, 2), F(1, 2), F(1, 2), F(0))))
    out = simplex_solve(_strict_lp(s))
    assert out.feasible
    a1 = [lab for lab in build_coupling_lp(s).labels if lab.content == "A1"]
    assert all(a[a1[0]] == a[a1[1]] for a in out.witness)  # type: ignore[union-attr]
    assert marginal(s.bunch("c1"), "A1") == {"+1": F(1, 2), "-1": F(1, 2)}


@pytest.mark.simplex
def test_deterministic_runs(chsh_3_4: System) -> None:
    lp = build_coupling_lp(chsh_3_4)
    assert simplex_solve(lp) == simplex_solve(lp)


@pytest.mark.simplex
def test_unbounded_objective_is_an_error() -> None:
    lp = LinearProgram(
        labels=(),
        outcome_sets=(),
        constraints=(Constraint({0: F(1), 1: F(-1)}, F(0), "equality", "x0 = x1"),),
        objective={1: F(1)},
        slack_names=("s",),
    )
    with pytest.raises(LpInconsistencyError, match="unbounded"):
        simplex_solve(lp)


@pytest.mark.simplex
def test_finish_rejects_bad_points(two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    with pytest.raises(LpInconsistencyError, match="violating"):
        finish(lp, [F(1), F(0), F(0), F(0)], "test")
    good = (F(3, 5), F(0), F(1, 5), F(1, 5))
    assert list(witness_of(lp, good).values()) == [F(3, 5), F(1, 5), F(1, 5)]


def _extended_lp(s: System) -> LinearProgram:
    lp = build_coupling_lp(s)
    targets = pair_targets(s)
    for conn, pair in constrained_pairs(s):
        lp = add_equality_probability_constraint(lp, conn, pair, targets[(conn.content, pair)])
    return lp


def _permuted(lp: LinearProgram, rng: random.Random) -> LinearProgram:
    rows = list(lp.constraints)
    rng.shuffle(rows)
    columns = list(range(lp.num_unknowns))
    rng.shuffle(columns)
    return replace(
        lp,
        constraints=tuple(
            Constraint({columns[k]: v for k, v in c.coefficients.items()}, c.rhs, c.kind, c.name) for c in rows
        ),
    )


@pytest.mark.simplex
@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
def test_status_ignores_row_and_column_order(seed: int, rng: random.Random) -> None:
    lp = _extended_lp(sample_random_system(SystemShape.cyclic4, 6, seed))
    shuffled = _permuted(lp, rng)
    status = simplex_solve(lp).status
    assert simplex_solve(shuffled).status is status
    assert brute_force_feasible(shuffled).status is status


@pytest.mark.simplex
def test_single_unknown_pinned_to_one() -> None:
    lp = LinearProgram(labels=(), outcome_sets=(), constraints=(Constraint({0: F(1)}, F(1), "mass", "x = 1"),))
    out = simplex_solve(lp)
    assert out.status is LpStatus.feasible
    assert out.solution == (F(1),)
    assert out.witness == {lp.assignment(0): F(1)}
    assert brute_force_feasible(lp).status is LpStatus.feasible


@pytest.mark.simplex
def test_negative_forced_unknown_is_infeasible() -> None:
    lp = LinearProgram(
        labels=(),
        outcome_sets=(),
        constraints=(
            Constraint({0: F(1), 1: F(1)}, F(1), "equality", "x + y = 1"),
            Constraint({0: F(1), 1: F(-1)}, F(2), "equality", "x - y = 2"),
        ),
        slack_names=("y",),
    )
    assert simplex_solve(lp).status is LpStatus.infeasible
    assert brute_force_feasible(lp).status is LpStatus.infeasible
    assert brute_force_feasible(lp, enumeration_limit=0).status is LpStatus.infeasible


@pytest.mark.simplex
def test_large_tableau_logs_a_warning(monkeypatch, caplog, two_context_system: System) -> None:
    lp = build_coupling_lp(two_context_system)
    simplex_solve(lp)
    assert "Dense simplex" not in caplog.text

    monkeypatch.setattr(simplex, "DENSE_TABLEAU_WARN_UNKNOWNS", 3)
    assert simplex_solve(lp).feasible
    assert "Dense simplex on 4 unknowns and 5 constraints" in caplog.text
