"""
contextuality.py
================

Contextuality-by-Default decision procedures.

A system is *noncontextual* when some coupling of it makes every pair of
content-sharing variables equal with the largest probability their marginals
allow. In strict mode that probability is 1 for every pair (maximally
connected couplings, meaningful only for consistently connected systems); in
extended mode it is ``Σ_v min(p(v), q(v))`` per pair. Connections with more
than two variables constrain every pair of them.

The contextuality degree is the least total shortfall of pair-equality
probabilities below their targets over all couplings. It is zero exactly when
the system is noncontextual and is a reporting aid, not a normative measure.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import InconsistentConnectednessError, InvalidParameterError, LpInconsistencyError, OutcomeSetMismatchError
from .lp import (
    DEFAULT_MAX_ASSIGNMENTS,
    GlobalAssignment,
    LinearProgram,
    Pair,
    add_equality_probability_constraint,
    add_shortfall_constraint,
    build_coupling_lp,
    equality_objective,
    set_objective,
)
from .model import Bunch, Connection, Content, Context, Distribution, System, connections_of
from .oracle import brute_force_feasible, brute_force_optimize
from .simplex import LpOutcome, simplex_solve

LOG = logging.getLogger(__name__)

# (content id, (context, context))
PairKey = tuple[str, Pair]

Solver = Callable[[LinearProgram], LpOutcome]


class Mode(str, Enum):
    strict = "strict"
    extended = "extended"


@dataclass(frozen=True)
class ConnectednessReport:
    """
    Pairwise marginal mismatches within every connection.

    Attributes:
        consistent (bool): True iff every mismatch is 0.
        mismatches (Mapping[str, Mapping[Pair, Fraction]]): content -> (context pair -> ``Σ|p-q|/2``).
    """

    consistent: bool
    mismatches: Mapping[str, Mapping[Pair, Fraction]] = field(hash=False)


@dataclass(frozen=True)
class Verdict:
    """
    Outcome of a noncontextuality decision.

    Attributes:
        mode (Mode): strict or extended.
        noncontextual (bool): A coupling attaining every pair target exists.
        witness (Mapping[GlobalAssignment, Fraction] | None): Such a coupling (nonzero rows), iff noncontextual.
        pair_targets (Mapping[PairKey, Fraction]): Equality probability required of each constrained pair.
        degree (Fraction): Least total shortfall below the targets; 0 iff noncontextual.
        achieved (Mapping[PairKey, Fraction]): Equality probabilities of a shortfall-minimizing coupling.
    """

    mode: Mode
    noncontextual: bool
    witness: Mapping[GlobalAssignment, Fraction] | None = field(hash=False)
    pair_targets: Mapping[PairKey, Fraction] = field(hash=False)
    degree: Fraction
    achieved: Mapping[PairKey, Fraction] = field(hash=False)


def _solvers(oracle: bool) -> tuple[Solver, Solver]:
    """(feasibility, optimization) solver pair; the oracle pair never touches the simplex tableau."""
    if oracle:
        return brute_force_feasible, brute_force_optimize
    return simplex_solve, simplex_solve


def total_variation(d1: Distribution, d2: Distribution) -> Fraction:
    """``Σ_v |d1(v) - d2(v)| / 2`` over a shared outcome set."""
    _same_support(d1, d2)
    return sum((abs(d1[v] - d2[v]) for v in d1), Fraction(0)) / 2


def _same_support(d1: Distribution, d2: Distribution) -> None:
    if set(d1) != set(d2):
        raise OutcomeSetMismatchError(f"outcome sets differ: {sorted(d1)} vs {sorted(d2)}")


def is_consistently_connected(s: System) -> ConnectednessReport:
    """Compare the marginals of every content-sharing pair."""
    mismatches: dict[str, dict[Pair, Fraction]] = {}
    for conn in connections_of(s):
        per_pair = {
            (c1, c2): total_variation(conn.distribution(c1), conn.distribution(c2)) for c1, c2 in conn.pairs()
        }
        if per_pair:
            mismatches[conn.content] = per_pair
    consistent = all(v == 0 for pairs in mismatches.values() for v in pairs.values())
    return ConnectednessReport(consistent=consistent, mismatches=mismatches)


def max_pair_equality(d1: Distribution, d2: Distribution) -> Fraction:
    """
    Largest ``Pr[X = Y]`` over all couplings of ``X ~ d1`` and ``Y ~ d2``: ``Σ_v min(d1(v), d2(v))``.

    Raises:
        OutcomeSetMismatchError: ``d1`` and ``d2`` are over different outcome sets.
    """
    _same_support(d1, d2)
    return sum((min(d1[v], d2[v]) for v in d1), Fraction(0))


def max_pair_equality_by_simplex(d1: Distribution, d2: Distribution) -> Fraction:
    """The same maximum, found by maximizing ``Pr[X = Y]`` over the coupling LP of the pair."""
    _same_support(d1, d2)
    content = Content("x", tuple(d1))
    s = System(
        contents=(content,),
        contexts=(Context("a"), Context("b")),
        bunches=(
            Bunch.of("a", [content], {(v,): p for v, p in d1.items()}),
            Bunch.of("b", [content], {(v,): p for v, p in d2.items()}),
        ),
    )
    (conn,) = connections_of(s)
    out = simplex_solve(equality_objective(build_coupling_lp(s), conn, ("a", "b")))
    assert out.objective_value is not None
    return out.objective_value


def constrained_pairs(s: System) -> list[tuple[Connection, Pair]]:
    """Every unordered context pair within every connection, in canonical order."""
    return [(conn, pair) for conn in connections_of(s) for pair in conn.pairs()]


def pair_targets(s: System, mode: Mode | str = Mode.extended) -> dict[PairKey, Fraction]:
    """Equality probability each constrained pair must reach: 1 (strict) or its maximal value (extended)."""
    mode = Mode(mode)
    targets: dict[PairKey, Fraction] = {}
    for conn, (c1, c2) in constrained_pairs(s):
        if mode is Mode.strict:
            targets[(conn.content, (c1, c2))] = Fraction(1)
        else:
            targets[(conn.content, (c1, c2))] = max_pair_equality(conn.distribution(c1), conn.distribution(c2))
    return targets


def decide_noncontextuality(
    s: System,
    mode: Mode | str = Mode.extended,
    *,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
    oracle: bool = False,
) -> Verdict:
    """
    Decide whether ``s`` has a coupling attaining every pair target.

    Args:
        s (System): The system.
        mode (Mode | str): ``strict`` (targets 1, consistently connected input only) or ``extended``.
        max_assignments (int): Cap on the product space.
        oracle (bool): Use the brute-force oracle instead of the simplex.

    Raises:
        InconsistentConnectednessError: Strict mode on an inconsistently connected system.
        SystemTooLargeError: Product space over the cap.
    """
    mode = Mode(mode)
    if mode is Mode.strict:
        report = is_consistently_connected(s)
        if not report.consistent:
            raise InconsistentConnectednessError(
                "strict mode needs a consistently connected system; use extended mode instead",
            )
    feasible, _ = _solvers(oracle)
    targets = pair_targets(s, mode)

    lp = build_coupling_lp(s, max_assignments=max_assignments)
    for conn, pair in constrained_pairs(s):
        lp = add_equality_probability_constraint(lp, conn, pair, targets[(conn.content, pair)])
    outcome = feasible(lp)
    LOG.info("%s-mode decision: %s", mode.value, "noncontextual" if outcome.feasible else "contextual")

    if outcome.feasible:
        return Verdict(mode, True, outcome.witness, targets, Fraction(0), dict(targets))

    degree, achieved = _shortfall(s, targets, max_assignments=max_assignments, oracle=oracle)
    if degree == 0:
        raise LpInconsistencyError("infeasible pair targets but zero total shortfall")
    return Verdict(mode, False, None, targets, degree, achieved)


def _shortfall(
    s: System,
    targets: Mapping[PairKey, Fraction],
    *,
    max_assignments: int,
    oracle: bool,
) -> tuple[Fraction, dict[PairKey, Fraction]]:
    """Minimize the total shortfall; return it with the attained pair probabilities."""
    _, optimize = _solvers(oracle)
    lp = build_coupling_lp(s, max_assignments=max_assignments)
    slacks: dict[PairKey, int] = {}
    for conn, pair in constrained_pairs(s):
        key = (conn.content, pair)
        lp, slacks[key] = add_shortfall_constraint(lp, conn, pair, targets[key])
    if not slacks:
        return Fraction(0), {}
    outcome = optimize(set_objective(lp, {k: Fraction(-1) for k in slacks.values()}))
    assert outcome.solution is not None and outcome.objective_value is not None
    achieved = {key: targets[key] - outcome.solution[k] for key, k in slacks.items()}
    return -outcome.objective_value, achieved


def contextuality_degree(
    s: System,
    *,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
    oracle: bool = False,
) -> Fraction:
    """
    Least total shortfall of pair-equality probabilities below their extended-mode targets.

    Zero iff ``decide_noncontextuality(s, "extended").noncontextual``.
    """
    degree, _ = _shortfall(s, pair_targets(s, Mode.extended), max_assignments=max_assignments, oracle=oracle)
    return degree


def naive_identification_holds(s: System, *, max_assignments: int = DEFAULT_MAX_ASSIGNMENTS) -> bool:
    """
    Whether content-sharing variables may be treated as one and the same variable.

    True iff the system is consistently connected and has a maximally connected
    coupling; otherwise dropping the context labels leads to a contradiction.
    """
    if not is_consistently_connected(s).consistent:
        return False
    return decide_noncontextuality(s, Mode.strict, max_assignments=max_assignments).noncontextual


def feynman_residual(p2: Fraction, p3: Fraction, p4: Fraction) -> Fraction:
    """
    ``p4 - (p2 + p3)`` for the double-slit hit probabilities.

    Reports how far the additivity assumption is from the data. It says nothing
    about contextuality: the three variables belong to different contexts and
    probability theory does not relate them.
    """
    values = [Fraction(p) for p in (p2, p3, p4)]
    for p in values:
        if not 0 <= p <= 1:
            raise InvalidParameterError(f"probability {p} is outside [0, 1]")
    q2, q3, q4 = values
    return q4 - (q2 + q3)
