"""
lp.py
=====

The coupling polytope of a system as an exact linear program.

There is one unknown per global assignment (one outcome for every label of the
system), enumerated in ``itertools.product`` order over the labels. A coupling
is a nonnegative vector over these unknowns whose sums over each bunch's cells
reproduce that bunch's pmf. Connection requirements are added afterwards as
equality-probability constraints.

Programs are immutable: every builder returns a new :class:`LinearProgram`.
Unknowns past the assignments are named slacks (used by the contextuality
degree); they are nonnegative like every other unknown.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import InvalidParameterError, SystemTooLargeError, UnknownContextError
from .model import Connection, Label, Outcomes, System
from .sysfile import format_rational

LOG = logging.getLogger(__name__)

DEFAULT_MAX_ASSIGNMENTS = 2**20
ENV_MAX_ASSIGNMENTS = "CBDCHECK_MAX_ASSIGNMENTS"

Pair = tuple[str, str]


@dataclass(frozen=True)
class GlobalAssignment:
    """One outcome for every label of a system."""

    labels: tuple[Label, ...]
    outcomes: tuple[str, ...]

    def __getitem__(self, label: Label) -> str:
        return self.outcomes[self.labels.index(label)]

    def as_dict(self) -> dict[Label, str]:
        return dict(zip(self.labels, self.outcomes, strict=True))

    def __str__(self) -> str:
        return " ".join(f"{lab}={v}" for lab, v in zip(self.labels, self.outcomes, strict=True))


@dataclass(frozen=True)
class Constraint:
    """
    ``Σ coefficients[i] * x[i] = rhs``.

    Attributes:
        coefficients (Mapping[int, Fraction]): Unknown index -> coefficient (zeros omitted).
        rhs (Fraction): Right-hand side.
        kind (str): "mass", "bunch", "equality" or "shortfall".
        name (str): Human-readable description for dumps and diagnostics.
    """

    coefficients: Mapping[int, Fraction] = field(hash=False)
    rhs: Fraction
    kind: str
    name: str


@dataclass(frozen=True)
class LinearProgram:
    """
    Equality-form LP with nonnegative unknowns and an optional maximization objective.

    Attributes:
        labels (tuple[Label, ...]): Labels in coordinate order of every assignment.
        outcome_sets (tuple[tuple[str, ...], ...]): Outcome set per label.
        constraints (tuple[Constraint, ...]): Equality constraints.
        objective (Mapping[int, Fraction] | None): Coefficients to maximize, if any.
        slack_names (tuple[str, ...]): Extra unknowns appended after the assignments.
    """

    labels: tuple[Label, ...]
    outcome_sets: tuple[Outcomes, ...]
    constraints: tuple[Constraint, ...] = ()
    objective: Mapping[int, Fraction] | None = field(default=None, hash=False)
    slack_names: tuple[str, ...] = ()

    @property
    def num_assignments(self) -> int:
        return math.prod(len(o) for o in self.outcome_sets)

    @property
    def num_unknowns(self) -> int:
        return self.num_assignments + len(self.slack_names)

    def assignment(self, index: int) -> GlobalAssignment:
        """Decode an unknown index (mixed radix, last label fastest)."""
        if not 0 <= index < self.num_assignments:
            raise IndexError(f"unknown x{index} is not an assignment")
        digits = []
        for outcomes in reversed(self.outcome_sets):
            index, d = divmod(index, len(outcomes))
            digits.append(outcomes[d])
        return GlobalAssignment(self.labels, tuple(reversed(digits)))

    def assignments(self) -> Iterator[GlobalAssignment]:
        for outcomes in itertools.product(*self.outcome_sets):
            yield GlobalAssignment(self.labels, outcomes)

    def unknown_name(self, index: int) -> str:
        if index < self.num_assignments:
            return str(self.assignment(index))
        return self.slack_names[index - self.num_assignments]

    def constraints_of(self, kind: str) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.kind == kind)

    def position(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownContextError(f"{label} is not a variable of this program") from None

    def violations(self, solution: Sequence[Fraction]) -> list[str]:
        """Names of constraints (or nonnegativity) that ``solution`` breaks, by exact substitution."""
        bad = [f"x{i} < 0" for i, v in enumerate(solution) if v < 0]
        for c in self.constraints:
            lhs = sum((coef * solution[i] for i, coef in c.coefficients.items()), Fraction(0))
            if lhs != c.rhs:
                bad.append(c.name)
        return bad

    def objective_value(self, solution: Sequence[Fraction]) -> Fraction:
        if self.objective is None:
            return Fraction(0)
        return sum((coef * solution[i] for i, coef in self.objective.items()), Fraction(0))


def build_coupling_lp(s: System, *, max_assignments: int = DEFAULT_MAX_ASSIGNMENTS) -> LinearProgram:
    """
    Coupling polytope of ``s``: total mass plus one constraint per bunch cell.

    No connection constraints are added here.

    Raises:
        SystemTooLargeError: The product space exceeds ``max_assignments``.
    """
    labels = s.labels()
    outcome_sets = tuple(s.outcomes_of(lab) for lab in labels)
    size = math.prod(len(o) for o in outcome_sets)
    if size > max_assignments:
        raise SystemTooLargeError(
            f"system too large for exact method: {size} global assignments exceed the cap of {max_assignments}",
        )

    positions: list[tuple[int, ...]] = []
    offset = 0
    for b in s.bunches:
        positions.append(tuple(range(offset, offset + len(b.members))))
        offset += len(b.members)

    rows: list[dict[tuple[str, ...], dict[int, Fraction]]] = [
        {key: {} for key, _ in b.cells()} for b in s.bunches
    ]
    one = Fraction(1)
    for index, outcomes in enumerate(itertools.product(*outcome_sets)):
        for bi, pos in enumerate(positions):
            rows[bi][tuple(outcomes[p] for p in pos)][index] = one

    constraints = [Constraint(dict.fromkeys(range(size), one), one, "mass", "total mass")]
    for b, cells in zip(s.bunches, rows, strict=True):
        for key, p in b.cells():
            name = f"{b.context}: " + " ".join(f"{q}={v}" for q, v in zip(b.members, key, strict=True))
            constraints.append(Constraint(cells[key], p, "bunch", name))

    LOG.debug("Coupling LP: %d unknowns, %d constraints", size, len(constraints))
    return LinearProgram(labels=labels, outcome_sets=outcome_sets, constraints=tuple(constraints))


def _pair_labels(lp: LinearProgram, conn: Connection, pair: Pair) -> tuple[int, int]:
    c1, c2 = pair
    contexts = conn.contexts()
    for c in (c1, c2):
        if c not in contexts:
            raise UnknownContextError(f"context {c!r} is not in the connection of {conn.content!r}")
    if c1 == c2:
        raise InvalidParameterError(f"pair ({c1}, {c2}) must name two different contexts")
    return lp.position(Label(conn.content, c1)), lp.position(Label(conn.content, c2))


def _equal_indices(lp: LinearProgram, conn: Connection, pair: Pair) -> dict[int, Fraction]:
    """Unit coefficients on every assignment where the two labels of ``pair`` take the same outcome."""
    p1, p2 = _pair_labels(lp, conn, pair)
    one = Fraction(1)
    return {i: one for i, out in enumerate(itertools.product(*lp.outcome_sets)) if out[p1] == out[p2]}


def _check_probability(value: Fraction) -> Fraction:
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise InvalidParameterError(f"equality probability {value} is outside [0, 1]")
    return value


def add_equality_probability_constraint(
    lp: LinearProgram,
    conn: Connection,
    pair: Pair,
    value: Fraction,
) -> LinearProgram:
    """
    Require ``Pr[R_q^c1 = R_q^c2] = value`` for the two labels of ``conn`` named by ``pair``.

    ``value = 1`` is the identification constraint of a maximally connected coupling.

    Raises:
        UnknownContextError: A context of ``pair`` is not in ``conn``.
        InvalidParameterError: ``value`` outside [0, 1] or a degenerate pair.
    """
    value = _check_probability(value)
    coefficients = _equal_indices(lp, conn, pair)
    name = f"Pr[{conn.content}^{pair[0]} = {conn.content}^{pair[1]}] = {format_rational(value)}"
    return replace(lp, constraints=(*lp.constraints, Constraint(coefficients, value, "equality", name)))


def add_shortfall_constraint(
    lp: LinearProgram,
    conn: Connection,
    pair: Pair,
    target: Fraction,
) -> tuple[LinearProgram, int]:
    """
    Require ``Pr[equal] + slack = target`` with a fresh nonnegative slack.

    Returns:
        tuple[LinearProgram, int]: The new program and the slack's unknown index.
    """
    target = _check_probability(target)
    coefficients = _equal_indices(lp, conn, pair)
    slack = lp.num_unknowns
    coefficients[slack] = Fraction(1)
    name = f"Pr[{conn.content}^{pair[0]} = {conn.content}^{pair[1]}] + shortfall = {format_rational(target)}"
    out = replace(
        lp,
        constraints=(*lp.constraints, Constraint(coefficients, target, "shortfall", name)),
        slack_names=(*lp.slack_names, f"shortfall[{conn.content}:{pair[0]},{pair[1]}]"),
    )
    return out, slack


def equality_objective(lp: LinearProgram, conn: Connection, pair: Pair) -> LinearProgram:
    """Maximize ``Pr[R_q^c1 = R_q^c2]``."""
    return replace(lp, objective=_equal_indices(lp, conn, pair))


def set_objective(lp: LinearProgram, coefficients: Mapping[int, Fraction]) -> LinearProgram:
    """Maximize ``Σ coefficients[i] * x[i]``."""
    return replace(lp, objective={i: Fraction(c) for i, c in coefficients.items() if c != 0})


# ──────────────────────────────────────────────────────────────────────────────
# debug dump
# ──────────────────────────────────────────────────────────────────────────────


def _coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else format_rational(c)


def _terms(coefficients: Mapping[int, Fraction]) -> str:
    if not coefficients:
        return "0"
    return " + ".join(f"{_coef(c)}*x{i}" for i, c in sorted(coefficients.items()))


def dump_lp(lp: LinearProgram) -> str:
    """
    Plain-text rendering of ``lp``.

    ``#`` lines are comments (counts, then one line naming each unknown);
    ``maximize:`` carries the objective if present; every other line is one
    constraint ``<coef>*x<i> + ... = <rhs>``.
    """
    lines = [f"# unknowns: {lp.num_unknowns}  constraints: {len(lp.constraints)}"]
    lines.extend(f"# x{i}: {lp.unknown_name(i)}" for i in range(lp.num_unknowns))
    if lp.objective is not None:
        lines.append(f"maximize: {_terms(lp.objective)}")
    for c in lp.constraints:
        lines.append(f"# {c.kind}: {c.name}")
        lines.append(f"{_terms(c.coefficients)} = {format_rational(c.rhs)}")
    return "\n".join(lines) + "\n"
