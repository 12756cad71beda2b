"""
simplex.py
==========

Exact two-phase simplex over :class:`fractions.Fraction`.

Dense tableau, Bland's rule for both the entering column and ties in the
ratio test, so every solve terminates and is reproducible pivot for pivot.
Phase 1 minimizes the sum of one artificial per row; redundant rows (the bunch
constraints of a coupling LP are never independent) are detected when an
artificial cannot be pivoted out and are dropped before phase 2.

Every answer is re-checked by substitution into the original constraints.

The tableau holds ``rows x (unknowns + rows)`` fractions and every pivot
touches all of them. That is comfortable up to a few thousand unknowns
(cyclic-4 systems have 256, single-content systems with ten contexts have
1024). The ``--max-assignments`` cap of 2**20 bounds memory for building the
program, not solving time: above :data:`DENSE_TABLEAU_WARN_UNKNOWNS` a solve
logs a warning first.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import LpInconsistencyError
from .lp import GlobalAssignment, LinearProgram

LOG = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

DENSE_TABLEAU_WARN_UNKNOWNS = 4096


class LpStatus(str, Enum):
    feasible = "feasible"
    infeasible = "infeasible"
    optimal = "optimal"


@dataclass(frozen=True)
class LpOutcome:
    """
    Result of a feasibility check or an optimization.

    Attributes:
        status (LpStatus): feasible (no objective), optimal (objective maximized) or infeasible.
        witness (Mapping[GlobalAssignment, Fraction] | None): Nonzero coupling mass per
            global assignment; present iff status is not infeasible.
        objective_value (Fraction | None): Maximum of the objective when status is optimal.
        solution (tuple[Fraction, ...] | None): Full unknown vector, slacks included.
        certificate (tuple[Fraction, ...] | None): Farkas multipliers ``y`` with
            ``yᵀA ≤ 0`` and ``yᵀb > 0`` proving infeasibility, when the solver produced one.
    """

    status: LpStatus
    witness: Mapping[GlobalAssignment, Fraction] | None = field(default=None, hash=False)
    objective_value: Fraction | None = None
    solution: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None

    @property
    def feasible(self) -> bool:
        return self.status is not LpStatus.infeasible


def witness_of(lp: LinearProgram, solution: tuple[Fraction, ...]) -> dict[GlobalAssignment, Fraction]:
    """Nonzero assignment entries of ``solution``, in unknown order."""
    return {lp.assignment(i): v for i, v in enumerate(solution[: lp.num_assignments]) if v != 0}


def finish(lp: LinearProgram, solution: list[Fraction], source: str) -> LpOutcome:
    """Verify ``solution`` by substitution and package it as an outcome."""
    bad = lp.violations(solution)
    if bad:
        raise LpInconsistencyError(f"{source} produced a point violating: {'; '.join(bad[:5])}")
    x = tuple(solution)
    if lp.objective is None:
        return LpOutcome(LpStatus.feasible, witness_of(lp, x), solution=x)
    return LpOutcome(LpStatus.optimal, witness_of(lp, x), objective_value=lp.objective_value(x), solution=x)


class _Tableau:
    """Dense tableau ``A x = b`` with a basis and one reduced-cost row."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cost: list[Fraction] = []
        self.value = ZERO
        self.pivots = 0

    def price(self, c: list[Fraction]) -> None:
        """Reduced costs ``c_j - c_Bᵀ B⁻¹ A_j`` and objective ``c_Bᵀ b`` for cost vector ``c``."""
        d = list(c)
        value = ZERO
        for row, b, j in zip(self.rows, self.rhs, self.basis, strict=True):
            cb = c[j]
            if cb:
                for k, v in enumerate(row):
                    if v:
                        d[k] -= cb * v
                value += cb * b
        self.cost = d
        self.value = value

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            row[:] = [v / piv for v in row]
            self.rhs[r] /= piv
        nz = [k for k, v in enumerate(row) if v]
        br = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
                self.rhs[i] -= f * br
        f = self.cost[j]
        if f:
            for k in nz:
                self.cost[k] -= f * row[k]
            self.value += f * br
        self.basis[r] = j
        self.pivots += 1

    def entering(self, allowed: int) -> int | None:
        """Bland: lowest-index column among the first ``allowed`` with negative reduced cost."""
        for j in range(allowed):
            if self.cost[j] < 0:
                return j
        return None

    def leaving(self, j: int) -> int | None:
        """Minimum ratio row; ties go to the lowest basic variable index."""
        best: tuple[Fraction, int, int] | None = None
        for i, row in enumerate(self.rows):
            a = row[j]
            if a > 0:
                key = (self.rhs[i] / a, self.basis[i], i)
                if best is None or key < best:
                    best = key
        return None if best is None else best[2]

    def run(self, allowed: int) -> bool:
        """Minimize until optimal (True) or unbounded (False)."""
        while True:
            j = self.entering(allowed)
            if j is None:
                return True
            r = self.leaving(j)
            if r is None:
                return False
            self.pivot(r, j)


def simplex_solve(lp: LinearProgram) -> LpOutcome:
    """
    Decide feasibility of ``lp`` and maximize its objective if it has one.

    Returns:
        LpOutcome: infeasible iff the phase-1 optimum is positive; otherwise a
        basic feasible (and, with an objective, optimal) solution.

    Raises:
        LpInconsistencyError: Unbounded objective, or a result failing re-substitution.
            Neither can happen for probability-mass programs.
    """
    n = lp.num_unknowns
    m = len(lp.constraints)
    if n > DENSE_TABLEAU_WARN_UNKNOWNS:
        LOG.warning("Dense simplex on %d unknowns and %d constraints; this may be slow", n, m)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, c in enumerate(lp.constraints):
        row = [ZERO] * (n + m)
        sign = -1 if c.rhs < 0 else 1
        for k, v in c.coefficients.items():
            row[k] = sign * v
        row[n + i] = ONE
        rows.append(row)
        rhs.append(sign * c.rhs)

    t = _Tableau(rows, rhs, basis=[n + i for i in range(m)])

    # phase 1: minimize the sum of artificials
    t.price([ZERO] * n + [ONE] * m)
    t.run(allowed=n)
    if t.value > 0:
        LOG.debug("Phase 1 optimum %s > 0 after %d pivots: infeasible", t.value, t.pivots)
        return LpOutcome(LpStatus.infeasible)

    # drive zero-level artificials out of the basis; rows where that fails are redundant
    r = 0
    dropped = 0
    while r < len(t.rows):
        if t.basis[r] >= n:
            j = next((k for k in range(n) if t.rows[r][k] != 0), None)
            if j is None:
                del t.rows[r], t.rhs[r], t.basis[r]
                dropped += 1
                continue
            t.pivot(r, j)
        r += 1
    LOG.debug("Phase 1 done after %d pivots; %d redundant rows dropped", t.pivots, dropped)

    if lp.objective is not None:
        c = [ZERO] * (n + m)
        for k, v in lp.objective.items():
            c[k] = -v
        t.price(c)
        if not t.run(allowed=n):
            raise LpInconsistencyError("objective is unbounded over the coupling polytope")
        LOG.debug("Phase 2 done after %d pivots; optimum %s", t.pivots, -t.value)

    x = [ZERO] * n
    for b, j in zip(t.rhs, t.basis, strict=True):
        if j < n:
            x[j] = b
    return finish(lp, x, "simplex")
