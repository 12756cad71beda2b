"""
report.py
=========

The per-system report and its two renderings.

Both renderings are built from the same :class:`Report` and print every
rational as ``p/q``. Neither depends on the terminal: the human form is plain
lines, the JSON form has sorted, fixed keys. Elapsed time appears only when it
was asked for.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .contextuality import ConnectednessReport, PairKey, Verdict
from .lp import GlobalAssignment
from .model import System
from .sysfile import format_rational

INDENT = "  "

DEGREE_NOTE = "total shortfall below pair targets; a reporting aid, not a normative measure"


@dataclass(frozen=True)
class OracleCheck:
    """The brute-force rerun of a decision; only built when it matches."""

    noncontextual: bool
    degree: Fraction


@dataclass(frozen=True)
class Report:
    """
    Everything the CLI prints for one system.

    Attributes:
        name (str): File name or scenario name.
        contents (tuple[str, ...]): Content ids.
        contexts (tuple[str, ...]): Context ids.
        bunch_count (int): Number of bunches.
        connectedness (ConnectednessReport): Marginal mismatches per connection.
        verdict (Verdict): The decision.
        show_achieved (bool): Render the per-pair achieved probabilities.
        witness (Mapping[GlobalAssignment, Fraction] | None): Nonzero witness rows, when requested.
        oracle (OracleCheck | None): Oracle rerun, when requested.
        elapsed (float | None): Seconds spent, when requested.
    """

    name: str
    contents: tuple[str, ...]
    contexts: tuple[str, ...]
    bunch_count: int
    connectedness: ConnectednessReport = field(hash=False)
    verdict: Verdict = field(hash=False)
    show_achieved: bool = False
    witness: Mapping[GlobalAssignment, Fraction] | None = field(default=None, hash=False)
    oracle: OracleCheck | None = None
    elapsed: float | None = None

    @classmethod
    def of(cls, name: str, s: System, connectedness: ConnectednessReport, verdict: Verdict, **kwargs: Any) -> Report:
        """Build a report from a system; only ids and the bunch count are kept, not the pmfs."""
        return cls(
            name=name,
            contents=tuple(c.id for c in s.contents),
            contexts=tuple(c.id for c in s.contexts),
            bunch_count=len(s.bunches),
            connectedness=connectedness,
            verdict=verdict,
            **kwargs,
        )

    @property
    def exit_code(self) -> int:
        """0 for noncontextual, 1 for contextual; input errors never reach a report."""
        return 0 if self.verdict.noncontextual else 1


def _pair(key: PairKey) -> str:
    content, (c1, c2) = key
    return f"{content} {c1},{c2}"


def _verdict_word(noncontextual: bool) -> str:
    return "noncontextual" if noncontextual else "contextual"


def witness_rows(witness: Mapping[GlobalAssignment, Fraction]) -> list[tuple[str, Fraction]]:
    """``(assignment, probability)`` for every nonzero row, in assignment order."""
    return [(str(a), p) for a, p in witness.items() if p != 0]


def render_human(report: Report) -> str:
    """Line-oriented report."""
    r, v = report, report.verdict
    lines = [
        f"system: {r.name}",
        f"{INDENT}contents: {' '.join(r.contents)}",
        f"{INDENT}contexts: {' '.join(r.contexts)}",
        f"{INDENT}bunches: {r.bunch_count}",
        f"connectedness: {'consistent' if r.connectedness.consistent else 'inconsistent'}",
    ]
    for content, pairs in r.connectedness.mismatches.items():
        for (c1, c2), value in pairs.items():
            lines.append(f"{INDENT}{content} {c1},{c2}: {format_rational(value)}")

    lines.append(f"verdict: {_verdict_word(v.noncontextual)} ({v.mode.value} mode)")
    lines.append(f"{INDENT}degree: {format_rational(v.degree)} ({DEGREE_NOTE})")
    if v.pair_targets:
        lines.append(f"{INDENT}pair targets:")
        for key, target in v.pair_targets.items():
            line = f"{INDENT * 2}{_pair(key)}: {format_rational(target)}"
            if r.show_achieved:
                line += f" achieved {format_rational(v.achieved[key])}"
            lines.append(line)

    if r.witness is not None:
        lines.append("witness:")
        for assignment, p in witness_rows(r.witness):
            lines.append(f"{INDENT}{assignment}: {format_rational(p)}")

    if r.oracle is not None:
        o = r.oracle
        lines.append(
            "oracle: agrees "
            f"({_verdict_word(o.noncontextual)}, degree {format_rational(o.degree)})",
        )
    if r.elapsed is not None:
        lines.append(f"elapsed: {r.elapsed:.3f}s")
    return "\n".join(lines)


def report_dict(report: Report) -> dict[str, Any]:
    """Structured form with every rational as a ``p/q`` string."""
    r, v = report, report.verdict
    pairs = []
    for key, target in v.pair_targets.items():
        content, (c1, c2) = key
        entry: dict[str, Any] = {"content": content, "contexts": [c1, c2], "target": format_rational(target)}
        if r.show_achieved:
            entry["achieved"] = format_rational(v.achieved[key])
        pairs.append(entry)

    out: dict[str, Any] = {
        "system": r.name,
        "contents": list(r.contents),
        "contexts": list(r.contexts),
        "bunches": r.bunch_count,
        "consistently_connected": r.connectedness.consistent,
        "mismatches": [
            {"content": content, "contexts": [c1, c2], "value": format_rational(value)}
            for content, per_pair in r.connectedness.mismatches.items()
            for (c1, c2), value in per_pair.items()
        ],
        "mode": v.mode.value,
        "noncontextual": v.noncontextual,
        "degree": format_rational(v.degree),
        "pairs": pairs,
    }
    if r.witness is not None:
        out["witness"] = [{"assignment": a, "probability": format_rational(p)} for a, p in witness_rows(r.witness)]
    if r.oracle is not None:
        out["oracle"] = {
            "noncontextual": r.oracle.noncontextual,
            "degree": format_rational(r.oracle.degree),
        }
    if r.elapsed is not None:
        out["elapsed_seconds"] = round(r.elapsed, 3)
    return out


def render_json(reports: Sequence[Report]) -> str:
    """One object for a single report, an array otherwise."""
    payload: Any = report_dict(reports[0]) if len(reports) == 1 else [report_dict(r) for r in reports]
    return json.dumps(payload, indent=2)
