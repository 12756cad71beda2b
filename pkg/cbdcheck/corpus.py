"""
corpus.py
=========

Regression corpus: ``<name>.system`` files with ``<name>.expected`` TOML sidecars.

A sidecar holds one or more ``[[check]]`` tables::

    [[check]]
    mode = "extended"
    noncontextual = false
    degree = "1/1"
    provenance = "DERIVED: cbdcheck analyze corpus/pr_box.system --oracle"

Every check becomes one :class:`CorpusEntry`; :func:`corpus_check` runs them
through the same engine and worker as ``cbdcheck analyze``.
"""

from __future__ import annotations

import logging
import tomllib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .analysis import AnalysisOptions, AnalysisTask, analysis_worker
from .contextuality import Mode
from .engine import run_analyses
from .errors import CorpusError
from .lp import DEFAULT_MAX_ASSIGNMENTS
from .report import Report
from .sysfile import format_rational, parse_rational

LOG = logging.getLogger(__name__)

SYSTEM_SUFFIX = ".system"
EXPECTED_SUFFIX = ".expected"


@dataclass(frozen=True)
class CorpusEntry:
    """
    One expected outcome for one system file.

    Attributes:
        name (str): ``<stem>[<mode>]``.
        system_path (Path): The system file.
        mode (Mode): Mode the expectation is for.
        noncontextual (bool): Expected verdict.
        degree (Fraction): Expected degree.
        provenance (str): Where the expectation comes from.
    """

    name: str
    system_path: Path
    mode: Mode
    noncontextual: bool
    degree: Fraction
    provenance: str = ""


@dataclass
class CorpusSummary:
    passed: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _entries_of(system_path: Path, expected_path: Path) -> list[CorpusEntry]:
    """
    Read the ``[[check]]`` tables of one sidecar.

    A sidecar usually holds one check per mode for the same system; each
    becomes its own entry named after the stem and the mode.

    Raises:
        CorpusError: Unparseable TOML, no checks, or a check with a bad field.
    """
    try:
        data = tomllib.loads(expected_path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise CorpusError(f"{expected_path}: {e}") from e
    checks = data.get("check")
    if not isinstance(checks, list) or not checks:
        raise CorpusError(f"{expected_path}: no [[check]] tables")

    out = []
    for i, check in enumerate(checks, start=1):
        try:
            mode = Mode(check["mode"])
            entry = CorpusEntry(
                name=f"{system_path.stem}[{mode.value}]",
                system_path=system_path,
                mode=mode,
                noncontextual=bool(check["noncontextual"]),
                degree=parse_rational(str(check["degree"])),
                provenance=str(check.get("provenance", "")),
            )
        except (KeyError, ValueError) as e:
            raise CorpusError(f"{expected_path}: check {i} is malformed: {e}") from e
        out.append(entry)
    return out


def load_corpus(directory: Path) -> list[CorpusEntry]:
    """
    Every entry under ``directory``, ordered by file name then by check order.

    Raises:
        CorpusError: Missing directory, a system file without sidecar, or the reverse.
    """
    if not directory.is_dir():
        raise CorpusError(f"corpus directory not found: {directory}")
    systems = {p.stem: p for p in directory.glob(f"*{SYSTEM_SUFFIX}")}
    expected = {p.stem: p for p in directory.glob(f"*{EXPECTED_SUFFIX}")}
    for stem in sorted(systems.keys() ^ expected.keys()):
        have = systems.get(stem) or expected[stem]
        raise CorpusError(f"{have}: missing its {'sidecar' if stem in systems else 'system file'}")
    entries = [e for stem in sorted(systems) for e in _entries_of(systems[stem], expected[stem])]
    LOG.info("Loaded %d corpus entries from %s", len(entries), directory)
    return entries


def _compare(entry: CorpusEntry, report: Report) -> str | None:
    """Failure line for ``entry``, or None when verdict and degree both match exactly."""
    v = report.verdict
    if v.noncontextual == entry.noncontextual and v.degree == entry.degree:
        return None
    word = {True: "noncontextual", False: "contextual"}
    return (
        f"{entry.name}: expected {word[entry.noncontextual]} with degree {format_rational(entry.degree)}, "
        f"got {word[v.noncontextual]} with degree {format_rational(v.degree)}"
    )


def corpus_check(
    directory: Path,
    *,
    oracle: bool = False,
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS,
    workers: int | None = None,
) -> CorpusSummary:
    """
    Analyze every entry and compare verdict and degree exactly.

    Raises:
        CorpusError: The corpus cannot be loaded.
    """
    entries = load_corpus(directory)
    tasks = [
        AnalysisTask(
            task_id=i,
            name=e.name,
            options=AnalysisOptions(mode=e.mode, oracle=oracle, max_assignments=max_assignments),
            path=e.system_path,
        )
        for i, e in enumerate(entries, start=1)
    ]
    records = run_analyses(tasks, worker_fn=analysis_worker, workers=workers)

    summary = CorpusSummary()
    for entry, rec in zip(entries, records, strict=True):
        if rec.error is not None:
            summary.failures.append(f"{entry.name}: {rec.error}")
        elif rec.result is None:
            summary.failures.append(f"{entry.name}: {rec.status}")
        elif (problem := _compare(entry, rec.result)) is not None:
            summary.failures.append(problem)
        else:
            summary.passed.append(entry.name)
    LOG.info("Corpus: %d passed, %d failed", len(summary.passed), len(summary.failures))
    return summary
