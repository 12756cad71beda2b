"""
cli.py
======

Typer-powered CLI.

Commands:
- cbdcheck analyze FILE...        → connectedness + noncontextuality report per file
- cbdcheck scenario double-slit   → the four-context double-slit system
- cbdcheck scenario cyclic4       → cyclic rank-4 (CHSH layout) system from expectations
- cbdcheck scenario griffiths     → two contexts sharing one content
- cbdcheck scenario random        → seeded random system
- cbdcheck show FILE              → content-by-context matrix and connectedness
- cbdcheck residual P2 P3 P4      → double-slit additivity residual
- cbdcheck dump-lp FILE           → the coupling LP as text
- cbdcheck corpus [DIR]           → regression corpus check

Exit codes: 0 noncontextual, 1 contextual, 2 usage or input error, 3 size cap
or oracle disagreement. With several files the largest code wins.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from .analysis import AnalysisOptions, AnalysisTask, analysis_worker
from .contextuality import (
    Mode,
    constrained_pairs,
    feynman_residual,
    is_consistently_connected,
    pair_targets,
)
from .corpus import corpus_check
from .engine import run_analyses
from .errors import CbdError
from .lp import (
    DEFAULT_MAX_ASSIGNMENTS,
    ENV_MAX_ASSIGNMENTS,
    add_equality_probability_constraint,
    build_coupling_lp,
    dump_lp,
)
from .model import System, render_matrix
from .report import render_human, render_json
from .rlog import console, out, setup_logging
from .scenarios import (
    Cyclic4Params,
    SystemShape,
    binary_pmf,
    make_cyclic4,
    make_double_slit,
    make_griffiths,
    sample_random_system,
)
from .sysfile import format_rational, load_system, parse_rational, serialize_system

LOG = logging.getLogger(__name__)

INPUT_ERROR = 2

app = typer.Typer(
    help="Exact Contextuality-by-Default checks for systems of random variables.",
    add_completion=False,
    no_args_is_help=True,
    rich_markup_mode="rich",
)

scenario_app = typer.Typer(
    name="scenario",
    help="Build and analyze one of the reference systems.",
    no_args_is_help=True,
    rich_markup_mode="rich",
)
app.add_typer(scenario_app, name="scenario")


# ──────────────────────────────────────────────────────────────────────────────
# shared options
# ──────────────────────────────────────────────────────────────────────────────

ModeOpt = Annotated[Mode, typer.Option("--mode", "-m", help="strict (identity) or extended (maximal) pair targets.")]
DegreeOpt = Annotated[bool, typer.Option("--degree", help="Show the equality probability each pair achieves.")]
WitnessOpt = Annotated[bool, typer.Option("--witness", help="Print the witness coupling (nonzero rows).")]
OracleOpt = Annotated[bool, typer.Option("--oracle", help="Rerun with the brute-force oracle; exit 3 on mismatch.")]
MaxAssignmentsOpt = Annotated[
    int,
    typer.Option("--max-assignments", envvar=ENV_MAX_ASSIGNMENTS, min=1, help="Cap on global assignments."),
]
JsonOpt = Annotated[bool, typer.Option("--json", help="Machine-readable output.")]
TimingOpt = Annotated[bool, typer.Option("--timing", help="Include elapsed time in the report.")]
WorkersOpt = Annotated[int | None, typer.Option("-w", "--workers", min=1, help="Max concurrent analyses.")]
VerboseOpt = Annotated[int, typer.Option("-v", "--verbose", count=True, help="Increase log verbosity (-v, -vv).")]
LogFileOpt = Annotated[Path | None, typer.Option("-l", "--log-file", help="Optional log file path.")]
EmitOpt = Annotated[bool, typer.Option("--emit", help="Print the system file instead of analyzing it.")]


@app.callback(invoke_without_command=True)
def main(ctx: typer.Context):
    """
    cbdcheck: decide whether a system of random variables is contextual
    (strict or extended Contextuality-by-Default) with exact rational arithmetic.
    """
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())


def _fail(e: Exception, where: str = "") -> typer.Exit:
    """Print an input error on stderr and turn it into an exit."""
    code = e.exit_code if isinstance(e, CbdError) else INPUT_ERROR
    console.print(f"error: {where}{e}", markup=False, highlight=False, soft_wrap=True)
    return typer.Exit(code)


def _rational(text: str, option: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as e:
        raise typer.BadParameter(str(e), param_hint=option) from e


def _rationals(text: str, count: int, option: str) -> list[Fraction]:
    parts = text.split(",")
    if any(not p.strip() for p in parts):
        raise typer.BadParameter(f"empty value in comma-separated list {text!r}", param_hint=option)
    if len(parts) != count:
        raise typer.BadParameter(f"expected {count} comma-separated values, got {len(parts)}", param_hint=option)
    return [_rational(p, option) for p in parts]


def _run(tasks: list[AnalysisTask], *, as_json: bool, workers: int | None) -> int:
    """Analyze ``tasks``, print reports in input order, return the largest exit code."""
    records = run_analyses(tasks, worker_fn=analysis_worker, workers=workers)
    reports = []
    codes = []
    for rec in records:
        if rec.result is not None:
            reports.append(rec.result)
            codes.append(rec.result.exit_code)
        elif rec.error is not None:
            if not isinstance(rec.error, CbdError | OSError):
                raise rec.error
            codes.append(_fail(rec.error, f"{rec.name}: ").exit_code)
        else:
            console.print(f"error: {rec.name}: {rec.status}", markup=False, highlight=False, soft_wrap=True)
            codes.append(INPUT_ERROR)

    if reports:
        text = render_json(reports) if as_json else "\n\n".join(render_human(r) for r in reports)
        out.print(text)
    return max(codes, default=0)


def _analyze_one(s: System, name: str, options: AnalysisOptions, *, as_json: bool) -> None:
    raise typer.Exit(_run([AnalysisTask(1, name, options, system=s)], as_json=as_json, workers=1))


# ──────────────────────────────────────────────────────────────────────────────
# analyze
# ──────────────────────────────────────────────────────────────────────────────


@app.command("analyze")
def analyze(
    files: Annotated[list[Path], typer.Argument(help="System files.", show_default=False)],
    mode: ModeOpt = Mode.extended,
    degree: DegreeOpt = False,
    witness: WitnessOpt = False,
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    as_json: JsonOpt = False,
    timing: TimingOpt = False,
    workers: WorkersOpt = None,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Decide noncontextuality of each system file; reports come out in argument order."""
    setup_logging(verbose, log_file)
    options = AnalysisOptions(mode, degree, witness, oracle, max_assignments, timing)
    LOG.info("Analyzing %d file(s) in %s mode", len(files), mode.value)
    tasks = [AnalysisTask(i, str(f), options, path=f) for i, f in enumerate(files, start=1)]
    raise typer.Exit(_run(tasks, as_json=as_json, workers=workers))


# ──────────────────────────────────────────────────────────────────────────────
# scenario group
# ──────────────────────────────────────────────────────────────────────────────


def _scenario(
    build: Callable[[], System],
    name: str,
    *,
    emit: bool,
    options: AnalysisOptions,
    as_json: bool,
) -> None:
    try:
        s = build()
    except CbdError as e:
        raise _fail(e) from e
    if emit:
        out.print(serialize_system(s), end="")
        raise typer.Exit(0)
    _analyze_one(s, name, options, as_json=as_json)


@scenario_app.command("double-slit")
def scenario_double_slit(
    p1: Annotated[str, typer.Option("--p1", help="Pr[hit], both slits closed.")] = "0",
    p2: Annotated[str, typer.Option("--p2", help="Pr[hit], left slit open.")] = "1/4",
    p3: Annotated[str, typer.Option("--p3", help="Pr[hit], right slit open.")] = "1/4",
    p4: Annotated[str, typer.Option("--p4", help="Pr[hit], both slits open.")] = "1/3",
    mode: ModeOpt = Mode.extended,
    degree: DegreeOpt = False,
    witness: WitnessOpt = False,
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    as_json: JsonOpt = False,
    timing: TimingOpt = False,
    emit: EmitOpt = False,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """One detector, four slit configurations, one singleton bunch each."""
    setup_logging(verbose, log_file)
    ps = [_rational(v, f"--p{i}") for i, v in enumerate((p1, p2, p3, p4), start=1)]
    _scenario(
        lambda: make_double_slit(*ps),
        "double-slit",
        emit=emit,
        options=AnalysisOptions(mode, degree, witness, oracle, max_assignments, timing),
        as_json=as_json,
    )


@scenario_app.command("cyclic4")
def scenario_cyclic4(
    correlations: Annotated[
        str,
        typer.Option("--correlations", help="E[ab] for c1=(A1,B1), c2=(B1,A2), c3=(A2,B2), c4=(B2,A1)."),
    ] = "1,1,1,-1",
    marginals: Annotated[
        str | None,
        typer.Option("--marginals", help="Eight E[x] in label order A1^c1,B1^c1,B1^c2,A2^c2,A2^c3,B2^c3,B2^c4,A1^c4."),
    ] = None,
    mode: ModeOpt = Mode.extended,
    degree: DegreeOpt = False,
    witness: WitnessOpt = False,
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    as_json: JsonOpt = False,
    timing: TimingOpt = False,
    emit: EmitOpt = False,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Cyclic rank-4 system given by pair correlations and marginal expectations."""
    setup_logging(verbose, log_file)
    e = _rationals(correlations, 4, "--correlations")
    m = _rationals(marginals, 8, "--marginals") if marginals is not None else [Fraction(0)] * 8
    _scenario(
        lambda: make_cyclic4(Cyclic4Params(tuple(e), tuple(m))),
        "cyclic4",
        emit=emit,
        options=AnalysisOptions(mode, degree, witness, oracle, max_assignments, timing),
        as_json=as_json,
    )


@scenario_app.command("griffiths")
def scenario_griffiths(
    b1: Annotated[str, typer.Option("--b1", help="Pmf of (q1,q2): p++,p+-,p-+,p--.")] = "1/4,1/4,1/4,1/4",
    b2: Annotated[str, typer.Option("--b2", help="Pmf of (q2,q3): p++,p+-,p-+,p--.")] = "1/4,1/4,1/4,1/4",
    mode: ModeOpt = Mode.extended,
    degree: DegreeOpt = False,
    witness: WitnessOpt = False,
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    as_json: JsonOpt = False,
    timing: TimingOpt = False,
    emit: EmitOpt = False,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Two contexts, c1=(q1,q2) and c2=(q2,q3), sharing only q2."""
    setup_logging(verbose, log_file)
    v1 = _rationals(b1, 4, "--b1")
    v2 = _rationals(b2, 4, "--b2")
    _scenario(
        lambda: make_griffiths(binary_pmf(v1), binary_pmf(v2)),
        "griffiths",
        emit=emit,
        options=AnalysisOptions(mode, degree, witness, oracle, max_assignments, timing),
        as_json=as_json,
    )


@scenario_app.command("random")
def scenario_random(
    shape: Annotated[SystemShape, typer.Option("--shape", help="System shape.")] = SystemShape.cyclic4,
    seed: Annotated[int, typer.Option("--seed", help="Generator seed.")] = 0,
    bound: Annotated[int, typer.Option("--bound", min=2, help="Largest probability denominator.")] = 8,
    contexts: Annotated[int, typer.Option("--contexts", min=1, help="Contexts of a single-content system.")] = 3,
    mode: ModeOpt = Mode.extended,
    degree: DegreeOpt = False,
    witness: WitnessOpt = False,
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    as_json: JsonOpt = False,
    timing: TimingOpt = False,
    emit: EmitOpt = False,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Seeded random system; the same seed always gives the same system."""
    setup_logging(verbose, log_file)
    _scenario(
        lambda: sample_random_system(shape, bound, seed, contexts=contexts),
        f"random-{shape.value}-{seed}",
        emit=emit,
        options=AnalysisOptions(mode, degree, witness, oracle, max_assignments, timing),
        as_json=as_json,
    )


# ──────────────────────────────────────────────────────────────────────────────
# show / residual / dump-lp
# ──────────────────────────────────────────────────────────────────────────────


def _load(path: Path) -> System:
    try:
        return load_system(path)
    except (CbdError, OSError) as e:
        raise _fail(e, f"{path}: ") from e


@app.command("show")
def show(
    file: Annotated[Path, typer.Argument(help="System file.")],
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Content-by-context matrix and connectedness summary."""
    setup_logging(verbose, log_file)
    s = _load(file)
    header, rows = render_matrix(s)
    labels = {c.id: c.label for c in s.contexts}

    table = Table(title=str(file))
    table.add_column("context")
    for q in header:
        table.add_column(q)
    table.add_column("label")
    for context, cells in rows:
        table.add_row(context, *cells, labels[context])
    out.print(table)

    report = is_consistently_connected(s)
    out.print(f"connectedness: {'consistent' if report.consistent else 'inconsistent'}")
    for content, pairs in report.mismatches.items():
        for (c1, c2), value in pairs.items():
            out.print(f"  {content} {c1},{c2}: {format_rational(value)}")


@app.command("residual")
def residual(
    p2: Annotated[str, typer.Argument(help="Pr[hit], left slit open.")],
    p3: Annotated[str, typer.Argument(help="Pr[hit], right slit open.")],
    p4: Annotated[str, typer.Argument(help="Pr[hit], both slits open.")],
):
    """p4 - (p2 + p3): the additivity gap. Not a contextuality criterion."""
    values = [_rational(v, name) for v, name in ((p2, "P2"), (p3, "P3"), (p4, "P4"))]
    try:
        r = feynman_residual(*values)
    except CbdError as e:
        raise _fail(e) from e
    out.print(f"residual: {format_rational(r)}")
    out.print("note: additivity is a physical assumption; a nonzero residual says nothing about contextuality")


@app.command("dump-lp")
def dump_lp_cmd(
    file: Annotated[Path, typer.Argument(help="System file.")],
    mode: ModeOpt = Mode.extended,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Print the coupling LP with the pair constraints of ``--mode``."""
    setup_logging(verbose, log_file)
    s = _load(file)
    try:
        lp = build_coupling_lp(s, max_assignments=max_assignments)
        targets = pair_targets(s, mode)
        for conn, pair in constrained_pairs(s):
            lp = add_equality_probability_constraint(lp, conn, pair, targets[(conn.content, pair)])
    except CbdError as e:
        raise _fail(e, f"{file}: ") from e
    out.print(dump_lp(lp), end="")


# ──────────────────────────────────────────────────────────────────────────────
# corpus
# ──────────────────────────────────────────────────────────────────────────────


@app.command("corpus")
def corpus(
    directory: Annotated[Path, typer.Argument(help="Corpus directory.")] = Path("corpus"),
    oracle: OracleOpt = False,
    max_assignments: MaxAssignmentsOpt = DEFAULT_MAX_ASSIGNMENTS,
    workers: WorkersOpt = None,
    verbose: VerboseOpt = 0,
    log_file: LogFileOpt = None,
):
    """Check every corpus entry's verdict and degree exactly."""
    setup_logging(verbose, log_file)
    try:
        summary = corpus_check(directory, oracle=oracle, max_assignments=max_assignments, workers=workers)
    except CbdError as e:
        raise _fail(e) from e
    for name in summary.passed:
        out.print(f"PASS {name}")
    for problem in summary.failures:
        out.print(f"FAIL {problem}")
    out.print(f"{len(summary.passed)} passed, {len(summary.failures)} failed")
    raise typer.Exit(0 if summary.ok else 1)


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI on ``argv`` and return its exit code instead of exiting."""
    try:
        app(args=list(argv) if argv is not None else None, prog_name="cbdcheck")
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else INPUT_ERROR
    return 0


if __name__ == "__main__":
    app()
