"""
cbdcheck
========

Exact Contextuality-by-Default analysis of systems of random variables:

- System model and a plain-text system file format
- Coupling linear programs solved with an exact rational simplex
- Strict and extended noncontextuality, contextuality degree
- An independent brute-force oracle for cross-checking
- Reference scenarios, a regression corpus and a Typer CLI

Top-level exports:

    from cbdcheck import (
        System, Bunch, Content, Context, Label,
        parse_system, serialize_system,
        decide_noncontextuality, contextuality_degree, Mode,
        make_cyclic4, Cyclic4Params, make_double_slit, make_griffiths,
    )
"""

from __future__ import annotations

from .contextuality import (
    ConnectednessReport,
    Mode,
    Verdict,
    contextuality_degree,
    decide_noncontextuality,
    feynman_residual,
    is_consistently_connected,
    max_pair_equality,
    naive_identification_holds,
    pair_targets,
)
from .engine import run_analyses
from .errors import CbdError, InvalidSystemError
from .lp import GlobalAssignment, LinearProgram, build_coupling_lp, dump_lp
from .model import Bunch, Connection, Content, Context, Label, System, connections_of, marginal
from .oracle import brute_force_feasible, brute_force_optimize
from .scenarios import (
    Cyclic4Params,
    SystemShape,
    make_cyclic4,
    make_double_slit,
    make_griffiths,
    pr_box,
    sample_random_system,
)
from .rlog import setup_logging
from .simplex import LpOutcome, LpStatus, simplex_solve
from .sysfile import load_system, parse_system, serialize_system

__all__ = [  # noqa
    # model
    "Bunch",
    "Connection",
    "Content",
    "Context",
    "Label",
    "System",
    "connections_of",
    "marginal",
    # file format
    "load_system",
    "parse_system",
    "serialize_system",
    # LP
    "GlobalAssignment",
    "LinearProgram",
    "LpOutcome",
    "LpStatus",
    "build_coupling_lp",
    "dump_lp",
    "simplex_solve",
    "brute_force_feasible",
    "brute_force_optimize",
    # decisions
    "ConnectednessReport",
    "Mode",
    "Verdict",
    "contextuality_degree",
    "decide_noncontextuality",
    "feynman_residual",
    "is_consistently_connected",
    "max_pair_equality",
    "naive_identification_holds",
    "pair_targets",
    # scenarios
    "Cyclic4Params",
    "SystemShape",
    "make_cyclic4",
    "make_double_slit",
    "make_griffiths",
    "pr_box",
    "sample_random_system",
    # running
    "run_analyses",
    "setup_logging",
    # errors
    "CbdError",
    "InvalidSystemError",
]

__version__ = "0.1.0"
