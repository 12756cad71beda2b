"""
sysfile.py
==========

Plain-text system format, laid out like the content-by-context matrices used to
write CbD systems by hand::

    # CHSH-type system, one bunch per row of the matrix
    content A1 outcomes +1 -1
    context c1 "Alice a1, Bob b1"
    bunch c1 members A1 B1
      +1 +1 : 1/2
      -1 -1 : 0.5

Rules:
- ``#`` starts a comment (outside a quoted context label).
- Declarations may appear in any order; pmf rows are the indented lines that
  follow a ``bunch`` header.
- Probabilities are ``p/q`` fractions, integers or exact decimals (``0.25`` is 1/4).
- Omitted outcome tuples have probability 0.
- Files are UTF-8; a leading byte-order mark is ignored.

:func:`serialize_system` writes the canonical form: contents, then contexts,
then bunches, each sorted by id; nonzero pmf rows only, in outcome-set order;
every probability as ``p/q``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import (
    DuplicateLabelError,
    InvalidSystemError,
    PmfSumError,
    SystemFileSyntaxError,
    UnknownContextError,
    UnknownOutcomeError,
)
from .model import Bunch, Content, Context, System

LOG = logging.getLogger(__name__)

_FRACTION = re.compile(r"^[+-]?\d+/\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")

INDENT = "  "


def parse_rational(text: str) -> Fraction:
    """
    Parse ``p/q``, an integer, or an exact decimal literal.

    Raises:
        ValueError: Malformed literal or zero denominator.
    """
    text = text.strip()
    if _FRACTION.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    if _DECIMAL.match(text):
        return Fraction(text)
    raise ValueError(f"not a rational literal: {text!r}")


def format_rational(x: Fraction | int) -> str:
    """Render exactly as ``p/q`` (integers too, e.g. ``1/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ──────────────────────────────────────────────────────────────────────────────
# tokenizer
# ──────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class _Tok:
    text: str
    column: int
    quoted: bool = False


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    """Split on whitespace, honour double quotes, stop at an unquoted ``#``."""
    toks: list[_Tok] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            break
        if ch == '"':
            end = line.find('"', i + 1)
            if end < 0:
                raise SystemFileSyntaxError("unterminated quoted label", lineno, i + 1)
            toks.append(_Tok(line[i + 1 : end], i + 1, quoted=True))
            i = end + 1
            continue
        if ch == ":":
            toks.append(_Tok(":", i + 1))
            i += 1
            continue
        start = i
        while i < n and not line[i].isspace() and line[i] not in '#":':
            i += 1
        toks.append(_Tok(line[start:i], start + 1))
    return toks


# ──────────────────────────────────────────────────────────────────────────────
# parser
# ──────────────────────────────────────────────────────────────────────────────


@dataclass
class _RawBunch:
    context: _Tok
    members: list[_Tok]
    line: int
    rows: list[tuple[int, list[_Tok], _Tok]] = field(default_factory=list)


def parse_system(text: str) -> System:
    """
    Parse the text format into a validated :class:`System`.

    Raises:
        SystemFileSyntaxError: Malformed line (line/column reported).
        PmfSumError: A bunch does not sum to 1.
        DuplicateLabelError: A content, context, bunch or member is declared twice.
        UnknownOutcomeError: A pmf row uses a symbol outside the content's outcome set.
        InvalidSystemError: Any other model violation.
    """
    contents: dict[str, tuple[Content, int]] = {}
    contexts: dict[str, tuple[Context, int]] = {}
    raw_bunches: list[_RawBunch] = []
    current: _RawBunch | None = None

    for lineno, line in enumerate(text.removeprefix("\ufeff").splitlines(), start=1):
        toks = _tokenize(line, lineno)
        if not toks:
            continue
        indented = line[:1].isspace()

        if indented:
            if current is None:
                raise SystemFileSyntaxError("indented pmf row outside a bunch block", lineno, toks[0].column)
            current.rows.append(_parse_row(toks, lineno))
            continue

        current = None
        keyword = toks[0].text
        if keyword == "content":
            content = _parse_content(toks, lineno)
            if content.id in contents:
                raise DuplicateLabelError(f"line {lineno}: content {content.id!r} declared twice")
            contents[content.id] = (content, lineno)
        elif keyword == "context":
            context = _parse_context(toks, lineno)
            if context.id in contexts:
                raise DuplicateLabelError(f"line {lineno}: context {context.id!r} declared twice")
            contexts[context.id] = (context, lineno)
        elif keyword == "bunch":
            current = _parse_bunch_header(toks, lineno)
            raw_bunches.append(current)
        else:
            raise SystemFileSyntaxError(f"unknown declaration {keyword!r}", lineno, toks[0].column)

    bunches = [_build_bunch(rb, contents, contexts) for rb in raw_bunches]

    with_bunch = {b.context for b in bunches}
    for cid, (_, lineno) in contexts.items():
        if cid not in with_bunch:
            raise InvalidSystemError(f"line {lineno}: context {cid!r} has no bunch")

    s = System(
        contents=tuple(c for c, _ in contents.values()),
        contexts=tuple(c for c, _ in contexts.values()),
        bunches=tuple(bunches),
    )
    LOG.debug("Parsed system: %d contents, %d contexts", len(s.contents), len(s.contexts))
    return s


def _parse_content(toks: list[_Tok], lineno: int) -> Content:
    if len(toks) < 2:
        raise SystemFileSyntaxError("expected: content <id> outcomes <v1> <v2> ...", lineno, toks[0].column)
    if len(toks) < 3 or toks[2].text != "outcomes":
        col = toks[2].column if len(toks) > 2 else toks[1].column + len(toks[1].text)
        raise SystemFileSyntaxError("expected keyword 'outcomes'", lineno, col)
    if len(toks) < 5:
        raise SystemFileSyntaxError("a content needs at least two outcomes", lineno, toks[2].column)
    _no_quotes(toks, lineno)
    try:
        return Content(toks[1].text, tuple(t.text for t in toks[3:]))
    except InvalidSystemError as e:
        raise type(e)(f"line {lineno}: {e}") from None


def _parse_context(toks: list[_Tok], lineno: int) -> Context:
    if len(toks) < 2 or toks[1].quoted:
        raise SystemFileSyntaxError('expected: context <id> ["label"]', lineno, toks[0].column)
    if len(toks) > 3 or (len(toks) == 3 and not toks[2].quoted):
        raise SystemFileSyntaxError("context label must be a single quoted string", lineno, toks[2].column)
    label = toks[2].text if len(toks) == 3 else ""
    try:
        return Context(toks[1].text, label)
    except InvalidSystemError as e:
        raise type(e)(f"line {lineno}: {e}") from None


def _parse_bunch_header(toks: list[_Tok], lineno: int) -> _RawBunch:
    if len(toks) < 4 or toks[2].text != "members":
        col = toks[2].column if len(toks) > 2 else toks[0].column
        raise SystemFileSyntaxError("expected: bunch <context> members <q1> <q2> ...", lineno, col)
    _no_quotes(toks, lineno)
    return _RawBunch(context=toks[1], members=list(toks[3:]), line=lineno)


def _parse_row(toks: list[_Tok], lineno: int) -> tuple[int, list[_Tok], _Tok]:
    colons = [i for i, t in enumerate(toks) if t.text == ":" and not t.quoted]
    if len(colons) != 1:
        raise SystemFileSyntaxError("expected: <v1> <v2> ... : <probability>", lineno, toks[0].column)
    i = colons[0]
    if i == 0:
        raise SystemFileSyntaxError("missing outcome tuple before ':'", lineno, toks[0].column)
    if len(toks) != i + 2:
        col = toks[i].column + 1 if len(toks) == i + 1 else toks[i + 2].column
        raise SystemFileSyntaxError("expected exactly one probability after ':'", lineno, col)
    _no_quotes(toks, lineno)
    return lineno, toks[:i], toks[i + 1]


def _no_quotes(toks: list[_Tok], lineno: int) -> None:
    for t in toks:
        if t.quoted:
            raise SystemFileSyntaxError("quoted text is only allowed as a context label", lineno, t.column)


def _build_bunch(
    rb: _RawBunch,
    contents: dict[str, tuple[Content, int]],
    contexts: dict[str, tuple[Context, int]],
) -> Bunch:
    if rb.context.text not in contexts:
        raise UnknownContextError(
            f"line {rb.line}, column {rb.context.column}: bunch refers to undeclared context {rb.context.text!r}",
        )
    members: list[Content] = []
    for t in rb.members:
        if t.text not in contents:
            raise InvalidSystemError(f"line {rb.line}, column {t.column}: undeclared content {t.text!r}")
        if any(m.id == t.text for m in members):
            raise DuplicateLabelError(
                f"line {rb.line}, column {t.column}: label {t.text}^{rb.context.text} appears twice",
            )
        members.append(contents[t.text][0])

    pmf: dict[tuple[str, ...], Fraction] = {}
    for lineno, outcome_toks, prob_tok in rb.rows:
        if len(outcome_toks) != len(members):
            raise SystemFileSyntaxError(
                f"expected {len(members)} outcome(s), got {len(outcome_toks)}",
                lineno,
                outcome_toks[0].column,
            )
        for m, t in zip(members, outcome_toks, strict=True):
            if t.text not in m.outcomes:
                raise UnknownOutcomeError(
                    f"line {lineno}, column {t.column}: {t.text!r} is not an outcome of {m.id!r}",
                )
        key = tuple(t.text for t in outcome_toks)
        if key in pmf:
            raise DuplicateLabelError(f"line {lineno}: outcome tuple {' '.join(key)} listed twice")
        try:
            p = parse_rational(prob_tok.text)
        except ValueError as e:
            raise SystemFileSyntaxError(str(e), lineno, prob_tok.column) from None
        if p < 0:
            raise SystemFileSyntaxError(f"negative probability {prob_tok.text}", lineno, prob_tok.column)
        pmf[key] = p

    total = sum(pmf.values(), Fraction(0))
    if total != 1:
        raise PmfSumError(
            f"line {rb.line}: bunch {rb.context.text!r} probabilities sum to {format_rational(total)}, not 1/1",
        )
    return Bunch.of(rb.context.text, members, pmf)


# ──────────────────────────────────────────────────────────────────────────────
# serializer
# ──────────────────────────────────────────────────────────────────────────────


def serialize_system(s: System) -> str:
    """Canonical text form; ``parse_system(serialize_system(s)) == s``."""
    lines: list[str] = [f"content {c.id} outcomes {' '.join(c.outcomes)}" for c in s.contents]
    lines.append("")
    for c in s.contexts:
        lines.append(f'context {c.id} "{c.label}"' if c.label else f"context {c.id}")
    for b in s.bunches:
        lines.append("")
        lines.append(f"bunch {b.context} members {' '.join(b.members)}")
        lines.extend(f"{INDENT}{' '.join(key)} : {format_rational(p)}" for key, p in b.pmf.items())
    return "\n".join(lines) + "\n"


def load_system(path: Path) -> System:
    """
    Read and parse a system file.

    The file must be UTF-8; a leading byte-order mark is dropped.

    Raises:
        SystemFileSyntaxError: The bytes are not valid UTF-8, or the text is malformed.
        OSError: The file cannot be read.
    """
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        column = e.start - (data.rfind(b"\n", 0, e.start) + 1) + 1
        raise SystemFileSyntaxError(f"not valid UTF-8 at byte {e.start}", line, column) from e
    return parse_system(text)
