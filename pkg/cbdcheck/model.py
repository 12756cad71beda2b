"""
model.py
========

Exact-rational data model for systems of contextually labeled random variables.

A variable is identified by a :class:`Label` (content, context). Variables that
share a context form a :class:`Bunch` and carry a joint pmf; variables that
share a content form a :class:`Connection`. Variables in different bunches
have no joint distribution anywhere in these types: that is what makes them
stochastically unrelated.

All types are frozen. Probabilities are :class:`fractions.Fraction` end to end.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

from .errors import (
    ContentNotInBunchError,
    DuplicateLabelError,
    InvalidSystemError,
    PmfSumError,
    UnknownContextError,
    UnknownOutcomeError,
)

# outcome symbol -> probability, in outcome-set order
Distribution = dict[str, Fraction]
Outcomes = tuple[str, ...]


def _check_symbol(kind: str, value: str) -> None:
    if not value or any(ch.isspace() or ch in '#":' for ch in value):
        raise InvalidSystemError(f"invalid {kind} identifier {value!r}")


@dataclass(frozen=True)
class Content:
    """
    What a random variable measures or responds to (the subscript ``q``).

    Attributes:
        id (str): Symbolic identifier.
        outcomes (tuple[str, ...]): Ordered outcome symbols, at least two, all distinct.
    """

    id: str
    outcomes: Outcomes

    def __post_init__(self) -> None:
        _check_symbol("content", self.id)
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if len(self.outcomes) < 2:
            raise InvalidSystemError(f"content {self.id!r} needs at least two outcomes")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise DuplicateLabelError(f"content {self.id!r} repeats an outcome symbol")
        for v in self.outcomes:
            _check_symbol("outcome", v)


@dataclass(frozen=True)
class Context:
    """
    Conditions under which variables are recorded (the superscript ``c``).

    Attributes:
        id (str): Symbolic identifier, unique within a system.
        label (str): Optional human description, e.g. "both slits are open".
    """

    id: str
    label: str = ""

    def __post_init__(self) -> None:
        _check_symbol("context", self.id)
        if '"' in self.label or "\n" in self.label:
            raise InvalidSystemError(f"context {self.id!r} label may not contain quotes or newlines")


@dataclass(frozen=True, order=True)
class Label:
    """Identity of one random variable ``R_q^c``."""

    content: str
    context: str

    def __str__(self) -> str:
        return f"{self.content}^{self.context}"


@dataclass(frozen=True)
class Bunch:
    """
    Joint distribution of the variables recorded in one context.

    The pmf is keyed by outcome tuples, one coordinate per member in member
    order. Zero cells are dropped and the remaining keys are stored in
    outcome-set (product) order, so two bunches describing the same
    distribution compare equal regardless of how they were declared.

    Attributes:
        context (str): Context id.
        members (tuple[str, ...]): Distinct content ids.
        outcome_sets (tuple[tuple[str, ...], ...]): Outcome set of each member.
        pmf (Mapping[tuple[str, ...], Fraction]): Probability of each outcome tuple.
    """

    context: str
    members: tuple[str, ...]
    outcome_sets: tuple[Outcomes, ...]
    pmf: Mapping[Outcomes, Fraction] = field(hash=False)

    def __post_init__(self) -> None:
        members = tuple(self.members)
        outcome_sets = tuple(tuple(o) for o in self.outcome_sets)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "outcome_sets", outcome_sets)

        if not members:
            raise InvalidSystemError(f"bunch {self.context!r} has no members")
        if len(set(members)) != len(members):
            raise DuplicateLabelError(f"bunch {self.context!r} repeats a content")
        if len(outcome_sets) != len(members):
            raise InvalidSystemError(f"bunch {self.context!r}: one outcome set per member required")

        cells: dict[Outcomes, Fraction] = {}
        for key, raw in self.pmf.items():
            key = tuple(key)
            if len(key) != len(members):
                raise InvalidSystemError(
                    f"bunch {self.context!r}: outcome tuple {key} does not match {len(members)} members",
                )
            for q, v, allowed in zip(members, key, outcome_sets, strict=True):
                if v not in allowed:
                    raise UnknownOutcomeError(f"bunch {self.context!r}: {v!r} is not an outcome of {q!r}")
            p = Fraction(raw)
            if p < 0:
                raise InvalidSystemError(f"bunch {self.context!r}: negative probability {p} at {key}")
            if key in cells:
                raise DuplicateLabelError(f"bunch {self.context!r}: outcome tuple {key} listed twice")
            cells[key] = p

        total = sum(cells.values(), Fraction(0))
        if total != 1:
            raise PmfSumError(f"bunch {self.context!r}: probabilities sum to {total}, not 1")

        ordered = {k: cells[k] for k in itertools.product(*outcome_sets) if cells.get(k, 0) != 0}
        object.__setattr__(self, "pmf", MappingProxyType(ordered))

    @classmethod
    def of(cls, context: str, members: Sequence[Content], pmf: Mapping[Outcomes, Fraction]) -> Bunch:
        """Build a bunch from Content objects instead of bare ids."""
        return cls(
            context=context,
            members=tuple(c.id for c in members),
            outcome_sets=tuple(c.outcomes for c in members),
            pmf=pmf,
        )

    def labels(self) -> tuple[Label, ...]:
        return tuple(Label(q, self.context) for q in self.members)

    def cells(self) -> Iterator[tuple[Outcomes, Fraction]]:
        """Every outcome tuple in product order, zero cells included."""
        for key in itertools.product(*self.outcome_sets):
            yield key, self.pmf.get(key, Fraction(0))

    def marginal(self, q: str) -> Distribution:
        return marginal(self, q)


def marginal(b: Bunch, q: str) -> Distribution:
    """
    Distribution of member ``q`` of bunch ``b``.

    The result covers the whole outcome set of ``q`` (zeros included) and sums
    to exactly 1.

    Raises:
        ContentNotInBunchError: ``q`` is not a member of ``b``.
    """
    try:
        i = b.members.index(q)
    except ValueError:
        raise ContentNotInBunchError(f"content {q!r} is not measured in context {b.context!r}") from None
    out: Distribution = dict.fromkeys(b.outcome_sets[i], Fraction(0))
    for key, p in b.pmf.items():
        out[key[i]] += p
    return out


@dataclass(frozen=True)
class Connection:
    """
    All variables sharing one content, with their marginals.

    Attributes:
        content (str): Content id.
        variables (tuple[tuple[str, Distribution], ...]): (context id, marginal), by context id.
    """

    content: str
    variables: tuple[tuple[str, Distribution], ...] = field(hash=False)

    def contexts(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.variables)

    def distribution(self, context: str) -> Distribution:
        for c, d in self.variables:
            if c == context:
                return d
        raise UnknownContextError(f"context {context!r} is not in the connection of {self.content!r}")

    def pairs(self) -> list[tuple[str, str]]:
        """Unordered context pairs, each once, in canonical order."""
        return list(itertools.combinations(self.contexts(), 2))

    def labels(self) -> tuple[Label, ...]:
        return tuple(Label(self.content, c) for c in self.contexts())


@dataclass(frozen=True)
class System:
    """
    A set of bunches over shared content and context indices.

    Contents, contexts and bunches are kept sorted by id, which makes equality
    independent of declaration order.
    """

    contents: tuple[Content, ...]
    contexts: tuple[Context, ...]
    bunches: tuple[Bunch, ...]

    def __post_init__(self) -> None:
        contents = tuple(sorted(self.contents, key=lambda c: c.id))
        contexts = tuple(sorted(self.contexts, key=lambda c: c.id))
        bunches = tuple(sorted(self.bunches, key=lambda b: b.context))
        object.__setattr__(self, "contents", contents)
        object.__setattr__(self, "contexts", contexts)
        object.__setattr__(self, "bunches", bunches)

        if not bunches:
            raise InvalidSystemError("a system needs at least one bunch")
        _require_unique("content", (c.id for c in contents))
        _require_unique("context", (c.id for c in contexts))
        _require_unique("bunch for context", (b.context for b in bunches))

        by_id = {c.id: c for c in contents}
        declared = {c.id for c in contexts}
        for b in bunches:
            if b.context not in declared:
                raise UnknownContextError(f"bunch refers to undeclared context {b.context!r}")
            for q, outcomes in zip(b.members, b.outcome_sets, strict=True):
                if q not in by_id:
                    raise InvalidSystemError(f"bunch {b.context!r} refers to undeclared content {q!r}")
                if outcomes != by_id[q].outcomes:
                    raise UnknownOutcomeError(
                        f"bunch {b.context!r}: member {q!r} does not use the declared outcome set",
                    )
        missing = declared - {b.context for b in bunches}
        if missing:
            raise InvalidSystemError(f"context(s) without a bunch: {', '.join(sorted(missing))}")

    def content(self, content_id: str) -> Content:
        for c in self.contents:
            if c.id == content_id:
                return c
        raise InvalidSystemError(f"unknown content {content_id!r}")

    def context(self, context_id: str) -> Context:
        for c in self.contexts:
            if c.id == context_id:
                return c
        raise UnknownContextError(f"unknown context {context_id!r}")

    def bunch(self, context_id: str) -> Bunch:
        for b in self.bunches:
            if b.context == context_id:
                return b
        raise UnknownContextError(f"unknown context {context_id!r}")

    def labels(self) -> tuple[Label, ...]:
        """Every label, in bunch order then member order."""
        return tuple(label for b in self.bunches for label in b.labels())

    def outcomes_of(self, label: Label) -> Outcomes:
        return self.content(label.content).outcomes


def _require_unique(kind: str, ids: Iterable[str]) -> None:
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            raise DuplicateLabelError(f"duplicate {kind} {i!r}")
        seen.add(i)


def connections_of(s: System) -> list[Connection]:
    """
    One connection per content that appears in at least one bunch.

    Contents measured in a single context give singleton connections; they
    impose no coupling constraints.
    """
    out: list[Connection] = []
    for content in s.contents:
        variables = tuple((b.context, marginal(b, content.id)) for b in s.bunches if content.id in b.members)
        if variables:
            out.append(Connection(content=content.id, variables=variables))
    return out


def relabel_system(
    s: System,
    *,
    contents: Mapping[str, str] | None = None,
    contexts: Mapping[str, str] | None = None,
    outcomes: Mapping[str, Mapping[str, str]] | None = None,
) -> System:
    """
    Rename contents, contexts and outcome symbols consistently everywhere.

    Args:
        s (System): System to rename.
        contents (Mapping[str, str] | None): Old content id -> new id.
        contexts (Mapping[str, str] | None): Old context id -> new id.
        outcomes (Mapping[str, Mapping[str, str]] | None): Old content id -> (old symbol -> new symbol).

    Returns:
        System: The renamed system. Unmapped names are kept.
    """
    cmap = dict(contents or {})
    xmap = dict(contexts or {})
    omap = {q: dict(m) for q, m in (outcomes or {}).items()}

    def rq(q: str) -> str:
        return cmap.get(q, q)

    def rv(q: str, v: str) -> str:
        return omap.get(q, {}).get(v, v)

    new_contents = tuple(Content(rq(c.id), tuple(rv(c.id, v) for v in c.outcomes)) for c in s.contents)
    new_contexts = tuple(Context(xmap.get(c.id, c.id), c.label) for c in s.contexts)
    new_bunches = []
    for b in s.bunches:
        pmf = {tuple(rv(q, v) for q, v in zip(b.members, key, strict=True)): p for key, p in b.pmf.items()}
        new_bunches.append(
            Bunch(
                context=xmap.get(b.context, b.context),
                members=tuple(rq(q) for q in b.members),
                outcome_sets=tuple(tuple(rv(q, v) for v in o) for q, o in zip(b.members, b.outcome_sets, strict=True)),
                pmf=pmf,
            ),
        )
    return System(contents=new_contents, contexts=new_contexts, bunches=tuple(new_bunches))


def render_matrix(s: System) -> tuple[list[str], list[tuple[str, list[str]]]]:
    """
    Content-by-context matrix in the usual CbD layout.

    Returns:
        tuple: (content ids as column headers, [(context id, cells)]) where a
        cell reads ``q^c`` when the context measures the content and is empty
        otherwise.
    """
    header = [c.id for c in s.contents]
    rows = []
    for b in s.bunches:
        rows.append((b.context, [str(Label(q, b.context)) if q in b.members else "" for q in header]))
    return header, rows
