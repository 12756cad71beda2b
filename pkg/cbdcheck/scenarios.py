"""
scenarios.py
============

Generators for the reference systems and seeded random samplers.

- **double slit**: one binary content ``hit`` recorded in four contexts (which
  slits are open), one singleton bunch per context.
- **cyclic rank 4** (CHSH layout): contents A1, B1, A2, B2 and four two-member
  bunches c1=(A1,B1), c2=(B1,A2), c3=(A2,B2), c4=(B2,A1).
- **Griffiths** two-context system: c1=(q1,q2), c2=(q2,q3); only q2 is shared.

All binary contents use the outcomes ``+1`` and ``-1`` in that order.
"""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import InvalidParameterError
from .model import Bunch, Content, Context, System

PLUS = "+1"
MINUS = "-1"
BINARY = (PLUS, MINUS)
BINARY_CELLS = ((PLUS, PLUS), (PLUS, MINUS), (MINUS, PLUS), (MINUS, MINUS))

DOUBLE_SLIT_CONTEXTS = (
    ("c1", "both slits are closed"),
    ("c2", "only the left slit is open"),
    ("c3", "only the right slit is open"),
    ("c4", "both slits are open"),
)

CYCLIC4_CONTENTS = ("A1", "B1", "A2", "B2")
CYCLIC4_BUNCHES = (
    ("c1", ("A1", "B1")),
    ("c2", ("B1", "A2")),
    ("c3", ("A2", "B2")),
    ("c4", ("B2", "A1")),
)

Probability = Fraction | int | str


def _probability(p: Probability, what: str) -> Fraction:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"{what} = {p} is outside [0, 1]")
    return p


def _expectation(e: Probability, what: str) -> Fraction:
    e = Fraction(e)
    if not -1 <= e <= 1:
        raise InvalidParameterError(f"{what} = {e} is outside [-1, 1]")
    return e


def binary_pmf(values: Sequence[Probability]) -> dict[tuple[str, str], Fraction]:
    """Pmf of two binary variables from ``(p++, p+-, p-+, p--)``."""
    if len(values) != 4:
        raise InvalidParameterError(f"a two-variable binary pmf needs 4 cells, got {len(values)}")
    return {cell: _probability(v, f"Pr{cell}") for cell, v in zip(BINARY_CELLS, values, strict=True)}


# ──────────────────────────────────────────────────────────────────────────────
# single content / double slit
# ──────────────────────────────────────────────────────────────────────────────


def make_single_content(
    probabilities: Sequence[Probability],
    *,
    content: str = "q",
    labels: Sequence[str] | None = None,
) -> System:
    """
    One binary content recorded in ``len(probabilities)`` contexts ``c1..cn``.

    Args:
        probabilities (Sequence): ``Pr[R^c = +1]`` per context.
        content (str): Content id.
        labels (Sequence[str] | None): Optional human label per context.
    """
    if not probabilities:
        raise InvalidParameterError("at least one context is needed")
    labels = list(labels) if labels is not None else [""] * len(probabilities)
    q = Content(content, BINARY)
    contexts, bunches = [], []
    for i, (raw, label) in enumerate(zip(probabilities, labels, strict=True), start=1):
        p = _probability(raw, f"Pr[{content}^c{i} = +1]")
        contexts.append(Context(f"c{i}", label))
        bunches.append(Bunch.of(f"c{i}", [q], {(PLUS,): p, (MINUS,): 1 - p}))
    return System(contents=(q,), contexts=tuple(contexts), bunches=tuple(bunches))


def make_double_slit(p1: Probability, p2: Probability, p3: Probability, p4: Probability) -> System:
    """
    Double-slit system: ``Pr[hit]`` with both slits closed, left only, right only, both open.

    Raises:
        InvalidParameterError: A probability outside [0, 1].
    """
    return make_single_content(
        [p1, p2, p3, p4],
        content="hit",
        labels=[label for _, label in DOUBLE_SLIT_CONTEXTS],
    )


# ──────────────────────────────────────────────────────────────────────────────
# cyclic rank 4
# ──────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Cyclic4Params:
    """
    Expectation parameters of a cyclic rank-4 system.

    Attributes:
        correlations (tuple[Fraction, ...]): ``E[ab]`` for bunches c1..c4, i.e. for
            (A1,B1), (B1,A2), (A2,B2), (B2,A1).
        marginals (tuple[Fraction, ...]): Eight ``E[x]`` values in label order
            A1^c1, B1^c1, B1^c2, A2^c2, A2^c3, B2^c3, B2^c4, A1^c4.
    """

    correlations: tuple[Fraction, ...]
    marginals: tuple[Fraction, ...] = (Fraction(0),) * 8

    def __post_init__(self) -> None:
        if len(self.correlations) != 4:
            raise InvalidParameterError(f"expected 4 correlations, got {len(self.correlations)}")
        if len(self.marginals) != 8:
            raise InvalidParameterError(f"expected 8 marginal expectations, got {len(self.marginals)}")
        object.__setattr__(
            self,
            "correlations",
            tuple(_expectation(e, f"correlation {i}") for i, e in enumerate(self.correlations, start=1)),
        )
        object.__setattr__(
            self,
            "marginals",
            tuple(_expectation(m, f"marginal {i}") for i, m in enumerate(self.marginals, start=1)),
        )
        for k, (context, _) in enumerate(CYCLIC4_BUNCHES):
            for cell, p in self.cells(k).items():
                if p < 0:
                    raise InvalidParameterError(
                        f"bunch {context}: (e, m1, m2) = ({self.correlations[k]}, {self.marginals[2 * k]}, "
                        f"{self.marginals[2 * k + 1]}) gives Pr{cell} = {p} < 0",
                    )

    @classmethod
    def consistent(
        cls,
        correlations: Sequence[Probability],
        content_marginals: Mapping[str, Probability] | None = None,
    ) -> Cyclic4Params:
        """Parameters where each content has one expectation in both of its contexts."""
        m = {q: Fraction(0) for q in CYCLIC4_CONTENTS}
        m.update({q: Fraction(v) for q, v in (content_marginals or {}).items()})
        marginals = tuple(m[q] for _, members in CYCLIC4_BUNCHES for q in members)
        return cls(tuple(Fraction(e) for e in correlations), marginals)

    @property
    def e11(self) -> Fraction:
        return self.correlations[0]

    @property
    def e21(self) -> Fraction:
        return self.correlations[1]

    @property
    def e22(self) -> Fraction:
        return self.correlations[2]

    @property
    def e12(self) -> Fraction:
        return self.correlations[3]

    def cells(self, k: int) -> dict[tuple[str, str], Fraction]:
        """Pmf of bunch ``k`` (0-based): ``(1 + s_a m_a + s_b m_b + s_a s_b e) / 4``."""
        e, ma, mb = self.correlations[k], self.marginals[2 * k], self.marginals[2 * k + 1]
        sign = {PLUS: 1, MINUS: -1}
        return {
            (a, b): (1 + sign[a] * ma + sign[b] * mb + sign[a] * sign[b] * e) / 4 for a, b in BINARY_CELLS
        }


def make_cyclic4(params: Cyclic4Params) -> System:
    """Cyclic rank-4 system with the bunch pmfs given by ``params``."""
    contents = {q: Content(q, BINARY) for q in CYCLIC4_CONTENTS}
    bunches = tuple(
        Bunch.of(context, [contents[q] for q in members], params.cells(k))
        for k, (context, members) in enumerate(CYCLIC4_BUNCHES)
    )
    return System(
        contents=tuple(contents.values()),
        contexts=tuple(Context(c) for c, _ in CYCLIC4_BUNCHES),
        bunches=bunches,
    )


def pr_box() -> System:
    """Three perfect correlations and one perfect anticorrelation, uniform marginals."""
    return make_cyclic4(Cyclic4Params((1, 1, 1, -1)))


def deterministic_cyclic4() -> System:
    """Every one of the eight variables is ``+1`` with probability 1."""
    return make_cyclic4(Cyclic4Params((1, 1, 1, 1), (1,) * 8))


# ──────────────────────────────────────────────────────────────────────────────
# Griffiths two-context system
# ──────────────────────────────────────────────────────────────────────────────


def make_griffiths(
    b1: Mapping[tuple[str, str], Probability],
    b2: Mapping[tuple[str, str], Probability],
) -> System:
    """
    Two contexts sharing one content: c1 measures (q1, q2), c2 measures (q2, q3).

    Args:
        b1: Pmf over (q1, q2) outcome pairs.
        b2: Pmf over (q2, q3) outcome pairs.

    Raises:
        InvalidSystemError: Either pmf is invalid.
    """
    q1, q2, q3 = (Content(q, BINARY) for q in ("q1", "q2", "q3"))
    return System(
        contents=(q1, q2, q3),
        contexts=(Context("c1"), Context("c2")),
        bunches=(
            Bunch.of("c1", [q1, q2], {k: Fraction(v) for k, v in b1.items()}),
            Bunch.of("c2", [q2, q3], {k: Fraction(v) for k, v in b2.items()}),
        ),
    )


# ──────────────────────────────────────────────────────────────────────────────
# random systems
# ──────────────────────────────────────────────────────────────────────────────


class SystemShape(str, Enum):
    cyclic4 = "cyclic4"
    cyclic4_consistent = "cyclic4-consistent"
    griffiths = "griffiths"
    single_content = "single-content"


def _grid_pmf(rng: random.Random, cells: int, denominator: int) -> list[Fraction]:
    """Uniform over pmfs with ``cells`` entries in ``{0, 1/d, ..., 1}``, by rejection."""
    while True:
        nums = [rng.randint(0, denominator) for _ in range(cells - 1)]
        last = denominator - sum(nums)
        if last >= 0:
            return [Fraction(k, denominator) for k in (*nums, last)]


def _consistent_pair(rng: random.Random, pa: Fraction, pb: Fraction, denominator: int) -> list[Fraction]:
    """A 2x2 pmf on the ``1/d`` grid with ``Pr[a=+1] = pa`` and ``Pr[b=+1] = pb``."""
    lo = max(Fraction(0), pa + pb - 1) * denominator
    hi = min(pa, pb) * denominator
    t = Fraction(rng.randint(int(lo), int(hi)), denominator)
    return [t, pa - t, pb - t, 1 - pa - pb + t]


def sample_random_system(
    shape: SystemShape | str,
    denominator_bound: int,
    seed: int,
    *,
    contexts: int = 3,
) -> System:
    """
    Seeded random system of the given shape; every probability has denominator ≤ ``denominator_bound``.

    Args:
        shape (SystemShape | str): cyclic4 (independent bunches), cyclic4-consistent,
            griffiths, or single-content.
        denominator_bound (int): At least 2.
        seed (int): Same seed, same system.
        contexts (int): Number of contexts for single-content systems.
    """
    shape = SystemShape(shape)
    if denominator_bound < 2:
        raise InvalidParameterError("denominator_bound must be at least 2")
    rng = random.Random(seed)
    d = rng.randint(2, denominator_bound)

    if shape is SystemShape.single_content:
        return make_single_content([Fraction(rng.randint(0, d), d) for _ in range(contexts)])

    if shape is SystemShape.griffiths:
        return make_griffiths(binary_pmf(_grid_pmf(rng, 4, d)), binary_pmf(_grid_pmf(rng, 4, d)))

    contents = {q: Content(q, BINARY) for q in CYCLIC4_CONTENTS}
    if shape is SystemShape.cyclic4_consistent:
        p = {q: Fraction(rng.randint(0, d), d) for q in CYCLIC4_CONTENTS}
        pmfs = [_consistent_pair(rng, p[a], p[b], d) for _, (a, b) in CYCLIC4_BUNCHES]
    else:
        pmfs = [_grid_pmf(rng, 4, d) for _ in CYCLIC4_BUNCHES]
    return System(
        contents=tuple(contents.values()),
        contexts=tuple(Context(c) for c, _ in CYCLIC4_BUNCHES),
        bunches=tuple(
            Bunch.of(c, [contents[q] for q in members], binary_pmf(pmf))
            for (c, members), pmf in zip(CYCLIC4_BUNCHES, pmfs, strict=True)
        ),
    )
