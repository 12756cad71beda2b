from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbdcheck.contextuality import (
    Mode,
    contextuality_degree,
    decide_noncontextuality,
    feynman_residual,
    is_consistently_connected,
    max_pair_equality,
    max_pair_equality_by_simplex,
    naive_identification_holds,
    pair_targets,
    total_variation,
)
from cbdcheck.errors import (
    InconsistentConnectednessError,
    InvalidParameterError,
    OutcomeSetMismatchError,
    SystemTooLargeError,
)
from cbdcheck.model import Bunch, Content, System, relabel_system
from cbdcheck.scenarios import (
    Cyclic4Params,
    SystemShape,
    binary_pmf,
    make_cyclic4,
    make_griffiths,
    sample_random_system,
)

BERN_3_5 = {"+1": F(3, 5), "-1": F(2, 5)}
BERN_4_5 = {"+1": F(4, 5), "-1": F(1, 5)}


@st.composite
def distributions(draw, size: int = 3) -> dict[str, F]:
    weights = draw(st.lists(st.integers(0, 12), min_size=size, max_size=size).filter(lambda w: sum(w) > 0))
    total = sum(weights)
    return {f"v{i}": F(w, total) for i, w in enumerate(weights)}


@pytest.mark.contextuality
def test_connectedness_report(two_context_system: System, pr: System) -> None:
    report = is_consistently_connected(two_context_system)
    assert not report.consistent
    assert report.mismatches == {"x": {("c1", "c2"): F(1, 5)}}
    assert is_consistently_connected(pr).consistent


@pytest.mark.contextuality
def test_max_pair_equality() -> None:
    assert max_pair_equality(BERN_3_5, BERN_4_5) == F(4, 5)
    assert max_pair_equality(BERN_3_5, BERN_3_5) == 1
    assert total_variation(BERN_3_5, BERN_4_5) == F(1, 5)
    with pytest.raises(OutcomeSetMismatchError):
        max_pair_equality(BERN_3_5, {"a": F(1, 2), "b": F(1, 2)})


@pytest.mark.contextuality
@settings(max_examples=30, deadline=None)
@given(distributions(), distributions())
def test_max_pair_equality_is_symmetric_and_matches_lp(d1: dict[str, F], d2: dict[str, F]) -> None:
    value = max_pair_equality(d1, d2)
    assert value == max_pair_equality(d2, d1)
    assert value == 1 - total_variation(d1, d2)
    assert value == max_pair_equality_by_simplex(d1, d2)


@pytest.mark.contextuality
def test_pair_targets(two_context_system: System) -> None:
    assert pair_targets(two_context_system, Mode.strict) == {("x", ("c1", "c2")): F(1)}
    assert pair_targets(two_context_system, "extended") == {("x", ("c1", "c2")): F(4, 5)}


@pytest.mark.contextuality
def test_inconsistent_pair_is_extended_noncontextual(two_context_system: System) -> None:
    v = decide_noncontextuality(two_context_system)
    assert v.mode is Mode.extended
    assert v.noncontextual
    assert v.degree == 0
    assert v.witness is not None and sum(v.witness.values()) == 1
    assert v.achieved == v.pair_targets
    with pytest.raises(InconsistentConnectednessError):
        decide_noncontextuality(two_context_system, Mode.strict)


@pytest.mark.contextuality
@pytest.mark.parametrize("mode", [Mode.strict, Mode.extended])
@pytest.mark.parametrize("oracle", [False, True])
def test_pr_box_degree_is_one(pr: System, mode: Mode, oracle: bool) -> None:
    v = decide_noncontextuality(pr, mode, oracle=oracle)
    assert not v.noncontextual
    assert v.witness is None
    assert v.degree == 1
    assert sum(v.pair_targets[k] - v.achieved[k] for k in v.pair_targets) == 1


@pytest.mark.contextuality
@pytest.mark.parametrize("oracle", [False, True])
def test_chsh_three_quarters_degree(chsh_3_4: System, oracle: bool) -> None:
    assert contextuality_degree(chsh_3_4, oracle=oracle) == F(1, 2)
    strict = decide_noncontextuality(chsh_3_4, Mode.strict, oracle=oracle)
    assert (strict.noncontextual, strict.degree) == (False, F(1, 2))


@pytest.mark.contextuality
def test_griffiths_uniform_is_noncontextual() -> None:
    uniform = binary_pmf([F(1, 4)] * 4)
    s = make_griffiths(uniform, uniform)
    for mode in Mode:
        v = decide_noncontextuality(s, mode)
        assert v.noncontextual
        assert v.pair_targets == {("q2", ("c1", "c2")): F(1)}


@pytest.mark.contextuality
def test_naive_identification(chsh_3_4: System, two_context_system: System) -> None:
    inside = make_cyclic4(Cyclic4Params((F(1, 2), F(1, 2), F(1, 2), F(0))))
    assert naive_identification_holds(inside)
    assert not naive_identification_holds(chsh_3_4)
    assert not naive_identification_holds(two_context_system)


@pytest.mark.contextuality
def test_size_cap_propagates(pr: System) -> None:
    with pytest.raises(SystemTooLargeError):
        decide_noncontextuality(pr, max_assignments=100)


@pytest.mark.contextuality
def test_feynman_residual() -> None:
    assert feynman_residual(F(1, 4), F(1, 4), F(1, 3)) == F(-1, 6)
    assert feynman_residual(F(1, 4), F(1, 4), F(1, 2)) == 0
    with pytest.raises(InvalidParameterError):
        feynman_residual(F(1, 4), F(5, 4), F(1, 2))


@pytest.mark.contextuality
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([SystemShape.cyclic4, SystemShape.griffiths]))
def test_verdict_is_invariant_under_relabeling(seed: int, shape: SystemShape) -> None:
    s = sample_random_system(shape, 6, seed)
    contents = {c.id: f"k{i}" for i, c in enumerate(reversed(s.contents))}
    contexts = {c.id: f"z{i}" for i, c in enumerate(reversed(s.contexts))}
    outcomes = {c.id: {"+1": "up", "-1": "down"} for c in s.contents}
    renamed = relabel_system(s, contents=contents, contexts=contexts, outcomes=outcomes)
    a, b = decide_noncontextuality(s), decide_noncontextuality(renamed)
    assert (a.noncontextual, a.degree) == (b.noncontextual, b.degree)


def _reverse_outcome_order(s: System) -> System:
    return System(
        contents=tuple(Content(c.id, tuple(reversed(c.outcomes))) for c in s.contents),
        contexts=s.contexts,
        bunches=tuple(
            Bunch(b.context, b.members, tuple(tuple(reversed(o)) for o in b.outcome_sets), dict(b.pmf))
            for b in s.bunches
        ),
    )


@pytest.mark.contextuality
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([SystemShape.cyclic4, SystemShape.griffiths]))
def test_verdict_is_invariant_under_outcome_swaps(seed: int, shape: SystemShape) -> None:
    s = sample_random_system(shape, 6, seed)
    flipped = {c.id: {"+1": "-1", "-1": "+1"} for c in s.contents[::2]}
    swapped = relabel_system(s, outcomes=flipped)
    assert swapped.contents[0].outcomes == ("-1", "+1")
    reordered = _reverse_outcome_order(s)
    a = decide_noncontextuality(s)
    for other in (swapped, reordered):
        b = decide_noncontextuality(other)
        assert (a.noncontextual, a.degree) == (b.noncontextual, b.degree)


@pytest.mark.contextuality
def test_pr_box_degree_survives_outcome_swap(pr: System) -> None:
    swapped = relabel_system(pr, outcomes={c.id: {"+1": "-1", "-1": "+1"} for c in pr.contents})
    assert swapped.contents[0].outcomes == ("-1", "+1")
    for s in (swapped, _reverse_outcome_order(pr)):
        v = decide_noncontextuality(s)
        assert not v.noncontextual
        assert v.degree == 1
