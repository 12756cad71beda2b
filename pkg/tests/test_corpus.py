from __future__ import annotations

import shutil
from fractions import Fraction as F
from pathlib import Path

import pytest

from cbdcheck.contextuality import Mode
from cbdcheck.corpus import corpus_check, load_corpus
from cbdcheck.errors import CorpusError
from cbdcheck.sysfile import load_system, parse_system, serialize_system


@pytest.mark.corpus
def test_load_corpus_orders_entries(corpus_dir: Path) -> None:
    entries = load_corpus(corpus_dir)
    names = [e.name for e in entries]
    assert names[:3] == ["chsh_3_4[strict]", "chsh_3_4[extended]", "cyclic4_consistent[strict]"]
    pr = [e for e in entries if e.name.startswith("pr_box")]
    assert [(e.mode, e.noncontextual, e.degree) for e in pr] == [
        (Mode.strict, False, F(1)),
        (Mode.extended, False, F(1)),
    ]
    assert all(e.provenance for e in entries)


@pytest.mark.corpus
def test_corpus_passes(corpus_dir: Path) -> None:
    summary = corpus_check(corpus_dir, workers=2)
    assert summary.ok, summary.failures
    assert len(summary.passed) == len(load_corpus(corpus_dir))


@pytest.mark.corpus
def test_corpus_round_trip(corpus_dir: Path) -> None:
    """Every corpus system survives serialize → parse unchanged."""
    for path in sorted(corpus_dir.glob("*.system")):
        s = load_system(path)
        assert parse_system(serialize_system(s)) == s


@pytest.mark.corpus
def test_corpus_reports_wrong_expectation(tmp_path: Path, corpus_dir: Path) -> None:
    shutil.copy(corpus_dir / "pr_box.system", tmp_path)
    (tmp_path / "pr_box.expected").write_text(
        '[[check]]\nmode = "extended"\nnoncontextual = false\ndegree = "1/2"\n',
        encoding="utf-8",
    )
    summary = corpus_check(tmp_path)
    assert not summary.ok
    assert summary.failures == [
        "pr_box[extended]: expected contextual with degree 1/2, got contextual with degree 1/1",
    ]


@pytest.mark.corpus
def test_corpus_reports_analysis_errors(tmp_path: Path, corpus_dir: Path) -> None:
    shutil.copy(corpus_dir / "double_slit.system", tmp_path)
    (tmp_path / "double_slit.expected").write_text(
        '[[check]]\nmode = "strict"\nnoncontextual = true\ndegree = "0"\n',
        encoding="utf-8",
    )
    summary = corpus_check(tmp_path)
    assert len(summary.failures) == 1
    assert summary.failures[0].startswith("double_slit[strict]: strict mode needs")


@pytest.mark.corpus
@pytest.mark.parametrize(
    "files,match",
    [
        ({"a.system": "x"}, "missing its sidecar"),
        ({"a.expected": "[[check]]"}, "missing its system file"),
        ({"a.system": "x", "a.expected": "title = 1\n"}, "no \\[\\[check\\]\\] tables"),
        ({"a.system": "x", "a.expected": '[[check]]\nmode = "loose"\n'}, "malformed"),
        ({"a.system": "x", "a.expected": "[[check"}, "a.expected"),
    ],
)
def test_corpus_errors(tmp_path: Path, files: dict[str, str], match: str) -> None:
    for name, text in files.items():
        (tmp_path / name).write_text(text, encoding="utf-8")
    with pytest.raises(CorpusError, match=match):
        load_corpus(tmp_path)


@pytest.mark.corpus
def test_corpus_missing_directory(tmp_path: Path) -> None:
    with pytest.raises(CorpusError, match="not found"):
        load_corpus(tmp_path / "missing")
