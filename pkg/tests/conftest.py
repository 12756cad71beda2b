from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from cbdcheck.model import Bunch, Content, Context, System
from cbdcheck.scenarios import Cyclic4Params, make_cyclic4, pr_box

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"

F = Fraction


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture
def pr() -> System:
    return pr_box()


@pytest.fixture
def chsh_3_4() -> System:
    """Consistent cyclic-4 with correlations 3/4, 3/4, 3/4, -3/4; degree 1/2."""
    return make_cyclic4(Cyclic4Params((F(3, 4), F(3, 4), F(3, 4), F(-3, 4))))


@pytest.fixture
def two_context_system() -> System:
    """x measured in c1 and c2 with Pr[x=+1] = 3/5 and 4/5."""
    x = Content("x", ("+1", "-1"))
    return System(
        contents=(x,),
        contexts=(Context("c1"), Context("c2")),
        bunches=(
            Bunch.of("c1", [x], {("+1",): F(3, 5), ("-1",): F(2, 5)}),
            Bunch.of("c2", [x], {("+1",): F(4, 5), ("-1",): F(1, 5)}),
        ),
    )


SYSTEM_TEXT = """\
# sample
content A outcomes +1 -1
content B outcomes +1 -1
context c1 "first context"
context c2
bunch c1 members A B
  +1 +1 : 1/2
  -1 -1 : 0.5
bunch c2 members B
  +1 : 1/2
  -1 : 1/2
"""


@pytest.fixture
def system_text() -> str:
    return SYSTEM_TEXT


@pytest.fixture
def system_file(tmp_path: Path) -> Path:
    p = tmp_path / "sample.system"
    p.write_text(SYSTEM_TEXT, encoding="utf-8")
    return p
