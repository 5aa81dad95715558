import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import lswtagger  # noqa: E402
from lswtagger.core import AmbiguityInventory, Lexicon, TagInventory  # noqa: E402

FIXTURE_DIR = Path(lswtagger.__file__).parent / "data" / "fixture"
SYNTH_SPEC = Path(lswtagger.__file__).parent / "data" / "function_words.synth"

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR


@pytest.fixture
def toy():
    """det/noun/verb/pron with a handful of classes, EOS is id 0."""
    tags = TagInventory(["det", "noun", "verb", "pron"], open_class=["noun", "verb"])
    inv = AmbiguityInventory(tags)
    lex = Lexicon(inv)
    lex.add("la", [tags.id("det"), tags.id("pron")])
    lex.add("el", [tags.id("det")])
    lex.add("casa", [tags.id("noun")])
    lex.add("come", [tags.id("verb")])
    lex.add("vino", [tags.id("noun"), tags.id("verb")])
    return tags, inv, lex


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
