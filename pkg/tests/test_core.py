import itertools

import pytest
from hypothesis import given, strategies as st

from lswtagger.core import (
    EOS,
    EOS_ID,
    AmbiguityInventory,
    FormatError,
    Lexicon,
    TaggerError,
    TagInventory,
    WindowSpec,
    intern_class,
    iter_tag_sequences,
    tag_sequences,
    tags_of,
)


def test_eos_is_first_tag_and_first_class():
    tags = TagInventory(["a", "b"])
    assert tags.id(EOS) == EOS_ID == 0
    inv = AmbiguityInventory(tags)
    assert inv.tags_of(0) == (EOS_ID,)
    assert len(inv) == 1


def test_intern_is_order_insensitive_and_dense():
    tags = TagInventory(["a", "b", "c"])
    inv = AmbiguityInventory(tags)
    x = intern_class([2, 1], inv)
    assert intern_class([1, 2], inv) == x
    assert intern_class([1, 1, 2], inv) == x
    y = intern_class([3], inv)
    assert (x, y) == (1, 2)
    assert tags_of(x, inv) == (1, 2)
    assert inv.is_ambiguous(x) and not inv.is_ambiguous(y)


def test_intern_rejects_empty_and_unknown():
    inv = AmbiguityInventory(TagInventory(["a"]))
    with pytest.raises(ValueError):
        inv.intern([])
    with pytest.raises(ValueError):
        inv.intern([7])


def test_frozen_inventory_refuses_new_classes():
    inv = AmbiguityInventory(TagInventory(["a", "b"]))
    c = inv.intern([1])
    inv.freeze()
    assert inv.intern([1]) == c
    with pytest.raises(TaggerError):
        inv.intern([1, 2])


def test_tag_sequences_example():
    # {det,pron} followed by {noun}: two readings, in tag-id order
    tags = TagInventory(["det", "noun", "pron"])
    inv = AmbiguityInventory(tags)
    dp = inv.intern_names(["det", "pron"])
    n = inv.intern_names(["noun"])
    assert tag_sequences([dp, n], inv) == [(1, 2), (3, 2)]
    assert tag_sequences([], inv) == [()]


@given(st.lists(st.sets(st.integers(1, 4), min_size=1, max_size=4), min_size=0, max_size=4))
def test_tag_sequences_is_cartesian_product(class_sets):
    inv = AmbiguityInventory(TagInventory(["a", "b", "c", "d"]))
    ids = [inv.intern(s) for s in class_sets]
    seqs = tag_sequences(ids, inv)
    expected = 1
    for s in class_sets:
        expected *= len(s)
    assert len(seqs) == expected == len(set(seqs))
    for seq in seqs:
        assert all(t in s for t, s in zip(seq, class_sets))
    assert seqs == list(iter_tag_sequences(ids, inv))
    assert seqs == sorted(seqs)


def test_tag_inventory_file_roundtrip(tmp_path):
    tags = TagInventory(["det", "noun", "verb"], open_class=["noun"])
    p = tmp_path / "tagset.txt"
    tags.write(p)
    back = TagInventory.from_file(p)
    assert back.names == tags.names
    assert back.open_class == tags.open_class
    assert back.digest() == tags.digest()


def test_tag_inventory_add_is_idempotent():
    tags = TagInventory(["a"])
    assert tags.add("a") == 1
    assert tags.add(EOS) == EOS_ID
    assert len(tags) == 2
    with pytest.raises(ValueError):
        tags.add("a b")
    with pytest.raises(ValueError):
        tags.mark_open(EOS)


def test_digest_depends_on_order():
    assert TagInventory(["a", "b"]).digest() != TagInventory(["b", "a"]).digest()


def test_lexicon_file(tmp_path):
    p = tmp_path / "lex.txt"
    p.write_text("# comment\nla\tdet,pron\ncasa\tnoun\n", encoding="utf-8")
    inv = AmbiguityInventory(TagInventory(["det", "noun", "pron"]))
    lex = Lexicon.from_file(p, inv)
    assert inv.tags_of(lex.get("la")) == (1, 3)
    assert lex.get("perro") is None
    out = tmp_path / "out.txt"
    lex.write(out)
    assert out.read_text(encoding="utf-8") == "la\tdet,pron\ncasa\tnoun\n"


def test_lexicon_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "lex.txt"
    p.write_text("la\tdet\ncasa\tnoun,bogus\n", encoding="utf-8")
    inv = AmbiguityInventory(TagInventory(["det", "noun"]))
    with pytest.raises(FormatError) as err:
        Lexicon.from_file(p, inv)
    assert err.value.line == 2


def test_lexicon_refuses_eos():
    inv = AmbiguityInventory(TagInventory(["a"]))
    with pytest.raises(ValueError):
        Lexicon(inv).add("x", [EOS_ID])


@pytest.mark.parametrize("text,expected", [
    ("-1,+1", (1, 1)),
    ("-2,-1", (2, 0)),
    ("+1,+2", (0, 2)),
    ("-1", (1, 0)),
    ("-3,-2,-1,+1,+2,+3", (3, 3)),
    ("+1, -1", (1, 1)),
])
def test_window_parse(text, expected):
    spec = WindowSpec.parse(text)
    assert (spec.n_minus, spec.n_plus) == expected


@pytest.mark.parametrize("text", ["0", "-2", "-1,-1", "+2", "-4,-3,-2,-1", "a", "", "-1,+1,+3"])
def test_window_parse_rejects(text):
    with pytest.raises(ValueError):
        WindowSpec.parse(text)


def test_window_label_and_width():
    assert WindowSpec(1, 1).label() == "(-1, +1)"
    assert WindowSpec(2, 0).label() == "(-2, -1)"
    assert WindowSpec(2, 1).width == 4
    with pytest.raises(ValueError):
        WindowSpec(0, 0)


def test_format_error_message():
    err = FormatError("bad thing", "f.txt", 3)
    assert "f.txt" in str(err) and "3" in str(err)


def test_inventory_sizes_grow_with_distinct_sets():
    inv = AmbiguityInventory(TagInventory(["a", "b", "c"]))
    for r in range(1, 4):
        for combo in itertools.combinations([1, 2, 3], r):
            inv.intern(combo)
    assert len(inv) == 1 + 7
