import random

import pytest
from hypothesis import given, settings, strategies as st

from lswtagger.core import AmbiguityInventory, TagInventory, WindowSpec
from lswtagger.corpus import AmbiguousText, Token, count_windows
from lswtagger.sw import sw_decide, sw_init, sw_iterate, sw_tag, sw_train

from oracles import random_inventory, random_text, sw_oracle


def _two_window_text():
    # context (EOS, EOS) holds {a,b} twice and {a} twice
    tags = TagInventory(["a", "b"])
    inv = AmbiguityInventory(tags)
    ab = inv.intern([1, 2])
    a = inv.intern([1])
    docs = [[Token("x", ab)], [Token("x", ab)], [Token("y", a)], [Token("y", a)]]
    return inv, AmbiguousText(docs)


def test_worked_example_by_hand():
    inv, text = _two_window_text()
    counts = count_windows(text, WindowSpec(1, 1))
    ctx = ((0,), (0,))
    model = sw_init(counts, inv)
    assert model.table == {((0,), 1, (0,)): 3.0, ((0,), 2, (0,)): 1.0}
    # the b entry halves every iteration; a takes up the rest
    for k in range(1, 6):
        model = sw_iterate(model, counts)
        assert model.table[(0,), 2, (0,)] == pytest.approx(2.0 ** -k, abs=1e-12)
        assert model.table[(0,), 1, (0,)] == pytest.approx(4.0 - 2.0 ** -k, abs=1e-12)
        assert model.context_totals()[ctx] == pytest.approx(4.0, rel=1e-12)
    assert model.iterations_run == 5


def test_iterate_rejects_other_window():
    inv, text = _two_window_text()
    model = sw_init(count_windows(text, WindowSpec(1, 1)), inv)
    with pytest.raises(ValueError):
        sw_iterate(model, count_windows(text, WindowSpec(2, 0)))


def test_zero_iterations_is_init():
    inv, text = _two_window_text()
    counts = count_windows(text, WindowSpec(1, 1))
    assert sw_train(counts, inv, iterations=0).table == sw_init(counts, inv).table


def test_stopping_rule():
    inv, text = _two_window_text()
    counts = count_windows(text, WindowSpec(1, 1))
    # the b entry keeps halving, so its relative change never drops below 0.5
    assert sw_train(counts, inv, iterations=20, epsilon=1e-3).iterations_run == 20
    # a lone ambiguous window is already a fixed point
    single = count_windows(AmbiguousText([[Token("x", inv.lookup[(1, 2)])]]), WindowSpec(1, 1))
    assert sw_train(single, inv, iterations=20).iterations_run == 1
    assert sw_train(single, inv, iterations=8, epsilon=0.0).iterations_run == 8


def test_tagging_picks_the_larger_count():
    inv, text = _two_window_text()
    model = sw_train(count_windows(text, WindowSpec(1, 1)), inv)
    assert sw_tag(model, text) == [1, 1, 1, 1]


def test_tie_goes_to_lowest_tag_id():
    tags = TagInventory(["a", "b"])
    inv = AmbiguityInventory(tags)
    ab = inv.intern([1, 2])
    text = AmbiguousText([[Token("x", ab)]])
    model = sw_train(count_windows(text, WindowSpec(1, 1)), inv)
    assert sw_decide(model, (0,), ab, (0,)) == (1, False)


def test_unseen_context_falls_back_to_global_mass():
    inv, text = _two_window_text()
    model = sw_train(count_windows(text, WindowSpec(1, 1)), inv)
    ab = inv.lookup[(1, 2)]
    tag, fallback = sw_decide(model, (ab,), ab, (0,))
    assert fallback and tag == 1
    model.global_tag_mass = {1: 0.5, 2: 3.0}
    assert sw_decide(model, (ab,), ab, (0,)) == (2, True)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([1, 2, 4, 8]),
       st.sampled_from([(1, 1), (2, 0), (0, 2), (1, 0)]))
def test_matches_oracle(seed, k, window):
    rng = random.Random(seed)
    inv = random_inventory(rng, rng.randint(2, 4), rng.randint(2, 8))
    text = random_text(rng, inv, rng.randint(1, 50))
    counts = count_windows(text, WindowSpec(*window))
    model = sw_train(counts, inv, iterations=k, epsilon=0.0)
    tags_of = {c: inv.tags_of(c) for c in range(len(inv))}
    expected = sw_oracle(dict(counts.counts), tags_of, k)
    assert set(model.table) == set(expected)
    for key, v in expected.items():
        assert abs(model.table[key] - v) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_context_totals_are_conserved(seed):
    rng = random.Random(seed)
    inv = random_inventory(rng, rng.randint(2, 6), rng.randint(2, 12))
    text = random_text(rng, inv, rng.randint(1, 200))
    counts = count_windows(text, WindowSpec(1, 1))
    observed: dict = {}
    for (left, _, right), n in counts.counts.items():
        observed[left, right] = observed.get((left, right), 0) + n
    model = sw_init(counts, inv)
    for _ in range(8):
        model = sw_iterate(model, counts)
        for ctx, total in model.context_totals().items():
            assert abs(total - observed[ctx]) <= 1e-9 * observed[ctx]
        assert all(v >= 0 for v in model.table.values())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_tags_always_lie_in_the_class(seed):
    rng = random.Random(seed)
    inv = random_inventory(rng, 4, 8)
    train = random_text(rng, inv, 100)
    test = random_text(rng, inv, 60)
    model = sw_train(count_windows(train, WindowSpec(1, 1)), inv)
    for tag, tok in zip(sw_tag(model, test), test):
        assert tag in inv.tags_of(tok.cls)
