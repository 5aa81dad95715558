"""Sliding Window (SW) tagger.

Parameters are effective counts keyed by ``(left classes, tag, right classes)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AmbiguityInventory, WindowSpec
from .corpus import AmbiguousText, WindowCountTable, iter_windows
from .estimation import Expansion, iterate, pick, tag_mass

DEFAULT_ITERATIONS = 8
DEFAULT_EPSILON = 1e-6


@dataclass
class SwModel:
    spec: WindowSpec
    inv: AmbiguityInventory
    table: dict = field(default_factory=dict)
    global_tag_mass: dict = field(default_factory=dict)
    iterations_run: int = 0

    def context_totals(self) -> dict:
        totals: dict = {}
        for (left, _, right), v in self.table.items():
            totals[left, right] = totals.get((left, right), 0.0) + v
        return totals


def _expansion(counts: WindowCountTable, inv: AmbiguityInventory) -> Expansion:
    def expand(window):
        left, cls, right = window
        return [(left, t, right) for t in inv.tags_of(cls)]
    return Expansion.build(counts.counts, expand)


def _model(spec, inv, exp: Expansion, values: np.ndarray, iterations_run=0) -> SwModel:
    table = dict(zip(exp.keys, values.tolist()))
    return SwModel(spec, inv, table, tag_mass(table, lambda k: k[1]), iterations_run)


def _values(model: SwModel, exp: Expansion) -> np.ndarray:
    return np.array([model.table.get(k, 0.0) for k in exp.keys], dtype=np.float64)


def sw_init(counts: WindowCountTable, inv: AmbiguityInventory) -> SwModel:
    """Split each window's count evenly among the tags of its centre class."""
    exp = _expansion(counts, inv)
    values, _ = exp.initial()
    return _model(counts.spec, inv, exp, values)


def sw_iterate(model: SwModel, counts: WindowCountTable) -> SwModel:
    """One full re-estimation pass over ``counts``."""
    if model.spec != counts.spec:
        raise ValueError(f"model window {model.spec} does not match counts window {counts.spec}")
    exp = _expansion(counts, model.inv)
    values = exp.step(_values(model, exp))
    return _model(model.spec, model.inv, exp, values, model.iterations_run + 1)


def sw_train(counts: WindowCountTable, inv: AmbiguityInventory,
             iterations: int = DEFAULT_ITERATIONS, epsilon: float = DEFAULT_EPSILON) -> SwModel:
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    exp = _expansion(counts, inv)
    values, _ = exp.initial()
    values, done = iterate(exp, values, iterations, epsilon)
    return _model(counts.spec, inv, exp, values, done)


def sw_decide(model: SwModel, left: tuple, cls: int, right: tuple) -> tuple[int, bool]:
    """Tag for one window and whether the global-mass fallback decided it."""
    cands = model.inv.tags_of(cls)
    if len(cands) == 1:
        return cands[0], False
    scores = [model.table.get((left, t, right), 0.0) for t in cands]
    return pick(cands, scores, model.global_tag_mass)


def sw_tag(model: SwModel, text: AmbiguousText) -> list[int]:
    out = []
    cache: dict = {}
    for doc in text.classes():
        for window in iter_windows(doc, model.spec):
            tag = cache.get(window)
            if tag is None:
                tag = cache[window] = sw_decide(model, *window)[0]
            out.append(tag)
    return out
