"""Light Sliding Window (LSW) tagger with optional forbid/enforce rules.

Parameters are effective counts keyed by ``(left tags, tag, right tags)``,
so the table is bounded by ``|tags| ** window width`` rather than growing
with the number of ambiguity classes.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .core import AmbiguityInventory, WindowSpec, iter_tag_sequences
from .corpus import AmbiguousText, WindowCountTable, iter_windows
from .estimation import Expansion, iterate, pick, tag_mass
from .rules import RuleSet
from .sw import DEFAULT_EPSILON, DEFAULT_ITERATIONS

log = logging.getLogger(__name__)


@dataclass
class LswModel:
    spec: WindowSpec
    inv: AmbiguityInventory
    table: dict = field(default_factory=dict)
    global_tag_mass: dict = field(default_factory=dict)
    rules_applied: bool = False
    rules_digest: str = ""
    iterations_run: int = 0

    @property
    def total_mass(self) -> float:
        return float(sum(self.table.values()))


def _split(spec: WindowSpec, seq: tuple) -> tuple:
    m = spec.n_minus
    return seq[:m], seq[m], seq[m + 1:]


def _expansion(counts: WindowCountTable, inv: AmbiguityInventory) -> Expansion:
    spec = counts.spec

    def expand(window):
        left, cls, right = window
        return [_split(spec, s) for s in iter_tag_sequences(left + (cls,) + right, inv)]
    return Expansion.build(counts.counts, expand)


def _validity(exp: Expansion, rules: RuleSet | None) -> np.ndarray | None:
    if not rules:
        return None
    ok = [rules.is_valid(left + (t,) + right) for left, t, right in exp.keys]
    return np.asarray(ok, dtype=bool)[exp.members]


def _model(spec, inv, exp, values, rules, iterations_run=0) -> LswModel:
    table = dict(zip(exp.keys, values.tolist()))
    return LswModel(spec, inv, table, tag_mass(table, lambda k: k[1]),
                    rules_applied=rules is not None,
                    rules_digest=rules.digest() if rules is not None else "",
                    iterations_run=iterations_run)


def _initial(exp: Expansion, rules: RuleSet | None) -> np.ndarray:
    values, fallbacks = exp.initial(_validity(exp, rules))
    if fallbacks:
        log.warning("%d window(s) admit no rule-valid tag sequence; "
                    "initialised uniformly over all their sequences", fallbacks)
    return values


def lsw_init(counts: WindowCountTable, inv: AmbiguityInventory, rules: RuleSet | None = None) -> LswModel:
    """Spread each window's count evenly over its valid tag sequences.

    Entries for sequences that break a rule start at exactly zero and, the
    update being multiplicative, stay there.
    """
    exp = _expansion(counts, inv)
    return _model(counts.spec, inv, exp, _initial(exp, rules), rules)


def lsw_iterate(model: LswModel, counts: WindowCountTable, inv: AmbiguityInventory | None = None) -> LswModel:
    if model.spec != counts.spec:
        raise ValueError(f"model window {model.spec} does not match counts window {counts.spec}")
    inv = inv or model.inv
    exp = _expansion(counts, inv)
    values = np.array([model.table.get(k, 0.0) for k in exp.keys], dtype=np.float64)
    new = _model(model.spec, inv, exp, exp.step(values), None, model.iterations_run + 1)
    new.rules_applied, new.rules_digest = model.rules_applied, model.rules_digest
    return new


def lsw_train(counts: WindowCountTable, inv: AmbiguityInventory, rules: RuleSet | None = None,
              iterations: int = DEFAULT_ITERATIONS, epsilon: float = DEFAULT_EPSILON) -> LswModel:
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    exp = _expansion(counts, inv)
    values, done = iterate(exp, _initial(exp, rules), iterations, epsilon)
    return _model(counts.spec, inv, exp, values, rules, done)


def lsw_scores(model: LswModel, left: tuple, cls: int, right: tuple) -> tuple[tuple, list[float]]:
    """Candidate tags of ``cls`` and their summed effective counts over all context readings."""
    inv = model.inv
    cands = inv.tags_of(cls)
    lefts = list(iter_tag_sequences(left, inv))
    rights = list(iter_tag_sequences(right, inv))
    table = model.table
    scores = []
    for t in cands:
        scores.append(sum(table.get((e1, t, e2), 0.0)
                          for e1, e2 in itertools.product(lefts, rights)))
    return cands, scores


def lsw_decide(model: LswModel, left: tuple, cls: int, right: tuple) -> tuple[int, bool]:
    cands = model.inv.tags_of(cls)
    if len(cands) == 1:
        return cands[0], False
    cands, scores = lsw_scores(model, left, cls, right)
    return pick(cands, scores, model.global_tag_mass)


def lsw_tag(model: LswModel, text: AmbiguousText) -> list[int]:
    out = []
    cache: dict = {}
    for doc in text.classes():
        for window in iter_windows(doc, model.spec):
            tag = cache.get(window)
            if tag is None:
                tag = cache[window] = lsw_decide(model, *window)[0]
            out.append(tag)
    return out


def parameter_bound(spec: WindowSpec, n_tags: int) -> int:
    return n_tags ** spec.width
