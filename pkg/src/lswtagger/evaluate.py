"""Accuracy measurement and learning-curve sweeps."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .core import AmbiguityInventory, WindowSpec
from .corpus import AmbiguousText, count_windows
from .hmm import HmmModel, hmm_init, hmm_tag, hmm_train
from .lsw import LswModel, lsw_tag, lsw_train, parameter_bound
from .rules import RuleSet
from .sw import DEFAULT_EPSILON, DEFAULT_ITERATIONS, SwModel, sw_tag, sw_train


@dataclass(frozen=True)
class EvalReport:
    total: int
    correct: int
    ambiguous_total: int
    ambiguous_correct: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 1.0

    @property
    def ambiguous_accuracy(self) -> float:
        # vacuously perfect when the test set has no ambiguous tokens
        return self.ambiguous_correct / self.ambiguous_total if self.ambiguous_total else 1.0

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("Tokens", str(self.total)),
            ("Correct", str(self.correct)),
            ("Accuracy", f"{100 * self.accuracy:.2f}%"),
            ("Ambiguous tokens", str(self.ambiguous_total)),
            ("Ambiguous correct", str(self.ambiguous_correct)),
            ("Ambiguous accuracy", f"{100 * self.ambiguous_accuracy:.2f}%"),
        ]


def accuracy(pred: Sequence[int], gold: AmbiguousText, inv: AmbiguityInventory) -> EvalReport:
    tokens = gold.tokens
    if len(pred) != len(tokens):
        raise ValueError(f"prediction has {len(pred)} tags for {len(tokens)} tokens")
    total = correct = amb_total = amb_correct = 0
    for i, (p, tok) in enumerate(zip(pred, tokens)):
        if tok.gold is None:
            raise ValueError(f"token {i} ({tok.surface!r}) has no gold tag")
        hit = p == tok.gold
        total += 1
        correct += hit
        if inv.is_ambiguous(tok.cls):
            amb_total += 1
            amb_correct += hit
    return EvalReport(total, correct, amb_total, amb_correct)


@dataclass(frozen=True)
class TaggerConfig:
    """One tagger setting in a sweep: kind ``sw``, ``lsw`` or ``hmm``."""

    kind: str
    spec: WindowSpec | None = None
    rules: RuleSet | None = None
    iterations: int = DEFAULT_ITERATIONS
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in ("sw", "lsw", "hmm"):
            raise ValueError(f"unknown tagger kind {self.kind!r}")
        if self.kind in ("sw", "lsw") and self.spec is None:
            object.__setattr__(self, "spec", WindowSpec(1, 1))
        if self.kind == "sw" and self.rules is not None:
            raise ValueError("the SW tagger cannot use forbid/enforce rules")

    @property
    def label(self) -> str:
        if self.kind == "sw":
            return "SW" + self.spec.label()
        if self.kind == "lsw":
            return "LSW" + self.spec.label() + ("" if self.rules is not None else "-No-Rules")
        return "HMM" if self.rules is not None else "HMM-No-Rules"

    def train(self, text: AmbiguousText, inv: AmbiguityInventory):
        if self.kind == "hmm":
            return hmm_train(hmm_init(inv, self.rules), text, self.iterations, self.epsilon)
        counts = count_windows(text, self.spec)
        if self.kind == "sw":
            return sw_train(counts, inv, self.iterations, self.epsilon)
        return lsw_train(counts, inv, self.rules, self.iterations, self.epsilon)


def tag_text(model, text: AmbiguousText) -> list[int]:
    if isinstance(model, SwModel):
        return sw_tag(model, text)
    if isinstance(model, LswModel):
        return lsw_tag(model, text)
    if isinstance(model, HmmModel):
        return hmm_tag(model, text)
    raise TypeError(f"not a tagger model: {type(model).__name__}")


def parameter_count(model) -> tuple[int, int]:
    """Realised table size and its theoretical ceiling."""
    n_tags = len(model.inv.tagset)
    n_classes = len(model.inv)
    if isinstance(model, HmmModel):
        size = n_tags * n_tags + n_tags * n_classes
        return size, size
    ctx = model.spec.n_minus + model.spec.n_plus
    if isinstance(model, LswModel):
        return len(model.table), parameter_bound(model.spec, n_tags)
    return len(model.table), n_classes ** ctx * n_tags


@dataclass
class CurvePoint:
    train_tokens: int
    accuracy: float
    ambiguous_accuracy: float
    parameters: int = 0
    bound: int = 0
    report: EvalReport | None = field(default=None, compare=False)


@dataclass
class LearningCurve:
    label: str
    points: list[CurvePoint] = field(default_factory=list)
    seed: int | None = None


def learning_curve(taggers: Sequence[TaggerConfig], train: AmbiguousText, test: AmbiguousText,
                   sizes: Sequence[int], inv: AmbiguityInventory, seed: int | None = None) -> list[LearningCurve]:
    """Train every tagger on growing prefixes of ``train`` and score each on ``test``."""
    if list(sizes) != sorted(set(sizes)):
        raise ValueError("sizes must be strictly increasing")
    if sizes and sizes[-1] > len(train):
        raise ValueError(f"size {sizes[-1]} exceeds training corpus of {len(train)} tokens")
    curves = [LearningCurve(cfg.label, seed=seed) for cfg in taggers]
    for size in sizes:
        prefix = train.prefix(size)
        for cfg, curve in zip(taggers, curves):
            model = cfg.train(prefix, inv)
            report = accuracy(tag_text(model, test), test, inv)
            params, bound = parameter_count(model)
            curve.points.append(CurvePoint(size, report.accuracy, report.ambiguous_accuracy,
                                           params, bound, report))
    return curves


@dataclass(frozen=True)
class Summary:
    label: str
    train_tokens: int
    mean_accuracy: float
    std_accuracy: float
    mean_ambiguous: float
    std_ambiguous: float
    runs: int


def _sd(xs: list[float]) -> float:
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def summarize(curves: Sequence[LearningCurve]) -> list[Summary]:
    """Mean and sample standard deviation across seeds, per tagger and size."""
    cells: dict[tuple[str, int], list[CurvePoint]] = {}
    for curve in curves:
        for p in curve.points:
            cells.setdefault((curve.label, p.train_tokens), []).append(p)
    out = []
    for (label, size), pts in cells.items():
        acc = [p.accuracy for p in pts]
        amb = [p.ambiguous_accuracy for p in pts]
        out.append(Summary(label, size, statistics.fmean(acc), _sd(acc),
                           statistics.fmean(amb), _sd(amb), len(pts)))
    return out


def mean_curves(curves: Sequence[LearningCurve]) -> list[LearningCurve]:
    """One curve per tagger holding the across-seed means."""
    merged: dict[str, LearningCurve] = {}
    params: dict[tuple[str, int], list[CurvePoint]] = {}
    for curve in curves:
        for p in curve.points:
            params.setdefault((curve.label, p.train_tokens), []).append(p)
    for s in summarize(curves):
        pts = params[s.label, s.train_tokens]
        mean_params = round(statistics.fmean(p.parameters for p in pts))
        merged.setdefault(s.label, LearningCurve(s.label)).points.append(
            CurvePoint(s.train_tokens, s.mean_accuracy, s.mean_ambiguous, mean_params, pts[0].bound))
    return list(merged.values())
