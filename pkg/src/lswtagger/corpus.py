"""Ambiguously tagged text, window counting and corpus statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import (
    EOS_CLASS,
    AmbiguityInventory,
    FormatError,
    Lexicon,
    TaggerError,
    WindowSpec,
)


@dataclass(frozen=True)
class Token:
    surface: str
    cls: int
    gold: int | None = None


@dataclass
class AmbiguousText:
    """Tokens grouped into documents; padding is applied per document."""

    documents: list[list[Token]] = field(default_factory=list)

    @classmethod
    def from_tokens(cls, tokens: Iterable[Token]) -> "AmbiguousText":
        return cls([list(tokens)])

    @property
    def tokens(self) -> list[Token]:
        return [tok for doc in self.documents for tok in doc]

    def __len__(self) -> int:
        return sum(len(doc) for doc in self.documents)

    def __iter__(self) -> Iterator[Token]:
        for doc in self.documents:
            yield from doc

    def classes(self) -> list[list[int]]:
        return [[tok.cls for tok in doc] for doc in self.documents]

    def prefix(self, n: int) -> "AmbiguousText":
        """The first ``n`` tokens, keeping document boundaries."""
        if n > len(self):
            raise ValueError(f"prefix of {n} tokens exceeds corpus size {len(self)}")
        docs = []
        left = n
        for doc in self.documents:
            if left <= 0:
                break
            docs.append(doc[:left])
            left -= len(doc)
        return AmbiguousText(docs)

    def without_gold(self) -> "AmbiguousText":
        return AmbiguousText([[Token(t.surface, t.cls) for t in doc] for doc in self.documents])

    def split_at(self, boundary_class: int) -> "AmbiguousText":
        """Start a new document after every token of ``boundary_class``."""
        docs = []
        for doc in self.documents:
            current = []
            for tok in doc:
                current.append(tok)
                if tok.cls == boundary_class:
                    docs.append(current)
                    current = []
            if current:
                docs.append(current)
        return AmbiguousText(docs)


def analyze_token(surface: str, lexicon: Lexicon, annotated: Sequence[int] | None = None,
                  gold: int | None = None) -> Token:
    """Map one surface form to its ambiguity class.

    ``annotated`` is an externally narrowed tag subset; it must lie inside
    the lexicon class (or the open class for unknown words).
    """
    inv = lexicon.inv
    cls = lexicon.get(surface)
    if cls is None:
        cls = inv.open_class_id()
    if annotated is not None:
        allowed = set(inv.tags_of(cls))
        narrowed = set(annotated)
        if not narrowed or not narrowed <= allowed:
            names = ",".join(inv.tagset.name(t) for t in sorted(narrowed))
            raise TaggerError(
                f"token {surface!r}: tags {{{names}}} are not a subset of {{{inv.class_name(cls)}}}"
            )
        cls = inv.intern(narrowed)
    if gold is not None and gold not in inv.tags_of(cls):
        raise TaggerError(
            f"token {surface!r}: gold tag {inv.tagset.name(gold)} not in {{{inv.class_name(cls)}}}"
        )
    return Token(surface, cls, gold)


def analyze(text: Iterable, lexicon: Lexicon) -> AmbiguousText:
    """Analyze a token stream.

    Items are surface strings, ``(surface, tag_names)`` pairs for
    pre-disambiguated tokens, or ``None`` for a document boundary.
    """
    tagset = lexicon.inv.tagset
    docs: list[list[Token]] = [[]]
    for item in text:
        if item is None:
            if docs[-1]:
                docs.append([])
            continue
        if isinstance(item, str):
            docs[-1].append(analyze_token(item, lexicon))
        else:
            surface, names = item
            docs[-1].append(analyze_token(surface, lexicon, [tagset.id(n) for n in names]))
    return AmbiguousText([d for d in docs if d])


def read_corpus(path, lexicon: Lexicon) -> AmbiguousText:
    """Read a corpus file.

    One token per line, either ``surface`` or ``surface<TAB>tag1,tag2,...``
    (pre-disambiguated); a blank line separates documents.
    """
    tagset = lexicon.inv.tagset
    docs: list[list[Token]] = [[]]
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                if docs[-1]:
                    docs.append([])
                continue
            parts = line.split("\t")
            try:
                if len(parts) == 1:
                    tok = analyze_token(parts[0], lexicon)
                elif len(parts) == 2:
                    ids = [tagset.id(n.strip()) for n in parts[1].split(",") if n.strip()]
                    tok = analyze_token(parts[0], lexicon, ids)
                else:
                    raise TaggerError("expected 'surface' or 'surface<TAB>tags'")
            except (KeyError, TaggerError) as exc:
                raise FormatError(str(exc).strip("'\""), path, lineno) from None
            docs[-1].append(tok)
    return AmbiguousText([d for d in docs if d])


def read_gold(path, lexicon: Lexicon) -> AmbiguousText:
    """Read a gold file of ``surface<TAB>goldtag`` lines; blank line = document boundary."""
    tagset = lexicon.inv.tagset
    docs: list[list[Token]] = [[]]
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                if docs[-1]:
                    docs.append([])
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError("expected 'surface<TAB>goldtag'", path, lineno)
            try:
                tok = analyze_token(parts[0], lexicon, gold=tagset.id(parts[1].strip()))
            except (KeyError, TaggerError) as exc:
                raise FormatError(str(exc).strip("'\""), path, lineno) from None
            docs[-1].append(tok)
    return AmbiguousText([d for d in docs if d])


def padded(classes: Sequence[int], spec: WindowSpec) -> list[int]:
    return [EOS_CLASS] * spec.n_minus + list(classes) + [EOS_CLASS] * spec.n_plus


def iter_windows(classes: Sequence[int], spec: WindowSpec):
    """Yield ``(left, cls, right)`` for every position of one document."""
    pad = padded(classes, spec)
    m = spec.n_minus
    for t in range(len(classes)):
        i = t + m
        yield tuple(pad[t:i]), pad[i], tuple(pad[i + 1:i + 1 + spec.n_plus])


@dataclass
class WindowCountTable:
    spec: WindowSpec
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def merge(self, other: "WindowCountTable") -> "WindowCountTable":
        if other.spec != self.spec:
            raise ValueError("cannot merge count tables with different windows")
        merged = Counter(self.counts)
        merged.update(other.counts)
        return WindowCountTable(self.spec, merged)

    def sorted_items(self):
        return sorted(self.counts.items())


def count_windows(text: AmbiguousText, spec: WindowSpec) -> WindowCountTable:
    counts: Counter = Counter()
    for doc in text.classes():
        counts.update(iter_windows(doc, spec))
    return WindowCountTable(spec, counts)


@dataclass(frozen=True)
class CorpusStats:
    words: int
    ambiguity_classes: int
    ambiguity_rate: float

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("Words", str(self.words)),
            ("Amb. classes", str(self.ambiguity_classes)),
            ("Amb. rate", f"{100 * self.ambiguity_rate:.2f}%"),
        ]


def corpus_stats(text: AmbiguousText, inv: AmbiguityInventory) -> CorpusStats:
    words = 0
    ambiguous = 0
    seen = set()
    for tok in text:
        words += 1
        seen.add(tok.cls)
        if inv.is_ambiguous(tok.cls):
            ambiguous += 1
    rate = ambiguous / words if words else 0.0
    return CorpusStats(words, len(seen), rate)
