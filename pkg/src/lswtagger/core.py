"""Tag and ambiguity-class inventories, the lexicon and window configuration.

Every tagger keys its count tables on small integer ids. Tag ids are dense
and assigned in first-seen order; the boundary tag ``EOS`` always has id 0
and the singleton class ``{EOS}`` always has class id 0.
"""

from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

EOS = "EOS"
EOS_ID = 0
EOS_CLASS = 0

MAX_CONTEXT = 3


class TaggerError(Exception):
    """Base class for errors raised by this package."""


class FormatError(TaggerError):
    """A data file could not be parsed."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)


@dataclass(frozen=True)
class Tag:
    id: int
    name: str


class TagInventory:
    """The tag set, with ``EOS`` preinstalled at id 0."""

    def __init__(self, names: Iterable[str] = (), open_class: Iterable[str] = ()):
        self.tags: list[Tag] = []
        self._by_name: dict[str, int] = {}
        self.open_class: set[int] = set()
        self.add(EOS)
        for name in names:
            self.add(name)
        for name in open_class:
            self.mark_open(name)

    def add(self, name: str) -> int:
        name = name.strip()
        if not name or any(c.isspace() for c in name) or "," in name:
            raise ValueError(f"invalid tag name {name!r}")
        if name in self._by_name:
            return self._by_name[name]
        tag_id = len(self.tags)
        self.tags.append(Tag(tag_id, name))
        self._by_name[name] = tag_id
        return tag_id

    def mark_open(self, name: str) -> None:
        tag_id = self.id(name)
        if tag_id == EOS_ID:
            raise ValueError("EOS cannot be an open-class tag")
        self.open_class.add(tag_id)

    def id(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown tag {name!r}") from None

    def name(self, tag_id: int) -> str:
        return self.tags[tag_id].name

    def __len__(self) -> int:
        return len(self.tags)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.tags]

    def digest(self) -> str:
        """Stable hash of the ordered tag names; model files record it."""
        payload = "\n".join(self.names).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]

    @classmethod
    def from_file(cls, path) -> "TagInventory":
        """Read a tagset file: one tag per line, ``open:<tag>`` for open-class tags."""
        inv = cls()
        open_names = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if line.startswith("open:"):
                    line = line[len("open:"):].strip()
                    open_names.append(line)
                try:
                    inv.add(line)
                except ValueError as exc:
                    raise FormatError(str(exc), path, lineno) from None
        for name in open_names:
            if name == EOS:
                raise FormatError("EOS cannot be an open-class tag", path)
            inv.mark_open(name)
        return inv

    def write(self, path) -> None:
        lines = []
        for tag in self.tags[1:]:
            prefix = "open:" if tag.id in self.open_class else ""
            lines.append(prefix + tag.name)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class AmbiguityClass:
    id: int
    tags: tuple[int, ...]


class AmbiguityInventory:
    """Interned ambiguity classes over a :class:`TagInventory`.

    The class ``{EOS}`` is interned first and therefore has id 0.
    """

    def __init__(self, tags: TagInventory):
        self.tagset = tags
        self.classes: list[AmbiguityClass] = []
        self.lookup: dict[tuple[int, ...], int] = {}
        self.frozen = False
        self.intern([EOS_ID])

    def intern(self, tags: Iterable[int]) -> int:
        key = tuple(sorted(set(tags)))
        if not key:
            raise ValueError("an ambiguity class needs at least one tag")
        for t in key:
            if not 0 <= t < len(self.tagset):
                raise ValueError(f"unknown tag id {t}")
        found = self.lookup.get(key)
        if found is not None:
            return found
        if self.frozen:
            raise TaggerError(f"inventory is frozen; cannot add class {key}")
        class_id = len(self.classes)
        self.classes.append(AmbiguityClass(class_id, key))
        self.lookup[key] = class_id
        return class_id

    def intern_names(self, names: Iterable[str]) -> int:
        return self.intern(self.tagset.id(n) for n in names)

    def freeze(self) -> "AmbiguityInventory":
        self.frozen = True
        return self

    def tags_of(self, class_id: int) -> tuple[int, ...]:
        if not 0 <= class_id < len(self.classes):
            raise KeyError(f"unknown ambiguity class id {class_id}")
        return self.classes[class_id].tags

    def is_ambiguous(self, class_id: int) -> bool:
        return len(self.classes[class_id].tags) > 1

    def open_class_id(self) -> int:
        if not self.tagset.open_class:
            raise TaggerError("tagset declares no open-class tags for unknown words")
        return self.intern(self.tagset.open_class)

    def class_name(self, class_id: int) -> str:
        return ",".join(self.tagset.name(t) for t in self.tags_of(class_id))

    def __len__(self) -> int:
        return len(self.classes)


def intern_class(tags: Iterable[int], inv: AmbiguityInventory) -> int:
    return inv.intern(tags)


def tags_of(class_id: int, inv: AmbiguityInventory) -> tuple[int, ...]:
    return inv.tags_of(class_id)


def tag_sequences(classes: Sequence[int], inv: AmbiguityInventory) -> list[tuple[int, ...]]:
    """Every tag sequence compatible with a sequence of ambiguity classes.

    The result is the Cartesian product of the classes' tag sets, in
    lexicographic order of tag ids. An empty input yields ``[()]``.
    """
    return list(itertools.product(*(inv.tags_of(c) for c in classes)))


def iter_tag_sequences(classes: Sequence[int], inv: AmbiguityInventory) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(inv.tags_of(c) for c in classes))


class Lexicon:
    """Exact-match map from surface form to ambiguity class id."""

    def __init__(self, inv: AmbiguityInventory):
        self.inv = inv
        self.entries: dict[str, int] = {}

    def add(self, surface: str, tags: Iterable[int]) -> int:
        tags = list(tags)
        if EOS_ID in tags:
            raise ValueError("EOS is reserved for document boundaries")
        class_id = self.inv.intern(tags)
        self.entries[surface] = class_id
        return class_id

    def get(self, surface: str) -> int | None:
        return self.entries.get(surface)

    def __contains__(self, surface: str) -> bool:
        return surface in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_file(cls, path, inv: AmbiguityInventory) -> "Lexicon":
        """Read ``surface<TAB>tag1,tag2,...`` lines; ``#`` starts a comment line."""
        lex = cls(inv)
        tags = inv.tagset
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0]:
                    raise FormatError("expected 'surface<TAB>tag1,tag2,...'", path, lineno)
                try:
                    ids = [tags.id(n.strip()) for n in parts[1].split(",") if n.strip()]
                    lex.add(parts[0], ids)
                except (KeyError, ValueError, TaggerError) as exc:
                    raise FormatError(str(exc).strip("'\""), path, lineno) from None
        return lex

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for surface, class_id in self.entries.items():
                fh.write(f"{surface}\t{self.inv.class_name(class_id)}\n")


@dataclass(frozen=True)
class WindowSpec:
    """Context lengths: ``n_minus`` words to the left, ``n_plus`` to the right."""

    n_minus: int = 1
    n_plus: int = 1
    ceiling: int = field(default=MAX_CONTEXT, compare=False, repr=False)

    def __post_init__(self):
        if self.n_minus < 0 or self.n_plus < 0:
            raise ValueError("context lengths must be non-negative")
        if self.n_minus + self.n_plus < 1:
            raise ValueError("a window needs at least one context position")
        if self.n_minus > self.ceiling or self.n_plus > self.ceiling:
            raise ValueError(f"context lengths are capped at {self.ceiling}")

    @property
    def width(self) -> int:
        return self.n_minus + 1 + self.n_plus

    @classmethod
    def parse(cls, text: str) -> "WindowSpec":
        """Parse offset lists such as ``-1,+1``, ``-2,-1`` or ``+1,+2``.

        Offsets must form contiguous runs ``-n..-1`` and ``+1..+m``.
        """
        offsets = []
        for item in text.split(","):
            item = item.strip()
            if not re.fullmatch(r"[+-]?\d+", item):
                raise ValueError(f"bad window offset {item!r}")
            offsets.append(int(item))
        left = sorted(-o for o in offsets if o < 0)
        right = sorted(o for o in offsets if o > 0)
        if 0 in offsets or len(set(offsets)) != len(offsets):
            raise ValueError(f"bad window {text!r}")
        if left != list(range(1, len(left) + 1)) or right != list(range(1, len(right) + 1)):
            raise ValueError(f"window offsets must be contiguous: {text!r}")
        return cls(len(left), len(right))

    def label(self) -> str:
        offsets = [f"-{i}" for i in range(self.n_minus, 0, -1)]
        offsets += [f"+{i}" for i in range(1, self.n_plus + 1)]
        return "(" + ", ".join(offsets) + ")"
