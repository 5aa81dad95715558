"""Forbid/enforce constraints over tag bigrams."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import EOS_ID, AmbiguityInventory, FormatError, TagInventory, iter_tag_sequences


@dataclass(frozen=True)
class RuleSet:
    """``forbid`` holds banned bigrams; ``enforce[a]`` is the set of tags allowed after ``a``."""

    forbid: frozenset = frozenset()
    enforce: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "forbid", frozenset(self.forbid))
        object.__setattr__(self, "enforce", {a: frozenset(s) for a, s in self.enforce.items()})
        for a, allowed in self.enforce.items():
            if not allowed:
                raise ValueError(f"enforce rule for tag {a} has no successors")
            clash = [b for b in allowed if (a, b) in self.forbid]
            if clash:
                raise ValueError(f"bigram ({a},{clash[0]}) is both forbidden and enforced")

    def __bool__(self) -> bool:
        return bool(self.forbid or self.enforce)

    def allows(self, a: int, b: int) -> bool:
        if (a, b) in self.forbid:
            return False
        allowed = self.enforce.get(a)
        # enforce lists never exclude the boundary; use FORBID x EOS for that
        return allowed is None or b in allowed or b == EOS_ID

    def is_valid(self, seq: Sequence[int]) -> bool:
        return all(self.allows(a, b) for a, b in zip(seq, seq[1:]))

    def union(self, other: "RuleSet") -> "RuleSet":
        enforce = dict(self.enforce)
        for a, s in other.enforce.items():
            enforce[a] = enforce[a] & s if a in enforce else s
        return RuleSet(self.forbid | other.forbid, enforce)

    def lines(self, tags: TagInventory) -> list[str]:
        out = [f"FORBID {tags.name(a)} {tags.name(b)}" for a, b in sorted(self.forbid)]
        for a in sorted(self.enforce):
            succ = ",".join(tags.name(b) for b in sorted(self.enforce[a]))
            out.append(f"ENFORCE {tags.name(a)}: {succ}")
        return out

    def digest(self) -> str:
        """Hash of the canonical id form; identical rules give identical digests."""
        parts = [f"F{a},{b}" for a, b in sorted(self.forbid)]
        parts += [f"E{a}:" + ",".join(map(str, sorted(s))) for a, s in sorted(self.enforce.items())]
        return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]

    def write(self, path, tags: TagInventory) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.lines(tags):
                fh.write(line + "\n")


def parse_rules(lines: Iterable[str], tags: TagInventory, path=None) -> RuleSet:
    """Parse ``FORBID a b`` and ``ENFORCE a: b,c`` lines.

    Duplicate lines collapse; repeated ENFORCE lines for the same tag merge
    their successor lists.
    """
    forbid = set()
    enforce: dict[int, set[int]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, rest = line.partition(" ")
        keyword = keyword.upper()
        try:
            if keyword == "FORBID":
                names = rest.split()
                if len(names) != 2:
                    raise FormatError("FORBID takes exactly two tags", path, lineno)
                forbid.add((tags.id(names[0]), tags.id(names[1])))
            elif keyword == "ENFORCE":
                head, sep, tail = rest.partition(":")
                if not sep:
                    raise FormatError("ENFORCE needs 'tag: succ1,succ2'", path, lineno)
                succ = [n.strip() for n in tail.split(",") if n.strip()]
                if not succ:
                    raise FormatError("ENFORCE with empty successor list", path, lineno)
                a = tags.id(head.strip())
                enforce.setdefault(a, set()).update(tags.id(n) for n in succ)
            else:
                raise FormatError(f"unknown rule keyword {keyword!r}", path, lineno)
        except KeyError as exc:
            raise FormatError(str(exc).strip("'\""), path, lineno) from None
    try:
        return RuleSet(frozenset(forbid), enforce)
    except ValueError as exc:
        raise FormatError(str(exc), path) from None


def read_rules(path, tags: TagInventory) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh, tags, path)


def is_valid(seq: Sequence[int], rules: RuleSet | None) -> bool:
    return rules is None or rules.is_valid(seq)


def valid_sequences(window: Sequence[int], rules: RuleSet | None,
                    inv: AmbiguityInventory) -> list[tuple[int, ...]]:
    """Tag sequences of ``window`` (a class-id sequence) that satisfy ``rules``."""
    return [s for s in iter_tag_sequences(window, inv) if is_valid(s, rules)]
