"""Seeded synthetic languages drawn from a Markov source over tags.

A language file is plain text, one directive per line (``#`` comments)::

    tags: det noun verb adj
    open: noun verb          # optional, tags given to unknown words
    seed: 7
    length: 20000
    trans EOS: det 0.6, noun 0.4
    trans det: noun 0.7, adj 0.3
    emit det: det 0.8, det|pron 0.2
    forbid: det verb         # optional hard constraint the source obeys
    enforce det: noun, adj   # optional

``trans`` rows give successor probabilities; moving to ``EOS`` ends a
document and the ``EOS`` row starts the next one. ``emit`` rows give, for a
tag, a distribution over the ambiguity classes (``|``-joined tag names)
its words are drawn from; each class must contain the emitting tag.
Declared forbid/enforce rules must be respected by the transitions.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import EOS, AmbiguityInventory, FormatError, Lexicon, TaggerError, TagInventory
from .corpus import AmbiguousText, Token
from .rules import RuleSet, parse_rules

STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class SyntheticSpec:
    tags: tuple[str, ...]
    transitions: dict            # tag name (or EOS) -> {successor name: prob}
    emissions: dict              # tag name -> {class (tuple of names): prob}
    length: int = 10000
    seed: int = 0
    open_tags: tuple[str, ...] = ()
    rule_lines: tuple[str, ...] = ()

    def with_seed(self, seed: int) -> "SyntheticSpec":
        return dataclasses.replace(self, seed=seed)

    def with_length(self, length: int) -> "SyntheticSpec":
        return dataclasses.replace(self, length=length)

    def tagset(self) -> TagInventory:
        return TagInventory(self.tags, self.open_tags)

    def inventory(self) -> AmbiguityInventory:
        """Fresh inventory with every emitted class interned in declaration order."""
        inv = AmbiguityInventory(self.tagset())
        for tag in self.tags:
            for cls in self.emissions.get(tag, {}):
                inv.intern_names(cls)
        if self.open_tags:
            inv.open_class_id()
        return inv

    def rules(self, tags: TagInventory) -> RuleSet:
        return parse_rules(self.rule_lines, tags)

    def lexicon(self, inv: AmbiguityInventory) -> Lexicon:
        lex = Lexicon(inv)
        for tag in self.tags:
            for cls in self.emissions.get(tag, {}):
                lex.add(surface_for(cls), (inv.tagset.id(n) for n in cls))
        return lex

    def validate(self) -> None:
        names = set(self.tags)
        if EOS in names:
            raise ValueError("EOS is implicit and must not be listed in tags")
        states = (EOS,) + tuple(self.tags)
        for src in states:
            row = self.transitions.get(src)
            if not row:
                raise ValueError(f"no transitions given for {src}")
            _check_row(f"trans {src}", row.values())
            for dst in row:
                if dst != EOS and dst not in names:
                    raise ValueError(f"trans {src}: unknown tag {dst}")
        for tag in self.tags:
            row = self.emissions.get(tag)
            if not row:
                raise ValueError(f"no emissions given for {tag}")
            _check_row(f"emit {tag}", row.values())
            for cls in row:
                if tag not in cls:
                    raise ValueError(f"emit {tag}: class {'|'.join(cls)} does not contain {tag}")
                unknown = set(cls) - names
                if unknown:
                    raise ValueError(f"emit {tag}: unknown tags {sorted(unknown)}")
        for tag in self.open_tags:
            if tag not in names:
                raise ValueError(f"open tag {tag} is not in tags")
        # every tag must be reachable from the document start
        seen, queue = {EOS}, deque([EOS])
        while queue:
            for dst, p in self.transitions[queue.popleft()].items():
                if p > 0 and dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        unreachable = names - seen
        if unreachable:
            raise ValueError(f"tags unreachable from EOS: {sorted(unreachable)}")
        tagset = self.tagset()
        rules = self.rules(tagset)
        for src in states:
            for dst, p in self.transitions[src].items():
                if p > 0 and not rules.allows(tagset.id(src), tagset.id(dst)):
                    raise ValueError(f"transition {src}->{dst} has probability {p} but breaks a declared rule")


def _check_row(where: str, probs) -> None:
    probs = list(probs)
    if any(p < 0 for p in probs):
        raise ValueError(f"{where}: negative probability")
    if abs(sum(probs) - 1.0) > STOCHASTIC_TOL:
        raise ValueError(f"{where}: probabilities sum to {sum(probs)}, not 1")


def surface_for(cls: tuple[str, ...]) -> str:
    return "w_" + "_".join(cls)


def _pairs(text: str, where: str) -> dict:
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split()
        if len(parts) != 2:
            raise ValueError(f"{where}: expected '<name> <prob>', got {item!r}")
        out[parts[0]] = float(parts[1])
    return out


def parse_synthetic(text: str, path=None) -> SyntheticSpec:
    tags: list[str] = []
    open_tags: list[str] = []
    trans: dict = {}
    emis: dict = {}
    rule_lines: list[str] = []
    scalars = {"seed": 0, "length": 10000}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise FormatError("expected '<directive>: ...'", path, lineno)
        words = head.split()
        try:
            if words == ["tags"]:
                tags.extend(rest.split())
            elif words == ["open"]:
                open_tags.extend(rest.split())
            elif len(words) == 1 and words[0] in scalars:
                scalars[words[0]] = int(rest)
            elif len(words) == 2 and words[0] == "trans":
                trans[words[1]] = _pairs(rest, f"trans {words[1]}")
            elif len(words) == 2 and words[0] == "emit":
                emis[words[1]] = {tuple(sorted(set(k.split("|")))): v
                                  for k, v in _pairs(rest, f"emit {words[1]}").items()}
            elif words == ["forbid"]:
                rule_lines.append("FORBID " + rest.strip())
            elif len(words) == 2 and words[0] == "enforce":
                rule_lines.append(f"ENFORCE {words[1]}: {rest.strip()}")
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ValueError as exc:
            raise FormatError(str(exc), path, lineno) from None
    spec = SyntheticSpec(tuple(tags), trans, emis, scalars["length"], scalars["seed"],
                         tuple(open_tags), tuple(rule_lines))
    try:
        spec.validate()
    except (ValueError, KeyError, TaggerError) as exc:
        raise FormatError(str(exc).strip("'\""), path) from None
    return spec


def read_synthetic(path) -> SyntheticSpec:
    return parse_synthetic(Path(path).read_text(encoding="utf-8"), path)


def format_synthetic(spec: SyntheticSpec) -> str:
    lines = [f"tags: {' '.join(spec.tags)}"]
    if spec.open_tags:
        lines.append(f"open: {' '.join(spec.open_tags)}")
    lines += [f"seed: {spec.seed}", f"length: {spec.length}"]
    for src in (EOS,) + spec.tags:
        row = ", ".join(f"{d} {p!r}" for d, p in spec.transitions[src].items())
        lines.append(f"trans {src}: {row}")
    for tag in spec.tags:
        row = ", ".join(f"{'|'.join(c)} {p!r}" for c, p in spec.emissions[tag].items())
        lines.append(f"emit {tag}: {row}")
    for rule in spec.rule_lines:
        kw, _, rest = rule.partition(" ")
        if kw == "FORBID":
            lines.append(f"forbid: {rest}")
        else:
            head, _, succ = rest.partition(":")
            lines.append(f"enforce {head.strip()}: {succ.strip()}")
    return "\n".join(lines) + "\n"


def generate_synthetic(spec: SyntheticSpec, inv: AmbiguityInventory | None = None
                       ) -> tuple[AmbiguousText, AmbiguousText]:
    """Sample ``spec.length`` tokens; returns ``(gold, untagged)`` copies of the same text.

    Pure function of ``spec`` (seed included). ``inv`` must already hold the
    language's classes, e.g. from :meth:`SyntheticSpec.inventory`.
    """
    spec.validate()
    if inv is None:
        inv = spec.inventory()
    tags = inv.tagset
    states = [EOS] + list(spec.tags)
    state_index = {s: i for i, s in enumerate(states)}
    succ = []
    for s in states:
        row = spec.transitions[s]
        succ.append(([state_index[d] for d in row], np.cumsum(list(row.values()))))
    emit = [None]
    for tag in spec.tags:
        row = spec.emissions[tag]
        classes = [inv.lookup[tuple(sorted(tags.id(n) for n in c))] for c in row]
        surfaces = [surface_for(c) for c in row]
        emit.append((classes, surfaces, np.cumsum(list(row.values()))))

    rng = np.random.default_rng(spec.seed)
    docs: list[list[Token]] = [[]]
    state = 0
    produced = 0
    while produced < spec.length:
        targets, cum = succ[state]
        k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        state = targets[min(k, len(targets) - 1)]
        if state == 0:
            if docs[-1]:
                docs.append([])
            continue
        classes, surfaces, ecum = emit[state]
        k = min(int(np.searchsorted(ecum, rng.random() * ecum[-1], side="right")), len(classes) - 1)
        docs[-1].append(Token(surfaces[k], classes[k], tags.id(states[state])))
        produced += 1
    gold = AmbiguousText([d for d in docs if d])
    return gold, gold.without_gold()
