"""Versioned text formats for trained models.

Every value is written with :meth:`float.hex`, so save/load is bit-exact
and re-saving a loaded model reproduces the file byte for byte.

Layout (sliding-window models)::

    swmodel v1                      | lswmodel v1
    window <n_minus> <n_plus>
    tagset <digest>
    rules_applied <0|1>             (lsw only)
    rules <digest or ->             (lsw only)
    iterations <k>
    class <id> <tag ids>            (one line per ambiguity class, dense ids)
    mass <tag>:<hex>,...
    entries <count>
    <left ids>;<tag>;<right ids><TAB><hex>

HMM models replace the entry block with ``transitions R C`` and
``emissions R C`` followed by row-major rows of space-separated hex floats.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .core import AmbiguityInventory, FormatError, TagInventory, WindowSpec
from .hmm import HmmModel
from .lsw import LswModel
from .sw import SwModel

SW_MAGIC = "swmodel v1"
LSW_MAGIC = "lswmodel v1"
HMM_MAGIC = "hmmmodel v1"


class ModelFormatError(FormatError):
    pass


def _ids(seq) -> str:
    return ",".join(str(i) for i in seq)


def _hex(v: float) -> str:
    return float(v).hex()


def dumps(model) -> str:
    if not isinstance(model, (SwModel, LswModel, HmmModel)):
        raise TypeError(f"cannot serialise {type(model).__name__}")
    out = io.StringIO()
    inv = model.inv
    if isinstance(model, (SwModel, LswModel)):
        lsw = isinstance(model, LswModel)
        out.write((LSW_MAGIC if lsw else SW_MAGIC) + "\n")
        out.write(f"window {model.spec.n_minus} {model.spec.n_plus}\n")
        out.write(f"tagset {inv.tagset.digest()}\n")
        if lsw:
            out.write(f"rules_applied {int(model.rules_applied)}\n")
            out.write(f"rules {model.rules_digest or '-'}\n")
        out.write(f"iterations {model.iterations_run}\n")
        _write_classes(out, inv)
        mass = ",".join(f"{t}:{_hex(v)}" for t, v in sorted(model.global_tag_mass.items()))
        out.write(f"mass {mass}\n")
        out.write(f"entries {len(model.table)}\n")
        for (left, tag, right), value in sorted(model.table.items()):
            out.write(f"{_ids(left)};{tag};{_ids(right)}\t{_hex(value)}\n")
    else:
        out.write(HMM_MAGIC + "\n")
        out.write(f"tagset {inv.tagset.digest()}\n")
        out.write(f"rules_applied {int(model.rules_applied)}\n")
        out.write(f"rules {model.rules_digest or '-'}\n")
        _write_classes(out, inv)
        for name, matrix in (("transitions", model.transitions), ("emissions", model.emissions)):
            rows, cols = matrix.shape
            out.write(f"{name} {rows} {cols}\n")
            for row in matrix:
                out.write(" ".join(_hex(v) for v in row) + "\n")
    return out.getvalue()


def _write_classes(out, inv: AmbiguityInventory) -> None:
    for c in inv.classes:
        out.write(f"class {c.id} {_ids(c.tags)}\n")


def save_model(model, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


class _Reader:
    def __init__(self, text: str, path):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0
        self.path = path

    def error(self, msg: str, lineno: int | None = None) -> ModelFormatError:
        return ModelFormatError(msg, self.path, lineno if lineno is not None else self.pos)

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise self.error("unexpected end of file", self.pos + 1)
        self.pos += 1
        return self.lines[self.pos - 1]

    def field(self, name: str) -> list[str]:
        line = self.next()
        parts = line.split(" ")
        if parts[0] != name:
            raise self.error(f"expected '{name}' line, got {line!r}")
        return parts[1:]


def _float(reader: _Reader, text: str) -> float:
    try:
        return float.fromhex(text)
    except ValueError:
        raise reader.error(f"bad value {text!r}") from None


def _id_tuple(reader: _Reader, text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",")) if text else ()
    except ValueError:
        raise reader.error(f"bad id list {text!r}") from None


def _read_classes(r: _Reader, tags: TagInventory) -> AmbiguityInventory:
    inv = AmbiguityInventory(tags)
    while (line := r.peek()) is not None and line.startswith("class "):
        r.next()
        parts = line.split(" ")
        if len(parts) != 3:
            raise r.error("malformed class line")
        try:
            got = inv.intern(_id_tuple(r, parts[2]))
        except ValueError as exc:
            raise r.error(str(exc)) from None
        if str(got) != parts[1]:
            raise r.error(f"class ids are not dense: expected {got}, found {parts[1]}")
    return inv


def _check_tagset(r: _Reader, tags: TagInventory) -> None:
    (digest,) = r.field("tagset") or [""]
    if digest != tags.digest():
        raise r.error(f"tagset hash mismatch: model has {digest}, tagset file gives {tags.digest()}")


def loads(text: str, tags: TagInventory, path=None):
    r = _Reader(text, path)
    magic = r.next() if r.peek() is not None else ""
    if magic not in (SW_MAGIC, LSW_MAGIC, HMM_MAGIC):
        raise ModelFormatError(f"unsupported model version {magic!r}", path, 1)
    try:
        if magic == HMM_MAGIC:
            return _load_hmm(r, tags)
        return _load_window_model(r, tags, magic == LSW_MAGIC)
    except (ValueError, IndexError) as exc:
        raise r.error(f"malformed line: {exc}") from None


def _load_window_model(r: _Reader, tags: TagInventory, lsw: bool):
    n_minus, n_plus = (int(x) for x in r.field("window"))
    spec = WindowSpec(n_minus, n_plus)
    _check_tagset(r, tags)
    rules_applied, rules_digest = False, ""
    if lsw:
        (flag,) = r.field("rules_applied")
        if flag not in ("0", "1"):
            raise r.error("rules_applied must be 0 or 1")
        rules_applied = flag == "1"
        (rules_digest,) = r.field("rules")
        rules_digest = "" if rules_digest == "-" else rules_digest
    (iters,) = r.field("iterations")
    inv = _read_classes(r, tags)
    mass = {}
    for item in filter(None, " ".join(r.field("mass")).split(",")):
        t, _, v = item.partition(":")
        mass[int(t)] = _float(r, v)
    (n_entries,) = r.field("entries")
    table = {}
    width = spec.width
    for _ in range(int(n_entries)):
        line = r.next()
        key, sep, value = line.partition("\t")
        parts = key.split(";")
        if not sep or len(parts) != 3:
            raise r.error("malformed entry line")
        left, right = _id_tuple(r, parts[0]), _id_tuple(r, parts[2])
        if len(left) != spec.n_minus or len(right) != spec.n_plus:
            raise r.error(f"entry does not match a window of width {width}")
        table[left, int(parts[1]), right] = _float(r, value)
    if r.peek() is not None:
        raise r.error("trailing data after entries", r.pos + 1)
    if lsw:
        return LswModel(spec, inv, table, mass, rules_applied, rules_digest, int(iters))
    return SwModel(spec, inv, table, mass, int(iters))


def _read_matrix(r: _Reader, name: str) -> np.ndarray:
    rows, cols = (int(x) for x in r.field(name))
    m = np.zeros((rows, cols))
    for i in range(rows):
        vals = r.next().split(" ")
        if len(vals) != cols:
            raise r.error(f"expected {cols} values in {name} row")
        m[i] = [_float(r, v) for v in vals]
    return m


def _load_hmm(r: _Reader, tags: TagInventory) -> HmmModel:
    _check_tagset(r, tags)
    (flag,) = r.field("rules_applied")
    (digest,) = r.field("rules")
    inv = _read_classes(r, tags)
    trans = _read_matrix(r, "transitions")
    emis = _read_matrix(r, "emissions")
    if trans.shape != (len(tags), len(tags)) or emis.shape != (len(tags), len(inv)):
        raise r.error("matrix shapes do not match the tagset and class inventory")
    if r.peek() is not None:
        raise r.error("trailing data after matrices", r.pos + 1)
    return HmmModel(inv, trans, emis, flag == "1", "" if digest == "-" else digest)


def load_model(path, tags: TagInventory):
    """Load an SW, LSW or HMM model; the tagset must hash to the value recorded in the file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"not UTF-8 text: {exc}", path) from None
    return loads(text, tags, path)
