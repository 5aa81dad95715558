"""Multiplicative re-estimation of effective counts over observed windows.

Both sliding-window taggers share one update: every observed window ``w``
with count ``n_w`` expands into a list of table entries (tags for SW, tag
sequences for LSW), and each entry is rescaled by

    sum over windows w containing e of  n_w / sum_{e' in w} value[e'].

The expansion is computed once per training run; each step is a handful
of vectorised numpy calls.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class Expansion:
    keys: list            # entry keys, sorted
    counts: np.ndarray    # n_w per window, float64
    members: np.ndarray   # concatenated entry indices, window by window
    offsets: np.ndarray   # window w owns members[offsets[w]:offsets[w+1]]
    windows: list         # window keys, sorted

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    @classmethod
    def build(cls, window_counts: dict, expand: Callable[[Hashable], Iterable[Hashable]]) -> "Expansion":
        windows = sorted(window_counts)
        expanded = [list(expand(w)) for w in windows]
        keys = sorted({k for ks in expanded for k in ks})
        index = {k: i for i, k in enumerate(keys)}
        sizes = [len(ks) for ks in expanded]
        offsets = np.zeros(len(windows) + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        members = np.fromiter((index[k] for ks in expanded for k in ks),
                              dtype=np.int64, count=int(offsets[-1]))
        counts = np.array([window_counts[w] for w in windows], dtype=np.float64)
        return cls(keys, counts, members, offsets, windows)

    def window_sums(self, values: np.ndarray) -> np.ndarray:
        if not len(self.windows):
            return np.zeros(0)
        return np.add.reduceat(values[self.members], self.offsets[:-1])

    def initial(self, valid: np.ndarray | None = None) -> tuple[np.ndarray, int]:
        """Spread each window's count uniformly over its valid members.

        ``valid`` is a per-member mask. A window with no valid member falls
        back to all of its members so its mass is not lost. Returns the
        values and the number of such fallback windows.
        """
        sizes = self.sizes
        if valid is None:
            valid = np.ones(len(self.members), dtype=bool)
        n_valid = np.add.reduceat(valid.astype(np.int64), self.offsets[:-1]) if len(sizes) else sizes
        empty = n_valid == 0
        if empty.any():
            valid = valid.copy()
            for w in np.flatnonzero(empty):
                valid[self.offsets[w]:self.offsets[w + 1]] = True
            n_valid = np.where(empty, sizes, n_valid)
        share = np.repeat(self.counts / n_valid, sizes)
        weights = np.where(valid, share, 0.0)
        values = np.bincount(self.members, weights=weights, minlength=len(self.keys))
        return values, int(empty.sum())

    def step(self, values: np.ndarray) -> np.ndarray:
        denom = self.window_sums(values)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(denom > 0, self.counts / denom, 0.0)
        factor = np.bincount(self.members, weights=np.repeat(ratio, self.sizes),
                             minlength=len(self.keys))
        return values * factor


def relative_change(old: np.ndarray, new: np.ndarray) -> float:
    nz = old > 0
    if not nz.any():
        return 0.0
    return float(np.max(np.abs(new[nz] - old[nz]) / old[nz]))


def iterate(expansion: Expansion, values: np.ndarray, iterations: int, epsilon: float) -> tuple[np.ndarray, int]:
    """Run up to ``iterations`` steps, stopping early once the largest relative change drops below ``epsilon``."""
    done = 0
    for _ in range(iterations):
        new = expansion.step(values)
        done += 1
        change = relative_change(values, new)
        values = new
        log.debug("iteration %d: max relative change %.3g", done, change)
        if change < epsilon:
            break
    return values, done


def tag_mass(table: dict, tag_of: Callable[[tuple], int]) -> dict[int, float]:
    mass: dict[int, float] = {}
    for key in sorted(table):
        t = tag_of(key)
        mass[t] = mass.get(t, 0.0) + table[key]
    return mass


def pick(candidates: Sequence[int], scores: Sequence[float], mass: dict[int, float]) -> tuple[int, bool]:
    """Argmax with lowest-id ties; falls back to global tag mass when every score is zero.

    Returns the tag and whether the fallback was used.
    """
    order = sorted(range(len(candidates)), key=lambda i: candidates[i])
    best, best_score = None, 0.0
    for i in order:
        if scores[i] > best_score:
            best, best_score = candidates[i], scores[i]
    if best is not None:
        return best, False
    best, best_score = candidates[order[0]], -1.0
    for i in order:
        m = mass.get(candidates[i], 0.0)
        if m > best_score:
            best, best_score = candidates[i], m
    return best, True
