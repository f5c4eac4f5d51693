"""Coalitions as player bitmasks, allocations, and excess arithmetic.

A coalition is a plain ``int`` whose bit ``i`` is set when player ``i``
(0-based) belongs to it.  Characteristic tables are any object exposing
``n`` and ``cost(mask)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LESS, EQUAL, GREATER = -1, 0, 1


def from_members(members):
    mask = 0
    for i in members:
        mask |= 1 << i
    return mask


def members(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def cardinality(mask):
    return bin(mask).count("1")


def grand(n):
    return (1 << n) - 1


def proper_coalitions(n):
    """All ``S`` with ``{} < S < N``, in ascending bitmask order."""
    return range(1, grand(n))


def incidence(masks, n):
    """0/1 matrix with one row per coalition."""
    masks = np.asarray(list(masks), dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def label(mask):
    """1-based member list, the serialized form of a coalition."""
    return [i + 1 for i in members(mask)]


@dataclass(frozen=True)
class Allocation:
    """Per-player cost vector."""

    y: tuple
    imputation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))

    @property
    def total(self):
        return float(np.sum(self.y))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.y, dtype=dtype)

    def __len__(self):
        return len(self.y)


def _vector(y):
    return np.asarray(y, dtype=float).ravel()


def excess(table, S, y):
    """``c(S) - sum_{i in S} y_i``."""
    if S <= 0 or S >> table.n:
        raise ValueError(f"coalition {S:#b} is empty or out of range for n={table.n}")
    y = _vector(y)
    return table.cost(S) - float(sum(y[i] for i in members(S)))


def excess_vector(table, y):
    """Excesses of all proper coalitions, sorted non-decreasing (ties by bitmask).

    Returns a list of ``(mask, excess)`` pairs of length ``2^n - 2``.
    """
    y = _vector(y)
    if y.size != table.n:
        raise ValueError(f"allocation has {y.size} entries for {table.n} players")
    masks = np.arange(1, grand(table.n), dtype=np.int64)
    if masks.size == 0:
        return []
    costs = np.array([table.cost(int(m)) for m in masks])
    values = costs - incidence(masks, table.n) @ y
    order = np.lexsort((masks, values))
    return [(int(masks[k]), float(values[k])) for k in order]


def lex_compare(a, b, tol=0.0):
    """Compare two sorted excess vectors lexicographically.

    Entries may be plain numbers or ``(mask, value)`` pairs; differences no
    larger than ``tol`` count as equal.
    """
    if len(a) != len(b):
        raise ValueError(f"excess vectors differ in length ({len(a)} vs {len(b)})")
    for u, v in zip(a, b):
        u = u[1] if isinstance(u, tuple) else u
        v = v[1] if isinstance(v, tuple) else v
        if u > v + tol:
            return GREATER
        if u < v - tol:
            return LESS
    return EQUAL


def is_feasible(S, capacity):
    """One vehicle can serve ``S``: ``1 <= |S| <= Q``."""
    return 1 <= cardinality(S) <= capacity


def is_profitable_coalition(table, S):
    """Members pay no more together than the sum of their solo costs."""
    if S <= 0:
        raise ValueError("profitability is undefined for the empty coalition")
    return sum(table.cost(1 << i) for i in members(S)) >= table.cost(S)


def in_core(table, y, tol=1e-9):
    """Efficient and every proper excess non-negative."""
    y = _vector(y)
    if abs(y.sum() - table.cost(grand(table.n))) > tol * max(1.0, abs(y.sum())):
        return False
    ev = excess_vector(table, y)
    return not ev or ev[0][1] >= -tol
