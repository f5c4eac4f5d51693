"""Minimum-cost partition of a player set into capacity-feasible routes.

Every block cost comes from the exact single-vehicle oracle in
:mod:`ridenuc.tsppd`.  Blocks whose route can be split into two cheaper
routes are never part of an optimal plan, so they are pruned before the
subset dynamic program runs.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .coalition import cardinality
from .exceptions import ScaleLimitError
from .tsppd import TIE_TOL, solve_tsppd

MAX_PLAYERS = 16


@dataclass(frozen=True)
class Partition:
    blocks: tuple
    cost: float
    routes: tuple = ()


def _submasks_with_low(mask):
    """Submasks of ``mask`` that contain its lowest set bit, ascending."""
    low = mask & -mask
    rest = mask ^ low
    subs = []
    s = rest
    while True:
        subs.append(s | low)
        if s == 0:
            break
        s = (s - 1) & rest
    subs.reverse()
    return subs


def is_profitable_split(S, block_cost):
    """True iff no split of ``S`` into two non-empty parts is strictly cheaper."""
    whole = block_cost(S)
    tol = TIE_TOL * max(1.0, abs(whole))
    for part in _submasks_with_low(S):
        if part == S:
            continue
        if block_cost(part) + block_cost(S ^ part) < whole - tol:
            return False
    return True


class PartitionDP:
    """Memoized optimal partitions into admissible blocks.

    ``block_cost(mask)`` returns the cost of using ``mask`` as one block,
    or ``None`` when the block is not admissible.  Among equal-cost
    partitions the one with the lexicographically smallest sorted list of
    block bitmasks wins.
    """

    def __init__(self, block_cost):
        self.block_cost = block_cost
        self._memo = {0: (0.0, ())}

    def solve(self, mask):
        hit = self._memo.get(mask)
        if hit is not None:
            return hit
        best_cost, best_blocks = float("inf"), None
        for b in _submasks_with_low(mask):
            bc = self.block_cost(b)
            if bc is None:
                continue
            sub_cost, sub_blocks = self.solve(mask ^ b)
            total = bc + sub_cost
            tol = TIE_TOL * max(1.0, abs(total))
            if total < best_cost - tol:
                best_cost, best_blocks = total, tuple(sorted(sub_blocks + (b,)))
            elif total <= best_cost + tol:
                cand = tuple(sorted(sub_blocks + (b,)))
                if cand < best_blocks:
                    best_cost, best_blocks = min(best_cost, total), cand
        if best_blocks is None:
            raise ValueError(f"coalition {mask:#b} admits no partition into allowed blocks")
        self._memo[mask] = (best_cost, best_blocks)
        return best_cost, best_blocks


class RspSolver:
    """Route and partition memo for one instance."""

    def __init__(self, inst):
        if inst.n > MAX_PLAYERS:
            raise ScaleLimitError(
                f"exact ridesharing optimization is limited to {MAX_PLAYERS} players, got {inst.n}"
            )
        self.inst = inst
        self._routes = {}
        self._profitable = {}
        self.dp = PartitionDP(self._block_cost)

    def route(self, S):
        r = self._routes.get(S)
        if r is None:
            r = self._routes[S] = solve_tsppd(self.inst, S)
        return r

    def route_cost(self, S):
        return self.route(S).cost

    def is_profitable_route(self, S):
        hit = self._profitable.get(S)
        if hit is None:
            hit = self._profitable[S] = is_profitable_split(S, self.route_cost)
        return hit

    def _block_cost(self, S):
        if cardinality(S) > self.inst.capacity or not self.is_profitable_route(S):
            return None
        return self.route_cost(S)

    def value(self, S):
        return self.dp.solve(S)[0]

    def partition(self, S):
        cost, blocks = self.dp.solve(S)
        return Partition(blocks, cost, tuple(self.route(b) for b in blocks))


_solvers = weakref.WeakKeyDictionary()


def solver_for(inst):
    solver = _solvers.get(inst)
    if solver is None:
        solver = _solvers[inst] = RspSolver(inst)
    return solver


def solve_rsp(inst, S=None) -> Partition:
    """Optimal ridesharing plan for coalition ``S`` (default: all players)."""
    if S is None:
        S = (1 << inst.n) - 1
    if S <= 0:
        raise ValueError("cannot plan rides for an empty coalition")
    if S >> inst.n:
        raise ValueError(f"coalition {S:#b} has players outside 0..{inst.n - 1}")
    return solver_for(inst).partition(S)


def is_profitable_route(inst, S):
    """No two-way split of ``S`` has cheaper optimal routes than ``S`` itself."""
    if not 1 <= cardinality(S) <= inst.capacity:
        raise ValueError(f"coalition {S:#b} is not feasible under capacity {inst.capacity}")
    return solver_for(inst).is_profitable_route(S)
