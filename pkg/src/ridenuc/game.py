"""Characteristic tables: memoized ``c(S)`` for ridesharing and tabulated games."""

from __future__ import annotations

import numpy as np

from .coalition import cardinality, grand
from .instance import CharTableInput, Instance
from .rsp import Partition, PartitionDP, is_profitable_split, solver_for


class CharTable:
    """Common surface of the two game sources.

    ``cost(mask)`` is the characteristic value, ``capacity`` decides which
    coalitions are feasible, and ``optimal_partition()`` is the optimal
    plan for the grand coalition.
    """

    n: int
    capacity: int
    kind: str

    def cost(self, S):
        raise NotImplementedError

    def costs(self, masks):
        return np.array([self.cost(int(m)) for m in masks], dtype=float)

    @property
    def grand(self):
        return grand(self.n)

    @property
    def grand_cost(self):
        return self.cost(self.grand)

    def is_feasible(self, S):
        return 1 <= cardinality(S) <= self.capacity

    def optimal_partition(self) -> Partition:
        raise NotImplementedError

    def digest(self):
        raise NotImplementedError


class InstanceGame(CharTable):
    """``c(S)`` is the optimal ridesharing plan cost of ``S``."""

    kind = "instance"

    def __init__(self, inst: Instance):
        self.instance = inst
        self.n = inst.n
        self.capacity = inst.capacity
        self.solver = solver_for(inst)

    def cost(self, S):
        if S == 0:
            return 0.0
        return self.solver.value(S)

    def route_cost(self, S):
        return self.solver.route_cost(S)

    def witness(self, S):
        return self.solver.partition(S)

    def optimal_partition(self):
        return self.solver.partition(self.grand)

    def digest(self):
        return self.instance.digest()


class TableGame(CharTable):
    """Costs given explicitly for every coalition."""

    kind = "table"

    def __init__(self, table: CharTableInput, capacity=None):
        self.table = table
        self.n = table.n
        if capacity is None:
            capacity = table.capacity if table.capacity is not None else table.n
        self.capacity = int(capacity)
        self._dp = PartitionDP(self._block_cost)

    def cost(self, S):
        if S == 0:
            return 0.0
        return self.table.entries[S]

    def _block_cost(self, S):
        if cardinality(S) > self.capacity or not is_profitable_split(S, self.cost):
            return None
        return self.cost(S)

    def optimal_partition(self):
        cost, blocks = self._dp.solve(self.grand)
        return Partition(blocks, cost)

    def digest(self):
        return self.table.digest()


def as_game(source, capacity=None) -> CharTable:
    if isinstance(source, CharTable):
        return source
    if isinstance(source, Instance):
        if capacity is not None and capacity != source.capacity:
            source = source.with_capacity(capacity)
        return InstanceGame(source)
    if isinstance(source, CharTableInput):
        return TableGame(source, capacity)
    raise TypeError(f"cannot build a game from {type(source).__name__}")
