"""Exact single-vehicle pickup-and-delivery routing.

A route for coalition ``S`` starts at its driver's origin, ends at the
driver's destination, and visits every other member's origin before that
member's destination.  The optimum is found by a dynamic program over
(visited nodes, last node), run once per candidate driver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coalition import cardinality, members

TIE_TOL = 1e-9


@dataclass(frozen=True)
class Route:
    driver: int
    stops: tuple
    cost: float
    players: int

    def node_labels(self, n):
        """Stops as ``"3"`` (origin of player 3) / ``"3'"`` (its destination)."""
        return [str(s) if s <= n else f"{s - n}'" for s in self.stops]


def route_cost(inst, stops):
    c = inst.cost_rows
    return sum(c[a][b] for a, b in zip(stops, stops[1:]))


def _best_for_driver(c, n, d, others):
    """Min-cost precedence-feasible route for driver ``d`` and its stop sequence."""
    k = len(others)
    pick = [p + 1 for p in others]
    drop = [p + 1 + n for p in others]
    full = (1 << (2 * k)) - 1
    end = d + 1 + n
    memo = {}

    def moves(vis):
        for j in range(k):
            ob = 1 << (2 * j)
            if not vis & ob:
                yield vis | ob, pick[j]
            elif not vis & (ob << 1):
                yield vis | (ob << 1), drop[j]

    def g(vis, last):
        key = (vis, last)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if vis == full:
            best = c[last][end]
        else:
            row = c[last]
            best = min(row[node] + g(nvis, node) for nvis, node in moves(vis))
        memo[key] = best
        return best

    start = d + 1
    total = g(0, start)
    tol = TIE_TOL * max(1.0, total)
    # walk forward taking the smallest node id that stays optimal
    stops = [start]
    vis, last, remaining = 0, start, total
    while vis != full:
        row = c[last]
        options = sorted((node, nvis) for nvis, node in moves(vis))
        for node, nvis in options:
            rest = g(nvis, node)
            if row[node] + rest <= remaining + tol:
                stops.append(node)
                vis, last, remaining = nvis, node, rest
                break
    stops.append(end)
    return total, tuple(stops)


def solve_tsppd(inst, S) -> Route:
    """Minimum-cost single-vehicle route serving exactly the members of ``S``.

    Ties are broken towards the lexicographically smallest stop sequence.
    """
    size = cardinality(S)
    if size == 0:
        raise ValueError("cannot route an empty coalition")
    if S >> inst.n:
        raise ValueError(f"coalition {S:#b} has players outside 0..{inst.n - 1}")
    if size > inst.capacity:
        raise ValueError(f"coalition of {size} players exceeds capacity {inst.capacity}")
    c = inst.cost_rows
    team = members(S)
    found = []
    for d in team:
        others = [p for p in team if p != d]
        cost, stops = _best_for_driver(c, inst.n, d, others)
        found.append((cost, stops, d))
    best = min(cost for cost, _, _ in found)
    tol = TIE_TOL * max(1.0, best)
    stops, cost, d = min((s, cost, d) for cost, s, d in found if cost <= best + tol)
    return Route(d, stops, cost, S)


def char_value_feasible(inst, S):
    """Cost of the optimal single route for a feasible coalition."""
    return solve_tsppd(inst, S).cost
