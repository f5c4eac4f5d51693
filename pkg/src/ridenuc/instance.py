"""Ridesharing instances and directly specified characteristic tables.

Node numbering in the cost matrix: 0 is the dummy depot, ``1..n`` are the
origins and ``n+1..2n`` the destinations, so player ``p`` (0-based) has
origin node ``p + 1`` and destination node ``p + 1 + n``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np

from .exceptions import ParseError


@dataclass(frozen=True)
class PlayerSpec:
    id: int
    origin: tuple
    destination: tuple


@dataclass(frozen=True, eq=False)
class Instance:
    players: tuple
    capacity: int
    cost: np.ndarray = field(repr=False)

    @classmethod
    def from_coordinates(cls, rows, capacity):
        """Build from ``(x_o, y_o, x_d, y_d)`` rows with Euclidean costs."""
        rows = [tuple(float(v) for v in r) for r in rows]
        if not rows:
            raise ValueError("an instance needs at least one player")
        if int(capacity) != capacity or capacity < 1:
            raise ValueError(f"capacity must be a positive integer, got {capacity}")
        players = tuple(
            PlayerSpec(i, (r[0], r[1]), (r[2], r[3])) for i, r in enumerate(rows)
        )
        return cls(players, int(capacity), euclidean_costs(players))

    @property
    def n(self):
        return len(self.players)

    def origin_node(self, p):
        return p + 1

    def destination_node(self, p):
        return p + 1 + self.n

    @cached_property
    def cost_rows(self):
        """Cost matrix as nested lists (fast scalar access in the DPs)."""
        return self.cost.tolist()

    def with_capacity(self, capacity):
        return Instance(self.players, int(capacity), self.cost)

    def to_text(self):
        lines = [f"{self.n} {self.capacity}"]
        for p in self.players:
            lines.append(" ".join([str(p.id)] + [repr(v) for v in (*p.origin, *p.destination)]))
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def euclidean_costs(players):
    n = len(players)
    pts = np.zeros((2 * n + 1, 2))
    for p in players:
        pts[p.id + 1] = p.origin
        pts[p.id + 1 + n] = p.destination
    diff = pts[:, None, :] - pts[None, :, :]
    cost = np.sqrt((diff**2).sum(axis=2))
    cost[0, :] = 0.0
    cost[:, 0] = 0.0
    return cost


def parse_instance(text):
    """Parse the ``n Q`` header plus ``id x_o y_o x_d y_d`` rows.

    Player ids must be dense, either ``0..n-1`` or ``1..n``; rows may come
    in any order.  Blank lines and ``#`` comments are ignored.
    """
    lines = [
        (no, line.split("#", 1)[0].split())
        for no, line in enumerate(text.splitlines(), start=1)
    ]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise ParseError("empty instance")
    no, head = lines[0]
    if len(head) != 2:
        raise ParseError("header must be 'n Q'", no)
    try:
        n, capacity = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError("header values must be integers", no) from None
    if n < 1:
        raise ParseError("player count must be positive", no)
    if capacity < 1:
        raise ParseError(f"capacity Q must be >= 1, got {capacity}", no)
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"header announces {n} players but {len(body)} rows follow", no)

    by_id = {}
    for no, toks in body:
        if len(toks) != 5:
            raise ParseError(f"expected 5 fields 'id x_o y_o x_d y_d', got {len(toks)}", no)
        try:
            pid = int(toks[0])
        except ValueError:
            raise ParseError(f"player id {toks[0]!r} is not an integer", no) from None
        try:
            coords = [float(t) for t in toks[1:]]
        except ValueError:
            raise ParseError("coordinates must be decimal numbers", no) from None
        if not all(math.isfinite(v) for v in coords):
            raise ParseError("non-finite coordinate", no)
        if pid in by_id:
            raise ParseError(f"duplicate player id {pid}", no)
        by_id[pid] = (no, coords)

    ids = sorted(by_id)
    if ids == list(range(n)):
        base = 0
    elif ids == list(range(1, n + 1)):
        base = 1
    else:
        raise ParseError(f"player ids must be 0..{n - 1} or 1..{n}", body[0][0])
    rows = [by_id[i + base][1] for i in range(n)]
    return Instance.from_coordinates(rows, capacity)


def load_instance(path):
    with open(path) as fh:
        return parse_instance(fh.read())


def bundled_instance(name, capacity=None):
    """One of the instances shipped with the package (``prob10c``, ``prob10d``)."""
    text = resources.files("ridenuc.data").joinpath(f"{name}.txt").read_text()
    inst = parse_instance(text)
    return inst if capacity is None else inst.with_capacity(capacity)


def random_instance(n, capacity, rng=None, size=1000.0):
    """Origins and destinations drawn uniformly from ``[0, size]^2``."""
    rng = np.random.default_rng(rng)
    return Instance.from_coordinates(rng.uniform(0.0, size, size=(n, 4)), capacity)


@dataclass(frozen=True)
class CharTableInput:
    """Costs for every non-empty coalition, keyed by player bitmask."""

    n: int
    entries: dict
    capacity: int | None = None

    def to_json(self):
        coalitions = [
            {"members": [i + 1 for i in range(self.n) if mask >> i & 1], "cost": cost}
            for mask, cost in sorted(self.entries.items())
        ]
        data = {"n": self.n}
        if self.capacity is not None:
            data["capacity"] = self.capacity
        data["coalitions"] = coalitions
        return json.dumps(data)

    def digest(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()


def parse_char_table(text):
    """Parse ``{"n": int, "coalitions": [{"members": [...], "cost": x}, ...]}``.

    Members are player numbers ``1..n``.  Every non-empty coalition must
    be listed exactly once.  An optional ``"capacity"`` key marks which
    coalitions count as feasible (``|S| <= capacity``); it defaults to ``n``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(data, dict) or "n" not in data or "coalitions" not in data:
        raise ParseError("expected an object with keys 'n' and 'coalitions'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("'n' must be a positive integer")
    if n > 20:
        raise ParseError(f"characteristic tables are limited to 20 players, got {n}")

    capacity = data.get("capacity")
    if capacity is not None and (
        not isinstance(capacity, int) or isinstance(capacity, bool) or capacity < 1
    ):
        raise ParseError("'capacity' must be a positive integer")

    entries = {}
    problems = []
    for k, item in enumerate(data["coalitions"]):
        try:
            members = item["members"]
            cost = float(item["cost"])
        except (KeyError, TypeError, ValueError):
            problems.append(f"entry {k}: needs 'members' list and numeric 'cost'")
            continue
        bad = [m for m in members if not isinstance(m, int) or not 1 <= m <= n]
        if bad:
            problems.append(f"entry {k}: out-of-range member(s) {bad}")
            continue
        if not members:
            problems.append(f"entry {k}: empty coalition")
            continue
        if not math.isfinite(cost) or cost < 0:
            problems.append(f"entry {k}: negative or non-finite cost {item['cost']}")
            continue
        mask = 0
        for m in members:
            mask |= 1 << (m - 1)
        if mask in entries:
            problems.append(f"entry {k}: duplicate coalition {sorted(set(members))}")
            continue
        entries[mask] = cost

    missing = [mask for mask in range(1, 1 << n) if mask not in entries]
    if missing:
        shown = ", ".join(
            str([i + 1 for i in range(n) if mask >> i & 1]) for mask in missing[:10]
        )
        more = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        problems.append(f"missing coalition(s): {shown}{more}")
    if problems:
        raise ParseError("; ".join(problems))
    return CharTableInput(n, entries, capacity)


def load_char_table(path):
    with open(path) as fh:
        return parse_char_table(fh.read())
