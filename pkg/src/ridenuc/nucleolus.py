"""Nucleolus by staged maximin LPs with coalition generation.

Each stage maximizes the smallest excess ``w_t`` over the coalitions that
are not yet fixed.  Only a working set of coalition rows lives in the
master LP; a generator searches the remaining coalitions for the most
violated row and adds it until none is left.  Rows that stay binding on
the whole optimal face are then fixed as equalities at level ``w_t``, and
the next stage starts.  The procedure stops once the optimal face
collapses to a single allocation.

Three modes share the driver:

* ``exact``        generate from all proper coalitions;
* ``approximate``  generate from feasible coalitions (``|S| <= Q``) only;
* ``brute``        load the whole family up front and never generate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .coalition import cardinality, grand, incidence, label, members
from .exceptions import NumericalError, ScaleLimitError
from .game import CharTable, as_game

logger = logging.getLogger(__name__)

EXACT = "exact"
APPROXIMATE = "approximate"
BRUTE = "brute"
MODES = (EXACT, APPROXIMATE, BRUTE)

SAFE = "safe"
DUAL = "dual"

ALL = "all"
FEASIBLE = "feasible"

GEN_TOL = 1e-9
TIGHT_TOL = lp.CLUSTER_TOL
UNIQUE_TOL = lp.CLUSTER_TOL
BRUTE_MAX_PLAYERS = 12


@dataclass
class MasterState:
    n: int
    ineq: list = field(default_factory=list)
    eq: list = field(default_factory=list)  # (mask, level)
    settled: dict = field(default_factory=dict)  # mask -> constant excess
    stage: int = 1
    y: np.ndarray | None = None
    w: float | None = None

    def known(self):
        """Every coalition the master already accounts for."""
        out = set(self.ineq)
        out.update(m for m, _ in self.eq)
        out.update(self.settled)
        return out


@dataclass
class StageRecord:
    stage: int
    level: float
    generated: list
    fixed: list
    unique: bool = False


@dataclass
class NucleolusResult:
    allocation: np.ndarray
    mode: str
    fixation: str
    family: str
    grand_cost: float
    stages: list
    initial: list
    generated: list
    events: list
    n: int

    @property
    def generated_count(self):
        """Distinct coalition rows that ever entered the master."""
        return len(self.initial) + len(self.generated)

    @property
    def total_proper_coalitions(self):
        return (1 << self.n) - 2

    @property
    def fraction(self):
        total = self.total_proper_coalitions
        return self.generated_count / total if total > 0 else None

    @property
    def least_core_value(self):
        return self.stages[0].level


class CandidateFamily:
    """Coalitions a generator may draw from, with cached costs and incidence rows."""

    def __init__(self, game: CharTable, family=ALL):
        n = game.n
        if family == ALL:
            masks = list(range(1, grand(n)))
        elif family == FEASIBLE:
            masks = [m for m in range(1, grand(n)) if cardinality(m) <= game.capacity]
        else:
            raise ValueError(f"unknown coalition family {family!r}")
        self.name = family
        self.masks = np.asarray(masks, dtype=np.int64)
        self.costs = game.costs(self.masks)
        self.rows = incidence(self.masks, n) if masks else np.zeros((0, n))
        self._index = {m: k for k, m in enumerate(masks)}

    def __len__(self):
        return self.masks.size

    def __contains__(self, mask):
        return mask in self._index

    def mark(self, excluded, masks, value=True):
        for m in masks:
            k = self._index.get(m)
            if k is not None:
                excluded[k] = value


def _most_violated(fam: CandidateFamily, y, w, excluded):
    if len(fam) == 0:
        return None
    values = fam.costs - fam.rows @ np.asarray(y, dtype=float) - w
    values = np.where(excluded, np.inf, values)
    best = values.min()
    if not best <= GEN_TOL:
        return None
    # masks are ascending, so the first near-minimum is the smallest bitmask
    k = int(np.argmax(values <= best + GEN_TOL))
    return int(fam.masks[k]), float(values[k])


def _excluded(fam, omega):
    flags = np.zeros(len(fam), dtype=bool)
    fam.mark(flags, omega)
    return flags


def general_generator(game, y, w, omega, family=None):
    """Most violated proper coalition outside ``omega``: ``min c(S) - y(S) - w``.

    Returns ``(S, value)`` when the value is ``<= GEN_TOL``, else ``None``.
    """
    fam = family or CandidateFamily(as_game(game), ALL)
    return _most_violated(fam, y, w, _excluded(fam, omega))


def feasible_generator(game, y, w, omega, family=None):
    """As :func:`general_generator`, restricted to coalitions with ``|S| <= Q``."""
    fam = family or CandidateFamily(as_game(game), FEASIBLE)
    return _most_violated(fam, y, w, _excluded(fam, omega))


def initial_master(game, mode=EXACT, family=None):
    """Singletons plus the blocks of the optimal plan (everything, in brute mode)."""
    game = as_game(game)
    n = game.n
    state = MasterState(n)
    if n == 1:
        state.ineq = [1]
        return state
    if mode == BRUTE:
        fam = family if isinstance(family, CandidateFamily) else CandidateFamily(game, family or ALL)
        state.ineq = [int(m) for m in fam.masks]
        return state
    rows = [1 << i for i in range(n)]
    for b in game.optimal_partition().blocks:
        if b != game.grand and b not in rows:
            rows.append(b)
    state.ineq = rows
    return state


def master_lp(state: MasterState, game: CharTable, w_cap):
    n = game.n
    rows, senses, rhs = [], [], []
    for S in state.ineq:
        row = np.zeros(n + 1)
        row[members(S)] = 1.0
        row[n] = 1.0
        rows.append(row)
        senses.append(lp.LE)
        rhs.append(game.cost(S))
    for S, level in state.eq:
        row = np.zeros(n + 1)
        row[members(S)] = 1.0
        rows.append(row)
        senses.append(lp.EQ)
        rhs.append(game.cost(S) - level)
    row = np.ones(n + 1)
    row[n] = 0.0
    rows.append(row)
    senses.append(lp.EQ)
    rhs.append(game.grand_cost)
    objective = np.zeros(n + 1)
    objective[n] = 1.0
    upper = np.full(n + 1, np.inf)
    upper[n] = w_cap
    return lp.LinearProgram.build(objective, rows, senses, rhs, upper=upper)


def step_master(state: MasterState, game, w_cap=None):
    """Solve the stage LP; returns ``(y, w, duals)`` with duals keyed by coalition."""
    game = as_game(game)
    if not state.ineq:
        raise ValueError("the master needs at least one inequality row")
    if w_cap is None:
        w_cap = _initial_cap(game)
    sol = lp.solve(master_lp(state, game, w_cap))
    if not sol.optimal:
        raise NumericalError(f"stage-{state.stage} master LP ended with status {sol.status}")
    y, w = sol.x[: game.n], float(sol.x[game.n])
    duals = {S: float(sol.duals[k]) for k, S in enumerate(state.ineq)}
    state.y, state.w = y, w
    return y, w, duals


def _initial_cap(game):
    singles = sum(abs(game.cost(1 << i)) for i in range(game.n))
    return 2.0 * (singles + abs(game.grand_cost)) + 1.0


def _lower_bounds(state, game, w):
    """``excess lower bound - cost`` for every coalition the master knows."""
    val = {S: w - game.cost(S) for S in state.ineq}
    val.update((S, level - game.cost(S)) for S, level in state.eq)
    val.update((S, e - game.cost(S)) for S, e in state.settled.items())
    return val


def is_implied(S, game, val, w):
    """True if ``S`` splits into known coalitions that already force ``e(S) >= w``.

    With ``S = B_1 + ... + B_k`` we have ``e(S) = c(S) - sum c(B_j) + sum e(B_j)``,
    so the best split bounds ``e(S)`` from below.  Such a row cannot cut the
    current optimal face.
    """
    parts = [B for B in val if B & S == B and B != S]
    memo = {0: 0.0}

    def best(T):
        hit = memo.get(T)
        if hit is not None:
            return hit
        low = T & -T
        out = -np.inf
        for B in parts:
            if B & low and B & T == B:
                out = max(out, val[B] + best(T ^ B))
        memo[T] = out
        return out

    c = game.cost(S)
    return c + best(S) >= w - GEN_TOL * max(1.0, abs(c))


def _row_space(state, n):
    E = [np.ones(n)]
    for S, _ in state.eq:
        v = np.zeros(n)
        v[members(S)] = 1.0
        E.append(v)
    _, s, vt = np.linalg.svd(np.array(E))
    rank = int((s > 1e-9 * s[0]).sum())
    return vt[:rank]


def _in_span(rows, basis):
    if rows.size == 0:
        return np.zeros(0, dtype=bool)
    resid = rows - (rows @ basis.T) @ basis
    return np.linalg.norm(resid, axis=1) <= 1e-9


def _fix_safe(state, game, face, w):
    fixed = []
    for S in state.ineq:
        slack = game.cost(S) - state.y[members(S)].sum() - w
        if slack > TIGHT_TOL:
            continue
        direction = np.zeros(game.n + 1)
        direction[members(S)] = -1.0
        direction[game.n] = -1.0
        _, hi = lp.face_extent(face, w, direction)
        if game.cost(S) + hi <= TIGHT_TOL:
            fixed.append(S)
    return fixed


def _is_unique(face, w, n):
    for i in range(n):
        lo, hi = lp.probe_range(face, w, i)
        if not hi - lo <= UNIQUE_TOL:
            return False
    return True


def run(source, mode=EXACT, fixation=SAFE, capacity=None, family=None, on_event=None):
    """Nucleolus of the game (or its approximation over feasible coalitions).

    ``source`` is an :class:`~ridenuc.instance.Instance`, a
    :class:`~ridenuc.instance.CharTableInput` or a prepared game.
    ``family`` overrides the coalition family implied by ``mode``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if fixation not in (SAFE, DUAL):
        raise ValueError(f"fixation must be {SAFE!r} or {DUAL!r}, got {fixation!r}")
    game = as_game(source, capacity)
    n = game.n
    family = family or (FEASIBLE if mode == APPROXIMATE else ALL)
    if mode == BRUTE and n > BRUTE_MAX_PLAYERS:
        raise ScaleLimitError(f"brute-force nucleolus is limited to {BRUTE_MAX_PLAYERS} players")
    fam = CandidateFamily(game, family)
    state = initial_master(game, mode, fam)
    initial = list(state.ineq)
    excluded = _excluded(fam, state.known())

    generated, stages, events = [], [], []
    w_cap = _initial_cap(game)
    iteration = 0
    stage_generated = []
    implied = set()
    while True:
        while True:
            y, w, duals = step_master(state, game, w_cap)
            iteration += 1
            event = {
                "iteration": iteration,
                "stage": state.stage,
                "w": w,
                "y": y.tolist(),
                "rows": len(state.ineq) + len(state.eq),
            }
            events.append(event)
            if on_event is not None:
                on_event(event)
            if mode == BRUTE:
                break
            # rows skipped as implied must stay implied at the new optimum
            val = _lower_bounds(state, game, w)
            released = [S for S in implied if not is_implied(S, game, val, w)]
            implied.difference_update(released)
            fam.mark(excluded, released, False)
            hit = _most_violated(fam, y, w, excluded)
            while hit is not None and is_implied(hit[0], game, val, w):
                implied.add(hit[0])
                fam.mark(excluded, [hit[0]])
                hit = _most_violated(fam, y, w, excluded)
            if hit is None:
                break
            S, value = hit
            logger.debug("stage %d: adding %s (violation %.3g)", state.stage, label(S), value)
            state.ineq.append(S)
            fam.mark(excluded, [S])
            stage_generated.append(S)
            generated.append(S)

        if w >= w_cap - GEN_TOL * max(1.0, abs(w_cap)):
            if w_cap > 1e15:
                raise NumericalError("maximin excess does not stay bounded")
            w_cap *= 16.0
            continue

        face = master_lp(state, game, w_cap)
        if _is_unique(face, w, n):
            stages.append(StageRecord(state.stage, w, stage_generated, [], unique=True))
            break

        if fixation == DUAL:
            fixed = [S for S in state.ineq if duals[S] > lp.OPT_TOL]
        else:
            fixed = _fix_safe(state, game, face, w)
        if not fixed:
            raise NumericalError(f"stage {state.stage}: no coalition could be fixed")
        stages.append(StageRecord(state.stage, w, stage_generated, fixed))
        fixed_set = set(fixed)
        state.ineq = [S for S in state.ineq if S not in fixed_set]
        state.eq.extend((S, w) for S in fixed)

        # coalitions in the span of the fixed rows have constant excess from here on
        basis = _row_space(state, n)
        if state.ineq:
            rows = incidence(state.ineq, n)
            dependent = _in_span(rows, basis)
            for S, dep in zip(list(state.ineq), dependent):
                if dep:
                    state.settled[S] = game.cost(S) - float(y[members(S)].sum())
            state.ineq = [S for S, dep in zip(state.ineq, dependent) if not dep]

        fam.mark(excluded, implied, False)
        implied.clear()
        excluded |= _in_span(fam.rows, basis)

        state.stage += 1
        stage_generated = []
        if state.stage > n:
            raise RuntimeError(f"stage count exceeded {n}; fixation is not making progress")

    return NucleolusResult(
        allocation=np.asarray(y, dtype=float),
        mode=mode,
        fixation=fixation,
        family=family,
        grand_cost=game.grand_cost,
        stages=stages,
        initial=initial,
        generated=generated,
        events=events,
        n=n,
    )


def brute_nucleolus(source, capacity=None, family=ALL, fixation=SAFE):
    """Nucleolus with every coalition of ``family`` in the master from the start."""
    return run(source, BRUTE, fixation=fixation, capacity=capacity, family=family)


@dataclass
class CoreCheck:
    nonempty: bool
    least_core_value: float
    allocation: np.ndarray

    @property
    def empty(self):
        return not self.nonempty


def core_check(source, capacity=None):
    """Decide core emptiness from the stage-1 maximin excess.

    Ridesharing games only need feasible coalitions (every other cost is a
    sum of feasible block costs); tabulated games use all coalitions.  The
    returned allocation is the nucleolus over that family, which lies in
    the least core.
    """
    game = as_game(source, capacity)
    family = FEASIBLE if game.kind == "instance" else ALL
    res = run(game, APPROXIMATE if family == FEASIBLE else EXACT, family=family)
    w1 = res.least_core_value
    return CoreCheck(w1 >= -TIGHT_TOL, w1, res.allocation)
