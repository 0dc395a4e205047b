"""Internal carriage: travel on the beam axis and valve-visit scheduling.

The carriage rides the inner material, so it can only reach the everted
span. Batches of valve operations are ordered to minimize travel time; small
batches are solved exactly by dynamic programming over visited subsets,
larger ones by nearest-feasible greedy plus 2-opt, flagged non-optimal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

DEFAULT_SPEED_MPS = 0.1
DEFAULT_DWELL_S = 2.0
EXACT_ROUTE_LIMIT = 10


class CarriageError(Exception):
    pass


class BeyondEvertedError(CarriageError):
    pass


class PrecedenceCycleError(CarriageError):
    pass


@dataclass
class CarriagePose:
    x_m: float = 0.0
    speed_mps: float = DEFAULT_SPEED_MPS
    dwell_s: float = DEFAULT_DWELL_S

    def __post_init__(self):
        if self.speed_mps <= 0:
            raise CarriageError("carriage speed must be > 0")


@dataclass
class RouteOp:
    position_m: float
    action: str = "dwell"  # hold | release | dwell


@dataclass
class RouteTask:
    ops: list[RouteOp]
    precedence: list[tuple[int, int]] = field(default_factory=list)  # (i before j)


@dataclass
class RoutePlan:
    order: list[int]
    leg_times_s: list[float]
    total_time_s: float
    optimal: bool

    def to_records(self) -> list[dict]:
        return [{"op": i, "leg_time_s": t} for i, t in zip(self.order, self.leg_times_s)]


def travel_time(from_x: float, to_x: float, speed_mps: float) -> float:
    if speed_mps <= 0:
        raise CarriageError("speed must be > 0")
    return abs(to_x - from_x) / speed_mps


def advance(pose: CarriagePose, target_x: float, clock_s: float,
            everted_m: float) -> tuple[CarriagePose, float]:
    """Drive to target_x; the rail exists only over the everted span."""
    if target_x < -1e-9 or target_x > everted_m + 1e-9:
        raise BeyondEvertedError(
            f"target {target_x:.4g} m outside everted span [0, {everted_m:.4g}] m")
    dt = travel_time(pose.x_m, target_x, pose.speed_mps)
    return CarriagePose(target_x, pose.speed_mps, pose.dwell_s), clock_s + dt


def _predecessor_masks(n: int, precedence: list[tuple[int, int]]) -> list[int]:
    preds = [0] * n
    for i, j in precedence:
        if not (0 <= i < n and 0 <= j < n):
            raise CarriageError(f"precedence ({i}, {j}) references missing op")
        preds[j] |= 1 << i
    # cycle check via Kahn's algorithm
    remaining = set(range(n))
    changed = True
    while changed:
        changed = False
        for k in sorted(remaining):
            mask = preds[k]
            if all(p not in remaining for p in range(n) if mask >> p & 1):
                remaining.discard(k)
                changed = True
    if remaining:
        raise PrecedenceCycleError(f"cyclic precedence among ops {sorted(remaining)}")
    return preds


def plan_route(task: RouteTask, start_x: float, pose: CarriagePose) -> RoutePlan:
    """Order the ops to minimize total time = travel/speed + count*dwell.

    Exact (subset DP) up to EXACT_ROUTE_LIMIT ops; greedy + 2-opt beyond,
    with the plan flagged non-optimal.
    """
    n = len(task.ops)
    if n == 0:
        return RoutePlan([], [], 0.0, True)
    preds = _predecessor_masks(n, task.precedence)
    positions = [op.position_m for op in task.ops]
    v = pose.speed_mps

    if n <= EXACT_ROUTE_LIMIT:
        order = _exact_order(positions, preds, start_x)
        optimal = True
    else:
        order = _greedy_two_opt(positions, preds, start_x)
        optimal = False

    legs = []
    at = start_x
    for k in order:
        legs.append(travel_time(at, positions[k], v))
        at = positions[k]
    total = sum(legs) + n * pose.dwell_s
    return RoutePlan(order, legs, total, optimal)


def _exact_order(positions: list[float], preds: list[int], start_x: float) -> list[int]:
    n = len(positions)
    full = (1 << n) - 1
    # best[(mask, last)] = (travel, parent) with deterministic tie-breaking
    best: dict[tuple[int, int], tuple[float, tuple[int, int] | None]] = {}
    for k in range(n):
        if preds[k] == 0:
            state = (1 << k, k)
            cost = abs(positions[k] - start_x)
            if state not in best or cost < best[state][0]:
                best[state] = (cost, None)
    frontier = dict(best)
    while frontier:
        nxt: dict[tuple[int, int], tuple[float, tuple[int, int] | None]] = {}
        for (mask, last), (cost, _) in sorted(frontier.items()):
            for k in range(n):
                if mask >> k & 1 or (preds[k] & ~mask):
                    continue
                state = (mask | 1 << k, k)
                c = cost + abs(positions[k] - positions[last])
                if state not in best or c < best[state][0] - 1e-15:
                    best[state] = (c, (mask, last))
                    nxt[state] = best[state]
        frontier = nxt
    end_states = [(c, last, state) for state, (c, _) in best.items()
                  if state[0] == full for last in [state[1]]]
    if not end_states:
        raise PrecedenceCycleError("no feasible order")  # unreachable after cycle check
    _, _, state = min(end_states, key=lambda t: (t[0], t[1]))
    order: list[int] = []
    while state is not None:
        order.append(state[1])
        state = best[state][1]
    return order[::-1]


def _feasible(preds: list[int], done_mask: int, k: int) -> bool:
    return not (preds[k] & ~done_mask)


def _route_travel(positions: list[float], order: list[int], start_x: float) -> float:
    at = start_x
    total = 0.0
    for k in order:
        total += abs(positions[k] - at)
        at = positions[k]
    return total


def _greedy_two_opt(positions: list[float], preds: list[int], start_x: float) -> list[int]:
    n = len(positions)
    order: list[int] = []
    done = 0
    at = start_x
    while len(order) < n:
        candidates = [k for k in range(n) if not done >> k & 1 and _feasible(preds, done, k)]
        k = min(candidates, key=lambda k: (abs(positions[k] - at), k))
        order.append(k)
        done |= 1 << k
        at = positions[k]

    def valid(seq: list[int]) -> bool:
        seen = 0
        for k in seq:
            if preds[k] & ~seen:
                return False
            seen |= 1 << k
        return True

    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                cand = order[:i] + order[i:j + 1][::-1] + order[j + 1:]
                if valid(cand) and (_route_travel(positions, cand, start_x)
                                    < _route_travel(positions, order, start_x) - 1e-12):
                    order = cand
                    improved = True
    return order


def travel_lower_bound(start_x: float, positions: list[float]) -> float:
    """Weak line-metric bound: must at least reach the farthest op from the
    lowest point it ever needs to visit."""
    if not positions:
        return 0.0
    return max(positions) - min(start_x, min(positions))
