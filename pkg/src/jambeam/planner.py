"""Configuration planner: from a goal polyline to a jam/pull/jam script.

The robot shape is decided by one grid angle per pouch, so the planner runs
dynamic programming over (pouch, cumulative heading). Each pouch's stage
cost measures how far its straight body segment strays from the goal's
matching arc-length window (both re-anchored at the window start), which
decomposes exactly over stages; the reported residual is the true discrete
Frechet distance between the predicted shape and the goal.

Scripts come out base to tip, one pouch unjammed at a time, so the buckle
always lands on the intended pouch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kinematics
from .actions import Action, Grow, JamPouch, PullCable, Side, UnjamPouch
from .config import RobotSpec

DEFAULT_GRID_RAD = tuple(math.radians(d) for d in
                         (0.0, 15.0, -15.0, 30.0, -30.0, 45.0, -45.0,
                          60.0, -60.0, 90.0, -90.0))
FRECHET_SAMPLES = 64
_STAGE_SAMPLES = 16


class PlannerError(Exception):
    pass


class GoalTooLongError(PlannerError):
    pass


@dataclass
class GoalShape:
    polyline: np.ndarray  # (N, 2)
    tolerance_m: float = 0.02

    def __post_init__(self):
        pts = np.asarray(self.polyline, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
            raise PlannerError("goal needs at least two planar points")
        if not np.isfinite(pts).all():
            raise PlannerError("goal coordinates must be finite")
        self.polyline = pts


@dataclass
class JointPlan:
    angles: list[float]  # one per pouch, radians, + bends left
    cost: float
    residual_m: float
    goal_length_m: float
    predicted: np.ndarray = field(repr=False, default=None)


def polyline_arc_length(pts: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def sample_by_arc_length(pts: np.ndarray, arcs: np.ndarray) -> np.ndarray:
    """Points of the polyline at the requested arc lengths (clamped)."""
    pts = np.asarray(pts, dtype=float)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    arcs = np.clip(arcs, 0.0, cum[-1])
    out = np.empty((len(arcs), 2))
    for k, s in enumerate(arcs):
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(seg) - 1)
        t = 0.0 if seg[i] < 1e-12 else (s - cum[i]) / seg[i]
        out[k] = pts[i] + t * (pts[i + 1] - pts[i])
    return out


def resample(pts: np.ndarray, n: int) -> np.ndarray:
    total = polyline_arc_length(pts)
    return sample_by_arc_length(pts, np.linspace(0.0, total, n))


def discrete_frechet(p: np.ndarray, q: np.ndarray) -> float:
    """Classic coupled-walk distance between two point sequences."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = np.linalg.norm(p[:, None, :] - q[None, :, :], axis=2)
    n, m = d.shape
    ca = np.empty((n, m))
    ca[0, 0] = d[0, 0]
    for i in range(1, n):
        ca[i, 0] = max(ca[i - 1, 0], d[i, 0])
    for j in range(1, m):
        ca[0, j] = max(ca[0, j - 1], d[0, j])
    for i in range(1, n):
        for j in range(1, m):
            ca[i, j] = max(min(ca[i - 1, j], ca[i - 1, j - 1], ca[i, j - 1]), d[i, j])
    return float(ca[-1, -1])


def _stage_windows(goal: np.ndarray, goal_len: float, pitch: float,
                   num_pouches: int) -> list[np.ndarray | None]:
    """Per-pouch goal window, re-anchored at its start; None past the goal."""
    windows: list[np.ndarray | None] = []
    for i in range(num_pouches):
        s0 = i * pitch
        s1 = min((i + 1) * pitch, goal_len)
        if s1 <= s0 + 1e-12:
            windows.append(None)
            continue
        arcs = np.linspace(s0, s1, _STAGE_SAMPLES)
        pts = sample_by_arc_length(goal, arcs)
        windows.append(pts - pts[0])
    return windows


def stage_cost(window: np.ndarray | None, window_len: float, heading: float) -> float:
    """Max deviation between the straight stage segment and the goal window."""
    if window is None:
        return 0.0
    t = np.linspace(0.0, window_len, _STAGE_SAMPLES)
    seg = np.stack([t * math.cos(heading), t * math.sin(heading)], axis=1)
    return float(np.max(np.linalg.norm(window - seg, axis=1)))


def fit_joint_angles(goal: GoalShape, spec: RobotSpec,
                     angle_grid=DEFAULT_GRID_RAD) -> JointPlan:
    """Optimal grid assignment of per-pouch bend angles for the goal.

    Ties break toward smaller |angle| (left preferred on a sign tie), then
    toward the earlier pouch.
    """
    grid = list(angle_grid)
    if not grid or all(abs(a) > 1e-12 for a in grid):
        raise PlannerError("angle grid must be nonempty and include 0")
    goal_len = polyline_arc_length(goal.polyline)
    if goal_len > spec.length_m + 1e-9:
        raise GoalTooLongError(
            f"goal is {goal_len:.4g} m but only {spec.length_m} m of material exists")
    n = spec.num_pouches
    pitch = spec.pitch_m
    windows = _stage_windows(goal.polyline, goal_len, pitch, n)
    grid_sorted = sorted(grid, key=lambda a: (abs(a), -a))

    # states: heading -> (cost, tiebreak, angles); tiebreak is the
    # lexicographic (|angle|, sign) sequence so equal-cost plans resolve
    # toward smaller magnitudes at the earliest pouch
    states: dict[float, tuple[float, tuple, tuple]] = {0.0: (0.0, (), ())}
    for i in range(n):
        s1 = min((i + 1) * pitch, goal_len)
        w_len = max(0.0, s1 - i * pitch)
        nxt: dict[float, tuple[float, tuple, tuple]] = {}
        for heading, (cost, tb, angles) in sorted(states.items()):
            for angle in grid_sorted:
                h2 = heading + angle
                c2 = cost + stage_cost(windows[i], w_len, h2)
                tb2 = tb + ((abs(angle), 0.0 if angle >= 0 else 1.0),)
                cand = (c2, tb2, angles + (angle,))
                cur = nxt.get(h2)
                if cur is None or (c2, tb2) < (cur[0], cur[1]):
                    nxt[h2] = cand
        states = nxt
    best = min(states.values(), key=lambda v: (v[0], v[1]))
    cost, _, angles = best
    plan = JointPlan(angles=list(angles), cost=cost, residual_m=0.0,
                     goal_length_m=goal_len)
    chain = plan_chain(plan, spec)
    plan.predicted = kinematics.shape_of(chain)
    plan.residual_m = residual_against(chain, goal, goal_len)
    return plan


def brute_force_cost(goal: GoalShape, spec: RobotSpec, angle_grid) -> float:
    """Exhaustive minimum of the same stage-cost objective (oracle)."""
    import itertools

    goal_len = polyline_arc_length(goal.polyline)
    n = spec.num_pouches
    pitch = spec.pitch_m
    windows = _stage_windows(goal.polyline, goal_len, pitch, n)
    best = math.inf
    for assignment in itertools.product(list(angle_grid), repeat=n):
        heading = 0.0
        total = 0.0
        for i, angle in enumerate(assignment):
            heading = heading + angle
            s1 = min((i + 1) * pitch, goal_len)
            w_len = max(0.0, s1 - i * pitch)
            total = total + stage_cost(windows[i], w_len, heading)
        best = min(best, total)
    return best


def plan_chain(plan: JointPlan, spec: RobotSpec) -> kinematics.JointChain:
    length = required_length(plan, spec)
    chain = kinematics.build_chain(spec.pitch_m, length)
    for i, angle in enumerate(plan.angles):
        if (i + 1) * spec.pitch_m <= length + 1e-9:
            chain.joints[i] = kinematics.Joint(angle=angle, locked=True)
    return chain


def predict_shape(plan: JointPlan, spec: RobotSpec) -> np.ndarray:
    return kinematics.shape_of(plan_chain(plan, spec))


def residual_against(chain: kinematics.JointChain, goal: GoalShape,
                     goal_length_m: float) -> float:
    """Discrete Frechet between the goal and the chain truncated to the
    goal's arc length (the robot may be longer than the goal)."""
    arcs = np.linspace(0.0, min(goal_length_m, chain.length_m), FRECHET_SAMPLES)
    chain_pts = np.array([kinematics.point_at(chain, s) for s in arcs])
    goal_pts = resample(goal.polyline, FRECHET_SAMPLES)
    return discrete_frechet(chain_pts, goal_pts)


def required_length(plan: JointPlan, spec: RobotSpec) -> float:
    """Everted length the plan needs: cover the goal and the last bent pouch."""
    needed = plan.goal_length_m
    for i, angle in enumerate(plan.angles):
        if abs(angle) > 1e-12:
            needed = max(needed, (i + 1) * spec.pitch_m)
    return min(needed, spec.length_m)


def compile_actions(plan: JointPlan, spec: RobotSpec,
                    current_everted_m: float | None = None) -> list[Action]:
    """Unjam/pull/jam triple per bent pouch, base to tip; growth prepended.

    Exactly one pouch is compliant at any instant, so each buckle lands on
    its pouch by weakest-link selection. Executing the script through the
    engine reproduces the plan angles to round-off.
    """
    everted = spec.everted_m if current_everted_m is None else current_everted_m
    script: list[Action] = []
    needed = required_length(plan, spec)
    if needed > everted + 1e-9:
        script.append(Grow(needed - everted))
    r = spec.cable_r_m
    for i, angle in enumerate(plan.angles):
        if abs(angle) <= 1e-12:
            continue
        side = Side.LEFT if angle > 0 else Side.RIGHT
        delta = kinematics.angle_to_shortening(angle, r)
        script.extend([UnjamPouch(i), PullCable(side, delta), JamPouch(i)])
    return script


@dataclass
class PlanResult:
    plan: JointPlan
    script: list[Action]
    predicted: np.ndarray


def plan_for_goal(goal: GoalShape, spec: RobotSpec,
                  angle_grid=DEFAULT_GRID_RAD,
                  current_everted_m: float | None = None) -> PlanResult:
    plan = fit_joint_angles(goal, spec, angle_grid)
    script = compile_actions(plan, spec, current_everted_m)
    return PlanResult(plan=plan, script=script, predicted=plan.predicted)
