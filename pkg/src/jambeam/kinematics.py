"""Planar virtual-joint chain: buckles as point hinges, arcs, growth.

The everted body is a run of segments cut at pouch boundaries. Pouch i's
virtual joint sits at the base-side boundary of its span (arc length
i*pitch). Pulling a side cable either folds the weakest compliant pouch
(a buckle becomes a revolute joint there), curves the whole body when every
pouch is jammed, or just stores tension when the moment stays below the
weakest buckling moment. Rejamming a bent pouch freezes its joint angle.

Growth appends straight material at the tip; everything already grown keeps
its world pose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .actions import Side

_EPS = 1e-9


class KinematicsError(Exception):
    pass


class SaturationError(KinematicsError):
    """Cable pull beyond the hinge geometry (delta >= 2r or |angle| >= pi)."""


class MaterialExhaustedError(KinematicsError):
    pass


class LockedJointError(KinematicsError):
    pass


@dataclass
class Pose:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0  # rad, +x is 0


@dataclass
class Joint:
    angle: float = 0.0  # rad, + bends left
    locked: bool = True


@dataclass
class Segment:
    s0: float
    s1: float
    curvature: float = 0.0  # 1/m, + curves left

    @property
    def length(self) -> float:
        return self.s1 - self.s0


@dataclass
class GrowthState:
    everted_m: float
    total_material_m: float
    pitch_m: float

    def is_everted(self, pouch_index: int) -> bool:
        return (pouch_index + 1) * self.pitch_m <= self.everted_m + _EPS


@dataclass
class CableState:
    side: Side
    offset_m: float  # cable guide radius = beam radius
    spool_retraction_m: float = 0.0
    slack_m: float = 0.0  # pulls absorbed without shape change


@dataclass
class JointChain:
    base: Pose
    pitch_m: float
    segments: list[Segment]
    joints: dict[int, Joint] = field(default_factory=dict)

    @property
    def length_m(self) -> float:
        return self.segments[-1].s1 if self.segments else 0.0


class PullCase(Enum):
    BUCKLE = "buckle"  # folded the weakest compliant pouch
    ARC = "arc"        # all jammed, global constant curvature
    STORED = "stored"  # below threshold, tension stored


@dataclass
class PullOutcome:
    case: PullCase
    pouch_index: int | None = None
    angle_rad: float | None = None
    arc_bend_rad: float | None = None


def build_chain(pitch_m: float, everted_m: float, base: Pose | None = None) -> JointChain:
    segments = []
    s = 0.0
    while s < everted_m - _EPS:
        e = min(everted_m, (math.floor(s / pitch_m + 1e-9) + 1) * pitch_m)
        segments.append(Segment(s, e))
        s = e
    return JointChain(base=base or Pose(), pitch_m=pitch_m, segments=segments)


def shortening_to_angle(delta_m: float, r: float) -> float:
    """Hinge angle produced by shortening the side cable by delta.

    Pin hinge with guides at radius r: delta = 2*r*sin(theta/2).
    """
    if delta_m < 0:
        raise KinematicsError("shortening must be >= 0")
    if delta_m >= 2.0 * r:
        raise SaturationError(f"shortening {delta_m} m saturates the hinge (2r = {2 * r} m)")
    return 2.0 * math.asin(delta_m / (2.0 * r))


def angle_to_shortening(theta_rad: float, r: float) -> float:
    return 2.0 * r * math.sin(abs(theta_rad) / 2.0)


def _advance(pose: Pose, curvature: float, ds: float) -> Pose:
    if abs(curvature) < 1e-12:
        return Pose(pose.x + ds * math.cos(pose.heading),
                    pose.y + ds * math.sin(pose.heading),
                    pose.heading)
    h1 = pose.heading + curvature * ds
    return Pose(pose.x + (math.sin(h1) - math.sin(pose.heading)) / curvature,
                pose.y - (math.cos(h1) - math.cos(pose.heading)) / curvature,
                h1)


def _joint_at(chain: JointChain, s: float) -> Joint | None:
    idx = round(s / chain.pitch_m)
    if abs(idx * chain.pitch_m - s) <= _EPS and idx in chain.joints:
        return chain.joints[idx]
    return None


def shape_of(chain: JointChain, samples_per_segment: int = 10) -> np.ndarray:
    """World-frame polyline of the chain, base point first.

    Each segment contributes samples_per_segment points beyond its start, so
    the point list for an untouched prefix is reproduced bit for bit.
    """
    pts = [(chain.base.x, chain.base.y)]
    pose = Pose(chain.base.x, chain.base.y, chain.base.heading)
    for seg in chain.segments:
        joint = _joint_at(chain, seg.s0)
        if joint is not None:
            pose = Pose(pose.x, pose.y, pose.heading + joint.angle)
        for k in range(1, samples_per_segment + 1):
            p = _advance(pose, seg.curvature, seg.length * k / samples_per_segment)
            pts.append((p.x, p.y))
        pose = _advance(pose, seg.curvature, seg.length)
    return np.asarray(pts, dtype=float)


def tip_pose(chain: JointChain) -> Pose:
    pose = Pose(chain.base.x, chain.base.y, chain.base.heading)
    for seg in chain.segments:
        joint = _joint_at(chain, seg.s0)
        if joint is not None:
            pose = Pose(pose.x, pose.y, pose.heading + joint.angle)
        pose = _advance(pose, seg.curvature, seg.length)
    return pose


def point_at(chain: JointChain, s: float) -> tuple[float, float]:
    """Exact world point at arc length s along the chain."""
    s = min(max(s, 0.0), chain.length_m)
    pose = Pose(chain.base.x, chain.base.y, chain.base.heading)
    for seg in chain.segments:
        joint = _joint_at(chain, seg.s0)
        if joint is not None:
            pose = Pose(pose.x, pose.y, pose.heading + joint.angle)
        if s <= seg.s1 + _EPS and s >= seg.s0 - _EPS:
            p = _advance(pose, seg.curvature, s - seg.s0)
            return (p.x, p.y)
        pose = _advance(pose, seg.curvature, seg.length)
    return (pose.x, pose.y)


def lock_joint(chain: JointChain, pouch_index: int) -> None:
    chain.joints.setdefault(pouch_index, Joint()).locked = True


def unlock_joint(chain: JointChain, pouch_index: int) -> None:
    chain.joints.setdefault(pouch_index, Joint()).locked = False


def apply_pull(chain: JointChain, side: Side, delta_m: float, *,
               r: float, compliant_criticals: dict[int, float],
               all_jammed: bool, cable_moment_nm: float) -> PullOutcome:
    """Route a cable pull into the chain.

    compliant_criticals maps everted compliant pouches to their buckling
    moments; the weakest one (ties toward the base) takes the fold when the
    cable moment beats it. With no compliant pouch and everything jammed the
    pull curves the whole everted length uniformly (bend = delta/r). Anything
    else leaves the shape alone and the tension stored.
    """
    if delta_m < 0:
        raise KinematicsError("pull must be >= 0")
    sign = 1.0 if side is Side.LEFT else -1.0
    if compliant_criticals:
        weakest = min(compliant_criticals, key=lambda i: (compliant_criticals[i], i))
        if cable_moment_nm > compliant_criticals[weakest]:
            joint = chain.joints.setdefault(weakest, Joint(locked=False))
            if joint.locked:
                raise LockedJointError(
                    f"pouch {weakest} is compliant but its joint is locked")
            dtheta = shortening_to_angle(delta_m, r)
            new_angle = joint.angle + sign * dtheta
            if abs(new_angle) >= math.pi:
                raise SaturationError(
                    f"joint {weakest} would reach {math.degrees(new_angle):.1f} deg")
            joint.angle = new_angle
            return PullOutcome(PullCase.BUCKLE, pouch_index=weakest, angle_rad=new_angle)
        return PullOutcome(PullCase.STORED)
    if all_jammed:
        if delta_m == 0.0 or not chain.segments:
            return PullOutcome(PullCase.ARC, arc_bend_rad=0.0)
        bend = sign * delta_m / r
        per_length = bend / chain.length_m
        for seg in chain.segments:
            seg.curvature += per_length
        return PullOutcome(PullCase.ARC, arc_bend_rad=bend)
    # transitional pouches present: shape response undefined, store the pull
    return PullOutcome(PullCase.STORED)


def release_pull(chain: JointChain, side: Side, delta_m: float, *,
                 r: float, compliant_criticals: dict[int, float],
                 all_jammed: bool) -> PullOutcome:
    """Let cable back out: unbends same-side unlocked state, floored at zero."""
    if delta_m < 0:
        raise KinematicsError("release must be >= 0")
    sign = 1.0 if side is Side.LEFT else -1.0
    if compliant_criticals:
        candidates = {i: c for i, c in compliant_criticals.items()
                      if i in chain.joints and chain.joints[i].angle * sign > 0
                      and not chain.joints[i].locked}
        if candidates:
            weakest = min(candidates, key=lambda i: (candidates[i], i))
            joint = chain.joints[weakest]
            dtheta = shortening_to_angle(min(delta_m, 2.0 * r * (1 - 1e-12)), r)
            joint.angle = sign * max(0.0, abs(joint.angle) - dtheta)
            return PullOutcome(PullCase.BUCKLE, pouch_index=weakest, angle_rad=joint.angle)
        return PullOutcome(PullCase.STORED)
    if all_jammed and chain.segments:
        total = sum(s.curvature * s.length for s in chain.segments)
        if total * sign > 0:
            bend = sign * min(delta_m / r, abs(total))
            per_length = bend / chain.length_m
            for seg in chain.segments:
                seg.curvature -= per_length
            return PullOutcome(PullCase.ARC, arc_bend_rad=-bend)
    return PullOutcome(PullCase.STORED)


def grow(chain: JointChain, growth: GrowthState, delta_m: float) -> list[int]:
    """Evert delta meters of new material straight off the tip.

    Segments are cut at every pouch boundary crossed so future joints always
    land on a boundary. Returns indices of pouches that became fully everted.
    """
    if delta_m < 0:
        raise KinematicsError("growth must be >= 0")
    target = growth.everted_m + delta_m
    if target > growth.total_material_m + _EPS:
        raise MaterialExhaustedError(
            f"growing to {target:.4g} m exceeds material ({growth.total_material_m} m)")
    n_before = int((growth.everted_m + _EPS) // growth.pitch_m)
    s = growth.everted_m
    while s < target - _EPS:
        e = min(target, (math.floor(s / growth.pitch_m + 1e-9) + 1) * growth.pitch_m)
        chain.segments.append(Segment(s, e))
        s = e
    growth.everted_m = target
    n_after = int((growth.everted_m + _EPS) // growth.pitch_m)
    return list(range(n_before, n_after))


def spool_retraction(chain: JointChain, side: Side, r: float) -> float:
    """Cable length wound onto the spool, from the shape alone.

    Every same-side joint shortens its cable by 2*r*sin(|angle|/2); a
    same-side arc shortens it by r times the bend it subtends.
    """
    sign = 1.0 if side is Side.LEFT else -1.0
    total = 0.0
    for joint in chain.joints.values():
        if joint.angle * sign > 0:
            total += 2.0 * r * math.sin(abs(joint.angle) / 2.0)
    for seg in chain.segments:
        bend = seg.curvature * seg.length
        if bend * sign > 0:
            total += r * abs(bend)
    return total
