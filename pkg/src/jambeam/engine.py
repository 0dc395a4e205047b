"""Deterministic discrete-event engine binding the submodules together.

One logical timeline: the clock advances only while the carriage travels or
the script dwells. Jam/unjam macros expand to carriage moves, magnet holds
and settle dwells; pouch state transitions lock and unlock the virtual
joints. Every applied action appends a shape snapshot to the trace, and a
trace replays bit for bit.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import carriage as carriage_mod
from . import kinematics, mechanics, pneumatics
from .actions import (Action, Dwell, Grow, HoldMagnet, JamPouch, MoveCarriage,
                      PullCable, ReleaseCable, ReleaseMagnet, SetPressure, Side,
                      UnjamPouch)
from .config import RobotSpec
from .scenario import serialize_action


class EngineError(Exception):
    def __init__(self, action_index: int | None, message: str):
        where = "setup" if action_index is None else f"action {action_index}"
        super().__init__(f"{where}: {message}")
        self.action_index = action_index


@dataclass
class Snapshot:
    time_s: float
    after_action: int | None
    shape: list[tuple[float, float]]
    pouch_states: list[str]
    joints: list[dict]
    carriage_x_m: float
    everted_m: float
    pressure_pa: float
    pitch_m: float
    retraction_left_m: float
    retraction_right_m: float

    def to_record(self) -> dict:
        return {
            "kind": "snapshot",
            "time_s": self.time_s,
            "after_action": self.after_action,
            "carriage_x_m": self.carriage_x_m,
            "everted_m": self.everted_m,
            "pressure_pa": self.pressure_pa,
            "pitch_m": self.pitch_m,
            "pouch_states": self.pouch_states,
            "joints": self.joints,
            "retraction": {"left_m": self.retraction_left_m,
                           "right_m": self.retraction_right_m},
            "shape": [[x, y] for x, y in self.shape],
        }


@dataclass
class Trace:
    records: list[dict] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)

    def add_snapshot(self, snap: Snapshot) -> None:
        self.snapshots.append(snap)
        self.records.append(snap.to_record())

    def add_action(self, time_s: float, index: int, action: Action,
                   expanded: list[Action]) -> None:
        self.records.append({
            "kind": "action",
            "time_s": time_s,
            "index": index,
            "action": serialize_action(action),
            "expanded": [serialize_action(a) for a in expanded],
        })

    def add_event(self, time_s: float, event: pneumatics.PneumaticEvent) -> None:
        self.records.append(event_record(time_s, event))

    def add_buckle(self, time_s: float, pouch_index: int, angle_rad: float) -> None:
        self.records.append({"kind": "buckle", "time_s": time_s,
                             "pouch_index": pouch_index, "angle_rad": angle_rad})

    @property
    def end_time_s(self) -> float:
        return self.snapshots[-1].time_s if self.snapshots else 0.0

    def to_ndjson(self) -> str:
        return "\n".join(json.dumps(r) for r in self.records) + "\n"

    def events_ndjson(self) -> str:
        lines = [json.dumps(r) for r in self.records if r["kind"] == "event"]
        return "\n".join(lines) + ("\n" if lines else "")


def event_record(time_s: float, event: pneumatics.PneumaticEvent) -> dict:
    return {
        "kind": "event",
        "time_s": time_s,
        "event_kind": event.kind.value,
        "pouch_index": event.pouch_index,
        "valve_role": event.valve_role,
        "pressure_pa": event.pressure_pa,
    }


class Engine:
    """Owns all robot state; callers go through apply()/run()."""

    def __init__(self, spec: RobotSpec):
        spec.validate()
        self.spec = spec
        self.trace = Trace()
        self.clock_s = 0.0
        self._action_count = 0

        self.network = pneumatics.build_network(
            spec.pressure_pa, spec.num_pouches, spec.pitch_m, spec.everted_m,
            seal_threshold=spec.pneumatics.seal_threshold_pa,
            jam_fraction=spec.pneumatics.jam_fraction,
            vent_time_constant=spec.pneumatics.vent_time_constant_s,
            mode=spec.flow_mode())
        self.chain = kinematics.build_chain(spec.pitch_m, spec.everted_m)
        self.growth = kinematics.GrowthState(spec.everted_m, spec.length_m, spec.pitch_m)
        self.carriage = carriage_mod.CarriagePose(
            0.0, spec.carriage.speed_mps, spec.carriage.dwell_s)
        self.cables = {side: kinematics.CableState(side, spec.cable_r_m)
                       for side in (Side.LEFT, Side.RIGHT)}

        self._jam_states = {}
        self._sync_joint_locks()
        self.trace.add_snapshot(self.snapshot(after_action=None))

    # -- state views ------------------------------------------------------

    def pouch_jam_state(self, index: int) -> pneumatics.JamState:
        return pneumatics.pouch_state(self.network.pouches[index],
                                      self.network.beam_pressure,
                                      self.network.jam_fraction)

    def _states_by_pouch(self) -> dict[int, pneumatics.JamState]:
        out = {}
        for pouch in self.network.pouches:
            if pouch.everted:
                out[pouch.index] = pneumatics.pouch_state(
                    pouch, self.network.beam_pressure, self.network.jam_fraction)
        return out

    def _moment_model(self) -> mechanics.MomentModel:
        return mechanics.MomentModel(
            pressure_pa=self.network.beam_pressure,
            radius_m=self.spec.radius_m,
            critical_coefficient=self.spec.mechanics.critical_coefficient,
            wrinkle_floor=self.spec.mechanics.wrinkle_floor)

    def _unjammed_critical(self) -> float:
        return (self.spec.mechanics.critical_coefficient * math.pi
                * self.network.beam_pressure * self.spec.radius_m**3)

    def sections(self, jam_states: dict[int, pneumatics.JamState] | None = None
                 ) -> list[mechanics.BeamSection]:
        """Everted beam as mechanics sections, one per (possibly partial) pouch."""
        states = jam_states if jam_states is not None else self._states_by_pouch()
        m = self.spec.mechanics
        out = []
        everted = self.growth.everted_m
        i = 0
        while i * self.spec.pitch_m < everted - 1e-9:
            x0 = i * self.spec.pitch_m
            x1 = min((i + 1) * self.spec.pitch_m, everted)
            jammed = states.get(i) is pneumatics.JamState.JAMMED
            out.append(mechanics.BeamSection(x0, x1, jammed, self.spec.radius_m,
                                             m.et_n_per_m, m.kappa_ei, m.kappa_jam))
            i += 1
        return out

    def snapshot(self, after_action: int | None = None) -> Snapshot:
        shape = kinematics.shape_of(self.chain)
        states = []
        for pouch in self.network.pouches:
            if pouch.everted:
                states.append(self.pouch_jam_state(pouch.index).value)
            else:
                states.append("non_everted")
        joints = [{"pouch": i, "angle_rad": j.angle, "locked": j.locked}
                  for i, j in sorted(self.chain.joints.items())]
        r = self.spec.cable_r_m
        return Snapshot(
            time_s=self.clock_s,
            after_action=after_action,
            shape=[(float(x), float(y)) for x, y in shape],
            pouch_states=states,
            joints=joints,
            carriage_x_m=self.carriage.x_m,
            everted_m=self.growth.everted_m,
            pressure_pa=self.network.beam_pressure,
            pitch_m=self.spec.pitch_m,
            retraction_left_m=kinematics.spool_retraction(self.chain, Side.LEFT, r),
            retraction_right_m=kinematics.spool_retraction(self.chain, Side.RIGHT, r),
        )

    # -- stepping ---------------------------------------------------------

    def _settle(self, dt: float = 0.0) -> None:
        for event in pneumatics.settle(self.network, dt):
            self.trace.add_event(self.clock_s, event)

    def _sync_joint_locks(self) -> None:
        """Lock joints on pouches that became jammed, unlock on compliant."""
        current = self._states_by_pouch()
        for index, state in current.items():
            previous = self._jam_states.get(index)
            if state is previous:
                continue
            if state is pneumatics.JamState.JAMMED:
                kinematics.lock_joint(self.chain, index)
            elif state is pneumatics.JamState.COMPLIANT:
                kinematics.unlock_joint(self.chain, index)
        self._jam_states = current

    def _update_retractions(self) -> None:
        r = self.spec.cable_r_m
        for side, cable in self.cables.items():
            cable.spool_retraction_m = kinematics.spool_retraction(self.chain, side, r)

    def expand(self, action: Action) -> list[Action]:
        if isinstance(action, JamPouch):
            return pneumatics.canonical_sequence(self.network, action.pouch,
                                                 pneumatics.JamTarget.JAM)
        if isinstance(action, UnjamPouch):
            return pneumatics.canonical_sequence(self.network, action.pouch,
                                                 pneumatics.JamTarget.UNJAM)
        return [action]

    def _execute(self, prim: Action) -> None:
        if isinstance(prim, MoveCarriage):
            self.carriage, self.clock_s = carriage_mod.advance(
                self.carriage, prim.x_m, self.clock_s, self.growth.everted_m)
            self._settle()
        elif isinstance(prim, HoldMagnet):
            pouch = self.network.pouches[prim.pouch]
            if not pouch.everted:
                raise pneumatics.NonEvertedPouchError(f"pouch {prim.pouch} not everted")
            valve = pouch.inner_valve if prim.valve == "inner" else pouch.outer_valve
            if abs(self.carriage.x_m - valve.position_along_beam) > self.spec.carriage.magnet_range_m:
                raise EngineError(None, "carriage not in magnet range of "
                                  f"{valve.id} (at {valve.position_along_beam:.3g} m, "
                                  f"carriage at {self.carriage.x_m:.3g} m)")
            pneumatics.set_magnet(self.network, valve.id, True)
            self._settle()
        elif isinstance(prim, ReleaseMagnet):
            held = self.network.held_valve()
            if held is not None:
                pneumatics.set_magnet(self.network, held.id, False)
            self._settle()
        elif isinstance(prim, Dwell):
            self.clock_s += prim.seconds
            self._settle(prim.seconds)
        elif isinstance(prim, PullCable):
            states = self._states_by_pouch()
            crit = self._unjammed_critical()
            compliant = {i: crit for i, s in states.items()
                         if s is pneumatics.JamState.COMPLIANT}
            all_jammed = all(s is pneumatics.JamState.JAMMED for s in states.values())
            gain = self.spec.mechanics.tension_gain_n_per_m
            moment = gain * prim.delta_m * self.spec.cable_r_m
            outcome = kinematics.apply_pull(
                self.chain, prim.side, prim.delta_m, r=self.spec.cable_r_m,
                compliant_criticals=compliant, all_jammed=all_jammed,
                cable_moment_nm=moment)
            if outcome.case is kinematics.PullCase.BUCKLE:
                self.trace.add_buckle(self.clock_s, outcome.pouch_index, outcome.angle_rad)
            elif outcome.case is kinematics.PullCase.STORED:
                self.cables[prim.side].slack_m += prim.delta_m
            self._update_retractions()
        elif isinstance(prim, ReleaseCable):
            states = self._states_by_pouch()
            crit = self._unjammed_critical()
            compliant = {i: crit for i, s in states.items()
                         if s is pneumatics.JamState.COMPLIANT}
            all_jammed = all(s is pneumatics.JamState.JAMMED for s in states.values())
            kinematics.release_pull(self.chain, prim.side, prim.delta_m,
                                    r=self.spec.cable_r_m,
                                    compliant_criticals=compliant,
                                    all_jammed=all_jammed)
            self._update_retractions()
        elif isinstance(prim, Grow):
            newly = kinematics.grow(self.chain, self.growth, prim.delta_m)
            for index in newly:
                self.network.pouches[index].everted = True
            self._settle()
        elif isinstance(prim, SetPressure):
            if prim.pressure_pa <= 0:
                raise EngineError(None, "pressure must be positive")
            self.network.beam_pressure = prim.pressure_pa
            self._settle()
        else:
            raise EngineError(None, f"unsupported action {prim!r}")
        self._sync_joint_locks()

    def apply(self, action: Action) -> Snapshot:
        """Execute one scripted action (macros expand), snapshot the result."""
        index = self._action_count
        try:
            expanded = self.expand(action)
            for prim in expanded:
                self._execute(prim)
        except EngineError as exc:
            raise EngineError(index, exc.args[0].split(": ", 1)[-1]) from exc
        except (pneumatics.PneumaticsError, kinematics.KinematicsError,
                carriage_mod.CarriageError, mechanics.MechanicsError) as exc:
            raise EngineError(index, str(exc)) from exc
        self._action_count = index + 1
        self.trace.add_action(self.clock_s, index, action, expanded)
        snap = self.snapshot(after_action=index)
        self.trace.add_snapshot(snap)
        return snap


def run(spec: RobotSpec, script: list[Action]) -> Trace:
    engine = Engine(spec)
    for action in script:
        engine.apply(action)
    return engine.trace


# -- transverse-load experiment -----------------------------------------


@dataclass
class DeflectionRow:
    pressure_pa: float
    state: str  # jammed | unjammed
    tip_deflection_m: float | None
    buckled: bool
    buckle_x_m: float | None


def deflection_experiment(spec: RobotSpec, pressures_pa: list[float],
                          load_n: float, jammed: bool,
                          stations: int = 200) -> list[DeflectionRow]:
    """Tip deflection (or buckle flag) per pressure for the cantilevered beam."""
    if any(p <= 0 for p in pressures_pa):
        raise EngineError(None, "pressures must be positive")
    if any(b <= a for a, b in zip(pressures_pa, pressures_pa[1:])):
        raise EngineError(None, "pressures must be ascending")
    spec.validate()
    m = spec.mechanics
    rows = []
    load = mechanics.LoadCase(load_n, spec.length_m)
    sections = mechanics.uniform_sections(
        spec.length_m, spec.num_pouches, jammed, radius_m=spec.radius_m,
        membrane_et=m.et_n_per_m, kappa_ei=m.kappa_ei, kappa_jam=m.kappa_jam)
    state = "jammed" if jammed else "unjammed"
    for p in pressures_pa:
        model = mechanics.MomentModel(p, spec.radius_m, m.critical_coefficient,
                                      m.wrinkle_floor)
        hit = mechanics.buckling_check(sections, model, load)
        if hit is not None:
            rows.append(DeflectionRow(p, state, None, True, hit.x_m))
        else:
            d = mechanics.tip_deflection(sections, model, load, stations)
            rows.append(DeflectionRow(p, state, d, False, None))
    return rows


def deflection_csv(rows: list[DeflectionRow]) -> str:
    lines = ["pressure_pa,state,tip_deflection_m,buckled,buckle_x_m"]
    for r in rows:
        deflection = "" if r.tip_deflection_m is None else repr(r.tip_deflection_m)
        buckle_x = "" if r.buckle_x_m is None else repr(r.buckle_x_m)
        lines.append(f"{r.pressure_pa!r},{r.state},{deflection},"
                     f"{str(r.buckled).lower()},{buckle_x}")
    return "\n".join(lines) + "\n"


def shape_csv(points) -> str:
    lines = ["x_m,y_m"]
    for x, y in points:
        lines.append(f"{float(x)!r},{float(y)!r}")
    return "\n".join(lines) + "\n"
