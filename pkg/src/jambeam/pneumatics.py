"""Passive bi-state valves and two-valve jamming pouches as a pressure network.

Every pouch hangs between two pressure sources: the beam interior (held by
the regulator, never depleted) and the atmosphere (0 gauge). Each connection
goes through a valve whose free magnetic ball is pushed into the downstream
O-ring by any airflow, so an unheld valve under a pressure gradient seals
itself with no leaked volume. An electromagnet carried past the valve holds
the ball clear, letting flow equalize the pouch with that valve's source.

A pouch vented to atmosphere is squeezed by the beam pressure and its layers
jam; a pouch equalized with the beam is compliant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .actions import Action, Dwell, HoldMagnet, MoveCarriage, ReleaseMagnet

SEAL_THRESHOLD_PA = 50.0
JAM_FRACTION = 0.1
VENT_TIME_CONSTANT_S = 1.0
ATMOSPHERE_PA = 0.0

# dwell used by canonical jam/unjam macros; instantaneous mode settles in one
# step, first-order mode needs several time constants to cross the state band
INSTANT_SETTLE_DWELL_S = 2.0
FIRST_ORDER_SETTLE_TAU_MULTIPLE = 5.0


class PneumaticsError(Exception):
    pass


class UnknownValveError(PneumaticsError):
    pass


class MagnetBusyError(PneumaticsError):
    pass


class NonEvertedPouchError(PneumaticsError):
    pass


class BallState(Enum):
    LOOSE = "loose"
    SEALED_TOWARD_A = "sealed_toward_a"
    SEALED_TOWARD_B = "sealed_toward_b"


class ValveRole(Enum):
    INNER = "inner"  # beam interior <-> pouch
    OUTER = "outer"  # pouch <-> atmosphere


class JamState(Enum):
    JAMMED = "jammed"
    COMPLIANT = "compliant"
    TRANSITIONAL = "transitional"


class JamTarget(Enum):
    JAM = "jam"
    UNJAM = "unjam"


class FlowMode(Enum):
    INSTANTANEOUS = "instantaneous"
    FIRST_ORDER = "first_order"


class EventKind(Enum):
    VALVE_SEALED = "valve_sealed"
    POUCH_EQUALIZED = "pouch_equalized"
    POUCH_VENTED = "pouch_vented"


@dataclass
class PneumaticEvent:
    kind: EventKind
    pouch_index: int
    valve_role: str
    pressure_pa: float


@dataclass
class Valve:
    id: str
    role: ValveRole
    port_a: str  # higher-pressure side node id
    port_b: str  # lower-pressure side node id
    position_along_beam: float
    ball: BallState = BallState.LOOSE
    magnet_held: bool = False


@dataclass
class Pouch:
    index: int
    inner_valve: Valve
    outer_valve: Valve
    pressure: float  # Pa gauge
    span: tuple[float, float]
    everted: bool

    @property
    def valves(self) -> tuple[Valve, Valve]:
        return (self.inner_valve, self.outer_valve)


@dataclass
class PneumaticNetwork:
    beam_pressure: float  # Pa gauge, external boundary condition
    pouches: list[Pouch]
    seal_threshold: float = SEAL_THRESHOLD_PA
    jam_fraction: float = JAM_FRACTION
    vent_time_constant: float = VENT_TIME_CONSTANT_S
    mode: FlowMode = FlowMode.INSTANTANEOUS

    def valve(self, valve_id: str) -> Valve:
        for pouch in self.pouches:
            for v in pouch.valves:
                if v.id == valve_id:
                    return v
        raise UnknownValveError(f"no valve {valve_id!r}")

    def held_valve(self) -> Valve | None:
        for pouch in self.pouches:
            for v in pouch.valves:
                if v.magnet_held:
                    return v
        return None

    def pouch_of(self, valve: Valve) -> Pouch:
        for pouch in self.pouches:
            if valve in pouch.valves:
                return pouch
        raise UnknownValveError(f"valve {valve.id!r} not in network")

    def settle_dwell_s(self) -> float:
        if self.mode is FlowMode.INSTANTANEOUS:
            return INSTANT_SETTLE_DWELL_S
        return FIRST_ORDER_SETTLE_TAU_MULTIPLE * self.vent_time_constant


def valve_id(pouch_index: int, role: ValveRole) -> str:
    return f"pouch{pouch_index}:{role.value}"


def build_network(
    beam_pressure: float,
    num_pouches: int,
    pitch: float,
    everted_length: float,
    *,
    seal_threshold: float = SEAL_THRESHOLD_PA,
    jam_fraction: float = JAM_FRACTION,
    vent_time_constant: float = VENT_TIME_CONSTANT_S,
    mode: FlowMode = FlowMode.INSTANTANEOUS,
) -> PneumaticNetwork:
    """Cold-start network: every pouch at 0 gauge, i.e. jammed once the beam
    is pressurized (inflation flow seals the inner valves immediately)."""
    pouches = []
    for i in range(num_pouches):
        x0, x1 = i * pitch, (i + 1) * pitch
        mid = x0 + 0.5 * pitch
        inner = Valve(valve_id(i, ValveRole.INNER), ValveRole.INNER,
                      port_a="beam", port_b=f"pouch{i}", position_along_beam=mid)
        outer = Valve(valve_id(i, ValveRole.OUTER), ValveRole.OUTER,
                      port_a=f"pouch{i}", port_b="atmosphere", position_along_beam=mid)
        pouches.append(Pouch(index=i, inner_valve=inner, outer_valve=outer,
                             pressure=0.0, span=(x0, x1),
                             everted=(i + 1) * pitch <= everted_length + 1e-9))
    net = PneumaticNetwork(beam_pressure, pouches, seal_threshold,
                           jam_fraction, vent_time_constant, mode)
    # classify balls so the initial state is already a settle fixed point
    for pouch in net.pouches:
        if pouch.everted:
            for v in pouch.valves:
                _classify_ball(net, pouch, v)
    return net


def gradient(network: PneumaticNetwork, pouch: Pouch, valve: Valve) -> float:
    """Pressure drop port_a − port_b across a valve."""
    if valve.role is ValveRole.INNER:
        return network.beam_pressure - pouch.pressure
    return pouch.pressure - ATMOSPHERE_PA


def _classify_ball(network: PneumaticNetwork, pouch: Pouch, valve: Valve) -> bool:
    """Put the ball where the current gradient leaves it; True if it sealed."""
    if valve.magnet_held:
        valve.ball = BallState.LOOSE
        return False
    dp = gradient(network, pouch, valve)
    if abs(dp) <= network.seal_threshold:
        valve.ball = BallState.LOOSE
        return False
    target = BallState.SEALED_TOWARD_B if dp > 0 else BallState.SEALED_TOWARD_A
    if valve.ball is not target:
        valve.ball = target
        return True
    return False


def set_magnet(network: PneumaticNetwork, valve_id: str, held: bool) -> None:
    """Hold or release the electromagnet over one valve.

    Only one valve may be held at a time (single magnet on the carriage).
    The magnet always wins against the sealing gradient: holding a sealed
    valve frees the ball immediately.
    """
    valve = network.valve(valve_id)
    if held:
        current = network.held_valve()
        if current is not None and current is not valve:
            raise MagnetBusyError(
                f"cannot hold {valve_id!r}: {current.id!r} is already held")
        valve.magnet_held = True
        valve.ball = BallState.LOOSE
    else:
        valve.magnet_held = False


def settle(network: PneumaticNetwork, dt: float = 0.0) -> list[PneumaticEvent]:
    """Advance the network to its (dt-limited) pneumatic equilibrium.

    Unheld valves seal with zero leaked volume the moment they see a gradient
    above the seal threshold, so pressure only moves through a magnet-held
    valve. Instantaneous mode jumps the pouch to the held valve's source;
    first-order mode relaxes it with the vent time constant.

    Returns seal and vent/equalize events in deterministic order. Total on
    valid networks; dt <= 0 in first-order mode simply moves no gas.
    """
    events: list[PneumaticEvent] = []

    def classify(pouch: Pouch, valve: Valve) -> None:
        if _classify_ball(network, pouch, valve):
            events.append(PneumaticEvent(EventKind.VALVE_SEALED, pouch.index,
                                         valve.role.value, pouch.pressure))

    for pouch in network.pouches:
        if not pouch.everted:
            continue
        for valve in pouch.valves:
            classify(pouch, valve)

    held = network.held_valve()
    if held is None:
        return events
    pouch = network.pouch_of(held)
    if not pouch.everted:
        return events

    source = network.beam_pressure if held.role is ValveRole.INNER else ATMOSPHERE_PA
    p0 = pouch.pressure
    if network.mode is FlowMode.INSTANTANEOUS:
        p1 = source
    else:
        p1 = source + (p0 - source) * math.exp(-max(dt, 0.0) / network.vent_time_constant)
    if p1 != p0:
        pouch.pressure = p1
        jam_band = network.jam_fraction * network.beam_pressure
        compliant_band = (1.0 - network.jam_fraction) * network.beam_pressure
        if source == ATMOSPHERE_PA and p0 > jam_band and p1 <= jam_band:
            events.append(PneumaticEvent(EventKind.POUCH_VENTED, pouch.index,
                                         held.role.value, p1))
        if source == network.beam_pressure and p0 < compliant_band and p1 >= compliant_band:
            events.append(PneumaticEvent(EventKind.POUCH_EQUALIZED, pouch.index,
                                         held.role.value, p1))
        # pressure change may have put a gradient on the pouch's other valve
        for valve in pouch.valves:
            if not valve.magnet_held:
                classify(pouch, valve)
    return events


def pouch_state(pouch: Pouch, beam_pressure: float,
                jam_fraction: float = JAM_FRACTION) -> JamState:
    """Ternary jam state from the pouch/beam pressure ratio.

    Jammed below jam_fraction of beam pressure, compliant above
    (1 - jam_fraction); the band between keeps transients well defined.
    """
    if not pouch.everted:
        raise NonEvertedPouchError(f"pouch {pouch.index} not everted")
    if pouch.pressure <= jam_fraction * beam_pressure:
        return JamState.JAMMED
    if pouch.pressure >= (1.0 - jam_fraction) * beam_pressure:
        return JamState.COMPLIANT
    return JamState.TRANSITIONAL


def canonical_sequence(network: PneumaticNetwork, pouch_index: int,
                       target: JamTarget) -> list[Action]:
    """Macro reaching the target jam state: drive to the valve, hold the
    magnet (outer valve to jam, inner to unjam), dwell until settled, release.

    Idempotent: running it on a pouch already at the target is a no-op on
    pneumatic state.
    """
    if not 0 <= pouch_index < len(network.pouches):
        raise NonEvertedPouchError(f"pouch index {pouch_index} out of range")
    pouch = network.pouches[pouch_index]
    if not pouch.everted:
        raise NonEvertedPouchError(f"pouch {pouch_index} not everted")
    role = ValveRole.OUTER if target is JamTarget.JAM else ValveRole.INNER
    valve = pouch.outer_valve if target is JamTarget.JAM else pouch.inner_valve
    return [
        MoveCarriage(valve.position_along_beam),
        HoldMagnet(pouch_index, role.value),
        Dwell(network.settle_dwell_s()),
        ReleaseMagnet(),
    ]
