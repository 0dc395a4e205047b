"""Robot build parameters: the validated single source the engine steps."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import carriage as carriage_mod
from . import mechanics, pneumatics

MAGNET_RANGE_M = 0.05
TENSION_GAIN_N_PER_M = 1e6


class SpecError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class MechanicsParams:
    critical_coefficient: float = mechanics.DEFAULT_CRITICAL_COEFF
    kappa_jam: float = mechanics.DEFAULT_KAPPA_JAM
    kappa_ei: float = mechanics.DEFAULT_KAPPA_EI
    et_n_per_m: float = mechanics.DEFAULT_ET_N_PER_M
    wrinkle_floor: float = mechanics.DEFAULT_WRINKLE_FLOOR
    tension_gain_n_per_m: float = TENSION_GAIN_N_PER_M


@dataclass
class CarriageParams:
    speed_mps: float = carriage_mod.DEFAULT_SPEED_MPS
    dwell_s: float = carriage_mod.DEFAULT_DWELL_S
    magnet_range_m: float = MAGNET_RANGE_M


@dataclass
class PneumaticsParams:
    seal_threshold_pa: float = pneumatics.SEAL_THRESHOLD_PA
    jam_fraction: float = pneumatics.JAM_FRACTION
    vent_time_constant_s: float = pneumatics.VENT_TIME_CONSTANT_S
    mode: str = "instantaneous"  # instantaneous | first_order


@dataclass
class RobotSpec:
    radius_m: float = mechanics.DEFAULT_RADIUS_M
    length_m: float = 1.2  # total material length
    num_pouches: int = 8
    pressure_pa: float = 6900.0
    initial_everted_m: float | None = None  # defaults to length_m
    cable_offset_m: float | None = None  # defaults to radius_m
    mechanics: MechanicsParams = field(default_factory=MechanicsParams)
    carriage: CarriageParams = field(default_factory=CarriageParams)
    pneumatics: PneumaticsParams = field(default_factory=PneumaticsParams)

    @property
    def pitch_m(self) -> float:
        return self.length_m / self.num_pouches

    @property
    def everted_m(self) -> float:
        return self.length_m if self.initial_everted_m is None else self.initial_everted_m

    @property
    def cable_r_m(self) -> float:
        return self.radius_m if self.cable_offset_m is None else self.cable_offset_m

    def validate(self, path: str = "spec") -> "RobotSpec":
        def positive(value, name):
            if not isinstance(value, (int, float)) or value <= 0:
                raise SpecError(f"{path}.{name}", f"must be positive, got {value!r}")

        positive(self.radius_m, "radius_m")
        positive(self.length_m, "length_m")
        positive(self.pressure_pa, "pressure_pa")
        if not isinstance(self.num_pouches, int) or self.num_pouches < 1:
            raise SpecError(f"{path}.num_pouches", f"must be a positive integer, got {self.num_pouches!r}")
        if self.initial_everted_m is not None:
            positive(self.initial_everted_m, "initial_everted_m")
            if self.initial_everted_m > self.length_m + 1e-9:
                raise SpecError(f"{path}.initial_everted_m",
                                "cannot exceed length_m (total material)")
        if self.cable_offset_m is not None:
            positive(self.cable_offset_m, "cable_offset_m")
        m = self.mechanics
        if not 0 < m.critical_coefficient <= 1:
            raise SpecError(f"{path}.mechanics.critical_coefficient", "must be in (0, 1]")
        if m.kappa_jam < 1 or m.kappa_ei < 1:
            raise SpecError(f"{path}.mechanics", "jam multipliers must be >= 1")
        positive(m.et_n_per_m, "mechanics.et_n_per_m")
        if not 0 < m.wrinkle_floor < 1:
            raise SpecError(f"{path}.mechanics.wrinkle_floor", "must be in (0, 1)")
        positive(m.tension_gain_n_per_m, "mechanics.tension_gain_n_per_m")
        positive(self.carriage.speed_mps, "carriage.speed_mps")
        if self.carriage.dwell_s < 0:
            raise SpecError(f"{path}.carriage.dwell_s", "must be >= 0")
        positive(self.carriage.magnet_range_m, "carriage.magnet_range_m")
        p = self.pneumatics
        if p.seal_threshold_pa < 0:
            raise SpecError(f"{path}.pneumatics.seal_threshold_pa", "must be >= 0")
        if not 0 < p.jam_fraction < 0.5:
            raise SpecError(f"{path}.pneumatics.jam_fraction", "must be in (0, 0.5)")
        positive(p.vent_time_constant_s, "pneumatics.vent_time_constant_s")
        if p.mode not in ("instantaneous", "first_order"):
            raise SpecError(f"{path}.pneumatics.mode",
                            f"must be 'instantaneous' or 'first_order', got {p.mode!r}")
        return self

    def flow_mode(self) -> pneumatics.FlowMode:
        return (pneumatics.FlowMode.INSTANTANEOUS if self.pneumatics.mode == "instantaneous"
                else pneumatics.FlowMode.FIRST_ORDER)
