"""Bending mechanics of the pressurized membrane beam.

Closed-form characteristic moments for a thin-walled inflated tube:
wrinkling starts at (pi/2)*p*r^3 when the compressed side loses tension,
and the section folds at p*pi*r^3. The usable buckling moment sits between
the two; a dimensionless coefficient places it and is calibrated from the
observed buckle/no-buckle pressures of the 60 cm test robot. Jamming a
section multiplies both its bending stiffness and its buckling moment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GRAVITY_MPS2 = 9.81

DEFAULT_RADIUS_M = 0.043
DEFAULT_ET_N_PER_M = 1.4e4
DEFAULT_KAPPA_JAM = 2.0
DEFAULT_KAPPA_EI = 5.0
DEFAULT_WRINKLE_FLOOR = 0.1

# 150 g at the tip of the 0.6 m robot marginally buckled it at 5.2 kPa, so
# the buckling moment there equals the applied base moment; ~0.6798
DEFAULT_CRITICAL_COEFF = (0.150 * GRAVITY_MPS2 * 0.6) / (
    math.pi * 5200.0 * DEFAULT_RADIUS_M**3)

# standard transverse-load sweep, 0.5..2.0 psi in 0.25 psi steps
SWEEP_PRESSURES_PA = [3400.0, 5200.0, 6900.0, 8600.0, 10300.0, 12100.0, 13800.0]
TIP_LOAD_150G_N = 0.150 * GRAVITY_MPS2

_REL_TOL = 1e-9  # marginal buckling counts as buckled


class MechanicsError(Exception):
    pass


class BucklingError(MechanicsError):
    """Deflection requested for a configuration that buckles."""

    def __init__(self, x_m: float, section_index: int):
        super().__init__(f"beam buckles at x={x_m:.4g} m (section {section_index})")
        self.x_m = x_m
        self.section_index = section_index


class SectionTilingError(MechanicsError):
    pass


class CalibrationError(MechanicsError):
    pass


@dataclass
class MomentModel:
    pressure_pa: float
    radius_m: float = DEFAULT_RADIUS_M
    critical_coefficient: float = DEFAULT_CRITICAL_COEFF
    wrinkle_floor: float = DEFAULT_WRINKLE_FLOOR

    def __post_init__(self):
        if self.pressure_pa < 0:
            raise MechanicsError("pressure must be >= 0")
        if self.radius_m <= 0:
            raise MechanicsError("radius must be > 0")
        if not 0 < self.critical_coefficient <= 1:
            raise MechanicsError("critical coefficient must be in (0, 1]")
        if not 0 < self.wrinkle_floor < 1:
            raise MechanicsError("wrinkle floor must be in (0, 1)")


@dataclass
class BeamSection:
    x0: float
    x1: float
    jammed: bool
    radius_m: float = DEFAULT_RADIUS_M
    membrane_et: float = DEFAULT_ET_N_PER_M  # wall modulus x thickness, N/m
    kappa_ei: float = DEFAULT_KAPPA_EI
    kappa_jam: float = DEFAULT_KAPPA_JAM

    def __post_init__(self):
        if self.x1 <= self.x0:
            raise MechanicsError("section span must have x1 > x0")
        if self.radius_m <= 0 or self.membrane_et <= 0:
            raise MechanicsError("radius and Et must be > 0")
        if self.kappa_ei < 1 or self.kappa_jam < 1:
            raise MechanicsError("jam multipliers must be >= 1")


@dataclass
class LoadCase:
    tip_load_n: float
    length_m: float
    include_self_weight: bool = False
    weight_per_m: float = 0.0

    def __post_init__(self):
        if self.tip_load_n < 0 or self.length_m <= 0 or self.weight_per_m < 0:
            raise MechanicsError("need F >= 0, L > 0, w >= 0")


@dataclass
class BuckleHit:
    x_m: float
    section_index: int


@dataclass
class Calibration:
    lower: float
    upper: float
    point: float


def characteristic_moments(pressure_pa: float, radius_m: float) -> tuple[float, float]:
    """(wrinkling, collapse) moments in N*m; collapse is exactly twice wrinkling."""
    if radius_m <= 0:
        raise MechanicsError("radius must be > 0")
    if pressure_pa < 0:
        raise MechanicsError("pressure must be >= 0")
    collapse = math.pi * pressure_pa * radius_m**3
    return 0.5 * collapse, collapse


def critical_moment(model: MomentModel, section: BeamSection) -> float:
    base = model.critical_coefficient * math.pi * model.pressure_pa * model.radius_m**3
    return section.kappa_jam * base if section.jammed else base


def moment_profile(load: LoadCase):
    """Internal bending moment of the cantilever, evaluable on [0, L]."""
    w = load.weight_per_m if load.include_self_weight else 0.0
    F, L = load.tip_load_n, load.length_m

    def moment(x):
        arm = L - np.asarray(x, dtype=float)
        return F * arm + 0.5 * w * arm * arm

    return moment


def _check_tiling(sections: list[BeamSection], length_m: float) -> list[BeamSection]:
    ordered = sorted(sections, key=lambda s: s.x0)
    if not ordered or abs(ordered[0].x0) > 1e-9:
        raise SectionTilingError("sections must start at the base (x=0)")
    for a, b in zip(ordered, ordered[1:]):
        if abs(a.x1 - b.x0) > 1e-9:
            raise SectionTilingError(f"gap or overlap between x={a.x1} and x={b.x0}")
    if ordered[-1].x1 < length_m - 1e-9:
        raise SectionTilingError("sections do not cover the beam length")
    return ordered


def _section_at(ordered: list[BeamSection], x: float) -> tuple[int, BeamSection]:
    for i, s in enumerate(ordered):
        if x < s.x1 - 1e-12 or i == len(ordered) - 1:
            if x >= s.x0 - 1e-9:
                return i, s
    raise SectionTilingError(f"x={x} outside sections")


def _effective_ei(section: BeamSection, model: MomentModel, m_abs: float) -> float:
    """Bending stiffness degraded by wrinkling.

    Full EI0*kappa below the (jam-scaled) wrinkling moment, linearly down to
    wrinkle_floor*EI0*kappa at the critical moment, constant floor beyond.
    """
    kappa = section.kappa_ei if section.jammed else 1.0
    ei_full = section.membrane_et * math.pi * section.radius_m**3 * kappa
    m_wrinkle, _ = characteristic_moments(model.pressure_pa, model.radius_m)
    m_crit = model.critical_coefficient * math.pi * model.pressure_pa * model.radius_m**3
    lo, hi = m_wrinkle * kappa, m_crit * kappa
    if m_abs <= lo:
        return ei_full
    floor = model.wrinkle_floor * ei_full
    if m_abs >= hi or hi <= lo:
        return floor
    frac = (m_abs - lo) / (hi - lo)
    return ei_full - (ei_full - floor) * frac


def buckling_check(sections: list[BeamSection], model: MomentModel,
                   load: LoadCase) -> BuckleHit | None:
    """First point from the base where the moment reaches the local buckling
    moment; ties resolve toward the base. None when nowhere exceeded.

    Within a section the moment is non-increasing, so only section starts can
    be first-failure points.
    """
    ordered = _check_tiling(sections, load.length_m)
    moment = moment_profile(load)
    for i, s in enumerate(ordered):
        if s.x0 >= load.length_m:
            break
        if float(moment(s.x0)) >= critical_moment(model, s) * (1.0 - _REL_TOL):
            return BuckleHit(x_m=s.x0, section_index=i)
    return None


def tip_deflection(sections: list[BeamSection], model: MomentModel,
                   load: LoadCase, stations: int = 200) -> float:
    """Small-deflection tip drop of the clamped-base beam, in meters.

    Double trapezoidal integration of M/EI over >=200 uniform stations.
    Raises BucklingError when any section is past its critical moment.
    """
    hit = buckling_check(sections, model, load)
    if hit is not None:
        raise BucklingError(hit.x_m, hit.section_index)
    ordered = _check_tiling(sections, load.length_m)
    if stations < 2:
        raise MechanicsError("need at least 2 stations")
    xs = np.linspace(0.0, load.length_m, stations)
    m = moment_profile(load)(xs)
    ei = np.empty_like(xs)
    for k, x in enumerate(xs):
        _, s = _section_at(ordered, min(x, load.length_m - 1e-12))
        ei[k] = _effective_ei(s, model, abs(float(m[k])))
    curvature = m / ei
    dx = xs[1] - xs[0]
    theta = np.concatenate(([0.0], np.cumsum(0.5 * (curvature[1:] + curvature[:-1]) * dx)))
    v = np.concatenate(([0.0], np.cumsum(0.5 * (theta[1:] + theta[:-1]) * dx)))
    return float(v[-1])


def uniform_sections(length_m: float, count: int, jammed: bool, *,
                     radius_m: float = DEFAULT_RADIUS_M,
                     membrane_et: float = DEFAULT_ET_N_PER_M,
                     kappa_ei: float = DEFAULT_KAPPA_EI,
                     kappa_jam: float = DEFAULT_KAPPA_JAM) -> list[BeamSection]:
    pitch = length_m / count
    return [BeamSection(i * pitch, (i + 1) * pitch, jammed, radius_m,
                        membrane_et, kappa_ei, kappa_jam)
            for i in range(count)]


def calibrate_coefficient(observations, radius_m: float = DEFAULT_RADIUS_M) -> Calibration:
    """Bound the critical coefficient from buckle/no-buckle observations.

    Each observation is (pressure_pa, tip_load_n, length_m, buckled). A
    buckled run caps the coefficient from above (the applied base moment
    reached the buckling moment); a surviving run bounds it from below. The
    point estimate takes buckling as marginal at the tightest upper bound.
    """
    obs = list(observations)
    if not obs:
        raise CalibrationError("need at least one observation")
    lower, upper = 0.0, 1.0
    for pressure_pa, tip_load_n, length_m, buckled in obs:
        if pressure_pa <= 0 or tip_load_n <= 0 or length_m <= 0:
            raise CalibrationError("observations need positive p, F, L")
        bound = (tip_load_n * length_m) / (math.pi * pressure_pa * radius_m**3)
        if buckled:
            upper = min(upper, bound)
        else:
            lower = max(lower, bound)
    if lower > upper:
        raise CalibrationError(
            f"inconsistent observations: coefficient in empty interval "
            f"[{lower:.4g}, {upper:.4g}]")
    return Calibration(lower=lower, upper=upper, point=upper)
