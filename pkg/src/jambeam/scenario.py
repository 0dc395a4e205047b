"""Scenario documents: JSON in, validated spec + action script out.

Schema (all spec fields optional, defaults applied; unknown fields rejected):

    {"spec": {"radius_m", "length_m", "num_pouches", "pressure_pa",
              "initial_everted_m", "cable_offset_m",
              "mechanics": {"critical_coefficient", "kappa_jam", "kappa_ei",
                            "et_n_per_m", "wrinkle_floor", "tension_gain_n_per_m"},
              "carriage": {"speed_mps", "dwell_s", "magnet_range_m"},
              "pneumatics": {"seal_threshold_pa", "jam_fraction",
                             "vent_time_constant_s", "mode"}},
     "script": [{"action": "...", ...}, ...]}

Every validation error names the offending field path.
"""
from __future__ import annotations

import json
from dataclasses import fields as dc_fields
from pathlib import Path

from .actions import (Action, Dwell, Grow, HoldMagnet, JamPouch, MoveCarriage,
                      PullCable, ReleaseCable, ReleaseMagnet, SetPressure, Side,
                      UnjamPouch)
from .config import (CarriageParams, MechanicsParams, PneumaticsParams,
                     RobotSpec, SpecError)


class ScenarioError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _require_object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(doc: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ScenarioError(f"{path}.{unknown[0]}", "unknown field")


def _number(doc: dict, key: str, path: str, default):
    if key not in doc:
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _integer(doc: dict, key: str, path: str, default):
    if key not in doc:
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}.{key}", f"expected an integer, got {value!r}")
    return value


def _string(doc: dict, key: str, path: str, default):
    if key not in doc:
        return default
    value = doc[key]
    if not isinstance(value, str):
        raise ScenarioError(f"{path}.{key}", f"expected a string, got {value!r}")
    return value


def _params(doc: dict, key: str, path: str, cls):
    defaults = cls()
    if key not in doc:
        return defaults
    sub = _require_object(doc[key], f"{path}.{key}")
    names = [f.name for f in dc_fields(cls)]
    _reject_unknown(sub, set(names), f"{path}.{key}")
    kwargs = {}
    for name in names:
        fallback = getattr(defaults, name)
        if isinstance(fallback, str):
            kwargs[name] = _string(sub, name, f"{path}.{key}", fallback)
        else:
            kwargs[name] = _number(sub, name, f"{path}.{key}", fallback)
    return cls(**kwargs)


def parse_spec(doc, path: str = "spec") -> RobotSpec:
    doc = _require_object(doc, path)
    _reject_unknown(doc, {"radius_m", "length_m", "num_pouches", "pressure_pa",
                          "initial_everted_m", "cable_offset_m",
                          "mechanics", "carriage", "pneumatics"}, path)
    defaults = RobotSpec()
    spec = RobotSpec(
        radius_m=_number(doc, "radius_m", path, defaults.radius_m),
        length_m=_number(doc, "length_m", path, defaults.length_m),
        num_pouches=_integer(doc, "num_pouches", path, defaults.num_pouches),
        pressure_pa=_number(doc, "pressure_pa", path, defaults.pressure_pa),
        initial_everted_m=_number(doc, "initial_everted_m", path, None),
        cable_offset_m=_number(doc, "cable_offset_m", path, None),
        mechanics=_params(doc, "mechanics", path, MechanicsParams),
        carriage=_params(doc, "carriage", path, CarriageParams),
        pneumatics=_params(doc, "pneumatics", path, PneumaticsParams),
    )
    try:
        spec.validate(path)
    except SpecError as exc:
        raise ScenarioError(exc.path, exc.message) from exc
    return spec


_SIDES = {"left": Side.LEFT, "right": Side.RIGHT}


def parse_action(doc, num_pouches: int, path: str = "action") -> Action:
    doc = _require_object(doc, path)
    kind = _string(doc, "action", path, None)
    if kind is None:
        raise ScenarioError(f"{path}.action", "missing")

    def only(*keys):
        _reject_unknown(doc, {"action", *keys}, path)

    def need_number(key, minimum=None):
        value = _number(doc, key, path, None)
        if value is None:
            raise ScenarioError(f"{path}.{key}", "missing")
        if minimum is not None and value < minimum:
            raise ScenarioError(f"{path}.{key}", f"must be >= {minimum}, got {value}")
        return value

    def need_pouch():
        idx = _integer(doc, "pouch", path, None)
        if idx is None:
            raise ScenarioError(f"{path}.pouch", "missing")
        if not 0 <= idx < num_pouches:
            raise ScenarioError(f"{path}.pouch",
                                f"index {idx} out of range ({num_pouches} pouches)")
        return idx

    def need_side() -> Side:
        side = _string(doc, "side", path, None)
        if side not in _SIDES:
            raise ScenarioError(f"{path}.side", f"expected 'left' or 'right', got {side!r}")
        return _SIDES[side]

    if kind == "move_carriage":
        only("x_m")
        return MoveCarriage(need_number("x_m", 0.0))
    if kind == "hold_magnet":
        only("pouch", "valve")
        valve = _string(doc, "valve", path, None)
        if valve not in ("inner", "outer"):
            raise ScenarioError(f"{path}.valve", f"expected 'inner' or 'outer', got {valve!r}")
        return HoldMagnet(need_pouch(), valve)
    if kind == "release_magnet":
        only()
        return ReleaseMagnet()
    if kind == "dwell":
        only("seconds")
        return Dwell(need_number("seconds", 0.0))
    if kind == "pull_cable":
        only("side", "delta_m")
        return PullCable(need_side(), need_number("delta_m", 0.0))
    if kind == "release_cable":
        only("side", "delta_m")
        return ReleaseCable(need_side(), need_number("delta_m", 0.0))
    if kind == "grow":
        only("delta_m")
        return Grow(need_number("delta_m", 0.0))
    if kind == "set_pressure":
        only("pressure_pa")
        return SetPressure(need_number("pressure_pa", 0.0))
    if kind == "jam_pouch":
        only("pouch")
        return JamPouch(need_pouch())
    if kind == "unjam_pouch":
        only("pouch")
        return UnjamPouch(need_pouch())
    raise ScenarioError(f"{path}.action", f"unknown action {kind!r}")


def serialize_action(action: Action) -> dict:
    if isinstance(action, MoveCarriage):
        return {"action": "move_carriage", "x_m": action.x_m}
    if isinstance(action, HoldMagnet):
        return {"action": "hold_magnet", "pouch": action.pouch, "valve": action.valve}
    if isinstance(action, ReleaseMagnet):
        return {"action": "release_magnet"}
    if isinstance(action, Dwell):
        return {"action": "dwell", "seconds": action.seconds}
    if isinstance(action, PullCable):
        return {"action": "pull_cable", "side": action.side.value, "delta_m": action.delta_m}
    if isinstance(action, ReleaseCable):
        return {"action": "release_cable", "side": action.side.value, "delta_m": action.delta_m}
    if isinstance(action, Grow):
        return {"action": "grow", "delta_m": action.delta_m}
    if isinstance(action, SetPressure):
        return {"action": "set_pressure", "pressure_pa": action.pressure_pa}
    if isinstance(action, JamPouch):
        return {"action": "jam_pouch", "pouch": action.pouch}
    if isinstance(action, UnjamPouch):
        return {"action": "unjam_pouch", "pouch": action.pouch}
    raise TypeError(f"not an action: {action!r}")


def parse_document(doc) -> tuple[RobotSpec, list[Action]]:
    doc = _require_object(doc, "document")
    _reject_unknown(doc, {"spec", "script"}, "document")
    if "spec" not in doc:
        raise ScenarioError("document.spec", "missing")
    spec = parse_spec(doc["spec"])
    raw_script = doc.get("script", [])
    if not isinstance(raw_script, list):
        raise ScenarioError("document.script", "expected an array")
    script = [parse_action(item, spec.num_pouches, f"script[{i}]")
              for i, item in enumerate(raw_script)]
    return spec, script


def load_scenario(path: str | Path) -> tuple[RobotSpec, list[Action]]:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("document", f"invalid JSON: {exc}") from exc
    return parse_document(doc)
