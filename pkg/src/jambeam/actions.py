"""Primitive and macro actions understood by the engine.

A script is a plain list of these records. Macros (``JamPouch`` /
``UnjamPouch``) expand deterministically into primitives before execution.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class MoveCarriage:
    x_m: float


@dataclass(frozen=True)
class HoldMagnet:
    pouch: int
    valve: str  # "inner" | "outer"


@dataclass(frozen=True)
class ReleaseMagnet:
    pass


@dataclass(frozen=True)
class Dwell:
    seconds: float


@dataclass(frozen=True)
class PullCable:
    side: Side
    delta_m: float


@dataclass(frozen=True)
class ReleaseCable:
    side: Side
    delta_m: float


@dataclass(frozen=True)
class Grow:
    delta_m: float


@dataclass(frozen=True)
class SetPressure:
    pressure_pa: float


@dataclass(frozen=True)
class JamPouch:
    pouch: int


@dataclass(frozen=True)
class UnjamPouch:
    pouch: int


Action = Union[
    MoveCarriage,
    HoldMagnet,
    ReleaseMagnet,
    Dwell,
    PullCable,
    ReleaseCable,
    Grow,
    SetPressure,
    JamPouch,
    UnjamPouch,
]

ActionScript = list  # list[Action]
