"""Command line entry points.

    jambeam simulate <scenario.json> [--trace out.ndjson] [--shapes out.csv]
    jambeam experiment deflection [--jammed] [--pressures a:b:step]
                                  [--load-g 150] [--csv out.csv] ...
    jambeam plan <goal.csv> [--script-out out.json] [--scenario spec.json]
    jambeam serve [--bind 127.0.0.1:8732]
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import engine as engine_mod
from . import mechanics, planner
from .config import RobotSpec
from .scenario import ScenarioError, load_scenario, parse_spec, serialize_action


def _parse_pressures(text: str | None) -> list[float]:
    if text is None:
        return list(mechanics.SWEEP_PRESSURES_PA)
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise SystemExit(f"--pressures expects a:b:step, got {text!r}")
    if step <= 0 or b < a:
        raise SystemExit("--pressures needs step > 0 and b >= a")
    out = []
    p = a
    while p <= b + 1e-9:
        out.append(p)
        p += step
    return out


def _write_or_print(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_simulate(args) -> int:
    spec, script = load_scenario(args.scenario)
    trace = engine_mod.run(spec, script)
    if args.trace:
        Path(args.trace).write_text(trace.to_ndjson())
    if args.shapes:
        Path(args.shapes).write_text(engine_mod.shape_csv(trace.snapshots[-1].shape))
    final = trace.snapshots[-1]
    joints = {j["pouch"]: round(math.degrees(j["angle_rad"]), 2)
              for j in final.joints if abs(j["angle_rad"]) > 1e-9}
    print(f"ran {len(script)} actions in {final.time_s:.1f} s simulated time")
    print(f"everted {final.everted_m:.3f} m, joints (deg): {joints or 'none'}")
    return 0


def cmd_experiment(args) -> int:
    if args.kind != "deflection":
        raise SystemExit(f"unknown experiment {args.kind!r}")
    spec = RobotSpec(radius_m=args.radius_m, length_m=args.length_m,
                     num_pouches=args.pouches)
    pressures = _parse_pressures(args.pressures)
    load_n = args.load_g / 1000.0 * mechanics.GRAVITY_MPS2
    rows = engine_mod.deflection_experiment(spec, pressures, load_n,
                                            jammed=args.jammed)
    _write_or_print(engine_mod.deflection_csv(rows), args.csv)
    return 0


def cmd_plan(args) -> int:
    pts = np.loadtxt(args.goal, delimiter=",", skiprows=args.skip_header, ndmin=2)
    if args.scenario:
        spec, _ = load_scenario(args.scenario)
    else:
        spec = RobotSpec()
    goal = planner.GoalShape(pts)
    result = planner.plan_for_goal(goal, spec)
    doc = {"script": [serialize_action(a) for a in result.script]}
    if args.script_out:
        Path(args.script_out).write_text(json.dumps(doc, indent=2) + "\n")
    else:
        print(json.dumps(doc, indent=2))
    angles = {i: round(math.degrees(a), 1) for i, a in enumerate(result.plan.angles)
              if abs(a) > 1e-9}
    print(f"# residual {result.plan.residual_m:.4g} m, "
          f"joint angles (deg): {angles or 'none'}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway import create_app

    host, _, port = args.bind.rpartition(":")
    uvicorn.run(create_app(), host=host or "127.0.0.1", port=int(port),
                log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="jambeam",
                                     description="inflated beam robot simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--trace", help="write the full trace as NDJSON")
    p.add_argument("--shapes", help="write the final shape as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a canned experiment")
    p.add_argument("kind", choices=["deflection"])
    p.add_argument("--jammed", action="store_true")
    p.add_argument("--pressures", help="sweep as a:b:step in Pa "
                   "(default: the standard 3.4..13.8 kPa sweep)")
    p.add_argument("--load-g", type=float, default=150.0)
    p.add_argument("--csv", help="output path (default stdout)")
    p.add_argument("--radius-m", type=float, default=mechanics.DEFAULT_RADIUS_M)
    p.add_argument("--length-m", type=float, default=0.6)
    p.add_argument("--pouches", type=int, default=4)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plan", help="plan a script for a goal polyline CSV")
    p.add_argument("goal", help="CSV of x_m,y_m points")
    p.add_argument("--script-out", help="write the script JSON here")
    p.add_argument("--scenario", help="take the robot spec from this scenario file")
    p.add_argument("--skip-header", type=int, default=1,
                   help="header lines to skip in the goal CSV (default 1)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("serve", help="serve the session gateway")
    p.add_argument("--bind", default="127.0.0.1:8732")
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, engine_mod.EngineError, planner.PlannerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
