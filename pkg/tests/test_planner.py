import math

import numpy as np
import pytest

from jambeam import engine as eng
from jambeam import planner as pl
from jambeam.actions import JamPouch, PullCable, Side, UnjamPouch
from jambeam.config import RobotSpec

GRID_5 = tuple(math.radians(d) for d in (0.0, 45.0, -45.0, 90.0, -90.0))


def spec_4():
    return RobotSpec(length_m=0.6, num_pouches=4)


def shape_from_angles(angles, pitch=0.15):
    """Independent polyline builder for goals: straight pitch-long links."""
    pts = [(0.0, 0.0)]
    heading = 0.0
    for angle in angles:
        heading += angle
        x, y = pts[-1]
        pts.append((x + pitch * math.cos(heading), y + pitch * math.sin(heading)))
    return np.asarray(pts)


GOAL_CORPUS = [
    shape_from_angles([0.0, 0.0, 0.0, 0.0]),
    shape_from_angles([0.0, 0.0, 0.0, math.radians(90)]),
    shape_from_angles([math.radians(45), 0.0, 0.0, 0.0]),
    shape_from_angles([0.0, math.radians(-45), math.radians(45), 0.0]),
    shape_from_angles([math.radians(90), math.radians(-90), math.radians(90), 0.0]),
    shape_from_angles([0.0, math.radians(45), math.radians(45), math.radians(-90)]),
    shape_from_angles([math.radians(-45), math.radians(-45), 0.0, 0.0]),
    shape_from_angles([math.radians(90), 0.0, math.radians(90), 0.0]),
    # off-grid goals: a quarter circle arc and a shallow sine wiggle
    np.stack([0.6 * 2 / math.pi * np.sin(np.linspace(0, math.pi / 2, 30)),
              0.6 * 2 / math.pi * (1 - np.cos(np.linspace(0, math.pi / 2, 30)))],
             axis=1),
    np.stack([np.linspace(0, 0.58, 30),
              0.03 * np.sin(np.linspace(0, 2 * math.pi, 30))], axis=1),
]


class TestFrechet:
    def test_identical_curves(self):
        pts = GOAL_CORPUS[4]
        assert pl.discrete_frechet(pts, pts) == 0.0

    def test_known_offset(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([[0.0, 0.3], [1.0, 0.3]])
        assert pl.discrete_frechet(a, b) == pytest.approx(0.3)

    def test_symmetry(self):
        a = pl.resample(GOAL_CORPUS[3], 20)
        b = pl.resample(GOAL_CORPUS[5], 20)
        assert pl.discrete_frechet(a, b) == pytest.approx(pl.discrete_frechet(b, a))


class TestFitJointAngles:
    def test_straight_goal_all_zeros(self):
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[0]), spec_4(), GRID_5)
        assert plan.angles == [0.0, 0.0, 0.0, 0.0]
        assert plan.residual_m < 1e-9

    def test_corner_at_pouch_three(self):
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[1]), spec_4(), GRID_5)
        assert plan.angles[:3] == [0.0, 0.0, 0.0]
        assert plan.angles[3] == pytest.approx(math.pi / 2)
        assert plan.residual_m < 1e-9

    def test_goal_longer_than_material_rejected(self):
        goal = pl.GoalShape(np.array([[0.0, 0.0], [10.0, 0.0]]))
        with pytest.raises(pl.GoalTooLongError):
            pl.fit_joint_angles(goal, spec_4(), GRID_5)

    def test_grid_must_include_zero(self):
        with pytest.raises(pl.PlannerError):
            pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[0]), spec_4(),
                                (math.radians(45),))

    @pytest.mark.parametrize("index", range(len(GOAL_CORPUS)))
    def test_dp_cost_equals_brute_force(self, index):
        goal = pl.GoalShape(GOAL_CORPUS[index])
        plan = pl.fit_joint_angles(goal, spec_4(), GRID_5)
        brute = pl.brute_force_cost(goal, spec_4(), GRID_5)
        assert plan.cost == pytest.approx(brute, abs=1e-12)

    def test_short_goal_leaves_tail_straight(self):
        goal = pl.GoalShape(shape_from_angles([0.0, math.radians(45)])[:3])
        plan = pl.fit_joint_angles(goal, spec_4(), GRID_5)
        assert plan.angles[2] == 0.0 and plan.angles[3] == 0.0


class TestCompile:
    def test_all_zero_plan_empty_script(self):
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[0]), spec_4(), GRID_5)
        assert pl.compile_actions(plan, spec_4()) == []

    def test_single_corner_script(self):
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[1]), spec_4(), GRID_5)
        script = pl.compile_actions(plan, spec_4())
        assert script == [UnjamPouch(3),
                          PullCable(Side.LEFT, pytest.approx(0.0608, abs=1e-3)),
                          JamPouch(3)]

    def test_three_joint_plan_gives_nine_actions(self):
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[4]), spec_4(), GRID_5)
        script = pl.compile_actions(plan, spec_4())
        assert len(script) == 9

    def test_growth_prepended_when_goal_exceeds_everted(self):
        spec = RobotSpec(length_m=0.6, num_pouches=4, initial_everted_m=0.3)
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[1]), spec, GRID_5)
        script = pl.compile_actions(plan, spec)
        assert script[0].delta_m == pytest.approx(0.3)

    def test_one_compliant_pouch_at_any_instant(self):
        spec = spec_4()
        plan = pl.fit_joint_angles(pl.GoalShape(GOAL_CORPUS[4]), spec, GRID_5)
        engine = eng.Engine(spec)
        for action in pl.compile_actions(plan, spec):
            snap = engine.apply(action)
            assert snap.pouch_states.count("compliant") <= 1


class TestRoundTrip:
    @pytest.mark.parametrize("index", range(len(GOAL_CORPUS)))
    def test_replay_matches_plan_and_residual(self, index):
        spec = spec_4()
        goal = pl.GoalShape(GOAL_CORPUS[index])
        result = pl.plan_for_goal(goal, spec, GRID_5)
        engine = eng.Engine(spec)
        for action in result.script:
            engine.apply(action)
        for i, angle in enumerate(result.plan.angles):
            got = engine.chain.joints.get(i)
            assert abs((got.angle if got else 0.0) - angle) < 1e-9
        replay_residual = pl.residual_against(engine.chain, goal,
                                              result.plan.goal_length_m)
        assert replay_residual <= result.plan.residual_m + 1e-6

    def test_plan_purity(self):
        spec = spec_4()
        goal = pl.GoalShape(GOAL_CORPUS[5])
        a = pl.plan_for_goal(goal, spec, GRID_5)
        b = pl.plan_for_goal(goal, spec, GRID_5)
        assert a.plan.angles == b.plan.angles
        assert a.script == b.script
