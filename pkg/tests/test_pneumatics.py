import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jambeam import pneumatics as pn
from jambeam.actions import Dwell, HoldMagnet, MoveCarriage, ReleaseMagnet

BEAM = 6900.0


def make_network(n=3, mode=pn.FlowMode.INSTANTANEOUS, beam=BEAM):
    return pn.build_network(beam, n, pitch=0.15, everted_length=n * 0.15, mode=mode)


def run_macro(net, pouch_index, target):
    """Execute the canonical sequence without the engine (magnet + settles)."""
    script = pn.canonical_sequence(net, pouch_index, target)
    for action in script:
        if isinstance(action, HoldMagnet):
            role = pn.ValveRole(action.valve)
            pn.set_magnet(net, pn.valve_id(action.pouch, role), True)
            pn.settle(net)
        elif isinstance(action, Dwell):
            pn.settle(net, action.seconds)
        elif isinstance(action, ReleaseMagnet):
            held = net.held_valve()
            if held is not None:
                pn.set_magnet(net, held.id, False)
            pn.settle(net)
    return net


def state_of(net, i):
    return pn.pouch_state(net.pouches[i], net.beam_pressure, net.jam_fraction)


def no_loose_valve_under_gradient(net):
    for pouch in net.pouches:
        if not pouch.everted:
            continue
        for valve in pouch.valves:
            dp = pn.gradient(net, pouch, valve)
            if abs(dp) > net.seal_threshold and not valve.magnet_held:
                if valve.ball is pn.BallState.LOOSE:
                    return False
    return True


class TestValveStateMachine:
    def test_cold_start_is_jammed_with_sealed_inner_valves(self):
        net = make_network()
        for pouch in net.pouches:
            assert state_of(net, pouch.index) is pn.JamState.JAMMED
            assert pouch.inner_valve.ball is pn.BallState.SEALED_TOWARD_B
            assert pouch.outer_valve.ball is pn.BallState.LOOSE

    def test_hold_frees_a_sealed_ball(self):
        net = make_network()
        valve = net.pouches[0].inner_valve
        assert valve.ball is pn.BallState.SEALED_TOWARD_B
        pn.set_magnet(net, valve.id, True)
        assert valve.ball is pn.BallState.LOOSE
        assert valve.magnet_held

    def test_release_without_gradient_stays_loose(self):
        net = make_network()
        valve = net.pouches[0].outer_valve  # vented pouch: no gradient here
        pn.set_magnet(net, valve.id, True)
        pn.set_magnet(net, valve.id, False)
        pn.settle(net)
        assert valve.ball is pn.BallState.LOOSE

    def test_release_under_gradient_seals_on_next_settle(self):
        net = make_network()
        valve = net.pouches[1].inner_valve
        pn.set_magnet(net, valve.id, True)
        # instantaneous: holding equalizes, so force a gradient back first
        pn.settle(net)
        net.pouches[1].pressure = 0.0
        pn.set_magnet(net, valve.id, False)
        pn.settle(net)
        assert valve.ball is pn.BallState.SEALED_TOWARD_B

    def test_single_magnet_exclusivity(self):
        net = make_network()
        pn.set_magnet(net, pn.valve_id(0, pn.ValveRole.INNER), True)
        with pytest.raises(pn.MagnetBusyError):
            pn.set_magnet(net, pn.valve_id(1, pn.ValveRole.INNER), True)

    def test_unknown_valve(self):
        net = make_network()
        with pytest.raises(pn.UnknownValveError):
            pn.set_magnet(net, "pouch9:inner", True)


class TestSettle:
    def test_fixed_point_emits_nothing(self):
        net = make_network()
        assert pn.settle(net) == []
        assert pn.settle(net) == []

    def test_vent_compliant_pouch_seals_inner_valve(self):
        # equalized pouch, then hold the outer valve: pressure drops to 0 and
        # the inflow attempt through the inner valve seals it
        net = make_network()
        run_macro(net, 0, pn.JamTarget.UNJAM)
        pouch = net.pouches[0]
        assert pouch.pressure == pytest.approx(BEAM)
        pn.set_magnet(net, pouch.outer_valve.id, True)
        events = pn.settle(net)
        assert pouch.pressure == 0.0
        assert pouch.inner_valve.ball is pn.BallState.SEALED_TOWARD_B
        kinds = [e.kind for e in events]
        assert pn.EventKind.POUCH_VENTED in kinds
        assert pn.EventKind.VALVE_SEALED in kinds

    def test_first_order_three_time_constants(self):
        net = make_network(mode=pn.FlowMode.FIRST_ORDER)
        pouch = net.pouches[0]
        assert pouch.pressure == 0.0
        pn.set_magnet(net, pouch.inner_valve.id, True)
        pn.settle(net, 3.0 * net.vent_time_constant)
        assert pouch.pressure >= 0.95 * BEAM
        assert pouch.pressure == pytest.approx(BEAM * (1 - math.exp(-3)))
        assert pouch.outer_valve.ball is pn.BallState.SEALED_TOWARD_B

    def test_first_order_zero_dt_moves_no_gas(self):
        net = make_network(mode=pn.FlowMode.FIRST_ORDER)
        pn.set_magnet(net, net.pouches[0].inner_valve.id, True)
        pn.settle(net, 0.0)
        assert net.pouches[0].pressure == 0.0


class TestPouchState:
    def test_vented_is_jammed(self):
        net = make_network()
        assert state_of(net, 0) is pn.JamState.JAMMED

    def test_equalized_is_compliant(self):
        net = make_network()
        net.pouches[0].pressure = BEAM
        assert state_of(net, 0) is pn.JamState.COMPLIANT

    def test_midpoint_is_transitional(self):
        net = make_network()
        net.pouches[0].pressure = 3450.0
        assert state_of(net, 0) is pn.JamState.TRANSITIONAL

    def test_non_everted_pouch_rejected(self):
        net = pn.build_network(BEAM, 3, pitch=0.15, everted_length=0.15)
        with pytest.raises(pn.NonEvertedPouchError):
            pn.pouch_state(net.pouches[2], BEAM)


class TestCanonicalSequence:
    def test_four_step_script(self):
        net = make_network()
        script = pn.canonical_sequence(net, 1, pn.JamTarget.JAM)
        assert [type(a) for a in script] == [MoveCarriage, HoldMagnet, Dwell, ReleaseMagnet]
        assert script[0].x_m == net.pouches[1].outer_valve.position_along_beam

    def test_jam_targets_outer_unjam_targets_inner(self):
        net = make_network()
        assert pn.canonical_sequence(net, 0, pn.JamTarget.JAM)[1].valve == "outer"
        assert pn.canonical_sequence(net, 0, pn.JamTarget.UNJAM)[1].valve == "inner"

    def test_unjam_reaches_compliant_and_seals_outer(self):
        net = make_network()
        run_macro(net, 2, pn.JamTarget.UNJAM)
        assert state_of(net, 2) is pn.JamState.COMPLIANT
        assert net.pouches[2].outer_valve.ball is pn.BallState.SEALED_TOWARD_B

    def test_jam_on_jammed_pouch_is_noop(self):
        net = make_network()
        before = [(p.pressure, p.inner_valve.ball, p.outer_valve.ball)
                  for p in net.pouches]
        run_macro(net, 1, pn.JamTarget.JAM)
        after = [(p.pressure, p.inner_valve.ball, p.outer_valve.ball)
                 for p in net.pouches]
        assert before == after

    def test_non_everted_rejected(self):
        net = pn.build_network(BEAM, 3, pitch=0.15, everted_length=0.15)
        with pytest.raises(pn.NonEvertedPouchError):
            pn.canonical_sequence(net, 2, pn.JamTarget.JAM)


class TestExhaustiveThreePouches:
    """All 4^3 initial pressure combinations x both targets x every pouch."""

    LEVELS = [0.0, BEAM / 3, 2 * BEAM / 3, BEAM]

    def seeded(self, levels):
        net = make_network(3)
        for pouch, level in zip(net.pouches, levels):
            pouch.pressure = level
        pn.settle(net)  # classify balls consistently
        return net

    @pytest.mark.parametrize("target", [pn.JamTarget.JAM, pn.JamTarget.UNJAM])
    def test_reach_target_idempotently(self, target):
        want = pn.JamState.JAMMED if target is pn.JamTarget.JAM else pn.JamState.COMPLIANT
        for levels in itertools.product(self.LEVELS, repeat=3):
            for i in range(3):
                net = self.seeded(levels)
                run_macro(net, i, target)
                assert state_of(net, i) is want, (levels, i, target)
                assert no_loose_valve_under_gradient(net)
                first = (net.pouches[i].pressure, net.pouches[i].inner_valve.ball,
                         net.pouches[i].outer_valve.ball)
                run_macro(net, i, target)
                second = (net.pouches[i].pressure, net.pouches[i].inner_valve.ball,
                          net.pouches[i].outer_valve.ball)
                assert first == second
                assert no_loose_valve_under_gradient(net)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.booleans()), max_size=12))
def test_random_macro_sequences_keep_invariants(ops):
    net = make_network(3)
    for pouch_index, jam in ops:
        target = pn.JamTarget.JAM if jam else pn.JamTarget.UNJAM
        run_macro(net, pouch_index, target)
        assert no_loose_valve_under_gradient(net)
        held = net.held_valve()
        assert held is None
        for pouch in net.pouches:
            assert -1e-9 <= pouch.pressure <= net.beam_pressure + 1e-9
