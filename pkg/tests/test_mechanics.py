import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jambeam import mechanics as mech

R = 0.043
F_150G = 0.150 * 9.81  # 1.4715 N


def model(p, c=mech.DEFAULT_CRITICAL_COEFF, floor=0.1):
    return mech.MomentModel(p, R, c, floor)


def cantilever_oracle(F, L, EI, w=0.0):
    """Closed-form uniform-EI tip deflection: FL^3/3EI + wL^4/8EI."""
    return F * L**3 / (3 * EI) + w * L**4 / (8 * EI)


class TestCharacteristicMoments:
    def test_reference_values(self):
        mw, mc = mech.characteristic_moments(6900.0, R)
        assert mw == pytest.approx(0.862, abs=1e-3)
        assert mc == pytest.approx(1.723, abs=1e-3)

    def test_zero_pressure(self):
        assert mech.characteristic_moments(0.0, R) == (0.0, 0.0)

    def test_collapse_is_twice_wrinkle(self):
        mw, mc = mech.characteristic_moments(5432.1, 0.05)
        assert mc == pytest.approx(2 * mw, rel=1e-12)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(mech.MechanicsError):
            mech.characteristic_moments(1000.0, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(p=st.floats(10.0, 5e4), r=st.floats(0.005, 0.2), k=st.floats(1.1, 10.0))
    def test_linear_in_pressure_cubic_in_radius(self, p, r, k):
        mw1, mc1 = mech.characteristic_moments(p, r)
        mw2, mc2 = mech.characteristic_moments(k * p, r)
        assert mw2 == pytest.approx(k * mw1, rel=1e-9)
        assert mc2 == pytest.approx(k * mc1, rel=1e-9)
        mw3, _ = mech.characteristic_moments(p, k * r)
        assert mw3 == pytest.approx(k**3 * mw1, rel=1e-9)


class TestCriticalMoment:
    def test_calibration_point(self):
        section = mech.BeamSection(0.0, 0.6, jammed=False)
        assert mech.critical_moment(model(5200.0, c=0.68), section) == \
            pytest.approx(0.883, abs=0.002)

    def test_jammed_doubles_with_kappa_two(self):
        unjammed = mech.BeamSection(0.0, 0.6, jammed=False, kappa_jam=2.0)
        jammed = mech.BeamSection(0.0, 0.6, jammed=True, kappa_jam=2.0)
        m = model(5200.0, c=0.68)
        assert mech.critical_moment(m, jammed) == \
            pytest.approx(2 * mech.critical_moment(m, unjammed), rel=1e-12)

    def test_zero_pressure_zero_moment(self):
        m = model(0.0)
        for jammed in (False, True):
            section = mech.BeamSection(0.0, 0.6, jammed=jammed)
            assert mech.critical_moment(m, section) == 0.0

    def test_jammed_never_weaker(self):
        m = model(7000.0)
        s1 = mech.BeamSection(0.0, 0.6, jammed=True, kappa_jam=1.0)
        s2 = mech.BeamSection(0.0, 0.6, jammed=False, kappa_jam=1.0)
        assert mech.critical_moment(m, s1) == mech.critical_moment(m, s2)


class TestMomentProfile:
    def test_tip_load_base_moment(self):
        m = mech.moment_profile(mech.LoadCase(F_150G, 0.6))
        assert float(m(0.0)) == pytest.approx(0.8829, abs=1e-6)

    def test_free_end(self):
        m = mech.moment_profile(mech.LoadCase(2.5, 0.8))
        assert float(m(0.8)) == 0.0

    def test_no_load_no_moment(self):
        m = mech.moment_profile(mech.LoadCase(0.0, 0.6))
        assert float(m(0.3)) == 0.0

    def test_self_weight_adds_quadratic(self):
        load = mech.LoadCase(0.0, 1.0, include_self_weight=True, weight_per_m=2.0)
        m = mech.moment_profile(load)
        assert float(m(0.0)) == pytest.approx(1.0)


class TestTipDeflection:
    def test_zero_load(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        assert mech.tip_deflection(sections, model(13800.0), mech.LoadCase(0.0, 0.6)) == 0.0

    def test_matches_closed_form_unjammed(self):
        # high pressure: wrinkling never starts, EI is uniform
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        ei = 1.4e4 * math.pi * R**3
        got = mech.tip_deflection(sections, model(13800.0), mech.LoadCase(F_150G, 0.6))
        want = cantilever_oracle(F_150G, 0.6, ei)
        assert want == pytest.approx(0.0303, abs=2e-4)
        assert got == pytest.approx(want, rel=0.02)

    def test_matches_closed_form_jammed(self):
        sections = mech.uniform_sections(0.6, 4, jammed=True, kappa_ei=5.0)
        ei = 1.4e4 * math.pi * R**3 * 5.0
        got = mech.tip_deflection(sections, model(13800.0), mech.LoadCase(F_150G, 0.6))
        assert got == pytest.approx(cantilever_oracle(F_150G, 0.6, ei), rel=0.02)

    def test_finer_grid_tightens_to_half_percent(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        ei = 1.4e4 * math.pi * R**3
        got = mech.tip_deflection(sections, model(13800.0),
                                  mech.LoadCase(F_150G, 0.6), stations=1000)
        assert got == pytest.approx(cantilever_oracle(F_150G, 0.6, ei), rel=0.005)

    def test_self_weight_oracle(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        load = mech.LoadCase(0.5, 0.6, include_self_weight=True, weight_per_m=1.0)
        ei = 1.4e4 * math.pi * R**3
        got = mech.tip_deflection(sections, model(13800.0), load)
        assert got == pytest.approx(cantilever_oracle(0.5, 0.6, ei, w=1.0), rel=0.02)

    def test_buckled_configuration_raises(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        with pytest.raises(mech.BucklingError):
            mech.tip_deflection(sections, model(3400.0), mech.LoadCase(F_150G, 0.6))

    def test_non_tiling_sections_rejected(self):
        sections = [mech.BeamSection(0.0, 0.2, False), mech.BeamSection(0.3, 0.6, False)]
        with pytest.raises(mech.SectionTilingError):
            mech.tip_deflection(sections, model(13800.0), mech.LoadCase(0.1, 0.6))

    def test_nonincreasing_in_pressure(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        load = mech.LoadCase(F_150G, 0.6)
        ds = [mech.tip_deflection(sections, model(p), load)
              for p in (6900.0, 8600.0, 10300.0, 13800.0)]
        assert all(a >= b - 1e-12 for a, b in zip(ds, ds[1:]))
        # wrinkling degrades EI at 6.9 kPa but not at 8.6 kPa
        assert ds[0] > ds[1]

    def test_nonincreasing_in_jammed_count(self):
        load = mech.LoadCase(F_150G, 0.6)
        m = model(13800.0)
        previous = math.inf
        for jam_count in range(5):
            sections = mech.uniform_sections(0.6, 4, jammed=False)
            for s in sections[:jam_count]:
                s.jammed = True
            d = mech.tip_deflection(sections, m, load)
            assert d <= previous + 1e-12
            previous = d


class TestBucklingCheck:
    def test_low_pressure_buckles_at_base(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        hit = mech.buckling_check(sections, model(3400.0), mech.LoadCase(F_150G, 0.6))
        assert hit is not None and hit.x_m == 0.0 and hit.section_index == 0

    def test_marginal_pressure_still_buckles(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        hit = mech.buckling_check(sections, model(5200.0), mech.LoadCase(F_150G, 0.6))
        assert hit is not None and hit.x_m == 0.0

    def test_moderate_pressure_survives(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        assert mech.buckling_check(sections, model(6900.0),
                                   mech.LoadCase(F_150G, 0.6)) is None

    def test_jammed_resists_at_low_pressure(self):
        sections = mech.uniform_sections(0.6, 4, jammed=True, kappa_jam=2.0)
        assert mech.buckling_check(sections, model(3400.0),
                                   mech.LoadCase(F_150G, 0.6)) is None

    def test_single_compliant_pouch_takes_the_buckle(self):
        # moment at the compliant pouch sits between its own threshold and the
        # jammed one, and stays below the jammed threshold everywhere
        for weak in range(4):
            sections = mech.uniform_sections(0.6, 4, jammed=True, kappa_jam=8.0)
            sections[weak].jammed = False
            m = model(6900.0)
            crit = mech.critical_moment(m, sections[weak])
            x0 = sections[weak].x0
            load_f = crit / (0.6 - x0) * 1.05 if x0 < 0.6 else crit
            hit = mech.buckling_check(sections, m, mech.LoadCase(load_f, 0.6))
            assert hit is not None and hit.section_index == weak

    def test_ties_break_toward_base(self):
        sections = mech.uniform_sections(0.6, 4, jammed=False)
        hit = mech.buckling_check(sections, model(3400.0), mech.LoadCase(10.0, 0.6))
        assert hit.section_index == 0


class TestCalibration:
    def test_reference_pair(self):
        cal = mech.calibrate_coefficient(
            [(5200.0, F_150G, 0.6, True), (6900.0, F_150G, 0.6, False)])
        assert cal.lower == pytest.approx(0.512, abs=0.001)
        assert cal.upper == pytest.approx(0.680, abs=0.002)
        assert cal.point == cal.upper

    def test_single_survivor_gives_unit_upper(self):
        cal = mech.calibrate_coefficient([(6900.0, F_150G, 0.6, False)])
        assert cal.upper == 1.0
        assert cal.point == 1.0
        assert cal.lower > 0.5

    def test_contradiction_reports_empty_interval(self):
        with pytest.raises(mech.CalibrationError):
            mech.calibrate_coefficient(
                [(6900.0, F_150G, 0.6, True), (3400.0, F_150G, 0.6, False)])

    def test_empty_observations_rejected(self):
        with pytest.raises(mech.CalibrationError):
            mech.calibrate_coefficient([])

    def test_default_coefficient_comes_from_the_reference_pair(self):
        cal = mech.calibrate_coefficient(
            [(5200.0, F_150G, 0.6, True), (6900.0, F_150G, 0.6, False)])
        assert cal.point == pytest.approx(mech.DEFAULT_CRITICAL_COEFF, rel=1e-12)
