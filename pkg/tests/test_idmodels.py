import math

import numpy as np
import pytest

from ffitts import (
    Condition,
    DerivedWidth,
    MathError,
    Model,
    Tremor,
    WidthKind,
    compute_id,
    effective_width,
    finger_width,
    model_widths,
)

COND = Condition(20.0, 2.0)


class TestEffectiveWidth:
    def test_unit_spread(self):
        w = effective_width(1.0)
        assert w.value_mm == pytest.approx(4.132731354122493, rel=1e-12)
        assert w.kind is WidthKind.EFFECTIVE

    @pytest.mark.parametrize(
        "sigma,expected",
        [(0.69, 2.85158463434452), (2.31, 9.54660942802296)],
    )
    def test_closed_form_values(self, sigma, expected):
        assert effective_width(sigma).value_mm == pytest.approx(expected, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            effective_width(0.0)


class TestFingerWidth:
    def test_reference_cell(self):
        # adjusted width for sigma_obs=1.29 under the 1D rapid-accurate
        # calibration spread; published cell prints 3.87
        w = finger_width(1.29, 0.8837)
        assert isinstance(w, DerivedWidth)
        assert w.value_mm == pytest.approx(3.883831582263349, rel=1e-12)
        assert abs(w.value_mm - 3.87) < 0.05

    def test_undefined_when_spread_too_small(self):
        err = finger_width(0.69, 0.8837, COND)
        assert isinstance(err, MathError)
        assert err.condition == COND
        assert "!err" in str(err)

    def test_equal_spreads_are_undefined(self):
        assert isinstance(finger_width(1.0, 1.0), MathError)

    def test_zero_tremor_degenerates_to_effective_width(self):
        rng = np.random.Generator(np.random.PCG64(23))
        for sigma in rng.uniform(0.05, 5.0, 100):
            wf = finger_width(float(sigma), 0.0)
            we = effective_width(float(sigma))
            assert abs(wf.value_mm - we.value_mm) <= 1e-12 * we.value_mm

    def test_error_pattern_1d_rapid_accurate(self, paper_1d):
        sigma_a = paper_1d.sigma_a_catalog[0].sigma_a_mm  # rapid-accurate
        errors = {
            (s.condition.amplitude_mm, s.condition.width_mm)
            for s in paper_1d.summaries
            if isinstance(finger_width(s.sigma_obs_mm, sigma_a, s.condition), MathError)
        }
        assert errors == {(20, 2), (45, 2)}


class TestComputeId:
    def test_baseline_closed_form(self):
        got = compute_id(Model.M1_BASELINE, COND, COND.width_mm)
        assert got == pytest.approx(math.log2(11.0), rel=1e-12)

    def test_c_zero_matches_baseline_bit_for_bit(self, paper_1d):
        for s in paper_1d.summaries:
            base = compute_id(Model.M1_BASELINE, s.condition, s.condition.width_mm)
            for model in (Model.M5_W_NOSQRT_C, Model.M6_W_SQRT_C):
                assert compute_id(model, s.condition, s.condition.width_mm, 0.0) == base

    def test_sqrt_form_reference_value(self):
        # log2(20 / sqrt(4 - 0.5806^2) + 1), frozen from high-precision
        # evaluation of the closed form
        got = compute_id(Model.M6_W_SQRT_C, COND, 2.0, 0.5806)
        assert got == pytest.approx(3.5172785985919024, rel=1e-12)

    def test_domain_violation_names_condition_and_c(self):
        err = compute_id(Model.M5_W_NOSQRT_C, COND, 2.0, 2.5)
        assert isinstance(err, MathError)
        assert "c=2.5" in str(err)
        assert "A=20" in str(err)
        err_sqrt = compute_id(Model.M6_W_SQRT_C, COND, 2.0, 2.0)
        assert isinstance(err_sqrt, MathError)

    def test_unit_bit_when_amplitude_equals_width(self):
        for model in Model:
            cond = Condition(7.5, 7.5)
            assert compute_id(model, cond, 7.5, 0.0) == 1.0

    def test_monotonic_in_width_and_amplitude(self):
        rng = np.random.Generator(np.random.PCG64(31))
        for _ in range(200):
            a = float(rng.uniform(5, 100))
            w1, w2 = sorted(rng.uniform(0.5, 12, 2))
            if w1 == w2:
                continue
            cond = Condition(a, w1)
            id_narrow = compute_id(Model.M1_BASELINE, cond, w1)
            id_wide = compute_id(Model.M1_BASELINE, cond, w2)
            assert id_narrow > id_wide
            a_hi = a * 1.5
            assert compute_id(Model.M1_BASELINE, Condition(a_hi, w1), w1) > id_narrow

    def test_sqrt_form_ids_below_subtractive_form(self):
        # sqrt(w^2 - c^2) > w - c for 0 < c < w, so the sqrt-form ID is lower
        rng = np.random.Generator(np.random.PCG64(37))
        for _ in range(200):
            w = float(rng.uniform(1.0, 10.0))
            c = float(rng.uniform(1e-6, w * 0.999))
            a = float(rng.uniform(10, 80))
            cond = Condition(a, w)
            id_nosqrt = compute_id(Model.M5_W_NOSQRT_C, cond, w, c)
            id_sqrt = compute_id(Model.M6_W_SQRT_C, cond, w, c)
            assert id_sqrt < id_nosqrt


class TestModelProperties:
    def test_parse_round_trip(self):
        for model in Model:
            assert Model.parse(model.value) is model
        with pytest.raises(ValueError):
            Model.parse("m9")

    def test_tremor_classification(self):
        assert Model.M1_BASELINE.tremor is Tremor.NONE
        assert Model.M5_W_NOSQRT_C.tremor is Tremor.FREE_C
        assert Model.M7_GIVEN_SIGMA_A.tremor is Tremor.GIVEN_SIGMA_A

    def test_model_widths_requires_sigma_for_adjusted(self, paper_2d):
        with pytest.raises(ValueError):
            model_widths(Model.M7_GIVEN_SIGMA_A, list(paper_2d.summaries))

    def test_model_widths_nominal_hook(self, paper_1d):
        # rectangle-style pre-reduction hook: halve every nominal width
        widths = model_widths(
            Model.M1_BASELINE,
            list(paper_1d.summaries),
            nominal_width_fn=lambda c: c.width_mm / 2,
        )
        assert widths[0].value_mm == paper_1d.summaries[0].condition.width_mm / 2
