"""Tests for the amplitude <-> perceived intensity mapping."""

import numpy as np
import pytest

from vibroclean import (
    PerceptionModel,
    amplitude_for_intensity,
    exponent_at,
    perceived_intensity,
    threshold_at,
)
from vibroclean.perception import load_model, model_document, validate_knots

MODEL = PerceptionModel()

# Flat-curve helpers keep the law itself in view: constant threshold and
# exponent make the expected values computable by hand.
FLAT_HALF = PerceptionModel(knots=((100.0, 0.01, 0.5), (20000.0, 0.01, 0.5)))
FLAT_06 = PerceptionModel(knots=((100.0, 0.01, 0.6), (20000.0, 0.01, 0.6)))


def test_threshold_exact_at_knots():
    for hz, thr, _ in MODEL.knots:
        assert threshold_at(MODEL, hz) == thr


def test_exponent_exact_at_knots():
    for hz, _, exp in MODEL.knots:
        assert exponent_at(MODEL, hz) == exp


def test_threshold_log_log_midpoint():
    # 200 Hz is the log-midpoint of 100 and 400, so the interpolated
    # threshold is the geometric mean of the endpoint thresholds.
    model = PerceptionModel(knots=((100.0, 0.04, 0.8), (400.0, 0.01, 0.8), (20000.0, 0.01, 0.8)))
    assert threshold_at(model, 200.0) == pytest.approx(0.02, rel=1e-12)


def test_exponent_log_midpoint():
    model = PerceptionModel(knots=((100.0, 0.01, 1.0), (10000.0, 0.01, 0.5), (20000.0, 0.01, 0.5)))
    assert exponent_at(model, 1000.0) == pytest.approx(0.75, rel=1e-12)


def test_intensity_at_threshold_is_one():
    # amplitude == threshold means ratio 1, and 1**x is exactly 1
    for hz in (100.0, 250.0, 1500.0, 20000.0):
        a = threshold_at(MODEL, hz)
        assert perceived_intensity(MODEL, a, hz) == 1.0


def test_intensity_doubling_with_half_exponent():
    # alpha = 0.5 collapses the law to a plain amplitude ratio
    assert perceived_intensity(FLAT_HALF, 0.02, 500.0) == pytest.approx(2.0, rel=1e-12)


def test_inverse_closed_form():
    expected = 0.01 * 4.0 ** (1.0 / 1.2)
    assert amplitude_for_intensity(FLAT_06, 4.0, 1000.0) == pytest.approx(expected, rel=1e-12)


def test_zero_maps_to_zero_both_ways():
    assert perceived_intensity(MODEL, 0.0, 700.0) == 0.0
    assert amplitude_for_intensity(MODEL, 0.0, 700.0) == 0.0


def test_round_trip_random_grid():
    rng = np.random.default_rng(11)
    freqs = np.exp(rng.uniform(np.log(100.0), np.log(20000.0), 200))
    intensities = 10.0 ** rng.uniform(-3, 6, 200)
    for f, i in zip(freqs, intensities):
        a = amplitude_for_intensity(MODEL, i, f)
        back = perceived_intensity(MODEL, a, f)
        assert abs(back - i) / i < 1e-9


def test_scale_law():
    """Scaling amplitude by k scales intensity by k ** (2 * alpha)."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        f = float(np.exp(rng.uniform(np.log(100.0), np.log(20000.0))))
        a = float(10.0 ** rng.uniform(-3, 0))
        k = float(10.0 ** rng.uniform(-1, 1))
        expected = perceived_intensity(MODEL, a, f) * k ** (2.0 * exponent_at(MODEL, f))
        got = perceived_intensity(MODEL, k * a, f)
        assert abs(got - expected) / expected < 1e-9


def test_monotone_in_amplitude():
    amps = np.linspace(1e-4, 1.0, 500)
    vals = [perceived_intensity(MODEL, a, 350.0) for a in amps]
    assert np.all(np.diff(vals) > 0)


def test_frequency_domain_errors():
    for f in (99.9, 20000.1, 0.0, -5.0):
        with pytest.raises(ValueError):
            threshold_at(MODEL, f)
        with pytest.raises(ValueError):
            perceived_intensity(MODEL, 0.1, f)
        with pytest.raises(ValueError):
            amplitude_for_intensity(MODEL, 1.0, f)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        perceived_intensity(MODEL, -0.1, 500.0)
    with pytest.raises(ValueError):
        amplitude_for_intensity(MODEL, -1.0, 500.0)


def test_validate_knots_reports_each_problem_with_index():
    bad = ((100.0, -0.01, 0.8), (90.0, 0.02, 0.0), (20000.0, 0.03, 0.5))
    problems = validate_knots(bad)
    text = "; ".join(problems)
    assert "knot 0" in text  # negative threshold
    assert "knot 1" in text  # non-positive exponent and ordering
    assert len(problems) >= 3


def test_validate_knots_requires_coverage():
    assert validate_knots(((150.0, 0.01, 0.8), (20000.0, 0.02, 0.5))) != []
    assert validate_knots(((100.0, 0.01, 0.8), (19000.0, 0.02, 0.5))) != []
    assert validate_knots(((100.0, 0.01, 0.8), (20000.0, 0.02, 0.5))) == []


def test_too_few_knots():
    assert validate_knots(((100.0, 0.01, 0.8),)) != []


def test_model_constructor_rejects_bad_knots():
    with pytest.raises(ValueError, match="knot 1"):
        PerceptionModel(knots=((100.0, 0.01, 0.8), (100.0, 0.02, 0.7), (20000.0, 0.03, 0.6)))


def test_load_model_defaults_without_knots():
    model = load_model({})
    assert model.knots == MODEL.knots
    assert model.reference_gain == 1.0


def test_load_model_round_trip():
    doc = model_document(FLAT_06)
    again = load_model(doc)
    assert again.knots == FLAT_06.knots
    assert again.reference_gain == FLAT_06.reference_gain


def test_load_model_rejects_malformed_record():
    with pytest.raises(ValueError, match="knot 1"):
        load_model({"knots": [{"hz": 100.0, "threshold": 0.01, "exponent": 0.8}, {"hz": 500.0}]})


def test_load_model_rejects_non_mapping():
    with pytest.raises(ValueError):
        load_model([1, 2, 3])
