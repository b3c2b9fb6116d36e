"""Tests for the gated, damped per-band noise filter."""

import json

import numpy as np
import pytest

from vibroclean import BandScheme, NoiseFilter
from vibroclean.noise_filter import init
from vibroclean.spectrum import IntensitySpectrum

ONE_BAND = BandScheme(f_lo=100.0, f_hi=120.0, width=20.0)


def spec1(value):
    return IntensitySpectrum(np.array([float(value)]))


def test_one_band_scheme_sanity():
    assert ONE_BAND.count == 1


def test_update_worked_examples():
    # F=1, I=2: step (2-1)*(1/2)^2 = 0.25
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 1.0
    delta = filt.update(spec1(2.0))
    assert filt.values[0] == 1.25
    assert delta == 0.25

    # F=1, I=4: step (4-1)*(1/4)^2 = 0.1875
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 1.0
    filt.update(spec1(4.0))
    assert filt.values[0] == 1.1875


def test_gate_leaves_value_untouched():
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 2.0
    assert filt.update(spec1(2.0)) == 0.0
    assert filt.values[0] == 2.0
    assert filt.update(spec1(0.5)) == 0.0
    assert filt.values[0] == 2.0


def test_update_bounded_and_monotone():
    """For 0 < F < I every band moves strictly up but never past I."""
    rng = np.random.default_rng(23)
    count = 10000
    scheme = BandScheme(f_lo=0.0, f_hi=count * 20.0, width=20.0)
    i_vals = 10.0 ** rng.uniform(-3, 3, count)
    f_vals = i_vals * rng.uniform(1e-6, 1.0 - 1e-6, count)
    filt = NoiseFilter(scheme)
    filt.values = f_vals.copy()
    filt.update(IntensitySpectrum(i_vals))
    assert np.all(filt.values > f_vals)
    assert np.all(filt.values <= i_vals)


def test_fixed_point_reached_from_half():
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 0.5
    for _ in range(8):
        filt.update(spec1(1.0))
    assert 1.0 - filt.values[0] < 1e-6


def test_zero_floor_is_absorbing():
    filt = NoiseFilter(ONE_BAND, floor=0.0)
    for _ in range(50):
        delta = filt.update(spec1(5.0))
    assert filt.values[0] == 0.0
    assert delta == 0.0


def test_seed_from_first_frame():
    filt = NoiseFilter(ONE_BAND, seed_from_first_frame=True)
    filt.update(spec1(7.0))
    assert filt.values[0] == 7.0
    # second identical frame gates: value already at the input
    assert filt.update(spec1(7.0)) == 0.0
    assert filt.values[0] == 7.0


def test_relative_delta_uses_pre_update_value():
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 1.0
    assert filt.update(spec1(2.0)) == 0.25
    assert list(filt.recent_deltas)[-1] == 0.25


def test_subtract_clamps_and_keeps_frame_index():
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 3.0
    out = filt.subtract(IntensitySpectrum(np.array([2.0]), frame_index=12))
    assert out.values[0] == 0.0
    assert out.frame_index == 12
    out = filt.subtract(IntensitySpectrum(np.array([5.0])))
    assert out.values[0] == 2.0


def test_band_count_mismatch_rejected():
    filt = NoiseFilter(ONE_BAND)
    with pytest.raises(ValueError):
        filt.update(IntensitySpectrum(np.zeros(2)))
    with pytest.raises(ValueError):
        filt.subtract(IntensitySpectrum(np.zeros(995)))


def test_is_converged_needs_full_quiet_window():
    filt = NoiseFilter(ONE_BAND)
    filt.values[0] = 10.0
    for _ in range(2):
        filt.update(spec1(1.0))
    assert not filt.is_converged(window=3, epsilon=0.01)
    filt.update(spec1(1.0))
    assert filt.is_converged(window=3, epsilon=0.01)
    # a large step resets the quiet run
    filt.update(spec1(100.0))
    assert not filt.is_converged(window=3, epsilon=0.01)
    for _ in range(3):
        filt.update(spec1(1.0))
    assert filt.is_converged(window=3, epsilon=0.01)


def test_is_converged_argument_validation():
    filt = NoiseFilter(ONE_BAND)
    with pytest.raises(ValueError):
        filt.is_converged(window=0)
    with pytest.raises(ValueError):
        filt.is_converged(epsilon=0.0)
    with pytest.raises(ValueError):
        filt.is_converged(window=513)


def test_freeze_blocks_updates_and_writes():
    filt = NoiseFilter(ONE_BAND)
    filt.update(spec1(2.0))
    filt.freeze()
    assert filt.frozen
    with pytest.raises(RuntimeError):
        filt.update(spec1(3.0))
    with pytest.raises(ValueError):
        filt.values[0] = 9.0
    # subtraction is read-only and still allowed
    filt.subtract(spec1(1.0))


def test_document_round_trip_is_bitwise():
    rng = np.random.default_rng(31)
    filt = NoiseFilter(BandScheme())
    filt.values = 10.0 ** rng.uniform(-6, 3, filt.values.shape[0])
    filt.update_count = 321
    doc = json.loads(json.dumps(filt.to_document()))
    again = NoiseFilter.from_document(doc)
    np.testing.assert_array_equal(again.values, filt.values)
    assert again.update_count == 321
    assert again.floor == filt.floor
    assert again.scheme == filt.scheme


def test_from_document_rejects_malformed():
    base = NoiseFilter(ONE_BAND).to_document()

    doc = dict(base)
    doc["format"] = "something-else"
    with pytest.raises(ValueError):
        NoiseFilter.from_document(doc)

    doc = dict(base)
    doc["version"] = 99
    with pytest.raises(ValueError):
        NoiseFilter.from_document(doc)

    doc = dict(base)
    doc["values"] = doc["values"][:-1] if len(doc["values"]) > 1 else []
    with pytest.raises(ValueError, match="values"):
        NoiseFilter.from_document(doc)

    doc = dict(base)
    doc["values"] = [float("inf")]
    with pytest.raises(ValueError):
        NoiseFilter.from_document(doc)

    with pytest.raises(ValueError):
        NoiseFilter.from_document("not a dict")


def test_document_band_count_checked_against_scheme():
    filt = NoiseFilter(BandScheme())
    doc = filt.to_document()
    doc["values"] = doc["values"][:994]
    with pytest.raises(ValueError, match="994"):
        NoiseFilter.from_document(doc)


def test_init_helper_starts_at_floor():
    filt = init(ONE_BAND, floor=1e-4)
    assert np.all(filt.values == 1e-4)
    assert filt.update_count == 0
    assert not filt.frozen


def test_negative_floor_rejected():
    with pytest.raises(ValueError):
        NoiseFilter(ONE_BAND, floor=-1.0)
