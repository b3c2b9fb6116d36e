"""Tests for the sifting decomposition and the per-IMF estimators."""

import numpy as np
import pytest

from vibroclean import Imf, SiftParams, decompose, dominant_frequency, imf_amplitude

FS = 48000.0
N = 1200


def sine(freq, amp=1.0, phase=0.3, n=N, fs=FS):
    t = np.arange(n) / fs
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def test_constant_window_has_no_modes():
    x = np.full(N, 0.7)
    modes = decompose(x)
    assert modes.imfs == []
    np.testing.assert_array_equal(modes.residual, x)


def test_monotone_window_has_no_modes():
    x = np.linspace(-1.0, 1.0, N)
    assert decompose(x).imfs == []


def test_rejects_short_window():
    with pytest.raises(ValueError):
        decompose(np.zeros(8))


def test_rejects_2d_window():
    with pytest.raises(ValueError):
        decompose(np.zeros((2, 600)))


def test_rejects_non_finite():
    x = np.zeros(N)
    x[17] = np.nan
    with pytest.raises(ValueError):
        decompose(x)


def test_pure_sine_recovered_in_first_mode():
    x = sine(500.0, amp=0.4)
    modes = decompose(x)
    assert len(modes.imfs) >= 1
    corr = np.corrcoef(modes.imfs[0].samples, x)[0, 1]
    assert corr > 0.99
    tail = x - modes.imfs[0].samples
    assert np.sum(tail * tail) < 0.01 * np.sum(x * x)


def test_completeness_random_windows():
    """Modes plus residual reproduce the input to rounding error."""
    rng = np.random.default_rng(42)
    for _ in range(100):
        x = rng.standard_normal(N)
        modes = decompose(x)
        err = np.max(np.abs(modes.reconstruct() - x))
        assert err < 1e-9


def test_determinism():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(N)
    a = decompose(x)
    b = decompose(x)
    assert len(a.imfs) == len(b.imfs)
    for ia, ib in zip(a.imfs, b.imfs):
        np.testing.assert_array_equal(ia.samples, ib.samples)
    np.testing.assert_array_equal(a.residual, b.residual)


def test_two_tone_split_ordering():
    # well-separated tones: first mode carries the fast one
    x = sine(2500.0, amp=0.2, phase=1.1) + sine(180.0, amp=0.3, phase=0.4)
    modes = decompose(x)
    assert len(modes.imfs) >= 2
    f0 = dominant_frequency(modes.imfs[0], FS)
    f1 = dominant_frequency(modes.imfs[1], FS)
    assert f0 > f1
    assert abs(f0 - 2500.0) <= 20.0
    assert abs(f1 - 180.0) <= 20.0


def test_max_imfs_cap():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(N)
    modes = decompose(x, SiftParams(max_imfs=2))
    assert len(modes.imfs) <= 2


def test_sift_params_validation():
    with pytest.raises(ValueError):
        SiftParams(max_imfs=0)
    with pytest.raises(ValueError):
        SiftParams(max_sift_iterations=0)
    with pytest.raises(ValueError):
        SiftParams(sd_threshold=0.0)
    with pytest.raises(ValueError):
        SiftParams(boundary="clamp")


def test_dominant_frequency_exact_on_whole_cycles():
    # 25 cycles of 1 kHz in 1200 samples: 50 sign transitions
    assert dominant_frequency(Imf(sine(1000.0, amp=0.2)), FS) == 1000.0
    # 5 cycles of 200 Hz: 10 transitions
    assert dominant_frequency(Imf(sine(200.0, amp=0.2, phase=1.0)), FS) == 200.0


def test_dominant_frequency_silence_and_dc():
    assert dominant_frequency(Imf(np.zeros(N)), FS) == 0.0
    assert dominant_frequency(Imf(np.full(N, 3.0)), FS) == 0.0


def test_dominant_frequency_rejects_short_imf():
    with pytest.raises(ValueError):
        dominant_frequency(Imf(np.zeros(4)), FS)


def test_amplitude_of_sine_is_peak():
    assert imf_amplitude(Imf(sine(400.0, amp=0.5))) == pytest.approx(0.5, rel=1e-9)


def test_amplitude_of_square_wave():
    x = np.tile(np.concatenate([np.full(10, 0.3), np.full(10, -0.3)]), 60)
    assert imf_amplitude(Imf(x)) == pytest.approx(0.3 * np.sqrt(2.0), rel=1e-12)


def test_amplitude_of_silence():
    assert imf_amplitude(Imf(np.zeros(N))) == 0.0


def test_amplitude_rejects_empty():
    with pytest.raises(ValueError):
        imf_amplitude(Imf(np.empty(0)))
