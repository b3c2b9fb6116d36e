#!/usr/bin/env python3
"""Decompose one analysis window and read off what each mode carries.

A 25 ms window holding a harmonic stack plus a whine is split into intrinsic
modes; each mode reports a dominant frequency and a peak-equivalent
amplitude, which together place it on the intensity spectrum.
"""

import numpy as np

from vibroclean import (
    PerceptionModel,
    decompose,
    dominant_frequency,
    frame_spectrum,
    imf_amplitude,
    total_intensity,
)

FS = 48000.0
N = 1200

t = np.arange(N) / FS
window = np.zeros(N)
for k in range(1, 5):
    window += (0.18 / k) * np.sin(2 * np.pi * 110.0 * k * t + 0.2)
window += 0.05 * np.sin(2 * np.pi * 1005.0 * t + 1.0)

modes = decompose(window)
print(f"{N}-sample window -> {len(modes.imfs)} modes")
print(f"{'mode':>4}  {'dominant Hz':>11}  {'amplitude':>9}")
for i, imf in enumerate(modes.imfs):
    f = dominant_frequency(imf, FS)
    a = imf_amplitude(imf)
    print(f"{i:>4}  {f:>11.0f}  {a:>9.4f}")
residual_rms = np.sqrt(np.mean(modes.residual**2))
print(f"residual rms: {residual_rms:.2e}")

err = np.max(np.abs(modes.reconstruct() - window))
print(f"sum of modes + residual vs input, max abs error: {err:.2e}")

print()
print("same window as a banded intensity spectrum")
spec = frame_spectrum(window, FS, PerceptionModel())
for band in np.flatnonzero(spec.values):
    lo = 100.0 + 20.0 * band
    print(f"  band [{lo:5.0f}, {lo + 20:5.0f}) Hz: intensity {spec.values[band]:9.3f}")
print(f"  total: {total_intensity(spec):.3f}")
