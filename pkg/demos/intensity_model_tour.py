#!/usr/bin/env python3
"""Tour of the amplitude <-> perceived intensity mapping.

Walks the default model across the frequency range, shows the U-shaped
threshold curve and falling exponent, and demonstrates that the mapping
inverts cleanly: intensity -> amplitude -> intensity lands where it started.
"""

import numpy as np

from vibroclean import (
    PerceptionModel,
    amplitude_for_intensity,
    exponent_at,
    perceived_intensity,
    threshold_at,
)

model = PerceptionModel()

print("frequency sweep of the default model")
print(f"{'f (Hz)':>8}  {'threshold':>10}  {'exponent':>8}  {'I at a=0.1':>10}")
for f in (100, 250, 500, 1000, 2000, 4000, 8000, 16000):
    thr = threshold_at(model, f)
    exp = exponent_at(model, f)
    i = perceived_intensity(model, 0.1, f)
    print(f"{f:>8}  {thr:>10.4f}  {exp:>8.3f}  {i:>10.3f}")

print()
print("the same amplitude feels very different across frequency:")
print("0.1 at 250 Hz (most sensitive region) is", end=" ")
ratio = perceived_intensity(model, 0.1, 250.0) / perceived_intensity(model, 0.1, 8000.0)
print(f"{ratio:.0f}x the intensity of 0.1 at 8 kHz")

print()
print("equal-intensity amplitudes (what it takes to feel intensity 10):")
for f in (150, 700, 3000, 12000):
    a = amplitude_for_intensity(model, 10.0, f)
    print(f"  {f:>6} Hz -> amplitude {a:.4f}")

print()
print("round trip across a random grid")
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    f = float(np.exp(rng.uniform(np.log(100.0), np.log(20000.0))))
    i = float(10.0 ** rng.uniform(-3, 6))
    back = perceived_intensity(model, amplitude_for_intensity(model, i, f), f)
    worst = max(worst, abs(back - i) / i)
print(f"  worst relative error over 1000 (f, I) pairs: {worst:.2e}")
