"""Click-free amplitude-modulated output synthesis.

The residual spectrum's total intensity is converted back to an amplitude at
a fixed carrier frequency (200 Hz by default) and rendered as a sine whose
envelope ramps linearly across each frame. Phase accumulates with wrap-around
so hour-long streams stay continuous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .perception import PerceptionModel, amplitude_for_intensity

TWO_PI = 2.0 * np.pi
DEFAULT_CARRIER_HZ = 200.0


@dataclass
class SynthState:
    """Carrier phase and envelope state between frames."""

    carrier: float = DEFAULT_CARRIER_HZ
    phase: float = 0.0
    prev_amplitude: float = 0.0
    sample_rate: float = 48000.0

    def __post_init__(self) -> None:
        if not (100.0 <= self.carrier < 20000.0):
            raise ValueError(f"carrier must be in [100, 20000) Hz, got {self.carrier}")
        if self.sample_rate <= 2.0 * self.carrier:
            raise ValueError(
                f"sample rate {self.sample_rate} must exceed twice the carrier {self.carrier}"
            )
        if not np.isfinite(self.phase):
            raise ValueError(f"phase must be finite, got {self.phase}")


def target_amplitude(model: PerceptionModel, i_total: float, carrier: float) -> float:
    """Carrier amplitude whose perceived intensity equals i_total.

    This is the inverse intensity law evaluated at the carrier, so rendering
    at this amplitude preserves the total perceived quantity of the residual.
    """
    if i_total < 0:
        raise ValueError(f"intensity must be non-negative, got {i_total}")
    return amplitude_for_intensity(model, i_total, carrier)


def render_frame(
    state: SynthState, target: float, n_samples: int
) -> tuple[np.ndarray, SynthState, int]:
    """Render one frame, ramping the envelope from the previous target.

    Sample k (0-based) is a(k) * sin(phase + (k+1) * step) with
    step = 2*pi*carrier/sample_rate and a(k) climbing linearly so that the
    last sample sits exactly on the new target. Output is clamped to
    [-1, 1]; the number of clamped samples is returned rather than hidden.

    Returns
    -------
    (samples, new_state, saturation_count)
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if target < 0:
        raise ValueError(f"target amplitude must be >= 0, got {target}")
    step = TWO_PI * state.carrier / state.sample_rate
    k = np.arange(1, n_samples + 1, dtype=np.float64)
    amps = state.prev_amplitude + (target - state.prev_amplitude) * (k / n_samples)
    samples = amps * np.sin(state.phase + k * step)
    saturated = int(np.count_nonzero(np.abs(samples) > 1.0))
    if saturated:
        np.clip(samples, -1.0, 1.0, out=samples)
    new_state = SynthState(
        carrier=state.carrier,
        phase=float((state.phase + n_samples * step) % TWO_PI),
        prev_amplitude=float(target),
        sample_rate=state.sample_rate,
    )
    return samples, new_state, saturated
