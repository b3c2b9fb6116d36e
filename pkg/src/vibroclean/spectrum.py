"""Per-band perceived-intensity spectra.

A fixed partition of 100 to 20000 Hz into 995 left-closed 20 Hz bands. Each
analysis window is decomposed into IMFs, every IMF contributes its perceived
intensity to the band holding its dominant frequency, and intensities add
linearly where several IMFs land in one band.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .emd import SiftParams, decompose, dominant_frequency, imf_amplitude
from .perception import PerceptionModel, perceived_intensity


@dataclass(frozen=True)
class BandScheme:
    """Uniform band partition [f_lo, f_hi) in steps of width Hz."""

    f_lo: float = 100.0
    f_hi: float = 20000.0
    width: float = 20.0
    count: int = field(init=False)

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"band width must be > 0, got {self.width}")
        if self.f_lo < 0:
            raise ValueError(f"f_lo must be >= 0, got {self.f_lo}")
        if self.f_hi <= self.f_lo:
            raise ValueError(f"f_hi {self.f_hi} must exceed f_lo {self.f_lo}")
        span = (self.f_hi - self.f_lo) / self.width
        count = round(span)
        if abs(span - count) > 1e-9:
            raise ValueError(
                f"band width {self.width} does not evenly divide [{self.f_lo}, {self.f_hi}]"
            )
        object.__setattr__(self, "count", int(count))

    def band_lo_hz(self, index: int) -> float:
        """Lower edge frequency of a band."""
        return self.f_lo + index * self.width


DEFAULT_SCHEME = BandScheme()


@dataclass
class IntensitySpectrum:
    """Perceived intensity per band for one frame."""

    values: np.ndarray
    frame_index: int = 0

    def copy(self) -> "IntensitySpectrum":
        return IntensitySpectrum(self.values.copy(), self.frame_index)


def band_index(scheme: BandScheme, f: float) -> int | None:
    """Band holding frequency f, or None outside [f_lo, f_hi).

    Bands are left-closed, right-open, so a frequency exactly on an edge
    belongs to the band above it and f_hi itself maps to no band.
    """
    if f < 0:
        raise ValueError(f"frequency must be >= 0, got {f}")
    if not (scheme.f_lo <= f < scheme.f_hi):
        return None
    idx = int((f - scheme.f_lo) // scheme.width)
    # Guard against the float divide landing a hair past the last band.
    return min(idx, scheme.count - 1)


def frame_spectrum(
    window: np.ndarray,
    sample_rate: float,
    model: PerceptionModel,
    scheme: BandScheme = DEFAULT_SCHEME,
    params: SiftParams | None = None,
    frame_index: int = 0,
) -> IntensitySpectrum:
    """Perceived-intensity spectrum of one analysis window.

    Decomposes the window, estimates (dominant frequency, peak-equivalent
    amplitude) per IMF, and accumulates each IMF's perceived intensity into
    its band. IMFs whose frequency falls outside the scheme (below f_lo,
    at or above f_hi) are discarded; silence maps to the all-zero spectrum.
    """
    values = np.zeros(scheme.count, dtype=np.float64)
    modes = decompose(window, params)
    for imf in modes.imfs:
        f = dominant_frequency(imf, sample_rate)
        band = band_index(scheme, f)
        if band is None:
            continue
        values[band] += perceived_intensity(model, imf_amplitude(imf), f)
    return IntensitySpectrum(values=values, frame_index=frame_index)


def total_intensity(s: IntensitySpectrum) -> float:
    """Arithmetic sum of all band intensities."""
    return float(np.sum(s.values))
