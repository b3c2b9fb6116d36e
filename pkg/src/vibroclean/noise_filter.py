"""Adaptive per-band ego-noise filter in the perceived-intensity domain.

Each band tracks an estimate of the stationary noise intensity. The estimate
only moves when the incoming intensity exceeds it, and the step is damped by
the squared ratio of estimate to input, so the filter creeps up on the noise
level without overshooting. Subtraction clamps at zero: intensity below zero
has no meaning.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .spectrum import BandScheme, IntensitySpectrum

DEFAULT_FLOOR = 1e-6
DELTA_HISTORY = 512

FILTER_FORMAT = "vibroclean-filter"
FILTER_VERSION = 1


class NoiseFilter:
    """Per-band noise intensity estimates with convergence tracking.

    Attributes
    ----------
    values : ndarray
        Current estimate per band, never below the floor while calibrating.
    update_count : int
        Number of update() calls applied so far.
    floor : float
        Initialization value. A filter starting at exactly zero can never
        grow (the damping factor is (value/input)^2, which is zero), so the
        default floor is a small positive number.
    seed_from_first_frame : bool
        When set, a band still sitting exactly on the floor adopts the first
        input intensity above the floor outright instead of creeping up from
        the floor, which shortens calibration from minutes to a fraction of
        a second.
    frozen : bool
        Once frozen the filter is immutable; update() raises.
    """

    def __init__(
        self,
        scheme: BandScheme | None = None,
        floor: float = DEFAULT_FLOOR,
        seed_from_first_frame: bool = False,
    ):
        if scheme is None:
            scheme = BandScheme()
        if floor < 0:
            raise ValueError(f"floor must be >= 0, got {floor}")
        self.scheme = scheme
        self.floor = float(floor)
        self.seed_from_first_frame = bool(seed_from_first_frame)
        self.values = np.full(scheme.count, self.floor, dtype=np.float64)
        self.update_count = 0
        self.frozen = False
        self.recent_deltas: deque[float] = deque(maxlen=DELTA_HISTORY)

    def _check_length(self, s: IntensitySpectrum) -> None:
        if s.values.shape[0] != self.values.shape[0]:
            raise ValueError(
                f"spectrum has {s.values.shape[0]} bands, filter has {self.values.shape[0]}"
            )

    def update(self, s: IntensitySpectrum) -> float:
        """Apply one gated, damped update from an input spectrum.

        Per band with current value F and input I: if I > F the band moves to
        F + (I - F) * (F / I)^2, otherwise it stays put. In seed mode a band
        still exactly at the floor jumps straight to I first.

        Returns the max over bands of |change| / max(old value, floor), which
        is also appended to recent_deltas for convergence detection.
        """
        if self.frozen:
            raise RuntimeError("filter is frozen; updates are not allowed")
        self._check_length(s)
        old = self.values
        intensity = s.values
        new = old.copy()
        if self.seed_from_first_frame:
            virgin = (old == self.floor) & (intensity > self.floor)
            new[virgin] = intensity[virgin]
        grow = intensity > new
        f = new[grow]
        i = intensity[grow]
        new[grow] = f + (i - f) * (f / i) ** 2
        delta = new - old
        denom = np.maximum(old, self.floor)
        rel = np.divide(delta, denom, out=np.zeros_like(delta), where=delta > 0)
        max_rel = float(rel.max()) if rel.size else 0.0
        self.values = new
        self.update_count += 1
        self.recent_deltas.append(max_rel)
        return max_rel

    def subtract(self, s: IntensitySpectrum) -> IntensitySpectrum:
        """Input minus filter, clamped at zero per band. Frame index carries over."""
        self._check_length(s)
        residual = np.maximum(s.values - self.values, 0.0)
        return IntensitySpectrum(values=residual, frame_index=s.frame_index)

    def is_converged(self, window: int = 40, epsilon: float = 0.01) -> bool:
        """True when the last `window` updates all changed less than epsilon.

        Requires at least `window` updates to have happened at all.
        """
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        if epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {epsilon}")
        if window > DELTA_HISTORY:
            raise ValueError(f"window {window} exceeds tracked history {DELTA_HISTORY}")
        if self.update_count < window or len(self.recent_deltas) < window:
            return False
        recent = list(self.recent_deltas)[-window:]
        return all(d < epsilon for d in recent)

    def freeze(self) -> None:
        """Mark calibration finished; the filter becomes immutable."""
        self.frozen = True
        self.values.flags.writeable = False

    def to_document(self) -> dict:
        """Serializable snapshot: scheme, floor, update_count, values."""
        return {
            "format": FILTER_FORMAT,
            "version": FILTER_VERSION,
            "scheme": {
                "f_lo_hz": self.scheme.f_lo,
                "f_hi_hz": self.scheme.f_hi,
                "width_hz": self.scheme.width,
            },
            "floor": self.floor,
            "update_count": self.update_count,
            "values": [float(v) for v in self.values],
        }

    @classmethod
    def from_document(cls, document: dict) -> "NoiseFilter":
        """Rebuild a filter from to_document() output, validating band count."""
        if not isinstance(document, dict):
            raise ValueError(f"filter document must be a mapping, got {type(document).__name__}")
        if document.get("format") != FILTER_FORMAT:
            raise ValueError(f"not a filter document (format={document.get('format')!r})")
        version = document.get("version")
        if version != FILTER_VERSION:
            raise ValueError(f"unsupported filter document version {version!r}")
        try:
            raw_scheme = document["scheme"]
            scheme = BandScheme(
                f_lo=float(raw_scheme["f_lo_hz"]),
                f_hi=float(raw_scheme["f_hi_hz"]),
                width=float(raw_scheme["width_hz"]),
            )
            floor = float(document["floor"])
            update_count = int(document["update_count"])
            values = np.asarray(document["values"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed filter document: {exc}")
        if values.ndim != 1 or values.shape[0] != scheme.count:
            raise ValueError(
                f"filter document has {values.shape[0] if values.ndim == 1 else values.shape} "
                f"values, scheme requires {scheme.count}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("filter document contains non-finite values")
        filt = cls(scheme=scheme, floor=floor)
        filt.values = values
        filt.update_count = update_count
        return filt


def init(scheme: BandScheme | None = None, floor: float = DEFAULT_FLOOR) -> NoiseFilter:
    """Fresh filter with every band at the floor."""
    return NoiseFilter(scheme=scheme, floor=floor)
