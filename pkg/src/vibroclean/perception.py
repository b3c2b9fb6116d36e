"""Psychophysical intensity model for vibrotactile signals.

Maps signal amplitude at a given frequency to perceived intensity and back,
using a frequency-dependent detection threshold curve and a frequency-dependent
power-law exponent. Both curves are defined by a small knot table and
interpolated on log-frequency axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FREQ_MIN_HZ = 100.0
FREQ_MAX_HZ = 20000.0

# Approximate vibrotactile sensitivity curve in normalized signal units.
# Threshold is U-shaped with its minimum near 250 Hz; the exponent falls with
# frequency. These values are an implementer-sourced approximation of the
# classical psychophysical curves, not measured constants. Override via config
# for any serious use.
DEFAULT_KNOTS: tuple[tuple[float, float, float], ...] = (
    (100.0, 0.030, 0.95),
    (150.0, 0.018, 0.90),
    (250.0, 0.010, 0.85),
    (400.0, 0.014, 0.80),
    (700.0, 0.022, 0.75),
    (1500.0, 0.040, 0.70),
    (3000.0, 0.080, 0.62),
    (6000.0, 0.150, 0.55),
    (12000.0, 0.300, 0.50),
    (20000.0, 0.600, 0.45),
)


@dataclass(frozen=True)
class PerceptionModel:
    """Threshold and exponent curves sampled at frequency knots.

    Parameters
    ----------
    knots : sequence of (hz, threshold, exponent)
        Frequencies must be strictly increasing and cover at least
        [100, 20000] Hz. Thresholds and exponents must be positive.
    reference_gain : float
        Signal units per physical unit. Documents how raw sensor counts map
        onto the threshold scale; the math itself is unit-agnostic.
    """

    knots: tuple[tuple[float, float, float], ...] = DEFAULT_KNOTS
    reference_gain: float = 1.0

    # Interpolation tables, derived once in __post_init__.
    _log_f: np.ndarray = field(init=False, repr=False, compare=False)
    _log_thr: np.ndarray = field(init=False, repr=False, compare=False)
    _thr: np.ndarray = field(init=False, repr=False, compare=False)
    _exp: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        problems = validate_knots(self.knots)
        if problems:
            raise ValueError("invalid perception model: " + "; ".join(problems))
        freqs = np.array([k[0] for k in self.knots], dtype=np.float64)
        thr = np.array([k[1] for k in self.knots], dtype=np.float64)
        exp = np.array([k[2] for k in self.knots], dtype=np.float64)
        object.__setattr__(self, "_log_f", np.log(freqs))
        object.__setattr__(self, "_log_thr", np.log(thr))
        object.__setattr__(self, "_thr", thr)
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "knots", tuple(tuple(k) for k in self.knots))

    @property
    def knot_frequencies(self) -> np.ndarray:
        return np.exp(self._log_f)


def validate_knots(knots) -> list[str]:
    """Check a knot table against the model invariants.

    Returns a list of human-readable problem strings, one per violation,
    each naming the offending knot index. Empty list means valid.
    """
    problems: list[str] = []
    if len(knots) < 2:
        problems.append(f"need at least 2 knots, got {len(knots)}")
        return problems
    for i, knot in enumerate(knots):
        if len(knot) != 3:
            problems.append(f"knot {i}: expected (hz, threshold, exponent), got {knot!r}")
            return problems
        hz, thr, exp = knot
        if not np.isfinite(hz) or hz <= 0:
            problems.append(f"knot {i}: frequency must be finite and positive, got {hz}")
        if not np.isfinite(thr) or thr <= 0:
            problems.append(f"knot {i}: threshold must be finite and positive, got {thr}")
        if not np.isfinite(exp) or exp <= 0:
            problems.append(f"knot {i}: exponent must be finite and positive, got {exp}")
    for i in range(1, len(knots)):
        if knots[i][0] <= knots[i - 1][0]:
            problems.append(
                f"knot {i}: frequencies must be strictly increasing "
                f"({knots[i - 1][0]} then {knots[i][0]})"
            )
    if not problems:
        if knots[0][0] > FREQ_MIN_HZ:
            problems.append(f"knot 0: first frequency must be <= {FREQ_MIN_HZ} Hz, got {knots[0][0]}")
        if knots[-1][0] < FREQ_MAX_HZ:
            problems.append(
                f"knot {len(knots) - 1}: last frequency must be >= {FREQ_MAX_HZ} Hz, "
                f"got {knots[-1][0]}"
            )
    return problems


def _check_frequency(f: float) -> None:
    if not (FREQ_MIN_HZ <= f <= FREQ_MAX_HZ):
        raise ValueError(f"frequency {f} Hz outside supported range [{FREQ_MIN_HZ}, {FREQ_MAX_HZ}]")


def threshold_at(model: PerceptionModel, f: float) -> float:
    """Detection threshold amplitude at frequency f.

    Interpolates the knot table linearly in (log frequency, log threshold)
    space. Queries landing exactly on a knot return the stored threshold
    bit-exactly.

    Parameters
    ----------
    model : PerceptionModel
    f : float
        Frequency in Hz, within [100, 20000].
    """
    _check_frequency(f)
    log_f = np.log(f)
    idx = int(np.searchsorted(model._log_f, log_f))
    if idx < len(model._thr) and model.knots[idx][0] == f:
        return float(model._thr[idx])
    return float(np.exp(np.interp(log_f, model._log_f, model._log_thr)))


def exponent_at(model: PerceptionModel, f: float) -> float:
    """Intensity exponent at frequency f (linear over log frequency, exact at knots)."""
    _check_frequency(f)
    idx = int(np.searchsorted(model._log_f, np.log(f)))
    if idx < len(model._exp) and model.knots[idx][0] == f:
        return float(model._exp[idx])
    return float(np.interp(np.log(f), model._log_f, model._exp))


def perceived_intensity(model: PerceptionModel, a: float, f: float) -> float:
    """Perceived intensity of a sinusoidal component.

    Computes ((a / threshold(f)) ** 2) ** exponent(f). An amplitude equal to
    the threshold gives intensity 1 at any frequency.

    Parameters
    ----------
    model : PerceptionModel
    a : float
        Peak-equivalent amplitude in signal units, >= 0.
    f : float
        Component frequency in Hz, within [100, 20000].
    """
    if a < 0:
        raise ValueError(f"amplitude must be non-negative, got {a}")
    _check_frequency(f)
    if a == 0.0:
        return 0.0
    ratio = a / threshold_at(model, f)
    return float(ratio ** (2.0 * exponent_at(model, f)))


def amplitude_for_intensity(model: PerceptionModel, i: float, f: float) -> float:
    """Amplitude that produces perceived intensity i at frequency f.

    Closed-form inverse of :func:`perceived_intensity`:
    threshold(f) * i ** (1 / (2 * exponent(f))).
    """
    if i < 0:
        raise ValueError(f"intensity must be non-negative, got {i}")
    _check_frequency(f)
    if i == 0.0:
        return 0.0
    return float(threshold_at(model, f) * i ** (1.0 / (2.0 * exponent_at(model, f))))


def load_model(document: dict) -> PerceptionModel:
    """Build a PerceptionModel from a config document.

    The document is a mapping with a ``knots`` array of
    ``{"hz": ..., "threshold": ..., "exponent": ...}`` records and an optional
    ``reference_gain``. All invariant violations are collected and reported
    together, each naming the offending knot index.
    """
    if not isinstance(document, dict):
        raise ValueError(f"perception config must be a mapping, got {type(document).__name__}")
    raw_knots = document.get("knots")
    if raw_knots is None:
        return PerceptionModel(reference_gain=float(document.get("reference_gain", 1.0)))
    knots = []
    for i, rec in enumerate(raw_knots):
        try:
            knots.append((float(rec["hz"]), float(rec["threshold"]), float(rec["exponent"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"perception knot {i}: expected hz/threshold/exponent fields ({exc})")
    problems = validate_knots(knots)
    if problems:
        raise ValueError("invalid perception model: " + "; ".join(problems))
    return PerceptionModel(knots=tuple(knots), reference_gain=float(document.get("reference_gain", 1.0)))


def model_document(model: PerceptionModel) -> dict:
    """Serialize a model to the config-document form accepted by load_model."""
    return {
        "reference_gain": model.reference_gain,
        "knots": [{"hz": hz, "threshold": thr, "exponent": exp} for hz, thr, exp in model.knots],
    }
