"""Real-time streaming engine at a fixed 2.5 ms hop.

Each hop slides a trailing analysis window forward, converts it to a
perceived-intensity spectrum, updates and/or subtracts the noise filter
depending on mode, and renders one hop of amplitude-modulated output from the
residual intensity. Calibration can freeze the filter automatically once its
updates settle.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from .emd import MIN_WINDOW_SAMPLES, SiftParams
from .noise_filter import DEFAULT_FLOOR, NoiseFilter
from .perception import PerceptionModel, load_model
from .spectrum import BandScheme, IntensitySpectrum, frame_spectrum, total_intensity
from .synth import SynthState, render_frame, target_amplitude

logger = logging.getLogger(__name__)

MODES = ("calibrate", "run")


@dataclass
class EngineConfig:
    """Static engine parameters.

    The hop is the update cadence (2.5 ms by default); the analysis window is
    the trailing stretch of signal each spectrum is computed from and must be
    an integer multiple of the hop. Both must land on whole sample counts at
    the configured rate.
    """

    sample_rate: int = 48000
    hop_ms: float = 2.5
    window_ms: float = 25.0
    mode: str = "run"
    convergence_window: int = 40
    convergence_epsilon: float = 0.01
    auto_freeze: bool = True
    sift: SiftParams = field(default_factory=SiftParams)
    scheme: BandScheme = field(default_factory=BandScheme)
    carrier_hz: float = 200.0
    filter_floor: float = DEFAULT_FLOOR
    seed_from_first_frame: bool = True

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.hop_ms <= 0 or self.window_ms <= 0:
            raise ValueError("hop_ms and window_ms must be positive")
        hop = self.sample_rate * self.hop_ms / 1000.0
        if abs(hop - round(hop)) > 1e-9 or round(hop) < 1:
            raise ValueError(
                f"hop of {self.hop_ms} ms is not a whole sample count at {self.sample_rate} Hz"
            )
        window = self.sample_rate * self.window_ms / 1000.0
        if abs(window - round(window)) > 1e-9:
            raise ValueError(
                f"window of {self.window_ms} ms is not a whole sample count at {self.sample_rate} Hz"
            )
        if round(window) % round(hop) != 0:
            raise ValueError(
                f"hop ({self.hop_ms} ms) must divide the analysis window ({self.window_ms} ms)"
            )
        if round(window) < MIN_WINDOW_SAMPLES:
            raise ValueError(f"analysis window must hold >= {MIN_WINDOW_SAMPLES} samples")
        if self.convergence_window < 1:
            raise ValueError(f"convergence_window must be >= 1, got {self.convergence_window}")
        if self.convergence_epsilon <= 0:
            raise ValueError(f"convergence_epsilon must be > 0, got {self.convergence_epsilon}")

    @property
    def hop_samples(self) -> int:
        return round(self.sample_rate * self.hop_ms / 1000.0)

    @property
    def window_samples(self) -> int:
        return round(self.sample_rate * self.window_ms / 1000.0)

    @property
    def hop_seconds(self) -> float:
        return self.hop_samples / self.sample_rate


@dataclass
class FrameStats:
    """Per-hop accounting emitted by process_hop."""

    frame_index: int
    input_total_intensity: float
    residual_total_intensity: float
    filter_max_delta: float
    processing_time: float
    deadline_missed: bool
    saturation_count: int


@dataclass
class StreamReport:
    """Aggregate outcome of run_stream."""

    frames: int
    input_samples: int
    output_samples: int
    padded_tail_samples: int
    mode: str
    converged: bool
    freeze_frame: int | None
    saturation_total: int
    timing: dict | None


class Engine:
    """One streaming processor: ring buffer, filter, synth state, stats.

    Parameters
    ----------
    config : EngineConfig
    model : PerceptionModel, optional
        Defaults to the built-in approximate model.
    noise : NoiseFilter, optional
        Required for run mode in practice (a fresh filter subtracts almost
        nothing); calibrate mode creates one from the config when omitted.
    frame_hook : callable, optional
        Called as frame_hook(stats.frame_index, input_spectrum, residual)
        after each hop is rendered, inside the timed region. Used by the
        band-level CSV export and by tests that inject stalls.
    """

    def __init__(
        self,
        config: EngineConfig,
        model: PerceptionModel | None = None,
        noise: NoiseFilter | None = None,
        frame_hook: Callable[[int, IntensitySpectrum, IntensitySpectrum], None] | None = None,
    ):
        self.config = config
        self.model = model if model is not None else PerceptionModel()
        if noise is None:
            noise = NoiseFilter(
                scheme=config.scheme,
                floor=config.filter_floor,
                seed_from_first_frame=config.seed_from_first_frame,
            )
        if noise.values.shape[0] != config.scheme.count:
            raise ValueError(
                f"filter has {noise.values.shape[0]} bands, "
                f"config scheme expects {config.scheme.count}"
            )
        self.noise = noise
        self.frame_hook = frame_hook
        self._buffer = np.zeros(config.window_samples, dtype=np.float64)
        self._synth = SynthState(carrier=config.carrier_hz, sample_rate=float(config.sample_rate))
        self.frame_stats: list[FrameStats] = []
        self.freeze_frame: int | None = None
        self._next_frame = 0

    def process_hop(self, hop_samples: np.ndarray) -> tuple[np.ndarray, FrameStats]:
        """Process exactly one hop of input and render one hop of output.

        Appends the hop to the trailing window (zero-padded on the left until
        the buffer has filled once), computes the window's intensity spectrum,
        updates the filter when calibrating, subtracts, and renders the
        residual as a hop of the AM carrier.
        """
        cfg = self.config
        hop_n = cfg.hop_samples
        t0 = time.perf_counter()
        x = np.asarray(hop_samples, dtype=np.float64)
        if x.shape != (hop_n,):
            raise ValueError(f"hop must have shape ({hop_n},), got {x.shape}")
        frame_index = self._next_frame
        buf = self._buffer
        buf[:-hop_n] = buf[hop_n:]
        buf[-hop_n:] = x
        spec = frame_spectrum(
            buf, cfg.sample_rate, self.model, cfg.scheme, cfg.sift, frame_index
        )
        delta = 0.0
        if cfg.mode == "calibrate" and not self.noise.frozen:
            delta = self.noise.update(spec)
            if cfg.auto_freeze and self.noise.is_converged(
                cfg.convergence_window, cfg.convergence_epsilon
            ):
                self.noise.freeze()
                self.freeze_frame = frame_index
                logger.info("filter frozen at frame %d", frame_index)
        residual = self.noise.subtract(spec)
        i_in = total_intensity(spec)
        i_res = total_intensity(residual)
        target = target_amplitude(self.model, i_res, cfg.carrier_hz)
        out, self._synth, saturated = render_frame(self._synth, target, hop_n)
        if self.frame_hook is not None:
            self.frame_hook(frame_index, spec, residual)
        elapsed = time.perf_counter() - t0
        stats = FrameStats(
            frame_index=frame_index,
            input_total_intensity=i_in,
            residual_total_intensity=i_res,
            filter_max_delta=delta,
            processing_time=elapsed,
            deadline_missed=elapsed > cfg.hop_seconds,
            saturation_count=saturated,
        )
        self.frame_stats.append(stats)
        self._next_frame += 1
        return out, stats

    def run_stream(
        self,
        source: Iterable[np.ndarray] | np.ndarray,
        sink: Callable[[np.ndarray], None] | None = None,
        source_rate: float | None = None,
    ) -> StreamReport:
        """Drain a sample stream through the engine hop by hop.

        source is either a single array or an iterable of arrays of arbitrary
        length; they are re-chunked to hops internally. A trailing partial hop
        is zero-padded, processed, and counted in padded_tail_samples. sink,
        when given, receives each rendered output hop in order.
        """
        cfg = self.config
        if source_rate is not None and source_rate != cfg.sample_rate:
            raise ValueError(
                f"source sample rate {source_rate} does not match engine rate {cfg.sample_rate}"
            )
        if isinstance(source, np.ndarray):
            source = (source,)
        hop_n = cfg.hop_samples
        frames_before = len(self.frame_stats)
        input_samples = 0
        output_samples = 0
        padded = 0
        carry = np.empty(0, dtype=np.float64)
        for chunk in source:
            chunk = np.asarray(chunk, dtype=np.float64)
            if chunk.ndim != 1:
                raise ValueError(f"stream chunks must be one-dimensional, got shape {chunk.shape}")
            input_samples += chunk.shape[0]
            data = np.concatenate([carry, chunk]) if carry.size else chunk
            n_full = data.shape[0] // hop_n
            for k in range(n_full):
                out, _ = self.process_hop(data[k * hop_n : (k + 1) * hop_n])
                output_samples += out.shape[0]
                if sink is not None:
                    sink(out)
            carry = data[n_full * hop_n :].copy()
        if carry.size:
            padded = hop_n - carry.size
            tail = np.zeros(hop_n, dtype=np.float64)
            tail[: carry.size] = carry
            out, _ = self.process_hop(tail)
            output_samples += out.shape[0]
            if sink is not None:
                sink(out)
        stats = self.frame_stats[frames_before:]
        converged = self.freeze_frame is not None or self.noise.is_converged(
            cfg.convergence_window, cfg.convergence_epsilon
        )
        return StreamReport(
            frames=len(stats),
            input_samples=input_samples,
            output_samples=output_samples,
            padded_tail_samples=padded,
            mode=cfg.mode,
            converged=converged,
            freeze_frame=self.freeze_frame,
            saturation_total=sum(s.saturation_count for s in stats),
            timing=self.perf_report() if stats else None,
        )

    def perf_report(self) -> dict:
        """Timing aggregates over all processed hops so far."""
        if not self.frame_stats:
            raise RuntimeError("no frames processed yet")
        times = np.array([s.processing_time for s in self.frame_stats])
        return {
            "frames": int(times.shape[0]),
            "mean_s": float(times.mean()),
            "p95_s": float(np.percentile(times, 95)),
            "p99_s": float(np.percentile(times, 99)),
            "max_s": float(times.max()),
            "deadline_misses": int(sum(s.deadline_missed for s in self.frame_stats)),
        }


CONFIG_SECTIONS = ("pipeline", "emd", "perception", "filter", "synth")

_PIPELINE_KEYS = {
    "sample_rate",
    "hop_ms",
    "window_ms",
    "mode",
    "convergence_window",
    "convergence_epsilon",
    "auto_freeze",
}
_EMD_KEYS = {"max_imfs", "max_sift_iterations", "sd_threshold", "boundary"}
_FILTER_KEYS = {"floor", "seed_from_first_frame", "f_lo_hz", "f_hi_hz", "width_hz"}
_SYNTH_KEYS = {"carrier_hz"}


def _reject_unknown(section: str, given: dict, allowed: set[str]) -> None:
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise ValueError(f"config section {section!r} has unknown keys: {', '.join(unknown)}")


def config_from_document(document: dict) -> tuple[EngineConfig, PerceptionModel]:
    """Build (EngineConfig, PerceptionModel) from a parsed config document.

    Every section and every key is optional; omissions fall back to defaults.
    Unknown sections or keys are rejected so typos fail loudly instead of
    silently running with defaults.
    """
    if not isinstance(document, dict):
        raise ValueError(f"config must be a mapping, got {type(document).__name__}")
    meta = {"format", "version"}
    unknown = sorted(set(document) - set(CONFIG_SECTIONS) - meta)
    if unknown:
        raise ValueError(f"config has unknown sections: {', '.join(unknown)}")
    if "format" in document and document["format"] != "vibroclean-config":
        raise ValueError(f"not a config document (format={document['format']!r})")

    pipe = document.get("pipeline", {})
    emd_sec = document.get("emd", {})
    filt = document.get("filter", {})
    syn = document.get("synth", {})
    for name, section in (("pipeline", pipe), ("emd", emd_sec), ("filter", filt), ("synth", syn)):
        if not isinstance(section, dict):
            raise ValueError(f"config section {name!r} must be a mapping")
    _reject_unknown("pipeline", pipe, _PIPELINE_KEYS)
    _reject_unknown("emd", emd_sec, _EMD_KEYS)
    _reject_unknown("filter", filt, _FILTER_KEYS)
    _reject_unknown("synth", syn, _SYNTH_KEYS)

    sift = SiftParams(
        max_imfs=int(emd_sec.get("max_imfs", 8)),
        max_sift_iterations=int(emd_sec.get("max_sift_iterations", 10)),
        sd_threshold=float(emd_sec.get("sd_threshold", 0.2)),
        boundary=str(emd_sec.get("boundary", "mirror")),
    )
    scheme = BandScheme(
        f_lo=float(filt.get("f_lo_hz", 100.0)),
        f_hi=float(filt.get("f_hi_hz", 20000.0)),
        width=float(filt.get("width_hz", 20.0)),
    )
    config = EngineConfig(
        sample_rate=int(pipe.get("sample_rate", 48000)),
        hop_ms=float(pipe.get("hop_ms", 2.5)),
        window_ms=float(pipe.get("window_ms", 25.0)),
        mode=str(pipe.get("mode", "run")),
        convergence_window=int(pipe.get("convergence_window", 40)),
        convergence_epsilon=float(pipe.get("convergence_epsilon", 0.01)),
        auto_freeze=bool(pipe.get("auto_freeze", True)),
        sift=sift,
        scheme=scheme,
        carrier_hz=float(syn.get("carrier_hz", 200.0)),
        filter_floor=float(filt.get("floor", DEFAULT_FLOOR)),
        seed_from_first_frame=bool(filt.get("seed_from_first_frame", True)),
    )
    model = load_model(document.get("perception", {}))
    return config, model
