"""File formats, synthetic test signals, and the command-line interface.

WAV carries samples (16-bit integer or 32-bit float PCM, mono for
processing). JSON documents carry configuration, calibrated filters, and
scenario specs. CSV carries per-hop reports and per-band analysis rows, with
floats serialized via repr so they parse back to the exact values used
internally.

Subcommands: calibrate, process, synth, analyze, bench.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.io import wavfile

from .noise_filter import NoiseFilter
from .perception import amplitude_for_intensity, perceived_intensity
from .pipeline import Engine, EngineConfig, config_from_document
from .spectrum import IntensitySpectrum

logger = logging.getLogger(__name__)

SCENARIO_FORMAT = "vibroclean-scenario"
SCENARIO_VERSION = 1

COMPONENT_KINDS = ("tone", "harmonic_stack", "broadband", "burst")


@dataclass
class WavSpec:
    """Sample rate, channel count, and encoding of a WAV file."""

    sample_rate: int
    channels: int = 1
    encoding: str = "float32"

    def __post_init__(self) -> None:
        if self.encoding not in ("float32", "int16"):
            raise ValueError(f"encoding must be 'float32' or 'int16', got {self.encoding!r}")
        if self.channels < 1:
            raise ValueError(f"channels must be >= 1, got {self.channels}")


def read_wav(path) -> tuple[WavSpec, np.ndarray]:
    """Read a WAV file into float64 samples in [-1, 1].

    16-bit PCM is scaled by 1/32767; 32-bit float is taken as-is. Any other
    encoding is rejected by name. Multichannel files come back with shape
    (n, channels); whether that is acceptable is the caller's decision.
    """
    rate, data = wavfile.read(path)
    channels = 1 if data.ndim == 1 else data.shape[1]
    if data.dtype == np.int16:
        encoding = "int16"
        samples = data.astype(np.float64) / 32767.0
    elif data.dtype == np.float32:
        encoding = "float32"
        samples = data.astype(np.float64)
    else:
        raise ValueError(
            f"unsupported encoding {data.dtype.name} in {path}; use 16-bit PCM or 32-bit float"
        )
    return WavSpec(sample_rate=int(rate), channels=channels, encoding=encoding), samples


def write_wav(path, spec: WavSpec, samples: np.ndarray) -> None:
    """Write samples under the given spec.

    float32 is lossless for float32-representable data; int16 rounds to the
    nearest step of 1/32767 (within 1 LSB on round trip).
    """
    x = np.asarray(samples, dtype=np.float64)
    if spec.encoding == "int16":
        data = np.clip(np.rint(x * 32767.0), -32768, 32767).astype(np.int16)
    else:
        data = x.astype(np.float32)
    wavfile.write(path, int(spec.sample_rate), data)


@dataclass
class ScenarioSpec:
    """Deterministic synthetic signal description.

    components is a list of mappings, each with a "kind" and per-kind
    parameters (see generate). Amplitudes are per component; overlapping
    components add, so keep the sum inside [-1, 1] if the result must not
    clip when written as int16.
    """

    duration: float
    components: list[dict] = field(default_factory=list)
    sample_rate: int = 48000

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        for i, comp in enumerate(self.components):
            kind = comp.get("kind")
            if kind not in COMPONENT_KINDS:
                raise ValueError(f"component {i}: unknown kind {kind!r}, expected {COMPONENT_KINDS}")
            amp = float(comp.get("amplitude", 0.0))
            if not (0.0 <= amp <= 1.0):
                raise ValueError(f"component {i}: amplitude must be in [0, 1], got {amp}")

    @classmethod
    def from_document(cls, document: dict) -> "ScenarioSpec":
        if not isinstance(document, dict):
            raise ValueError(f"scenario must be a mapping, got {type(document).__name__}")
        if "format" in document and document["format"] != SCENARIO_FORMAT:
            raise ValueError(f"not a scenario document (format={document['format']!r})")
        try:
            return cls(
                duration=float(document["duration"]),
                components=list(document.get("components", [])),
                sample_rate=int(document.get("sample_rate", 48000)),
            )
        except KeyError as exc:
            raise ValueError(f"scenario document missing field {exc}")

    def to_document(self) -> dict:
        return {
            "format": SCENARIO_FORMAT,
            "version": SCENARIO_VERSION,
            "duration": self.duration,
            "sample_rate": self.sample_rate,
            "components": self.components,
        }


def _component_span(comp: dict, n_total: int, sample_rate: float) -> tuple[int, int]:
    start = float(comp.get("start", 0.0))
    if start < 0:
        raise ValueError(f"component start must be >= 0, got {start}")
    i0 = int(round(start * sample_rate))
    if "length" in comp:
        n = int(round(float(comp["length"]) * sample_rate))
    else:
        n = n_total - i0
    i1 = min(i0 + max(n, 0), n_total)
    return min(i0, n_total), i1


def _check_component_freq(i: int, name: str, f: float, sample_rate: float) -> None:
    if not (0.0 < f < sample_rate / 2.0):
        raise ValueError(
            f"component {i}: {name} {f} Hz outside (0, {sample_rate / 2.0}) at rate {sample_rate}"
        )


def generate(scenario: ScenarioSpec, sample_rate: float | None = None) -> np.ndarray:
    """Render a scenario to samples. Same spec and seeds give identical bits.

    Component kinds and their parameters:

    - tone: hz, amplitude, phase (rad, default 0), start, length
    - harmonic_stack: hz (fundamental), amplitude, harmonics (default 5),
      phase, start, length; harmonic k gets amplitude/k, partials at or above
      the Nyquist frequency are dropped
    - broadband: lo_hz, hi_hz, amplitude, seed (default 0), start, length;
      Gaussian noise band-limited to [lo_hz, hi_hz], scaled so sqrt(2) * RMS
      equals amplitude (the same peak-equivalent convention the analysis uses)
    - burst: hz, amplitude, start, length, decay (time constant in seconds,
      default length/4); exponentially decaying tone from the onset
    """
    rate = float(sample_rate) if sample_rate is not None else float(scenario.sample_rate)
    n_total = int(round(scenario.duration * rate))
    out = np.zeros(n_total, dtype=np.float64)
    for i, comp in enumerate(scenario.components):
        kind = comp["kind"]
        amp = float(comp.get("amplitude", 0.0))
        i0, i1 = _component_span(comp, n_total, rate)
        n = i1 - i0
        if n <= 0 or amp == 0.0:
            continue
        t = np.arange(n, dtype=np.float64) / rate
        if kind == "tone":
            f = float(comp["hz"])
            _check_component_freq(i, "frequency", f, rate)
            phase = float(comp.get("phase", 0.0))
            out[i0:i1] += amp * np.sin(2.0 * np.pi * f * t + phase)
        elif kind == "harmonic_stack":
            f0 = float(comp["hz"])
            _check_component_freq(i, "fundamental", f0, rate)
            phase = float(comp.get("phase", 0.0))
            harmonics = int(comp.get("harmonics", 5))
            if harmonics < 1:
                raise ValueError(f"component {i}: harmonics must be >= 1, got {harmonics}")
            for k in range(1, harmonics + 1):
                if k * f0 >= rate / 2.0:
                    break
                out[i0:i1] += (amp / k) * np.sin(2.0 * np.pi * k * f0 * t + phase)
        elif kind == "broadband":
            lo = float(comp["lo_hz"])
            hi = float(comp["hi_hz"])
            _check_component_freq(i, "lo_hz", lo, rate)
            if not (lo < hi <= rate / 2.0):
                raise ValueError(
                    f"component {i}: need lo_hz < hi_hz <= {rate / 2.0}, got [{lo}, {hi}]"
                )
            rng = np.random.default_rng(int(comp.get("seed", 0)))
            white = rng.standard_normal(n)
            spec = np.fft.rfft(white)
            freqs = np.fft.rfftfreq(n, 1.0 / rate)
            spec[(freqs < lo) | (freqs > hi)] = 0.0
            shaped = np.fft.irfft(spec, n)
            rms = float(np.sqrt(np.mean(shaped * shaped)))
            if rms > 0.0:
                out[i0:i1] += shaped * (amp / (np.sqrt(2.0) * rms))
        elif kind == "burst":
            f = float(comp["hz"])
            _check_component_freq(i, "frequency", f, rate)
            length = (i1 - i0) / rate
            decay = float(comp.get("decay", length / 4.0 if length > 0 else 0.0))
            if decay <= 0:
                raise ValueError(f"component {i}: decay must be > 0, got {decay}")
            out[i0:i1] += amp * np.exp(-t / decay) * np.sin(2.0 * np.pi * f * t)
    return out


# The stimulus bench runs against: a motor-like harmonic stack plus a
# moderate broadband bed, stationary over the whole duration.
BENCH_SCENARIO_COMPONENTS = [
    {"kind": "harmonic_stack", "hz": 120.0, "amplitude": 0.25, "harmonics": 6},
    {"kind": "broadband", "lo_hz": 100.0, "hi_hz": 6000.0, "amplitude": 0.05, "seed": 7},
]


def bench_scenario(seconds: float, sample_rate: int = 48000) -> ScenarioSpec:
    return ScenarioSpec(
        duration=seconds,
        components=[dict(c) for c in BENCH_SCENARIO_COMPONENTS],
        sample_rate=sample_rate,
    )


def _fmt(value: float) -> str:
    """Full-precision decimal for CSV cells; parses back to the same float."""
    return repr(float(value))


def write_report_csv(path, stats, hop_seconds: float) -> None:
    """Per-hop report: one row per frame, timing in microseconds."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "frame_index",
                "t_sec",
                "input_intensity",
                "residual_intensity",
                "filter_max_delta",
                "proc_us",
                "missed",
            ]
        )
        for s in stats:
            writer.writerow(
                [
                    s.frame_index,
                    _fmt(s.frame_index * hop_seconds),
                    _fmt(s.input_total_intensity),
                    _fmt(s.residual_total_intensity),
                    _fmt(s.filter_max_delta),
                    _fmt(s.processing_time * 1e6),
                    int(s.deadline_missed),
                ]
            )


class _BandCsvWriter:
    """Streams analyze rows: one per frame and band of interest.

    A band is of interest when the input spectrum has intensity there or the
    filter tracks it above its floor, so every frame of a calibrated run
    appears even if the input momentarily carries nothing.
    """

    def __init__(self, fh, engine: Engine, baseline: str | None):
        self.writer = csv.writer(fh)
        self.engine = engine
        self.baseline = baseline
        header = [
            "frame_index",
            "band_lo_hz",
            "input_intensity",
            "filter_value",
            "residual_intensity",
        ]
        if baseline == "amplitude-subtraction":
            header.append("baseline_residual_intensity")
        self.writer.writerow(header)

    def __call__(
        self, frame_index: int, spec: IntensitySpectrum, residual: IntensitySpectrum
    ) -> None:
        scheme = self.engine.config.scheme
        model = self.engine.model
        noise_values = self.engine.noise.values
        active = (spec.values > 0.0) | (noise_values > self.engine.noise.floor)
        for band in np.flatnonzero(active):
            band = int(band)
            f_band = scheme.band_lo_hz(band)
            row = [
                frame_index,
                _fmt(f_band),
                _fmt(spec.values[band]),
                _fmt(noise_values[band]),
                _fmt(residual.values[band]),
            ]
            if self.baseline is not None:
                a_in = amplitude_for_intensity(model, float(spec.values[band]), f_band)
                a_noise = amplitude_for_intensity(model, float(noise_values[band]), f_band)
                a_res = max(a_in - a_noise, 0.0)
                row.append(_fmt(perceived_intensity(model, a_res, f_band)))
            self.writer.writerow(row)


def _load_json(path) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})")


def _dump_json(path, document: dict) -> None:
    with open(path, "w") as fh:
        json.dump(document, fh, indent=1)
        fh.write("\n")


def _load_config(path):
    if path is None:
        return config_from_document({})
    return config_from_document(_load_json(path))


def _read_mono_input(path, config: EngineConfig) -> tuple[np.ndarray, WavSpec]:
    spec, samples = read_wav(path)
    if spec.channels != 1:
        raise ValueError(f"{path}: channels must be 1 for processing, got {spec.channels}")
    if spec.sample_rate != config.sample_rate:
        raise ValueError(
            f"{path}: sample_rate {spec.sample_rate} does not match engine rate "
            f"{config.sample_rate}"
        )
    return samples, spec


class _CliError(Exception):
    """Argparse failure rerouted so cli() can return exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="vibroclean",
        description="Perceptual ego-noise subtraction for vibrotactile signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="adapt a noise filter to an ego-noise recording")
    p.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    p.add_argument("--in", dest="infile", required=True, help="mono ego-noise WAV")
    p.add_argument("--filter-out", required=True, help="where to write the filter document")
    p.add_argument(
        "--auto-freeze",
        action="store_true",
        help="freeze the filter once updates settle (overrides config off)",
    )

    p = sub.add_parser("process", help="subtract a calibrated filter from a recording")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--filter", required=True, help="filter document from calibrate")
    p.add_argument("--in", dest="infile", required=True, help="mono input WAV")
    p.add_argument("--out", required=True, help="output WAV (same encoding as input)")
    p.add_argument("--report", help="optional per-hop CSV report")

    p = sub.add_parser("synth", help="render a scenario spec to a WAV file")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--out", required=True, help="output WAV (32-bit float)")

    p = sub.add_parser("analyze", help="export per-band intensities along a run")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--filter", required=True, help="filter document")
    p.add_argument("--in", dest="infile", required=True, help="mono input WAV")
    p.add_argument("--csv", required=True, help="output CSV of per-band rows")
    p.add_argument(
        "--baseline",
        choices=["amplitude-subtraction"],
        help="add a column with amplitude-domain subtraction for comparison",
    )

    p = sub.add_parser("bench", help="measure per-hop processing time on a synthetic stream")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seconds", type=float, default=60.0, help="stream length (default 60)")
    return parser


def _cmd_calibrate(args) -> int:
    config, model = _load_config(args.config)
    overrides = {"mode": "calibrate"}
    if args.auto_freeze:
        overrides["auto_freeze"] = True
    config = _replace_config(config, **overrides)
    samples, _ = _read_mono_input(args.infile, config)
    engine = Engine(config, model)
    report = engine.run_stream(samples)
    _dump_json(args.filter_out, engine.noise.to_document())
    freeze = f"frozen at frame {report.freeze_frame}" if report.freeze_frame is not None else (
        "converged" if report.converged else "not converged"
    )
    print(f"calibrated over {report.frames} frames: {freeze}; filter written to {args.filter_out}")
    return 0


def _cmd_process(args) -> int:
    config, model = _load_config(args.config)
    config = _replace_config(config, mode="run")
    noise = NoiseFilter.from_document(_load_json(args.filter))
    samples, in_spec = _read_mono_input(args.infile, config)
    engine = Engine(config, model, noise=noise)
    rendered: list[np.ndarray] = []
    report = engine.run_stream(samples, sink=rendered.append)
    out = np.concatenate(rendered) if rendered else np.empty(0)
    write_wav(args.out, WavSpec(config.sample_rate, 1, in_spec.encoding), out)
    if args.report:
        write_report_csv(args.report, engine.frame_stats, config.hop_seconds)
    print(
        f"processed {report.frames} frames ({report.input_samples} samples) "
        f"to {args.out}" + (f", report in {args.report}" if args.report else "")
    )
    return 0


def _cmd_synth(args) -> int:
    scenario = ScenarioSpec.from_document(_load_json(args.scenario))
    samples = generate(scenario)
    write_wav(args.out, WavSpec(scenario.sample_rate, 1, "float32"), samples)
    print(f"wrote {samples.shape[0]} samples at {scenario.sample_rate} Hz to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    config, model = _load_config(args.config)
    config = _replace_config(config, mode="run")
    noise = NoiseFilter.from_document(_load_json(args.filter))
    samples, _ = _read_mono_input(args.infile, config)
    with open(args.csv, "w", newline="") as fh:
        engine = Engine(config, model, noise=noise)
        engine.frame_hook = _BandCsvWriter(fh, engine, args.baseline)
        report = engine.run_stream(samples)
    print(f"analyzed {report.frames} frames into {args.csv}")
    return 0


def _cmd_bench(args) -> int:
    config, model = _load_config(args.config)
    config = _replace_config(config, mode="calibrate")
    if args.seconds <= 0:
        raise ValueError(f"--seconds must be > 0, got {args.seconds}")
    # Warm the JIT-compiled kernels and code paths on a throwaway engine so
    # one-time compilation does not show up as a deadline miss.
    warmup = Engine(config, model)
    warmup.run_stream(generate(bench_scenario(0.1, config.sample_rate)))
    samples = generate(bench_scenario(args.seconds, config.sample_rate))
    engine = Engine(config, model)
    engine.run_stream(samples)
    timing = engine.perf_report()
    budget_ms = config.hop_seconds * 1e3
    print(f"frames:           {timing['frames']}")
    print(f"hop budget:       {budget_ms:.3f} ms")
    print(f"mean:             {timing['mean_s'] * 1e3:.3f} ms")
    print(f"p95:              {timing['p95_s'] * 1e3:.3f} ms")
    print(f"p99:              {timing['p99_s'] * 1e3:.3f} ms")
    print(f"max:              {timing['max_s'] * 1e3:.3f} ms")
    print(f"deadline misses:  {timing['deadline_misses']}")
    return 0


def _replace_config(config: EngineConfig, **changes) -> EngineConfig:
    return replace(config, **changes)


_COMMANDS = {
    "calibrate": _cmd_calibrate,
    "process": _cmd_process,
    "synth": _cmd_synth,
    "analyze": _cmd_analyze,
    "bench": _cmd_bench,
}


def cli(argv=None) -> int:
    """Run the command line. Returns 0 on success, 1 on validation errors,
    2 on I/O errors."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
