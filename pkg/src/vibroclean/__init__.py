"""Perceptual ego-noise subtraction for vibrotactile signals.

Analysis windows are decomposed into intrinsic mode functions, mapped to a
per-band perceived-intensity spectrum, cleaned by an adaptive noise filter
that lives entirely in the intensity domain, and re-rendered as a click-free
amplitude-modulated wave whose total perceived intensity matches the residual.
"""

from .emd import Imf, ImfSet, SiftParams, decompose, dominant_frequency, imf_amplitude
from .io_cli import ScenarioSpec, WavSpec, cli, generate, read_wav, write_wav
from .noise_filter import NoiseFilter
from .perception import (
    PerceptionModel,
    amplitude_for_intensity,
    exponent_at,
    load_model,
    perceived_intensity,
    threshold_at,
)
from .pipeline import Engine, EngineConfig, FrameStats, StreamReport, config_from_document
from .spectrum import (
    BandScheme,
    IntensitySpectrum,
    band_index,
    frame_spectrum,
    total_intensity,
)
from .synth import SynthState, render_frame, target_amplitude

__version__ = "0.1.0"

__all__ = [
    "BandScheme",
    "Engine",
    "EngineConfig",
    "FrameStats",
    "Imf",
    "ImfSet",
    "IntensitySpectrum",
    "NoiseFilter",
    "PerceptionModel",
    "ScenarioSpec",
    "SiftParams",
    "StreamReport",
    "SynthState",
    "WavSpec",
    "amplitude_for_intensity",
    "band_index",
    "cli",
    "config_from_document",
    "decompose",
    "dominant_frequency",
    "exponent_at",
    "frame_spectrum",
    "generate",
    "imf_amplitude",
    "load_model",
    "perceived_intensity",
    "read_wav",
    "render_frame",
    "target_amplitude",
    "threshold_at",
    "total_intensity",
    "write_wav",
]
