"""Tunable super-Gaussian MAP speech enhancement."""

from .audio_io import AudioBuffer, read_wav, resample, write_wav
from .gains import GainParams, NOISE_PRESETS
from .metrics import mix_at_snr, segmental_snr, stoi
from .pipeline import Pipeline, PipelineConfig, enhance_buffer, enhance_span
from .stft import SpectralFrame, StftConfig, analyze, synthesize

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "GainParams",
    "NOISE_PRESETS",
    "Pipeline",
    "PipelineConfig",
    "SpectralFrame",
    "StftConfig",
    "analyze",
    "enhance_buffer",
    "enhance_span",
    "mix_at_snr",
    "read_wav",
    "resample",
    "segmental_snr",
    "stoi",
    "synthesize",
    "write_wav",
    "__version__",
]
