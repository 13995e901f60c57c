"""Likelihood-ratio VAD and recursively averaged noise PSD tracking.

The noise floor is seeded from a stretch of assumed speech-free frames
(a couple of seconds of ambient sound), then updated only on frames the
VAD calls noise. The VAD statistic is the mean per-bin log-likelihood
ratio of the Gaussian speech-presence model:

    (1/K) * sum_k [ gamma_k * xi_k / (1 + xi_k) - ln(1 + xi_k) ]

with a frame hangover so word endings are not clipped into the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NoFrames, NotInitialized
from .stft import SpectralFrame

PSD_FLOOR = 1e-12
DEFAULT_VAD_THRESHOLD = 0.2
DEFAULT_HANGOVER_FRAMES = 8
DEFAULT_NOISE_ALPHA = 0.98


@dataclass
class NoiseEstimate:
    """Per-bin noise power, floored at PSD_FLOOR once initialized."""

    psd: np.ndarray
    frames_seen: int = 0
    initialized: bool = False


@dataclass
class VadState:
    threshold: float = DEFAULT_VAD_THRESHOLD
    hangover_frames: int = DEFAULT_HANGOVER_FRAMES
    hangover_remaining: int = 0
    is_speech: bool = False


def init_noise(frames: list[SpectralFrame], psd_floor: float = PSD_FLOOR) -> NoiseEstimate:
    """Seed the noise PSD as the mean |Y|^2 over the given frames."""
    if len(frames) == 0:
        raise NoFrames("noise initialization needs at least one frame")
    power = np.mean([np.abs(f.bins) ** 2 for f in frames], axis=0)
    return NoiseEstimate(
        psd=np.maximum(power, psd_floor),
        frames_seen=len(frames),
        initialized=True,
    )


def vad_statistic(frame: SpectralFrame, noise: NoiseEstimate, xi: np.ndarray) -> float:
    """Mean per-bin log-likelihood ratio for speech presence."""
    if not noise.initialized:
        raise NotInitialized("noise estimate not initialized")
    gamma = np.abs(frame.bins) ** 2 / noise.psd
    return float(np.mean(gamma * xi / (1.0 + xi) - np.log1p(xi)))


def vad_decide(statistic: float, state: VadState) -> tuple[bool, VadState]:
    """Threshold the statistic with hangover hold; returns (is_speech, state)."""
    if statistic > state.threshold:
        return True, replace(state, hangover_remaining=state.hangover_frames, is_speech=True)
    if state.hangover_remaining > 0:
        return True, replace(state, hangover_remaining=state.hangover_remaining - 1, is_speech=True)
    return False, replace(state, hangover_remaining=0, is_speech=False)


def update_noise(
    noise: NoiseEstimate,
    frame: SpectralFrame,
    is_speech: bool,
    alpha: float = DEFAULT_NOISE_ALPHA,
    psd_floor: float = PSD_FLOOR,
) -> NoiseEstimate:
    """Recursive averaging on noise frames; frozen while speech is present."""
    if not noise.initialized:
        raise NotInitialized("noise estimate not initialized")
    if is_speech:
        psd = noise.psd
    else:
        power = np.abs(frame.bins) ** 2
        psd = np.maximum(alpha * noise.psd + (1.0 - alpha) * power, psd_floor)
    return NoiseEstimate(psd=psd, frames_seen=noise.frames_seen + 1, initialized=True)
