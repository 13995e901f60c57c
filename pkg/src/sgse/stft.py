"""Frame/window/DFT analysis and overlap-add resynthesis.

Analysis windows each frame, zero-pads to the FFT size, and keeps the
one-sided spectrum. Synthesis inverts per frame, truncates to the frame
length, overlap-adds, and divides by the accumulated window sum. With the
default periodic Hann at 50% overlap the window sum is exactly 1, so the
round trip is unity gain away from the edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigMismatch, InsufficientSamples

_COLA_TOL = 1e-10


def _make_window(kind: str, frame_len: int) -> np.ndarray:
    if kind == "hann":
        n = np.arange(frame_len)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / frame_len)  # periodic
    if kind == "rect":
        return np.ones(frame_len)
    raise ValueError(f"unknown window {kind!r}")


@dataclass(frozen=True)
class StftConfig:
    """Frame length/hop/FFT-size triple plus the analysis window."""

    frame_len: int
    hop: int
    fft_size: int
    window: str = "hann"

    def __post_init__(self):
        if not (0 < self.hop <= self.frame_len <= self.fft_size):
            raise ValueError(
                f"need 0 < hop <= frame_len <= fft_size, got "
                f"hop={self.hop} frame_len={self.frame_len} fft_size={self.fft_size}"
            )
        w = _make_window(self.window, self.frame_len)
        gain = _cola_gain(w, self.hop)
        if gain is None:
            raise ValueError(
                f"window {self.window!r} with frame_len={self.frame_len} "
                f"hop={self.hop} does not satisfy constant overlap-add"
            )
        object.__setattr__(self, "_window_array", w)
        object.__setattr__(self, "_cola_gain", gain)

    @classmethod
    def for_rate(cls, sample_rate_hz: int, frame_ms: float = 20.0) -> "StftConfig":
        """Default config: frame_ms frames, 50% overlap, next-pow2 FFT."""
        frame_len = int(round(frame_ms * 1e-3 * sample_rate_hz))
        if frame_len < 2:
            raise ValueError("frame too short for this sample rate")
        fft_size = 1
        while fft_size < frame_len:
            fft_size *= 2
        return cls(frame_len=frame_len, hop=frame_len // 2, fft_size=fft_size)

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    @property
    def window_array(self) -> np.ndarray:
        return self._window_array

    @property
    def cola_gain(self) -> float:
        """Constant value of the overlapped window sum in steady state."""
        return self._cola_gain


def _cola_gain(window: np.ndarray, hop: int) -> float | None:
    """Steady-state overlap sum of the window, or None if not constant."""
    frame_len = len(window)
    reps = 4 * (frame_len // hop) + 4
    total = (reps - 1) * hop + frame_len
    acc = np.zeros(total)
    for i in range(reps):
        acc[i * hop : i * hop + frame_len] += window
    edge = frame_len - hop
    steady = acc[edge : total - edge] if edge > 0 else acc
    gain = float(steady.mean())
    if np.max(np.abs(steady - gain)) > _COLA_TOL or gain <= 0:
        return None
    return gain


@dataclass
class SpectralFrame:
    """One-sided complex spectrum of a single analysis frame."""

    bins: np.ndarray
    frame_index: int = 0


def transform_frame(segment: np.ndarray, config: StftConfig) -> np.ndarray:
    """Window one frame_len segment and return its one-sided spectrum."""
    return np.fft.rfft(segment * config.window_array, n=config.fft_size)


def invert_frame(bins: np.ndarray, config: StftConfig) -> np.ndarray:
    """Inverse transform of one spectrum, truncated to frame_len samples."""
    return np.fft.irfft(bins, n=config.fft_size)[: config.frame_len]


def frame_count(n_samples: int, config: StftConfig) -> int:
    if n_samples < config.frame_len:
        return 0
    return (n_samples - config.frame_len) // config.hop + 1


def analyze(samples: np.ndarray, config: StftConfig) -> list[SpectralFrame]:
    """Windowed one-sided DFT of every full frame in the signal."""
    samples = np.asarray(samples, dtype=np.float64)
    n = frame_count(len(samples), config)
    if n == 0:
        raise InsufficientSamples(
            f"need at least {config.frame_len} samples, got {len(samples)}"
        )
    idx = np.arange(config.frame_len)[None, :] + config.hop * np.arange(n)[:, None]
    spectra = np.fft.rfft(samples[idx] * config.window_array, n=config.fft_size, axis=1)
    return [SpectralFrame(bins=spectra[i], frame_index=i) for i in range(n)]


def synthesize(frames: list[SpectralFrame], config: StftConfig) -> np.ndarray:
    """Overlap-add resynthesis; inverse of analyze away from the edges."""
    if len(frames) == 0:
        return np.zeros(0)
    for f in frames:
        if len(f.bins) != config.n_bins:
            raise ConfigMismatch(
                f"frame {f.frame_index} has {len(f.bins)} bins, config wants {config.n_bins}"
            )
    total = (len(frames) - 1) * config.hop + config.frame_len
    acc = np.zeros(total)
    wsum = np.zeros(total)
    for i, f in enumerate(frames):
        start = i * config.hop
        acc[start : start + config.frame_len] += invert_frame(f.bins, config)
        wsum[start : start + config.frame_len] += config.window_array
    out = np.zeros(total)
    live = wsum > 1e-12
    out[live] = acc[live] / wsum[live]
    return out
