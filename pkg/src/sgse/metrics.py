"""Objective metrics: SNR-controlled mixing, STOI, segmental SNR.

STOI follows the published correlation-based recipe: both signals are
brought to 10 kHz, silent frames (40 dB below the loudest clean frame) are
removed, a 25.6 ms / 50% overlap Hann STFT feeds 15 one-third-octave bands
from 150 Hz, and per-band envelopes are compared over sliding 384 ms
segments after normalization and clipping at -15 dB signal-to-distortion.
The mean correlation over bands and segments is the score.

Segmental SNR stands in for licensed quality metrics: per 20 ms active
frame, 10*log10(sum clean^2 / sum (clean - processed)^2), clamped to
[-10, 35] dB and averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer, resample
from .errors import LengthMismatch, RateMismatch, SilentClean, TooShort

STOI_FS = 10_000
STOI_FRAME = 256
STOI_HOP = 128
STOI_NFFT = 512
STOI_BANDS = 15
STOI_FIRST_CF = 150.0
STOI_SEG_FRAMES = 30  # 384 ms at 12.8 ms per hop
STOI_DYN_RANGE_DB = 40.0
STOI_SDR_CLIP_DB = -15.0

SEGSNR_FRAME_MS = 20.0
SEGSNR_FLOOR_DB = -10.0
SEGSNR_CEIL_DB = 35.0

ACTIVE_RANGE_DB = 40.0
_EPS = np.finfo(np.float64).eps


# -- active-region helpers --------------------------------------------------


def _frame_energies(x: np.ndarray, frame: int) -> np.ndarray:
    n = len(x) // frame
    return np.sum(x[: n * frame].reshape(n, frame) ** 2, axis=1)


def active_frame_mask(
    clean: np.ndarray, frame: int, range_db: float = ACTIVE_RANGE_DB
) -> np.ndarray:
    """Frames of the clean signal within range_db of the loudest frame."""
    e = _frame_energies(clean, frame)
    if e.size == 0 or np.max(e) <= 0.0:
        raise SilentClean("clean signal has no active frames")
    return e > np.max(e) * 10.0 ** (-range_db / 10.0)


def _active_sample_mask(clean: np.ndarray, frame: int) -> np.ndarray:
    mask = np.repeat(active_frame_mask(clean, frame), frame)
    out = np.zeros(len(clean), dtype=bool)
    out[: len(mask)] = mask
    return out


# -- SNR-controlled mixing ---------------------------------------------------


@dataclass
class MixResult:
    mixture: AudioBuffer
    noise_scale: float
    peak_norm: float


def measure_snr(clean: AudioBuffer, noise: AudioBuffer) -> float:
    """SNR in dB with powers measured over the clean-active region."""
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise RateMismatch("clean and noise sample rates differ")
    frame = int(round(SEGSNR_FRAME_MS * 1e-3 * clean.sample_rate_hz))
    n = _tile_to(noise.samples, len(clean))
    mask = _active_sample_mask(clean.samples, frame)
    p_clean = float(np.mean(clean.samples[mask] ** 2))
    p_noise = float(np.mean(n[mask] ** 2))
    if p_noise <= 0.0:
        return np.inf
    return 10.0 * np.log10(p_clean / p_noise)


def _tile_to(x: np.ndarray, n: int) -> np.ndarray:
    if len(x) >= n:
        return x[:n]
    reps = -(-n // len(x))
    return np.tile(x, reps)[:n]


def mix_at_snr(clean: AudioBuffer, noise: AudioBuffer, snr_db: float) -> MixResult:
    """Scale noise so the clean-active-region SNR hits snr_db, then add.

    The mixture is peak-normalized to at most 0.99; the factor applied is
    reported so callers can undo it or scale references consistently.
    """
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise RateMismatch("clean and noise sample rates differ")
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    fs = clean.sample_rate_hz
    frame = int(round(SEGSNR_FRAME_MS * 1e-3 * fs))
    n = _tile_to(noise.samples, len(clean))
    mask = _active_sample_mask(clean.samples, frame)
    p_clean = float(np.mean(clean.samples[mask] ** 2))
    p_noise = float(np.mean(n[mask] ** 2))
    if p_clean <= 0.0:
        raise SilentClean("clean signal is silent over the active region")
    if p_noise <= 0.0:
        raise ValueError("noise is silent over the clean-active region")

    scale = float(np.sqrt(p_clean / (p_noise * 10.0 ** (snr_db / 10.0))))
    mixture = clean.samples + scale * n
    peak = float(np.max(np.abs(mixture)))
    norm = 0.99 / peak if peak > 0.99 else 1.0
    return MixResult(
        mixture=AudioBuffer(mixture * norm, fs),
        noise_scale=scale,
        peak_norm=norm,
    )


# -- segmental SNR -----------------------------------------------------------


def segmental_snr(clean: AudioBuffer, processed: AudioBuffer) -> float:
    """Mean clamped per-frame SNR over active 20 ms frames, in dB."""
    if clean.sample_rate_hz != processed.sample_rate_hz:
        raise RateMismatch("sample rates differ")
    if len(clean) != len(processed):
        raise LengthMismatch(f"lengths differ: {len(clean)} vs {len(processed)}")
    frame = int(round(SEGSNR_FRAME_MS * 1e-3 * clean.sample_rate_hz))
    active = active_frame_mask(clean.samples, frame)
    n = len(active)
    c = clean.samples[: n * frame].reshape(n, frame)[active]
    p = processed.samples[: n * frame].reshape(n, frame)[active]
    num = np.sum(c**2, axis=1)
    den = np.sum((c - p) ** 2, axis=1)
    snr = 10.0 * np.log10(num / np.maximum(den, _EPS * num + np.finfo(float).tiny))
    return float(np.mean(np.clip(snr, SEGSNR_FLOOR_DB, SEGSNR_CEIL_DB)))


# -- STOI --------------------------------------------------------------------


def _third_octave_matrix(fs: int, nfft: int, n_bands: int, first_cf: float) -> np.ndarray:
    f = np.arange(nfft // 2 + 1) * fs / nfft
    centers = first_cf * 2.0 ** (np.arange(n_bands) / 3.0)
    lo = centers * 2.0 ** (-1.0 / 6.0)
    hi = centers * 2.0 ** (1.0 / 6.0)
    obm = np.zeros((n_bands, len(f)))
    for j in range(n_bands):
        obm[j, (f >= lo[j]) & (f < hi[j])] = 1.0
    return obm


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _remove_silent_frames(
    x: np.ndarray, y: np.ndarray, frame: int, hop: int, range_db: float
) -> tuple[np.ndarray, np.ndarray]:
    w = _hann_periodic(frame)
    starts = np.arange(0, len(x) - frame + 1, hop)
    if len(starts) == 0:
        raise TooShort("not enough samples for one analysis frame")
    idx = starts[:, None] + np.arange(frame)[None, :]
    xf = x[idx] * w
    yf = y[idx] * w
    energies = 20.0 * np.log10(np.linalg.norm(xf, axis=1) + _EPS)
    keep = energies > np.max(energies) - range_db
    xf, yf = xf[keep], yf[keep]
    if len(xf) == 0:
        raise TooShort("no frames above the silence threshold")
    out_len = (len(xf) - 1) * hop + frame
    xs = np.zeros(out_len)
    ys = np.zeros(out_len)
    for i in range(len(xf)):
        xs[i * hop : i * hop + frame] += xf[i]
        ys[i * hop : i * hop + frame] += yf[i]
    return xs, ys


def _band_envelopes(x: np.ndarray, obm: np.ndarray) -> np.ndarray:
    w = _hann_periodic(STOI_FRAME)
    starts = np.arange(0, len(x) - STOI_FRAME + 1, STOI_HOP)
    idx = starts[:, None] + np.arange(STOI_FRAME)[None, :]
    spec = np.fft.rfft(x[idx] * w, n=STOI_NFFT, axis=1)
    return np.sqrt(np.maximum(obm @ (np.abs(spec.T) ** 2), 0.0))  # bands x frames


def stoi(clean: AudioBuffer, processed: AudioBuffer) -> float:
    """Short-time objective intelligibility in [0, 1]."""
    if clean.sample_rate_hz != processed.sample_rate_hz:
        raise RateMismatch("sample rates differ")
    if len(clean) != len(processed):
        raise LengthMismatch(f"lengths differ: {len(clean)} vs {len(processed)}")
    min_len = int(round(0.384 * clean.sample_rate_hz))
    if len(clean) < min_len:
        raise TooShort(f"need at least 384 ms of audio, got {len(clean)} samples")

    x = resample(clean, STOI_FS).samples
    y = resample(processed, STOI_FS).samples
    x, y = _remove_silent_frames(x, y, STOI_FRAME, STOI_HOP, STOI_DYN_RANGE_DB)

    obm = _third_octave_matrix(STOI_FS, STOI_NFFT, STOI_BANDS, STOI_FIRST_CF)
    xb = _band_envelopes(x, obm)
    yb = _band_envelopes(y, obm)
    n_frames = xb.shape[1]
    if n_frames < STOI_SEG_FRAMES:
        raise TooShort(
            f"only {n_frames} active frames; need {STOI_SEG_FRAMES} for one segment"
        )

    clip = 10.0 ** (-STOI_SDR_CLIP_DB / 20.0)
    total = 0.0
    count = 0
    for m in range(STOI_SEG_FRAMES, n_frames + 1):
        xs = xb[:, m - STOI_SEG_FRAMES : m]
        ys = yb[:, m - STOI_SEG_FRAMES : m]
        alpha = np.linalg.norm(xs, axis=1, keepdims=True) / (
            np.linalg.norm(ys, axis=1, keepdims=True) + _EPS
        )
        yp = np.minimum(ys * alpha, xs * (1.0 + clip))
        xc = xs - xs.mean(axis=1, keepdims=True)
        yc = yp - yp.mean(axis=1, keepdims=True)
        denom = np.linalg.norm(xc, axis=1) * np.linalg.norm(yc, axis=1)
        corr = np.sum(xc * yc, axis=1) / (denom + _EPS)
        total += float(np.sum(corr))
        count += STOI_BANDS
    return float(np.clip(total / count, 0.0, 1.0))
