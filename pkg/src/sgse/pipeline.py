"""Streaming enhancer: arbitrary input chunks in, enhanced samples out.

Frames are taken every hop samples from an internal buffer that is primed
with (frame_len - hop) zeros; the same number of leading output samples is
discarded, so emitted sample n corresponds exactly to input sample n and
every emitted sample has full overlap-add coverage. The price is a fixed
algorithmic latency of (frame_len - hop) samples: the total output is that
much shorter than the total input.

Per-frame processing order once the noise floor is initialized:
posterior SNR -> decision-directed a priori SNR -> VAD statistic/decision
-> noise update -> gain rule -> gain applied with the noisy phase kept.
During the initialization window (and for the bypass rule) frames pass
through with unit gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gains, noise as noise_mod
from .errors import NonFiniteInput
from .gains import GainParams, SnrState
from .noise import NoiseEstimate, VadState
from .stft import SpectralFrame, StftConfig, invert_frame, transform_frame

RULES = ("proposed", "sgjmap", "jmap", "bypass")


@dataclass
class PipelineConfig:
    sample_rate_hz: int = 16000
    stft: StftConfig | None = None
    rule: str = "proposed"
    params: GainParams = field(default_factory=GainParams)
    init_noise_seconds: float = 2.0
    vad_threshold: float = noise_mod.DEFAULT_VAD_THRESHOLD
    vad_hangover_frames: int = noise_mod.DEFAULT_HANGOVER_FRAMES
    noise_alpha: float = noise_mod.DEFAULT_NOISE_ALPHA
    alpha_dd: float = gains.DEFAULT_ALPHA_DD

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")
        if self.init_noise_seconds <= 0:
            raise ValueError("init_noise_seconds must be positive")
        if self.stft is None:
            self.stft = StftConfig.for_rate(self.sample_rate_hz)


class Pipeline:
    """One enhancement stream; process_chunk calls must stay sequential."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self._stft = config.stft
        self._params = config.params
        # written by set_params (possibly from another thread), read once at
        # each frame boundary; plain attribute swap is atomic under the GIL
        self._pending_params = config.params
        self.reset()

    def latency(self) -> int:
        """Fixed input-to-output delay in samples."""
        return self._stft.frame_len - self._stft.hop

    def reset(self) -> None:
        """Forget all stream state and re-enter the initialization window."""
        cfg = self.config
        st = self._stft
        self._buf = np.zeros(self.latency())
        self._carry = np.zeros(self.latency())
        self._drop = self.latency()
        self._frames_done = 0
        hop_seconds = st.hop / cfg.sample_rate_hz
        self._init_frames = max(1, math.ceil(cfg.init_noise_seconds / hop_seconds))
        self._init_frame_acc: list[SpectralFrame] = []
        self._noise: NoiseEstimate | None = None
        self._vad = VadState(
            threshold=cfg.vad_threshold, hangover_frames=cfg.vad_hangover_frames
        )
        self._snr = SnrState.fresh(st.n_bins, alpha_dd=cfg.alpha_dd)
        self._params = self._pending_params

    @property
    def frames_processed(self) -> int:
        return self._frames_done

    def set_params(self, params: GainParams) -> None:
        """Stage new gain parameters; they apply at the next frame boundary."""
        self._pending_params = params

    def process_chunk(self, samples) -> np.ndarray:
        """Consume samples, return every fully synthesized output sample."""
        x = np.asarray(samples, dtype=np.float64)
        if x.size and not np.all(np.isfinite(x)):
            raise NonFiniteInput("input chunk contains NaN or Inf")
        self._buf = np.concatenate([self._buf, x])

        st = self._stft
        out = []
        pos = 0
        while pos + st.frame_len <= len(self._buf):
            emitted = self._process_frame(self._buf[pos : pos + st.frame_len])
            pos += st.hop
            if self._drop >= len(emitted):
                self._drop -= len(emitted)
            else:
                out.append(emitted[self._drop :])
                self._drop = 0
        self._buf = self._buf[pos:]
        if not out:
            return np.zeros(0)
        return np.concatenate(out)

    # -- internals ---------------------------------------------------------

    def _process_frame(self, segment: np.ndarray) -> np.ndarray:
        st = self._stft
        self._params = self._pending_params
        spec = transform_frame(segment, st)
        frame = SpectralFrame(bins=spec, frame_index=self._frames_done)

        if self.config.rule == "bypass":
            out_bins = spec
        elif self._frames_done < self._init_frames:
            self._init_frame_acc.append(frame)
            if len(self._init_frame_acc) == self._init_frames:
                self._noise = noise_mod.init_noise(self._init_frame_acc)
                self._init_frame_acc = []
            out_bins = spec
        else:
            out_bins = self._enhance_frame(frame)
        self._frames_done += 1

        y = invert_frame(out_bins, st)
        full = y + np.concatenate([self._carry, np.zeros(st.hop)])
        self._carry = full[st.hop :]
        return full[: st.hop] / st.cola_gain

    def _enhance_frame(self, frame: SpectralFrame) -> np.ndarray:
        p = self._params
        gamma = gains.posterior_snr(frame, self._noise)
        xi = gains.decision_directed_xi(self._snr, self._noise, gamma)
        stat = noise_mod.vad_statistic(frame, self._noise, xi)
        is_speech, self._vad = noise_mod.vad_decide(stat, self._vad)
        self._noise = noise_mod.update_noise(
            self._noise, frame, is_speech, alpha=self.config.noise_alpha
        )

        if self.config.rule == "proposed":
            g = gains.proposed_gain(xi, gamma, p)
        elif self.config.rule == "sgjmap":
            g = gains.sgjmap_gain(xi, gamma, p.mu, p.nu, p.gain_floor, p.gain_cap)
        else:
            g = gains.jmap_gain(xi, gamma, p.gain_floor, p.gain_cap)

        # the DD estimator must see exactly what was synthesized
        self._snr.prev_amp = g * np.abs(frame.bins)
        self._snr.xi = xi
        self._snr.gamma = gamma
        return frame.bins * g


def enhance_buffer(samples, config: PipelineConfig) -> np.ndarray:
    """Run a fresh pipeline over a whole signal, preserving its length.

    The input is zero-padded at the tail so the stream flushes; the output
    has exactly len(samples) entries with out[n] aligned to samples[n]. The
    last latency() samples come from the flush and taper accordingly.
    """
    x = np.asarray(samples, dtype=np.float64)
    pipe = Pipeline(config)
    st = config.stft
    latency = pipe.latency()
    total = math.ceil((len(x) + latency) / st.hop) * st.hop
    out = pipe.process_chunk(np.concatenate([x, np.zeros(total - len(x))]))
    return out[: len(x)]


def enhance_span(
    source_samples,
    config: PipelineConfig,
    start_seconds: float = 0.0,
    duration_seconds: float | None = None,
) -> np.ndarray:
    """Enhance a span of a longer recording, deterministically.

    A noise-initialization preroll of up to config.init_noise_seconds of the
    audio preceding the span is prepended and trimmed from the result, so a
    span rendered out of context matches the same span processed in stream
    order once the noise floor has settled.
    """
    x = np.asarray(source_samples, dtype=np.float64)
    fs = config.sample_rate_hz
    start = int(round(start_seconds * fs))
    n = len(x) - start if duration_seconds is None else int(round(duration_seconds * fs))
    if start < 0 or n <= 0 or start + n > len(x):
        raise ValueError(
            f"span [{start_seconds}s, +{duration_seconds}s] outside source "
            f"of {len(x) / fs:.3f}s"
        )
    preroll = min(int(round(config.init_noise_seconds * fs)), start)
    out = enhance_buffer(x[start - preroll : start + n], config)
    return out[preroll:]
