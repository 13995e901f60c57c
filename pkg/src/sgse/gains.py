"""Spectral gain rules and per-bin SNR estimation.

Three amplitude-domain gain rules are provided, all functions of the
a priori SNR xi and the a posteriori SNR gamma:

  * jmap:     Gaussian-prior joint MAP amplitude estimator,
              g = (xi + sqrt(xi^2 + (1 + xi) * xi / gamma)) / (2 * (1 + xi))
  * sgjmap:   super-Gaussian prior with shape parameters (mu, nu),
              g = u + sqrt(u^2 + nu / (2 gamma)),  u = 1/2 - mu / (4 sqrt(gamma xi))
  * tradeoff: sgjmap with an extra suppression/distortion knob beta,
              g = (t - c) + sqrt((c - t)^2 + nu / (2 gamma beta^2))
              with t = 1 / (2 beta), c = mu / (4 sqrt(gamma xi)).

At beta = 1 the tradeoff rule reduces exactly to sgjmap; as xi = gamma grow
it tends to 1/beta, so beta > 1 buys extra suppression at the price of
speech distortion and beta < 1 the reverse.

The *_raw functions return the bare formula value; the public rules clamp
into [gain_floor, gain_cap] to bound musical noise and amplification spikes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigMismatch, NotInitialized
from .noise import NoiseEstimate
from .stft import SpectralFrame

BETA_RANGE = (0.1, 5.0)
MU_RANGE = (0.5, 3.0)
NU_RANGE = (0.01, 1.0)

# per-noise-type (mu, nu) presets
NOISE_PRESETS = {
    "babble": (2.5, 1.0),
    "machinery": (2.0, 0.9),
    "traffic": (1.75, 0.75),
}

SNR_FLOOR = 1e-6
DEFAULT_ALPHA_DD = 0.98
DEFAULT_GAIN_FLOOR = 0.1
DEFAULT_GAIN_CAP = 10.0


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(float(x), lo), hi)


@dataclass(frozen=True)
class GainParams:
    """User-tunable (beta, mu, nu) triple; values clamp into their ranges."""

    beta: float = 1.0
    mu: float = 1.74
    nu: float = 0.126
    gain_floor: float = DEFAULT_GAIN_FLOOR
    gain_cap: float = DEFAULT_GAIN_CAP

    def __post_init__(self):
        object.__setattr__(self, "beta", _clamp(self.beta, *BETA_RANGE))
        object.__setattr__(self, "mu", _clamp(self.mu, *MU_RANGE))
        object.__setattr__(self, "nu", _clamp(self.nu, *NU_RANGE))
        if not (0.0 <= self.gain_floor < 1.0):
            raise ValueError("gain_floor must lie in [0, 1)")
        if self.gain_cap < 1.0:
            raise ValueError("gain_cap must be >= 1")

    @classmethod
    def for_preset(cls, name: str, beta: float = 1.0, **kwargs) -> "GainParams":
        mu, nu = NOISE_PRESETS[name]
        return cls(beta=beta, mu=mu, nu=nu, **kwargs)


@dataclass
class SnrState:
    """Per-stream SNR memory for the decision-directed estimator."""

    xi: np.ndarray
    gamma: np.ndarray
    prev_amp: np.ndarray
    alpha_dd: float = DEFAULT_ALPHA_DD

    @classmethod
    def fresh(cls, n_bins: int, alpha_dd: float = DEFAULT_ALPHA_DD) -> "SnrState":
        return cls(
            xi=np.full(n_bins, SNR_FLOOR),
            gamma=np.full(n_bins, SNR_FLOOR),
            prev_amp=np.zeros(n_bins),
            alpha_dd=alpha_dd,
        )


def posterior_snr(frame: SpectralFrame, noise: NoiseEstimate) -> np.ndarray:
    """gamma_k = |Y_k|^2 / noise psd, floored away from zero."""
    if not noise.initialized:
        raise NotInitialized("noise estimate not initialized")
    return np.maximum(np.abs(frame.bins) ** 2 / noise.psd, SNR_FLOOR)


def decision_directed_xi(
    state: SnrState, noise: NoiseEstimate, gamma: np.ndarray
) -> np.ndarray:
    """Blend the previous enhanced amplitude with the instantaneous SNR."""
    a = state.alpha_dd
    xi = a * state.prev_amp**2 / noise.psd + (1.0 - a) * np.maximum(gamma - 1.0, 0.0)
    return np.maximum(xi, SNR_FLOOR)


def sgjmap_gain_raw(xi, gamma, mu: float, nu: float) -> np.ndarray:
    u = 0.5 - mu / (4.0 * np.sqrt(gamma * xi))
    return u + np.sqrt(u * u + nu / (2.0 * gamma))


def tradeoff_gain_raw(xi, gamma, beta: float, mu: float, nu: float) -> np.ndarray:
    t = 1.0 / (2.0 * beta)
    c = mu / (4.0 * np.sqrt(gamma * xi))
    return (t - c) + np.sqrt((c - t) ** 2 + nu / (2.0 * gamma * beta * beta))


def jmap_gain_raw(xi, gamma) -> np.ndarray:
    return (xi + np.sqrt(xi * xi + (1.0 + xi) * xi / gamma)) / (2.0 * (1.0 + xi))


def _finish(g: np.ndarray, floor: float, cap: float) -> np.ndarray:
    return np.clip(g, floor, cap)


def sgjmap_gain(
    xi,
    gamma,
    mu: float,
    nu: float,
    gain_floor: float = DEFAULT_GAIN_FLOOR,
    gain_cap: float = DEFAULT_GAIN_CAP,
) -> np.ndarray:
    return _finish(sgjmap_gain_raw(xi, gamma, mu, nu), gain_floor, gain_cap)


def proposed_gain(xi, gamma, params: GainParams) -> np.ndarray:
    """Floored/capped tradeoff-rule gain for the given parameter triple."""
    g = tradeoff_gain_raw(xi, gamma, params.beta, params.mu, params.nu)
    return _finish(g, params.gain_floor, params.gain_cap)


def jmap_gain(
    xi,
    gamma,
    gain_floor: float = DEFAULT_GAIN_FLOOR,
    gain_cap: float = DEFAULT_GAIN_CAP,
) -> np.ndarray:
    return _finish(jmap_gain_raw(xi, gamma), gain_floor, gain_cap)


def apply_gain(frame: SpectralFrame, g: np.ndarray) -> SpectralFrame:
    """Scale each complex bin by its real gain; phase is untouched."""
    if len(g) != len(frame.bins):
        raise ConfigMismatch(
            f"gain vector has {len(g)} entries, frame has {len(frame.bins)} bins"
        )
    return SpectralFrame(bins=frame.bins * g, frame_index=frame.frame_index)
