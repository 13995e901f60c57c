"""Report figures rendered next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import MeanRow
from .stft import StftConfig, analyze

_MARKERS = ("o", "s", "^", "d", "v", "p")


def _by_noise(means: list[MeanRow]) -> dict[str, list[MeanRow]]:
    out: dict[str, list[MeanRow]] = {}
    for m in means:
        out.setdefault(m.noise_type, []).append(m)
    for v in out.values():
        v.sort(key=lambda m: m.snr_db)
    return out


def plot_eval_means(means: list[MeanRow], out_path) -> Path:
    """STOI and segmental SNR versus input SNR, one line pair per noise."""
    fig, (ax_stoi, ax_seg) = plt.subplots(1, 2, figsize=(10, 4))
    for i, (noise, ms) in enumerate(sorted(_by_noise(means).items())):
        snrs = [m.snr_db for m in ms]
        mk = _MARKERS[i % len(_MARKERS)]
        ax_stoi.plot(snrs, [m.stoi_noisy for m in ms], mk + "--", alpha=0.5, label=f"{noise} noisy")
        ax_stoi.plot(snrs, [m.stoi_enhanced for m in ms], mk + "-", label=f"{noise} enhanced")
        ax_seg.plot(snrs, [m.segsnr_noisy_db for m in ms], mk + "--", alpha=0.5)
        ax_seg.plot(snrs, [m.segsnr_enhanced_db for m in ms], mk + "-", label=noise)
    ax_stoi.set_xlabel("input SNR (dB)")
    ax_stoi.set_ylabel("STOI")
    ax_stoi.legend(fontsize=7)
    ax_seg.set_xlabel("input SNR (dB)")
    ax_seg.set_ylabel("segmental SNR (dB)")
    ax_seg.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def plot_sweep(means: list[MeanRow], out_path) -> Path:
    """Suppression/distortion tradeoff: metrics versus beta per condition."""
    fig, (ax_seg, ax_stoi) = plt.subplots(1, 2, figsize=(10, 4))
    groups: dict[tuple, list[MeanRow]] = {}
    for m in means:
        groups.setdefault((m.noise_type, m.snr_db), []).append(m)
    for i, (key, ms) in enumerate(sorted(groups.items())):
        ms.sort(key=lambda m: m.beta)
        betas = [m.beta for m in ms]
        mk = _MARKERS[i % len(_MARKERS)]
        label = f"{key[0]} @ {key[1]:g} dB"
        ax_seg.plot(betas, [m.segsnr_enhanced_db for m in ms], mk + "-", label=label)
        ax_stoi.plot(betas, [m.stoi_enhanced for m in ms], mk + "-", label=label)
    for ax, ylabel in ((ax_seg, "segmental SNR (dB)"), (ax_stoi, "STOI")):
        ax.set_xlabel("beta")
        ax.set_ylabel(ylabel)
        ax.set_xscale("log")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)


def spectrogram_db(samples: np.ndarray, config: StftConfig) -> np.ndarray:
    """Frames x bins magnitude matrix in dB, floored at -120."""
    frames = analyze(samples, config)
    mags = np.abs(np.stack([f.bins for f in frames]))
    return np.maximum(20.0 * np.log10(mags + 1e-12), -120.0)


def plot_spectrogram_pair(
    noisy: np.ndarray, enhanced: np.ndarray, config: StftConfig, sample_rate_hz: int, out_path
) -> Path:
    """Before/after spectrograms saved side by side."""
    fig, axes = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
    for ax, (title, sig) in zip(axes, (("noisy", noisy), ("enhanced", enhanced))):
        db = spectrogram_db(sig, config).T
        extent = (0, len(sig) / sample_rate_hz, 0, sample_rate_hz / 2 / 1000)
        ax.imshow(db, origin="lower", aspect="auto", extent=extent, cmap="magma",
                  vmin=np.max(db) - 80, vmax=np.max(db))
        ax.set_title(title)
        ax.set_ylabel("kHz")
    axes[-1].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return Path(out_path)
