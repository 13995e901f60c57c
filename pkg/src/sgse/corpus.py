"""Bundled synthetic corpus: speech-shaped utterances plus noise generators.

Licensed sentence material cannot ship with the repo, so evaluation runs on
generated stand-ins: harmonic "syllables" with drifting pitch, formant-style
resonances and fricative bursts, gated by a syllabic envelope. Each clean
utterance starts with a silent lead-in long enough for the enhancer's
noise-floor initialization. Four noise generators cover a stationary
reference (white) and three structured types (babble-, machinery- and
traffic-like) matching the tuning presets.

Everything is deterministic given the seed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.signal import butter, iirpeak, lfilter

from .audio_io import AudioBuffer, write_wav

DEFAULT_SEED = 42
DEFAULT_UTTERANCES = 8
DEFAULT_UTTERANCE_SECONDS = 3.0
DEFAULT_LEAD_SILENCE_SECONDS = 2.2
DEFAULT_FS = 16000


def _resonate(x: np.ndarray, fs: int, freq: float, q: float) -> np.ndarray:
    b, a = iirpeak(freq, q, fs=fs)
    return lfilter(b, a, x)


def _envelope(n: int, fs: int, attack_s: float = 0.02, release_s: float = 0.03) -> np.ndarray:
    env = np.ones(n)
    a = min(int(attack_s * fs), n // 2)
    r = min(int(release_s * fs), n // 2)
    if a > 0:
        env[:a] = 0.5 - 0.5 * np.cos(np.pi * np.arange(a) / a)
    if r > 0:
        env[n - r :] = 0.5 + 0.5 * np.cos(np.pi * np.arange(r) / r)
    return env


def _syllable(rng: np.random.Generator, fs: int, m: int) -> np.ndarray:
    f0 = rng.uniform(110.0, 190.0)
    glide = rng.uniform(-0.12, 0.12)
    t = np.arange(m) / fs
    inst = f0 * (1.0 + glide * t / max(t[-1], 1e-9))
    phase = 2.0 * np.pi * np.cumsum(inst) / fs
    src = np.zeros(m)
    for h in range(1, 13):
        src += np.sin(h * phase + rng.uniform(0.0, 2.0 * np.pi)) / h
    for fc, q in (
        (rng.uniform(400.0, 800.0), 5.0),
        (rng.uniform(1100.0, 1800.0), 7.0),
        (rng.uniform(2300.0, 3000.0), 9.0),
    ):
        src = src + _resonate(src, fs, fc, q)
    src /= np.max(np.abs(src)) + 1e-12
    return src


def speech_like(rng: np.random.Generator, fs: int, seconds: float) -> np.ndarray:
    """Speech-shaped modulated signal: word-like runs of syllables with pauses.

    Stylized vocalic speech: harmonic syllables with drifting pitch and
    formant-style resonances, run back to back inside a word, with silent
    gaps only at word boundaries. Syllable levels are kept near-uniform, as
    in level-equalized test sentences.
    """
    n = int(seconds * fs)
    out = np.zeros(n)
    pos = 0
    while pos < n:
        word_syllables = int(rng.integers(2, 5))
        for _ in range(word_syllables):
            m = min(int(rng.uniform(0.18, 0.32) * fs), n - pos)
            if m < int(0.03 * fs):
                pos = n
                break
            syl = _syllable(rng, fs, m)
            out[pos : pos + m] = syl * _envelope(m, fs, 0.012, 0.018) * rng.uniform(0.9, 1.0)
            pos += m
        pos += int(rng.uniform(0.08, 0.16) * fs)  # word gap
    peak = np.max(np.abs(out))
    return 0.3 * out / (peak + 1e-12)


def make_utterance(
    rng: np.random.Generator,
    fs: int = DEFAULT_FS,
    seconds: float = DEFAULT_UTTERANCE_SECONDS,
    lead_silence_seconds: float = DEFAULT_LEAD_SILENCE_SECONDS,
) -> np.ndarray:
    """Clean utterance with a silent lead-in for noise initialization."""
    lead = np.zeros(int(lead_silence_seconds * fs))
    return np.concatenate([lead, speech_like(rng, fs, seconds)])


# -- noise generators (unit RMS) ----------------------------------------------


def white_noise(rng: np.random.Generator, fs: int, n: int) -> np.ndarray:
    return rng.standard_normal(n)


def babble_noise(rng: np.random.Generator, fs: int, n: int) -> np.ndarray:
    acc = np.zeros(n)
    for _ in range(6):
        talker = speech_like(rng, fs, n / fs + 0.5)[:n]
        acc += np.roll(talker, rng.integers(0, n))
    return acc / (np.sqrt(np.mean(acc**2)) + 1e-12)


def machinery_noise(rng: np.random.Generator, fs: int, n: int) -> np.ndarray:
    t = np.arange(n) / fs
    hum = sum(np.sin(2.0 * np.pi * 50.0 * k * t + rng.uniform(0, 2 * np.pi)) / k for k in range(1, 6))
    # impulsive clatter ringing at metallic resonances
    clank_rate = 8.0
    impulses = np.zeros(n)
    period = int(fs / clank_rate)
    jitter = (rng.uniform(-0.1, 0.1, size=n // period + 2) * period).astype(int)
    for i, j in enumerate(jitter):
        k = i * period + j
        if 0 <= k < n:
            impulses[k] = rng.uniform(0.5, 1.0)
    ring = _resonate(_resonate(impulses, fs, 1300.0, 30.0), fs, 2900.0, 40.0)
    b, a = butter(2, 2000.0 / (fs / 2))
    rumble = lfilter(b, a, rng.standard_normal(n))
    mix = 0.8 * hum + 30.0 * ring + 0.6 * rumble
    return mix / (np.sqrt(np.mean(mix**2)) + 1e-12)


def traffic_noise(rng: np.random.Generator, fs: int, n: int) -> np.ndarray:
    b, a = butter(3, 900.0 / (fs / 2))
    base = lfilter(b, a, rng.standard_normal(n))
    # slow loudness wander plus occasional pass-by swells
    t = np.arange(n) / fs
    wander = 1.0 + 0.4 * np.sin(2.0 * np.pi * 0.15 * t + rng.uniform(0, 2 * np.pi))
    swell = np.zeros(n)
    for _ in range(max(1, int(n / fs / 4))):
        center = rng.uniform(0.0, n / fs)
        width = rng.uniform(0.5, 1.5)
        swell += 0.8 * np.exp(-0.5 * ((t - center) / width) ** 2)
    mix = base * (wander + swell)
    return mix / (np.sqrt(np.mean(mix**2)) + 1e-12)


NOISE_TYPES = {
    "white": white_noise,
    "babble": babble_noise,
    "machinery": machinery_noise,
    "traffic": traffic_noise,
}


def generate_corpus(
    out_dir,
    seed: int = DEFAULT_SEED,
    n_utterances: int = DEFAULT_UTTERANCES,
    utterance_seconds: float = DEFAULT_UTTERANCE_SECONDS,
    lead_silence_seconds: float = DEFAULT_LEAD_SILENCE_SECONDS,
    sample_rate_hz: int = DEFAULT_FS,
    noise_types: list[str] | None = None,
) -> Path:
    """Write clean/noise WAVs plus a tab-separated manifest; returns its path.

    Manifest records are one per (utterance, noise type):
    utterance_id <TAB> clean_path <TAB> noise_path, paths relative to the
    manifest location.
    """
    out = Path(out_dir)
    (out / "clean").mkdir(parents=True, exist_ok=True)
    (out / "noise").mkdir(parents=True, exist_ok=True)
    names = list(noise_types or NOISE_TYPES)
    rng = np.random.default_rng(seed)

    clean_files = []
    for i in range(n_utterances):
        samples = make_utterance(rng, sample_rate_hz, utterance_seconds, lead_silence_seconds)
        rel = f"clean/utt{i:02d}.wav"
        write_wav(out / rel, AudioBuffer(samples, sample_rate_hz), "float32")
        clean_files.append((f"utt{i:02d}", rel))

    noise_len = int((lead_silence_seconds + utterance_seconds + 1.0) * sample_rate_hz)
    noise_files = []
    for name in names:
        gen = NOISE_TYPES[name]
        samples = 0.3 * gen(rng, sample_rate_hz, noise_len)
        rel = f"noise/{name}.wav"
        write_wav(out / rel, AudioBuffer(samples, sample_rate_hz), "float32")
        noise_files.append((name, rel))

    manifest = out / "manifest.tsv"
    with open(manifest, "w") as fh:
        for utt_id, clean_rel in clean_files:
            for _, noise_rel in noise_files:
                fh.write(f"{utt_id}\t{clean_rel}\t{noise_rel}\n")
    return manifest
