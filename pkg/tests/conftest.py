import numpy as np
import pytest

from sgse.audio_io import AudioBuffer
from sgse.corpus import generate_corpus, make_utterance, white_noise


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tone():
    def make(freq_hz, seconds=1.0, fs=16000, amp=0.5):
        t = np.arange(int(seconds * fs)) / fs
        return AudioBuffer(amp * np.sin(2 * np.pi * freq_hz * t), fs)

    return make


@pytest.fixture(scope="session")
def speech_and_noise():
    """One deterministic utterance plus matching white noise at 16 kHz."""
    fs = 16000
    gen = np.random.default_rng(42)
    utt = make_utterance(gen, fs)
    noise = 0.3 * white_noise(gen, fs, len(utt) + fs)
    return AudioBuffer(utt, fs), AudioBuffer(noise, fs)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Two-utterance corpus with two noise types; fast to evaluate."""
    root = tmp_path_factory.mktemp("corpus")
    return generate_corpus(
        root, seed=42, n_utterances=2, noise_types=["white", "babble"]
    )
