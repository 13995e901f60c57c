"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints an `ACCEPTANCE <name>: PASS` line on success; run with
`pytest -v -s tests/test_acceptance.py` to see them. Tolerances are pinned
here and treated as frozen regression bounds.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from sgse.audio_io import AudioBuffer
from sgse.cli import main
from sgse.corpus import generate_corpus, make_utterance, white_noise
from sgse.evaluate import EvalCondition, default_conditions, run_eval
from sgse.gains import GainParams, sgjmap_gain_raw, tradeoff_gain_raw
from sgse.metrics import measure_snr, mix_at_snr, stoi
from sgse.pipeline import Pipeline, PipelineConfig
from sgse.stft import StftConfig, analyze, synthesize

FS = 16000


@pytest.fixture(scope="module")
def bundled_corpus(tmp_path_factory):
    """The default synthetic corpus, exactly as `sgse eval` generates it."""
    root = tmp_path_factory.mktemp("bundled")
    return generate_corpus(root, seed=42)


def _log_grid(n=30):
    return np.logspace(-3.0, 3.0, n)


def test_beta_one_reduction():
    t0 = time.perf_counter()
    xi, gamma = np.meshgrid(_log_grid(), _log_grid())
    worst = 0.0
    for mu in np.linspace(0.5, 3.0, 5):
        for nu in np.linspace(0.01, 1.0, 5):
            ref = sgjmap_gain_raw(xi, gamma, mu, nu)
            got = tradeoff_gain_raw(xi, gamma, 1.0, mu, nu)
            worst = max(worst, float(np.max(np.abs(got - ref) / ref)))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-12
    assert elapsed < 1.0
    print(f"\nACCEPTANCE beta-one-reduction: PASS (max rel diff {worst:.2e}, {elapsed:.2f}s)")


def test_quadratic_oracle():
    t0 = time.perf_counter()
    xi, gamma = np.meshgrid(_log_grid(), _log_grid())
    worst = 0.0
    for mu in np.linspace(0.5, 3.0, 5):
        for nu in np.linspace(0.01, 1.0, 5):
            for beta in (0.1, 0.5, 1.0, 2.0, 5.0):
                g = tradeoff_gain_raw(xi, gamma, beta, mu, nu)
                c = mu / (4.0 * np.sqrt(gamma * xi))
                res = g**2 + g * (2.0 * c - 1.0 / beta) - nu / (2.0 * gamma * beta**2)
                worst = max(worst, float(np.max(np.abs(res))))
    elapsed = time.perf_counter() - t0
    assert worst < 1e-9
    assert elapsed < 1.0
    print(f"\nACCEPTANCE quadratic-oracle: PASS (max residual {worst:.2e}, {elapsed:.2f}s)")


def test_beta_monotonicity_and_high_snr_limit():
    rng = np.random.default_rng(2024)
    n = 10_000
    xi = 10.0 ** rng.uniform(-3, 3, size=n)
    gamma = 10.0 ** rng.uniform(-3, 3, size=n)
    mu = rng.uniform(0.5, 3.0, size=n)
    nu = rng.uniform(0.01, 1.0, size=n)
    betas = (0.1, 0.5, 1.0, 2.0, 5.0)
    prev = None
    for beta in betas:
        g = tradeoff_gain_raw(xi, gamma, beta, mu, nu)
        if prev is not None:
            assert np.all(g < prev), f"gain not strictly decreasing at beta={beta}"
        prev = g
    for beta in betas:
        lim = tradeoff_gain_raw(1e12, 1e12, beta, 1.74, 0.126)
        assert abs(lim - 1.0 / beta) < 1e-5
    print("\nACCEPTANCE beta-monotonicity: PASS (10^4 draws, limits at 1e12 within 1e-5)")


def test_stft_perfect_reconstruction():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        hop = 2 ** int(rng.integers(4, 8))
        ratio = int(rng.choice([2, 4]))
        frame_len = hop * ratio
        fft_size = frame_len * int(rng.choice([1, 2]))
        cfg = StftConfig(frame_len=frame_len, hop=hop, fft_size=fft_size)
        x = rng.standard_normal(int(rng.integers(4, 10)) * frame_len)
        y = synthesize(analyze(x, cfg), cfg)
        m = min(len(x), len(y))
        edge = cfg.frame_len - cfg.hop
        err = float(np.max(np.abs(y[edge : m - edge] - x[edge : m - edge])))
        worst = max(worst, err)
    assert worst < 1e-6
    print(f"\nACCEPTANCE stft-reconstruction: PASS (100 cases, max err {worst:.2e})")


def test_mixer_accuracy():
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(100):
        target = float(rng.choice([-5.0, 0.0, 5.0]))
        t = np.arange(int(0.6 * FS)) / FS
        env = np.clip(np.sin(2 * np.pi * rng.uniform(2, 5) * t + rng.uniform(0, 6)), 0, None)
        clean = AudioBuffer(env * np.sin(2 * np.pi * rng.uniform(200, 800) * t), FS)
        noise = AudioBuffer(rng.uniform(0.01, 1.0) * rng.standard_normal(len(clean)), FS)
        res = mix_at_snr(clean, noise, target)
        got = measure_snr(clean, AudioBuffer(noise.samples * res.noise_scale, FS))
        worst = max(worst, abs(got - target))
    assert worst <= 0.01
    print(f"\nACCEPTANCE mixer-accuracy: PASS (100 cases, max |err| {worst:.4f} dB)")


def test_stoi_sanity_and_trend(bundled_corpus):
    rng = np.random.default_rng(8)
    x = AudioBuffer(make_utterance(rng, FS), FS)
    self_score = stoi(x, x)
    assert self_score >= 1.0 - 1e-6

    report = run_eval(bundled_corpus, default_conditions(rule="bypass"))
    assert not report.failures
    by_noise: dict[str, list[tuple[float, float]]] = {}
    for m in report.means:
        by_noise.setdefault(m.noise_type, []).append((m.snr_db, m.stoi_noisy))
    assert set(by_noise) == {"white", "babble", "machinery", "traffic"}
    for noise_type, pairs in by_noise.items():
        pairs.sort()
        scores = [s for _, s in pairs]
        assert all(a < b for a, b in zip(scores, scores[1:])), (
            f"STOI not strictly increasing for {noise_type}: {scores}"
        )
    print(f"\nACCEPTANCE stoi-sanity: PASS (self={self_score:.6f}, trends strict for 4 noise types)")


def test_enhancement_benefit(bundled_corpus):
    t0 = time.perf_counter()
    conds = [EvalCondition("white", 0.0, "proposed", GainParams())]
    report = run_eval(bundled_corpus, conds)
    assert not report.failures
    m = report.means[0]
    seg_gain = m.segsnr_enhanced_db - m.segsnr_noisy_db
    stoi_delta = m.stoi_enhanced - m.stoi_noisy
    elapsed = time.perf_counter() - t0
    assert seg_gain >= 1.0, f"segmental SNR improvement {seg_gain:.2f} dB below 1 dB"
    assert stoi_delta >= -0.02, f"STOI degradation {stoi_delta:+.4f} exceeds 0.02"
    assert elapsed < 120.0
    print(
        f"\nACCEPTANCE enhancement-benefit: PASS "
        f"(dSegSNR {seg_gain:+.2f} dB, dSTOI {stoi_delta:+.4f}, {elapsed:.1f}s)"
    )


def test_streaming_equivalence_and_rtf():
    rng = np.random.default_rng(31)
    x = 0.03 * rng.standard_normal(60 * FS)
    t = np.arange(60 * FS) / FS
    burst = (t % 6.0) > 3.0
    x[burst] += 0.2 * np.sin(2 * np.pi * 500 * t[burst])
    cfg = PipelineConfig(sample_rate_hz=FS, rule="proposed", params=GainParams())

    ref = Pipeline(cfg).process_chunk(x)
    for seed in (1, 2):
        part_rng = np.random.default_rng(seed)
        pipe = Pipeline(cfg)
        outs, pos = [], 0
        while pos < len(x):
            step = int(part_rng.integers(1, 8000))
            outs.append(pipe.process_chunk(x[pos : pos + step]))
            pos += step
        assert np.array_equal(np.concatenate(outs), ref)

    t0 = time.perf_counter()
    Pipeline(cfg).process_chunk(x)
    rtf = (time.perf_counter() - t0) / 60.0
    assert rtf < 0.5
    print(f"\nACCEPTANCE streaming-equivalence: PASS (bit-identical partitions, RTF {rtf:.3f})")


def test_cli_determinism(tmp_path):
    args = ["eval", "--snrs", "0", "--noise", "white", "--no-figures", "--seed", "42"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out-dir", str(a)]) == 0
    assert main(args + ["--out-dir", str(b)]) == 0
    csv_a = (a / "report.csv").read_bytes()
    csv_b = (b / "report.csv").read_bytes()
    assert csv_a == csv_b
    means_a = (a / "report_means.csv").read_bytes()
    means_b = (b / "report_means.csv").read_bytes()
    assert means_a == means_b
    print(f"\nACCEPTANCE determinism: PASS (byte-identical CSVs, {len(csv_a)} bytes)")
