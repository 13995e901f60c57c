import numpy as np
import pytest

from sgse.errors import NoFrames, NotInitialized
from sgse.noise import (
    PSD_FLOOR,
    NoiseEstimate,
    VadState,
    init_noise,
    update_noise,
    vad_decide,
    vad_statistic,
)
from sgse.stft import SpectralFrame


def frame_of(bins):
    return SpectralFrame(bins=np.asarray(bins, dtype=complex), frame_index=0)


def flat_frame(mag, n=8):
    return frame_of(np.full(n, mag, dtype=complex))


class TestInitNoise:
    def test_zero_frames_floor(self):
        est = init_noise([flat_frame(0.0)])
        np.testing.assert_array_equal(est.psd, PSD_FLOOR)
        assert est.initialized

    def test_single_frame_mean(self):
        est = init_noise([flat_frame(2.0)])  # |Y|^2 = 4
        np.testing.assert_allclose(est.psd, 4.0)

    def test_two_frame_mean(self):
        est = init_noise([flat_frame(np.sqrt(2.0)), flat_frame(np.sqrt(6.0))])
        np.testing.assert_allclose(est.psd, 4.0)

    def test_no_frames(self):
        with pytest.raises(NoFrames):
            init_noise([])


class TestVadStatistic:
    def test_zero_xi_gives_zero(self):
        est = init_noise([flat_frame(1.0)])
        stat = vad_statistic(flat_frame(3.0), est, np.zeros(8))
        assert stat == 0.0

    def test_single_bin_values(self):
        # oracle: direct formula evaluation
        est = NoiseEstimate(psd=np.array([1.0]), initialized=True)
        s = vad_statistic(frame_of([np.sqrt(2.0)]), est, np.array([1.0]))
        assert s == pytest.approx(0.3068528194400547, abs=1e-12)
        s0 = vad_statistic(frame_of([0.0]), est, np.array([1.0]))
        assert s0 == pytest.approx(-0.6931471805599453, abs=1e-12)

    def test_requires_init(self):
        est = NoiseEstimate(psd=np.ones(8), initialized=False)
        with pytest.raises(NotInitialized):
            vad_statistic(flat_frame(1.0), est, np.ones(8))

    def test_monotone_in_gamma(self, rng):
        est = NoiseEstimate(psd=np.ones(8), initialized=True)
        xi = rng.uniform(0.1, 5.0, size=8)
        mags = np.linspace(0.1, 4.0, 20)
        stats = [vad_statistic(flat_frame(m), est, xi) for m in mags]
        assert all(a <= b for a, b in zip(stats, stats[1:]))


class TestVadDecide:
    def test_threshold_crossing_reloads_hangover(self):
        speech, state = vad_decide(0.5, VadState())
        assert speech and state.hangover_remaining == 8

    def test_hangover_hold(self):
        speech, state = vad_decide(-1.0, VadState(hangover_remaining=3))
        assert speech and state.hangover_remaining == 2

    def test_quiescent(self):
        speech, state = vad_decide(-1.0, VadState())
        assert not speech and state.hangover_remaining == 0

    def test_decision_field_tracks_result(self):
        _, state = vad_decide(5.0, VadState())
        assert state.is_speech
        _, state = vad_decide(-5.0, VadState())
        assert not state.is_speech


class TestUpdateNoise:
    def test_fixed_point(self):
        est = NoiseEstimate(psd=np.ones(8), initialized=True)
        out = update_noise(est, flat_frame(1.0), is_speech=False)
        np.testing.assert_allclose(out.psd, 1.0)

    def test_noise_frame_blend(self):
        est = NoiseEstimate(psd=np.ones(8), initialized=True)
        out = update_noise(est, flat_frame(np.sqrt(2.0)), is_speech=False)
        np.testing.assert_allclose(out.psd, 1.02)

    def test_frozen_during_speech(self):
        est = NoiseEstimate(psd=np.ones(8), initialized=True)
        out = update_noise(est, flat_frame(10.0), is_speech=True)
        np.testing.assert_allclose(out.psd, 1.0)

    def test_requires_init(self):
        est = NoiseEstimate(psd=np.ones(8), initialized=False)
        with pytest.raises(NotInitialized):
            update_noise(est, flat_frame(1.0), is_speech=False)

    def test_floor_and_finiteness_under_arbitrary_streams(self, rng):
        est = init_noise([flat_frame(0.0)])
        vad = VadState()
        for _ in range(300):
            mag = rng.choice([0.0, 1e-9, 1.0, 1e6]) * rng.uniform(0, 1, size=8)
            f = frame_of(mag.astype(complex))
            xi = np.maximum(np.abs(f.bins) ** 2 / est.psd - 1.0, 0.0)
            speech, vad = vad_decide(vad_statistic(f, est, xi), vad)
            est = update_noise(est, f, speech)
            assert np.all(est.psd >= PSD_FLOOR)
            assert np.all(np.isfinite(est.psd))


class TestConvergence:
    def test_psd_converges_on_stationary_white_noise(self):
        # no speech at all: after 500 frames psd within +-3 dB of truth
        from sgse.stft import StftConfig, analyze

        fs = 16000
        cfg = StftConfig.for_rate(fs)
        rng = np.random.default_rng(7)
        sigma = 0.1
        x = sigma * rng.standard_normal(520 * cfg.hop + cfg.frame_len)
        frames = analyze(x, cfg)
        est = init_noise(frames[:20])
        vad = VadState()
        for f in frames[20:520]:
            xi = np.maximum(np.abs(f.bins) ** 2 / est.psd - 1.0, 0.0)
            speech, vad = vad_decide(vad_statistic(f, est, xi), vad)
            est = update_noise(est, f, speech)
        true_power = sigma**2 * np.sum(cfg.window_array**2)
        ratio_db = 10 * np.log10(est.psd / true_power)
        assert np.mean(np.abs(ratio_db) <= 3.0) >= 0.95
