import numpy as np
import pytest

from sgse.errors import ConfigMismatch, NotInitialized
from sgse.gains import (
    GainParams,
    NOISE_PRESETS,
    SNR_FLOOR,
    SnrState,
    apply_gain,
    decision_directed_xi,
    jmap_gain,
    jmap_gain_raw,
    posterior_snr,
    proposed_gain,
    sgjmap_gain,
    sgjmap_gain_raw,
    tradeoff_gain_raw,
)
from sgse.noise import NoiseEstimate
from sgse.stft import SpectralFrame


def grid(lo=1e-3, hi=1e3, n=30):
    return np.logspace(np.log10(lo), np.log10(hi), n)


class TestGainParams:
    def test_defaults_match_published_values(self):
        p = GainParams()
        assert (p.beta, p.mu, p.nu) == (1.0, 1.74, 0.126)

    @pytest.mark.parametrize(
        "field,raw,expect",
        [("beta", 0.01, 0.1), ("beta", 9.0, 5.0), ("mu", 0.1, 0.5), ("mu", 4.0, 3.0),
         ("nu", 0.0, 0.01), ("nu", 2.0, 1.0)],
    )
    def test_clamping(self, field, raw, expect):
        p = GainParams(**{field: raw})
        assert getattr(p, field) == expect

    def test_presets(self):
        assert NOISE_PRESETS == {
            "babble": (2.5, 1.0),
            "machinery": (2.0, 0.9),
            "traffic": (1.75, 0.75),
        }
        p = GainParams.for_preset("babble", beta=2.0)
        assert (p.beta, p.mu, p.nu) == (2.0, 2.5, 1.0)

    def test_floor_validation(self):
        with pytest.raises(ValueError):
            GainParams(gain_floor=1.0)


class TestPosteriorSnr:
    def setup_method(self):
        self.noise = NoiseEstimate(psd=np.ones(4), initialized=True)

    def frame(self, mag):
        return SpectralFrame(bins=np.full(4, mag, dtype=complex))

    def test_definition(self):
        np.testing.assert_allclose(posterior_snr(self.frame(2.0), self.noise), 4.0)

    def test_floor(self):
        np.testing.assert_allclose(posterior_snr(self.frame(0.0), self.noise), SNR_FLOOR)

    def test_unity(self):
        np.testing.assert_allclose(posterior_snr(self.frame(1.0), self.noise), 1.0)

    def test_requires_init(self):
        with pytest.raises(NotInitialized):
            posterior_snr(self.frame(1.0), NoiseEstimate(psd=np.ones(4)))


class TestDecisionDirectedXi:
    def test_first_frame_instantaneous_branch(self):
        state = SnrState.fresh(4)
        noise = NoiseEstimate(psd=np.ones(4), initialized=True)
        xi = decision_directed_xi(state, noise, np.full(4, 5.0))
        np.testing.assert_allclose(xi, 0.08)

    def test_memory_branch(self):
        state = SnrState.fresh(4)
        state.prev_amp = np.ones(4)
        noise = NoiseEstimate(psd=np.ones(4), initialized=True)
        xi = decision_directed_xi(state, noise, np.ones(4))
        np.testing.assert_allclose(xi, 0.98)

    def test_floor_engages(self):
        state = SnrState.fresh(4)
        noise = NoiseEstimate(psd=np.ones(4), initialized=True)
        xi = decision_directed_xi(state, noise, np.full(4, 0.5))
        np.testing.assert_allclose(xi, SNR_FLOOR)


class TestGainRules:
    def test_sgjmap_published_point(self):
        # oracle: direct evaluation of the closed form
        g = sgjmap_gain_raw(1.0, 1.0, 1.74, 0.126)
        assert g == pytest.approx(0.3242778432492835, abs=1e-12)

    def test_sgjmap_high_snr_passthrough(self):
        g = sgjmap_gain_raw(1e6, 1e6, 1.74, 1e-12)
        assert g == pytest.approx(1.0, abs=1e-3)

    def test_sgjmap_degenerate_identity(self):
        # mu = nu = 0 sits below the clamp range; raw formula only
        assert sgjmap_gain_raw(1.0, 1.0, 0.0, 0.0) == pytest.approx(1.0, abs=0)

    def test_proposed_reduces_to_sgjmap_at_beta_one(self):
        g1 = tradeoff_gain_raw(1.0, 1.0, 1.0, 1.74, 0.126)
        assert g1 == pytest.approx(0.3242778432492835, abs=1e-12)

    def test_proposed_beta_two_point(self):
        # oracle: direct evaluation; pre-floor value, then the floor engages
        g = tradeoff_gain_raw(1.0, 1.0, 2.0, 1.74, 0.126)
        assert g == pytest.approx(0.03855088906108156, abs=1e-12)
        floored = proposed_gain(np.array([1.0]), np.array([1.0]), GainParams(beta=2.0))
        assert floored[0] == 0.1

    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0, 5.0])
    def test_proposed_high_snr_limit(self, beta):
        g = tradeoff_gain_raw(1e12, 1e12, beta, 1.74, 0.126)
        assert g == pytest.approx(1.0 / beta, abs=1e-5)

    def test_jmap_published_point(self):
        assert jmap_gain_raw(1.0, 1.0) == pytest.approx(0.6830127018922193, abs=1e-12)

    def test_jmap_high_snr(self):
        assert jmap_gain_raw(1e12, 1e12) == pytest.approx(1.0, abs=1e-5)

    def test_jmap_deep_noise_hits_floor(self):
        g = jmap_gain(np.array([1e-6]), np.array([1.0]))
        assert g[0] == pytest.approx(0.1, abs=0)

    def test_floor_and_cap_applied(self):
        xi = np.array([1e-6, 1e12])
        gamma = np.array([1.0, 1e12])
        g = proposed_gain(xi, gamma, GainParams(beta=0.1, gain_cap=5.0))
        assert g[0] == 0.1
        assert g[1] == 5.0


class TestApplyGain:
    def test_identity(self):
        f = SpectralFrame(bins=np.array([1 + 1j, 2 - 3j]), frame_index=4)
        out = apply_gain(f, np.ones(2))
        np.testing.assert_array_equal(out.bins, f.bins)
        assert out.frame_index == 4

    def test_scalar_multiply_preserves_phase(self):
        f = SpectralFrame(bins=np.array([4 + 4j]))
        out = apply_gain(f, np.array([0.5]))
        np.testing.assert_allclose(out.bins, [2 + 2j])
        assert np.angle(out.bins[0]) == pytest.approx(np.pi / 4)

    def test_mismatch(self):
        f = SpectralFrame(bins=np.zeros(4, dtype=complex))
        with pytest.raises(ConfigMismatch):
            apply_gain(f, np.ones(3))


class TestProperties:
    def test_beta_one_reduction_on_grid(self):
        xi, gamma = np.meshgrid(grid(), grid())
        for mu in np.linspace(0.5, 3.0, 5):
            for nu in np.linspace(0.01, 1.0, 5):
                ref = sgjmap_gain_raw(xi, gamma, mu, nu)
                got = tradeoff_gain_raw(xi, gamma, 1.0, mu, nu)
                assert np.max(np.abs(got - ref) / ref) < 1e-12

    def test_quadratic_root_residual(self):
        # substitute the closed form back into the normalized quadratic
        xi, gamma = np.meshgrid(grid(), grid())
        for beta in (0.1, 0.5, 1.0, 2.0, 5.0):
            for mu, nu in ((0.5, 0.01), (1.74, 0.126), (3.0, 1.0)):
                g = tradeoff_gain_raw(xi, gamma, beta, mu, nu)
                c = mu / (4.0 * np.sqrt(gamma * xi))
                residual = g**2 + g * (2 * c - 1.0 / beta) - nu / (2 * gamma * beta**2)
                assert np.max(np.abs(residual)) < 1e-9

    def test_strictly_decreasing_in_beta(self, rng):
        xi = rng.uniform(1e-3, 1e3, size=2000)
        gamma = rng.uniform(1e-3, 1e3, size=2000)
        mu = rng.uniform(0.5, 3.0, size=2000)
        nu = rng.uniform(0.01, 1.0, size=2000)
        prev = None
        for beta in (0.1, 0.5, 1.0, 2.0, 5.0):
            g = tradeoff_gain_raw(xi, gamma, beta, mu, nu)
            if prev is not None:
                assert np.all(g < prev)
            prev = g

    def test_positive_whenever_nu_positive(self, rng):
        xi = rng.uniform(1e-6, 1e3, size=5000)
        gamma = rng.uniform(1e-6, 1e3, size=5000)
        g = tradeoff_gain_raw(xi, gamma, 5.0, 3.0, 0.01)
        assert np.all(g > 0)

    def test_all_rules_monotone_in_xi(self):
        gammas = grid(n=15)
        xis = grid(n=200)
        for gamma in gammas:
            for fn in (
                lambda x: sgjmap_gain_raw(x, gamma, 1.74, 0.126),
                lambda x: tradeoff_gain_raw(x, gamma, 2.0, 1.74, 0.126),
                lambda x: jmap_gain_raw(x, gamma),
            ):
                vals = fn(xis)
                assert np.all(np.diff(vals) >= -1e-12)
