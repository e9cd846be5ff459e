import math

import numpy as np
import pytest
from scipy.stats import ks_2samp, levy_stable, norm

from medclip import (
    CauchyNoise,
    GaussianNoise,
    IndependentOracle,
    LevyStableNoise,
    LipschitzOracle,
    MixtureNoise,
    ParameterError,
    TailSpec,
    ZeroNoise,
    sample_cauchy,
    sample_levy_stable,
    sample_mixture,
)
from medclip.noise import stable_gamma

N = 100_000


def rng(seed=0):
    return np.random.default_rng(seed)


class TestTailSpec:
    def test_validation(self):
        with pytest.raises(ParameterError):
            TailSpec(kappa=0.0, delta=1.0, gamma=1.0)
        with pytest.raises(ParameterError):
            TailSpec(kappa=1.0, delta=-1.0, gamma=1.0)

    def test_gamma_floor(self):
        # (1/pi)^(1/kappa) is the normalization floor of the density envelope
        with pytest.raises(ParameterError):
            TailSpec(kappa=1.0, delta=1.0, gamma=0.9 / math.pi)
        TailSpec(kappa=1.0, delta=1.0, gamma=1.0 / math.pi)  # boundary is fine


class TestCauchy:
    def test_scale_validation(self):
        with pytest.raises(ParameterError):
            sample_cauchy(0.0, rng())
        with pytest.raises(ParameterError):
            CauchyNoise(scale=-1.0)

    def test_density_at_zero_scale3(self):
        # p(0) = 1/(3 pi) ~ 0.1061 for the scale-3 density
        x = sample_cauchy(3.0, rng(1), N)
        width = 0.3
        emp = np.mean(np.abs(x) < width / 2) / width
        assert emp == pytest.approx(1.0 / (3.0 * math.pi), rel=0.06)

    def test_empirical_median(self):
        x = sample_cauchy(1.0, rng(2), N)
        assert abs(np.median(x)) < 0.02

    def test_tail_mass_beyond_scale(self):
        # P(|X| > scale) = 1 - (2/pi) arctan(1) = 1/2 exactly
        x = sample_cauchy(3.0, rng(3), N)
        expected = 1.0 - 2.0 / math.pi * math.atan(1.0)
        assert np.mean(np.abs(x) > 3.0) == pytest.approx(expected, abs=0.01)


class TestLevyStable:
    def test_alpha_validation(self):
        for alpha in (0.0, -0.5, 2.5):
            with pytest.raises(ParameterError):
                sample_levy_stable(alpha, rng())

    def test_alpha2_gaussian_variance(self):
        # scale-1 stable at alpha=2 is N(0, 2); variance stable across seeds
        v1 = np.var(sample_levy_stable(2.0, rng(4), N))
        v2 = np.var(sample_levy_stable(2.0, rng(5), N))
        assert v1 == pytest.approx(2.0, rel=0.05)
        assert v2 == pytest.approx(2.0, rel=0.05)

    def test_alpha1_matches_cauchy_quartiles(self):
        x = sample_levy_stable(1.0, rng(6), N)
        q25, q75 = np.percentile(x, [25, 75])
        assert q25 == pytest.approx(-1.0, abs=0.05)
        assert q75 == pytest.approx(1.0, abs=0.05)

    def test_alpha_075_mean_diverges(self):
        # no first moment: the running mean of |X| grows with the sample size
        x = np.abs(sample_levy_stable(0.75, rng(7), N))
        m_small = np.mean(x[:1000])
        m_full = np.mean(x)
        assert m_full > 3.0 * m_small

    def test_tail_spec(self):
        t = LevyStableNoise(alpha=1.0, scale=2.0).tail
        assert t.kappa == 1.0
        assert t.delta == pytest.approx(2.0 / math.pi)


class TestStableGamma:
    def test_alpha1_exact(self):
        assert stable_gamma(1.0) == pytest.approx(1.0 / math.pi, abs=1e-9)

    @pytest.mark.parametrize("alpha", [0.5, 1.5])
    def test_matches_scipy_envelope(self, alpha):
        # gamma^alpha = sup_u p(u) (1 + |u|^{1+alpha}) for the scale-1 density
        us = np.concatenate([np.linspace(0, 20, 2001), np.logspace(np.log10(20), 4, 400)])
        p = levy_stable.pdf(us, alpha, 0.0)
        sup = float(np.max(p * (1 + np.abs(us) ** (1 + alpha))))
        assert stable_gamma(alpha) == pytest.approx(sup ** (1 / alpha), rel=0.01)

    def test_gaussian_envelope(self):
        us = np.linspace(0, 30, 3001)
        p = norm.pdf(us, scale=math.sqrt(2.0))
        sup = float(np.max(p * (1 + np.abs(us) ** 3)))
        assert stable_gamma(2.0) == pytest.approx(math.sqrt(sup), rel=0.01)

    def test_all_values_above_floor(self):
        for alpha in (0.5, 0.75, 1.0, 1.25, 1.5, 2.0):
            assert stable_gamma(alpha) >= (1 / math.pi) ** (1 / alpha) * (1 - 1e-9)


@pytest.mark.parametrize(
    "dist",
    [
        CauchyNoise(1.0),
        CauchyNoise(3.0),
        LevyStableNoise(0.75),
        LevyStableNoise(1.0),
        LevyStableNoise(1.5),
        LevyStableNoise(2.0),
        GaussianNoise(1.0),
    ],
    ids=lambda d: f"{type(d).__name__}",
)
def test_symmetry_ks(dist):
    # two-sample KS statistic between X and -X stays within 0.02
    x = np.asarray(dist.sample(rng(8), N))
    assert ks_2samp(x, -x).statistic <= 0.02


def test_seed_determinism():
    for dist in (CauchyNoise(2.0), LevyStableNoise(0.75), GaussianNoise()):
        a = dist.sample(rng(9), 1000)
        b = dist.sample(rng(9), 1000)
        np.testing.assert_array_equal(a, b)


class TestMixture:
    def test_weight_validation(self):
        with pytest.raises(ParameterError):
            MixtureNoise(1.5, CauchyNoise(), GaussianNoise())

    def test_pure_symmetric_at_w1(self):
        mix = MixtureNoise(1.0, CauchyNoise(2.0), GaussianNoise())
        a = sample_mixture(mix, rng(10), 1000)
        b = CauchyNoise(2.0).sample(rng(10), 1000)
        # same stream consumption for the symmetric part, zero asym weight
        np.testing.assert_allclose(a, b)

    def test_w0_absolute_normal(self):
        mix = MixtureNoise(0.0, CauchyNoise(1.0), GaussianNoise())
        x = sample_mixture(mix, rng(11), 1000)
        assert np.all(x >= 0)

    def test_positive_median_at_half(self):
        mix = MixtureNoise(0.5, LevyStableNoise(1.0), LevyStableNoise(1.0))
        x = sample_mixture(mix, rng(12), N)
        assert np.median(x) > 0.05


class TestIndependentOracle:
    def test_zero_noise_exact(self):
        f = lambda x: float(np.sum(x**2))
        o = IndependentOracle(f, ZeroNoise())
        fx, fy = o.eval_pair(np.array([1.0, 2.0]), np.array([0.0, 1.0]), rng())
        assert fx == 5.0 and fy == 1.0

    def test_difference_is_cauchy_scale2(self):
        # f == 0, unit Cauchy per point: difference is Cauchy with scale 2
        o = IndependentOracle(lambda x: 0.0, CauchyNoise(1.0))
        x = np.zeros(2)
        fx, fy = o.eval_pairs(x, x, N, rng(13))
        diff = fx - fy
        assert abs(np.median(diff)) < 0.03
        q75 = np.percentile(diff, 75)
        assert q75 == pytest.approx(2.0, rel=0.05)  # Cauchy addition law
        assert o.delta == pytest.approx(2.0 / math.pi)

    def test_same_point_still_noisy(self):
        o = IndependentOracle(lambda x: 0.0, CauchyNoise(1.0))
        fx, fy = o.eval_pairs(np.zeros(1), np.zeros(1), 100, rng(14))
        assert np.any(fx != fy)


class TestLipschitzOracle:
    def test_shared_realization_zero_difference(self):
        o = LipschitzOracle(lambda x: 1.0, CauchyNoise(1.0), dim=3)
        x = np.array([0.3, -0.2, 1.0])
        fx, fy = o.eval_pairs(x, x, 200, rng(15))
        np.testing.assert_array_equal(fx, fy)

    def test_zero_noise_exact(self):
        f = lambda x: float(np.sum(x))
        o = LipschitzOracle(f, ZeroNoise(), dim=2)
        fx, fy = o.eval_pair(np.array([1.0, 2.0]), np.array([3.0, 4.0]), rng())
        assert fx == 3.0 and fy == 7.0

    def test_difference_scale_additive_law(self):
        # difference noise of iid unit-Cauchy components is Cauchy with scale
        # ||x - y||_1 <= sqrt(d) ||x - y||_2 (the exposed delta bound)
        d = 4
        o = LipschitzOracle(lambda x: 0.0, CauchyNoise(1.0), dim=d)
        x = np.array([0.5, -1.0, 0.25, 2.0])
        y = np.array([0.0, 1.0, 0.25, -1.0])
        fx, fy = o.eval_pairs(x, y, N, rng(16))
        diff = fx - fy
        scale_emp = np.percentile(diff, 75)
        assert scale_emp == pytest.approx(np.sum(np.abs(x - y)), rel=0.05)
        # envelope contract: gamma * B(x, y) <= delta * ||x - y||_2
        gamma = o.noise.tail.gamma
        assert gamma * scale_emp <= o.delta * np.linalg.norm(x - y) * 1.05
        assert o.delta == pytest.approx(math.sqrt(d) / math.pi)

    def test_correlation_matrix_shape_checked(self):
        with pytest.raises(ParameterError):
            LipschitzOracle(lambda x: 0.0, CauchyNoise(), dim=3, correlation=np.eye(2))

    def test_difference_tail_shrinks_with_distance(self):
        o = LipschitzOracle(lambda x: 0.0, CauchyNoise(1.0), dim=2)
        near = o.difference_tail(np.zeros(2), np.full(2, 1e-6))
        far = o.difference_tail(np.zeros(2), np.full(2, 1.0))
        assert near.delta < far.delta
