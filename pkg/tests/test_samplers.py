import math

import numpy as np
import pytest

from hetwishart import (
    Bernoulli,
    Bounded,
    Gaussian,
    HeavyTail,
    ParameterError,
    SampleSeed,
    ScaledRademacher,
    VarianceProfile,
    expected_gram,
    heavy_tail_scale,
    homoskedastic_rows,
    kappa,
    sample,
)
from hetwishart.samplers import model_from_json_dict, model_to_json_dict

ALL_SIMPLE_MODELS = [Gaussian(), ScaledRademacher(), Bounded(B=5.0), HeavyTail(b=2.0)]


@pytest.mark.parametrize("model", ALL_SIMPLE_MODELS)
def test_zero_profile_gives_zero_matrix(model):
    prof = VarianceProfile(np.zeros((3, 4)))
    assert np.array_equal(sample(prof, model, SampleSeed(1, 0)), np.zeros((3, 4)))


def test_bernoulli_degenerate_theta_gives_zero_matrix():
    prof = VarianceProfile(np.zeros((2, 2)))
    theta = np.array([[0.0, 1.0], [1.0, 0.0]])
    Z = sample(prof, Bernoulli(theta=theta), SampleSeed(1, 0))
    assert np.array_equal(Z, np.zeros((2, 2)))


@pytest.mark.parametrize("model", ALL_SIMPLE_MODELS + [Bernoulli(theta=np.full((3, 4), 0.3))])
def test_determinism_bitwise(model):
    prof = VarianceProfile(np.full((3, 4), 0.5))
    a = sample(prof, model, SampleSeed(12345, 7))
    b = sample(prof, model, SampleSeed(12345, 7))
    assert np.array_equal(a, b)
    c = sample(prof, model, SampleSeed(12345, 8))
    assert not np.array_equal(a, c)


def test_law_of_large_numbers_gaussian():
    prof = VarianceProfile(np.ones((1000, 1000)))
    Z = sample(prof, Gaussian(), SampleSeed(2718, 0))
    assert 0.99 <= float((Z**2).mean()) <= 1.01


def test_mean_zero_each_model():
    prof = VarianceProfile(np.ones((400, 400)))
    for model in ALL_SIMPLE_MODELS:
        Z = sample(prof, model, SampleSeed(31, 0))
        se = float(Z.std()) / 400.0
        assert abs(float(Z.mean())) <= 5 * se


def test_variances_match_declaration():
    prof = VarianceProfile(np.full((500, 500), 0.7))
    n = 500 * 500
    for model in ALL_SIMPLE_MODELS:
        Z = sample(prof, model, SampleSeed(77, 0))
        second = float((Z**2).mean())
        spread = float((Z**2).std(ddof=1)) / math.sqrt(n)
        assert abs(second - 0.49) <= 5 * max(spread, 1e-6), model


def test_rademacher_is_exactly_scaled_signs():
    prof = VarianceProfile(np.full((50, 50), 0.25))
    Z = sample(prof, ScaledRademacher(), SampleSeed(5, 0))
    assert set(np.unique(Z)) == {-0.25, 0.25}


def test_bounded_respects_bound_and_constraint():
    prof = VarianceProfile(np.full((100, 100), 1.0))
    Z = sample(prof, Bounded(B=math.sqrt(3.0)), SampleSeed(6, 0))
    assert float(np.abs(Z).max()) <= math.sqrt(3.0)
    with pytest.raises(ParameterError):
        sample(prof, Bounded(B=1.0), SampleSeed(6, 0))


def test_bernoulli_support_and_dims():
    theta = np.full((20, 30), 0.3)
    prof = VarianceProfile(np.zeros((20, 30)))
    Z = sample(prof, Bernoulli(theta=theta), SampleSeed(8, 0))
    assert set(np.unique(Z)) <= {-0.3, 0.7}
    with pytest.raises(ParameterError):
        sample(VarianceProfile(np.zeros((5, 5))), Bernoulli(theta=theta), SampleSeed(8, 0))


def test_bernoulli_implied_profile():
    theta = np.array([[0.5, 0.1]])
    prof = Bernoulli(theta=theta).implied_profile()
    assert np.allclose(prof.sigma**2, theta * (1 - theta))


def test_heavy_tail_b1_is_bitwise_gaussian():
    prof = VarianceProfile(np.random.default_rng(0).uniform(0, 1, (30, 40)))
    seed = SampleSeed(99, 3)
    assert np.array_equal(sample(prof, HeavyTail(b=1.0), seed), sample(prof, Gaussian(), seed))


def test_heavy_tail_scale_values():
    assert heavy_tail_scale(1.0) == 1.0
    assert heavy_tail_scale(2.0) == pytest.approx(1.0, rel=1e-12)
    assert heavy_tail_scale(3.0) == pytest.approx(math.sqrt(3.0), rel=1e-12)


def test_independence_smoke():
    # empirical covariance of two distinct entries across replicates
    prof = VarianceProfile(np.ones((2, 2)))
    n = 2000
    a = np.empty(n)
    b = np.empty(n)
    for r in range(n):
        Z = sample(prof, Gaussian(), SampleSeed(4242, r))
        a[r], b[r] = Z[0, 0], Z[1, 1]
    cov = float(np.mean(a * b) - a.mean() * b.mean())
    assert abs(cov) <= 5.0 / math.sqrt(n)


def test_expected_gram_examples():
    assert np.array_equal(expected_gram(homoskedastic_rows(np.ones(3), 5), Gaussian()), 5.0 * np.eye(3))
    assert np.array_equal(expected_gram(VarianceProfile(np.zeros((2, 3))), Gaussian()), np.zeros((2, 2)))
    theta = np.full((3, 4), 0.5)
    gram = expected_gram(VarianceProfile(np.zeros((3, 4))), Bernoulli(theta=theta))
    assert np.allclose(gram, np.eye(3))


def test_kappa_documented_constants():
    assert kappa(Gaussian()) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)
    assert kappa(ScaledRademacher()) == 1.0
    assert kappa(Bounded(B=2.0)) == pytest.approx(math.sqrt(3) / 2, rel=1e-12)
    assert kappa(HeavyTail(b=1.0)) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-3)
    # symmetric Bernoulli standardizes to +-1, i.e. a Rademacher variable
    assert kappa(Bernoulli(theta=np.full((2, 2), 0.5))) == pytest.approx(1.0, rel=1e-6)
    # the q = 2 floor applies to the psi_2 families (exponent q^(-1/2));
    # HeavyTail uses the tail-matched exponent q^(-b/2) and can sit lower
    for model in (Gaussian(), ScaledRademacher(), Bounded(B=5.0)):
        assert kappa(model) >= 1 / math.sqrt(2) - 1e-9


def test_model_json_round_trip():
    models = ALL_SIMPLE_MODELS + [Bernoulli(theta=np.array([[0.25, 0.5]]))]
    for model in models:
        back = model_from_json_dict(model_to_json_dict(model))
        assert type(back) is type(model)
    with pytest.raises(ParameterError):
        model_from_json_dict({"model": "cauchy"})
    with pytest.raises(ParameterError):
        HeavyTail(b=0.5)
