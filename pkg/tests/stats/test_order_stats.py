import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate
from scipy import stats as sps

from bobtaillab.core import DomainError
from bobtaillab.stats import (
    IntervalCountSample,
    MiningParams,
    OrderStatSample,
    estimator_y,
    finite_order_stat_pdf,
    sample_interval_counts,
    sample_order_stats,
    sample_order_stats_matrix,
    sample_sorted_uniforms,
)


@pytest.mark.parametrize("k", [1, 3, 10])
def test_kth_order_statistic_is_gamma(k: int, rng: np.random.Generator) -> None:
    v_k = sample_order_stats_matrix(k, 2.0, 40_000, rng)[:, k - 1]
    result = sps.kstest(v_k, sps.gamma(k, scale=2.0).cdf)
    assert result.statistic < 0.015
    assert result.pvalue > 1e-4


def test_matches_sorted_uniform_oracle(rng: np.random.Generator) -> None:
    k, h = 4, 2_000
    spacings = sample_order_stats_matrix(k, 1.0, 20_000, rng)[:, k - 1]
    oracle = np.array([sample_sorted_uniforms(h, k, float(h), rng)[k - 1] for _ in range(3_000)])
    result = sps.ks_2samp(spacings, oracle)
    assert result.pvalue > 0.001


def test_matrix_rows_are_ascending(rng: np.random.Generator) -> None:
    matrix = sample_order_stats_matrix(6, 1.0, 500, rng)
    assert matrix.shape == (500, 6)
    assert np.all(np.diff(matrix, axis=1) > 0)


def test_sorted_uniforms_are_the_lowest(rng: np.random.Generator) -> None:
    values = sample_sorted_uniforms(100, 5, 1.0, rng)
    assert len(values) == 5
    assert np.all(np.diff(values) >= 0)
    assert np.all((0.0 <= values) & (values <= 1.0))


def test_single_samples(rng: np.random.Generator) -> None:
    params = MiningParams.unit(5, r=2.0)
    sample = sample_order_stats(params, rng)
    assert sample.k == 5
    assert sample.w_k == pytest.approx(sum(sample.values) / 5)
    counts = sample_interval_counts(params, rng)
    assert counts.y_k == pytest.approx(2 / 6 * sum(counts.x) / 5)


def test_estimator_y() -> None:
    sample = IntervalCountSample.from_counts([1.0, 2.0, 3.0])
    assert estimator_y(sample) == pytest.approx(2 / 4 * 2.0)
    assert sample.normalized == (1.0, 1.0, 1.0)


def test_unsorted_sample_is_rejected() -> None:
    with pytest.raises(ValidationError):
        OrderStatSample(values=(2.0, 1.0))


@pytest.mark.parametrize("i", [1, 3, 10])
def test_finite_density_matches_beta(i: int) -> None:
    h, S = 50, 10.0
    for t in (0.1, 1.0, 4.0):
        assert finite_order_stat_pdf(t, i, S, h) == pytest.approx(sps.beta(i, h - i + 1).pdf(t / S) / S, rel=1e-9)
    total, _ = integrate.quad(lambda t: finite_order_stat_pdf(t, i, S, h), 0.0, S, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_sampler_domain_errors(rng: np.random.Generator) -> None:
    with pytest.raises(DomainError):
        sample_order_stats_matrix(0, 1.0, 10, rng)
    with pytest.raises(DomainError):
        sample_sorted_uniforms(3, 5, 1.0, rng)
