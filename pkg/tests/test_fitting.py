"""
Tests for maximum likelihood fitting.
"""

import math

import numpy as np
import pytest
from scipy import stats

from hoover_engine.bias.fitting import (
    DegenerateSampleError,
    FittingError,
    fit_gamma_ml,
    fit_geometric_ml,
    fit_ml,
    fit_poisson_ml,
    gamma_loglik,
)
from hoover_engine.core.distributions import DistributionSpec, Family, Seed, density, sample
from hoover_engine.core.estimators import Sample
from hoover_engine.core.specnum import DomainError, NonConvergenceError, digamma, trigamma


# --- Test Data Fixtures ---

@pytest.fixture
def gamma_sample():
    """100 000 draws from Gamma(2, 1)."""
    return Sample(sample(DistributionSpec.gamma(2.0), 100_000, Seed(21)))


@pytest.fixture
def small_gamma_sample():
    """A short positive sample."""
    return Sample.of([0.4, 1.1, 2.7, 0.9, 3.3, 1.8])


class TestGammaFit:
    """Shape and rate by maximum likelihood."""

    def test_recovers_shape(self, gamma_sample):
        """α̂ within 5 asymptotic SE of the true α = 2."""
        alpha = 2.0
        se = math.sqrt(alpha / (gamma_sample.n * (alpha * trigamma(alpha) - 1.0)))
        fit = fit_gamma_ml(gamma_sample)
        assert abs(fit.spec.alpha - alpha) < 5 * se

    def test_rate_from_mean(self, small_gamma_sample):
        """λ̂ · X̄ = α̂."""
        fit = fit_gamma_ml(small_gamma_sample)
        assert fit.spec.rate * small_gamma_sample.mean == pytest.approx(fit.spec.alpha, rel=1e-12)

    def test_score_is_zero(self, small_gamma_sample):
        """ln α̂ - ψ(α̂) = ln X̄ - mean(ln X) to the tolerance."""
        fit = fit_gamma_ml(small_gamma_sample)
        spread = math.log(small_gamma_sample.mean) - float(np.mean(np.log(small_gamma_sample.values)))
        assert abs(math.log(fit.spec.alpha) - digamma(fit.spec.alpha) - spread) <= 1e-10

    def test_local_maximum(self, small_gamma_sample):
        """The profile likelihood is lower either side of α̂."""
        fit = fit_gamma_ml(small_gamma_sample)
        alpha = fit.spec.alpha
        assert fit.loglik == pytest.approx(gamma_loglik(alpha, small_gamma_sample), rel=1e-14)
        assert fit.loglik >= gamma_loglik(alpha * 1.01, small_gamma_sample)
        assert fit.loglik >= gamma_loglik(alpha * 0.99, small_gamma_sample)

    @pytest.mark.parametrize("alpha", [0.7, 2.0, 5.0])
    def test_profile_loglik_matches_density(self, alpha, small_gamma_sample):
        """Profile log-likelihood = Σ log f(x_i) under Gamma(α, α/X̄)."""
        spec = DistributionSpec.gamma(alpha, rate=alpha / small_gamma_sample.mean)
        expected = float(np.sum(np.log(density(spec, small_gamma_sample.values))))
        assert gamma_loglik(alpha, small_gamma_sample) == pytest.approx(expected, rel=1e-10)

    def test_grid_argmax(self, small_gamma_sample):
        """α̂ agrees with a dense grid search."""
        fit = fit_gamma_ml(small_gamma_sample)
        grid = np.linspace(0.5 * fit.spec.alpha, 1.5 * fit.spec.alpha, 2001)
        values = [gamma_loglik(a, small_gamma_sample) for a in grid]
        step = grid[1] - grid[0]
        assert abs(grid[int(np.argmax(values))] - fit.spec.alpha) <= step

    def test_deterministic(self, small_gamma_sample):
        """Same sample, same fit."""
        assert fit_gamma_ml(small_gamma_sample) == fit_gamma_ml(small_gamma_sample)

    def test_scale_equivariant_shape(self, small_gamma_sample):
        """Rescaling the data leaves α̂ unchanged."""
        a = fit_gamma_ml(small_gamma_sample).spec.alpha
        b = fit_gamma_ml(small_gamma_sample.scaled(1000.0)).spec.alpha
        assert b == pytest.approx(a, rel=1e-9)

    def test_zero_value(self):
        """Gamma likelihood needs strictly positive data."""
        with pytest.raises(DomainError):
            fit_gamma_ml(Sample.of([0.0, 1.0, 2.0]))

    def test_constant_sample(self):
        """No finite maximizer for a constant sample."""
        with pytest.raises(DegenerateSampleError):
            fit_gamma_ml(Sample.of([2.5, 2.5, 2.5]))

    def test_iteration_limit(self, small_gamma_sample):
        """An unreachable tolerance exhausts the iterations."""
        with pytest.raises(NonConvergenceError):
            fit_gamma_ml(small_gamma_sample, tol=0.0, max_iter=1)


class TestDiscreteFits:
    """Closed-form fits."""

    def test_poisson(self):
        """λ̂ = X̄."""
        fit = fit_poisson_ml(Sample.of([0, 1, 2, 3]))
        assert fit.spec == DistributionSpec.poisson(1.5)

    def test_poisson_constant(self):
        """A constant non-zero sample is fine for Poisson."""
        assert fit_poisson_ml(Sample.of([5, 5, 5])).spec.rate == 5.0

    def test_poisson_loglik(self):
        """Σ log pmf at λ̂."""
        values = [0, 1, 2, 3]
        fit = fit_poisson_ml(Sample.of(values))
        assert fit.loglik == pytest.approx(float(np.sum(stats.poisson.logpmf(values, 1.5))), rel=1e-12)

    def test_geometric(self):
        """p̂ = 1 / (1 + X̄)."""
        assert fit_geometric_ml(Sample.of([0, 2])).spec.p == 0.5
        assert fit_geometric_ml(Sample.of([3, 3])).spec.p == 0.25

    @pytest.mark.parametrize("fit", [fit_poisson_ml, fit_geometric_ml])
    def test_all_zero(self, fit):
        """All zeros have no valid fit."""
        with pytest.raises(DegenerateSampleError) as info:
            fit(Sample.of([0, 0, 0]))
        assert isinstance(info.value, FittingError)
        assert info.value.to_dict()["field"] == "sample"

    @pytest.mark.parametrize("fit", [fit_poisson_ml, fit_geometric_ml])
    def test_non_integer(self, fit):
        """Discrete families need integer data."""
        with pytest.raises(DomainError):
            fit(Sample.of([0.5, 2.0]))


class TestFitDispatch:
    """fit_ml routes by the named family."""

    def test_routes(self, small_gamma_sample):
        """Each family reaches its own fitter."""
        assert fit_ml(small_gamma_sample, Family.GAMMA).spec.family is Family.GAMMA
        counts = Sample.of([1, 4, 2])
        assert fit_ml(counts, Family.POISSON).spec.family is Family.POISSON
        assert fit_ml(counts, Family.GEOMETRIC).spec.family is Family.GEOMETRIC

    def test_fit_dict(self, small_gamma_sample):
        """Serialized fit carries the parameters."""
        data = fit_ml(small_gamma_sample, Family.GAMMA).to_dict()
        assert set(data["params"]) == {"alpha", "rate"}
        assert data["converged"] is True
