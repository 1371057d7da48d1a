"""
Tests for the special-function kernel.

Covers:
- Hand-derivable values of log-gamma, incomplete gamma/beta and digamma
- Complementarity, monotonicity and recurrence identities
- Finite and semi-infinite quadrature
- Series truncation and its tail estimate
- Tolerance configs and their environment overrides
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from hoover_engine.core.specnum import (
    DomainError,
    NonConvergenceError,
    QuadratureConfig,
    SeriesConfig,
    digamma,
    integrate_finite,
    integrate_semi_infinite,
    log_gamma,
    reg_gamma_lower,
    reg_gamma_upper,
    reg_inc_beta,
    sum_series,
    trigamma,
)
from hoover_engine.core.validation import ValidationError

EULER_GAMMA = 0.5772156649015329


# --- Special Functions ---

class TestSpecialFunctionValues:
    """Known values of the special functions."""

    def test_log_gamma_values(self):
        """Γ(1) = 1, Γ(1/2) = √π, Γ(6) = 120."""
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)
        assert log_gamma(6.0) == pytest.approx(math.log(120.0), rel=1e-13)

    def test_reg_gamma_lower_values(self):
        """P(1, x) = 1 - e^{-x}, P(a, 0) = 0, P(2, 2) = 1 - 3e^{-2}."""
        assert reg_gamma_lower(1.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-13)
        assert reg_gamma_lower(3.7, 0.0) == 0.0
        assert reg_gamma_lower(2.0, 2.0) == pytest.approx(1.0 - 3.0 * math.exp(-2.0), rel=1e-13)

    def test_reg_gamma_upper_values(self):
        """Q(1, x) = e^{-x}, Q(a, 0) = 1, Q(3, 2.5) by the finite Poisson tail."""
        assert reg_gamma_upper(1.0, 4.0) == pytest.approx(math.exp(-4.0), rel=1e-13)
        assert reg_gamma_upper(0.3, 0.0) == 1.0
        expected = math.exp(-2.5) * (1.0 + 2.5 + 3.125)
        assert reg_gamma_upper(3.0, 2.5) == pytest.approx(expected, rel=1e-13)

    def test_reg_inc_beta_values(self):
        """I_w(1,1) = w, I_0.5(2,2) = 0.5, I_x(1,b) = 1 - (1-x)^b."""
        assert reg_inc_beta(0.37, 1.0, 1.0) == pytest.approx(0.37, rel=1e-13)
        assert reg_inc_beta(0.5, 2.0, 2.0) == pytest.approx(0.5, rel=1e-13)
        assert reg_inc_beta(0.25, 1.0, 3.0) == pytest.approx(0.578125, rel=1e-13)

    def test_reg_inc_beta_endpoints(self):
        """I_0 = 0 and I_1 = 1."""
        assert reg_inc_beta(0.0, 2.5, 4.0) == 0.0
        assert reg_inc_beta(1.0, 2.5, 4.0) == 1.0

    def test_digamma_values(self):
        """ψ(1) = -γ, ψ(2) = 1 - γ, ψ(1/2) = -γ - 2 ln 2."""
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-10)
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-10)
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-10)

    def test_trigamma_value(self):
        """ψ'(1) = π²/6."""
        assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)

    def test_scalar_in_scalar_out(self):
        """Scalar input returns a Python float; arrays stay arrays."""
        assert isinstance(reg_gamma_upper(2.0, 1.0), float)
        values = reg_gamma_upper(2.0, np.array([0.5, 1.0, 2.0]))
        assert isinstance(values, np.ndarray)
        assert values.shape == (3,)


class TestSpecialFunctionDomain:
    """Invalid arguments raise DomainError."""

    @pytest.mark.parametrize("x", [0.0, -1.0, math.nan, math.inf])
    def test_log_gamma_rejects(self, x):
        """Non-positive or non-finite x is outside the domain."""
        with pytest.raises(DomainError):
            log_gamma(x)

    def test_incomplete_gamma_rejects(self):
        """Shape must be positive and x non-negative."""
        with pytest.raises(DomainError):
            reg_gamma_lower(0.0, 1.0)
        with pytest.raises(DomainError):
            reg_gamma_upper(1.0, -0.5)

    def test_incomplete_beta_rejects(self):
        """x outside [0, 1] or non-positive parameters."""
        with pytest.raises(DomainError):
            reg_inc_beta(1.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            reg_inc_beta(0.5, 0.0, 1.0)

    def test_digamma_rejects(self):
        """ψ is only evaluated for x > 0."""
        with pytest.raises(DomainError):
            digamma(-2.0)

    def test_domain_error_to_dict(self):
        """The error names the function."""
        with pytest.raises(DomainError) as info:
            log_gamma(-1.0)
        assert info.value.to_dict()["field"] == "log_gamma"


class TestSpecialFunctionIdentities:
    """Complementarity, monotonicity, recurrences and symmetry."""

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.floats(min_value=0.1, max_value=100.0),
        x=st.floats(min_value=0.0, max_value=200.0),
    )
    def test_complementarity(self, a, x):
        """P(a, x) + Q(a, x) = 1."""
        assert reg_gamma_lower(a, x) + reg_gamma_upper(a, x) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("a", [0.3, 1.0, 4.5, 30.0])
    def test_monotonicity(self, a):
        """P(a, ·) nondecreasing, Q(a, ·) nonincreasing, I_·(a, b) nondecreasing."""
        xs = np.linspace(0.0, 4.0 * a + 10.0, 400)
        assert np.all(np.diff(reg_gamma_lower(a, xs)) >= -1e-15)
        assert np.all(np.diff(reg_gamma_upper(a, xs)) <= 1e-15)
        ws = np.linspace(0.0, 1.0, 400)
        assert np.all(np.diff(reg_inc_beta(ws, a, 2.0)) >= -1e-15)

    @pytest.mark.parametrize("a", [0.5, 1.5, 3.0, 7.5])
    @pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 12.0])
    def test_upper_gamma_recurrence(self, a, x):
        """Γ(a+1, x) = aΓ(a, x) + x^a e^{-x}, in regularized form."""
        lhs = reg_gamma_upper(a + 1.0, x)
        rhs = reg_gamma_upper(a, x) + math.exp(a * math.log(x) - x - log_gamma(a + 1.0))
        assert lhs == pytest.approx(rhs, rel=1e-11)

    @pytest.mark.parametrize("x", [0.2, 1.0, 3.3, 50.0])
    def test_digamma_recurrence(self, x):
        """ψ(x + 1) = ψ(x) + 1/x."""
        assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x, abs=1e-10)

    @pytest.mark.parametrize("x,a,b", [(0.2, 2.0, 3.0), (0.7, 0.5, 5.0), (0.45, 10.0, 9.0)])
    def test_beta_symmetry(self, x, a, b):
        """I_x(a, b) = 1 - I_{1-x}(b, a)."""
        assert reg_inc_beta(x, a, b) == pytest.approx(1.0 - reg_inc_beta(1.0 - x, b, a), abs=1e-12)

    def test_log_gamma_matches_scipy_over_range(self):
        """Relative agreement on [1e-3, 1e6]."""
        xs = np.geomspace(1e-3, 1e6, 50)
        np.testing.assert_allclose(log_gamma(xs), special.gammaln(xs), rtol=1e-13)


# --- Quadrature ---

class TestIntegrateFinite:
    """Adaptive quadrature on a finite interval."""

    def test_exponential(self):
        """∫₀^50 e^{-x} dx = 1."""
        result = integrate_finite(lambda x: math.exp(-x), 0.0, 50.0)
        assert result.value == pytest.approx(1.0, abs=1e-10)

    def test_constant(self):
        """∫₀^1 1 dx = 1."""
        assert integrate_finite(lambda x: 1.0, 0.0, 1.0).value == pytest.approx(1.0, abs=1e-14)

    def test_polynomial(self):
        """∫₀^3 x² dx = 9."""
        result = integrate_finite(lambda x: x * x, 0.0, 3.0)
        assert result.value == pytest.approx(9.0, rel=1e-14)

    def test_error_estimate_within_tolerance(self):
        """err_est ≤ max(abs_tol, rel_tol·|value|) on convergence."""
        cfg = QuadratureConfig()
        result = integrate_finite(lambda x: math.sqrt(x), 0.0, 2.0, cfg)
        assert result.err_est <= max(cfg.abs_tol, cfg.rel_tol * abs(result.value))

    def test_endpoint_singularity(self):
        """∫₀^1 x^{-1/2} dx = 2."""
        result = integrate_finite(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0)
        assert result.value == pytest.approx(2.0, rel=1e-9)

    def test_subdivision_limit_reached(self):
        """A limit of one subinterval cannot resolve an oscillation."""
        cfg = QuadratureConfig(max_subdivisions=1)
        with pytest.raises(NonConvergenceError) as info:
            integrate_finite(lambda x: math.sin(200.0 * x), 0.0, 10.0, cfg)
        assert math.isfinite(info.value.estimate)

    def test_rejects_empty_interval(self):
        """lo must be below hi."""
        with pytest.raises(DomainError):
            integrate_finite(lambda x: x, 1.0, 1.0)


class TestIntegrateSemiInfinite:
    """Cutoff search and tail accounting."""

    def test_exponential(self):
        """∫₀^∞ e^{-x} dx = 1."""
        result = integrate_semi_infinite(lambda x: math.exp(-x), lambda w: math.exp(-w))
        assert result.value == pytest.approx(1.0, abs=1e-10)
        assert result.cutoff is not None

    def test_gamma_two_mass(self):
        """∫₀^∞ x e^{-x} dx = 1."""
        result = integrate_semi_infinite(lambda x: x * math.exp(-x), lambda w: (w + 1.0) * math.exp(-w))
        assert result.value == pytest.approx(1.0, abs=1e-10)

    def test_product_of_upper_gammas(self):
        """∫₀^∞ Q(1,w)² dw = ∫₀^∞ e^{-2w} dw = 0.5."""
        result = integrate_semi_infinite(
            lambda w: reg_gamma_upper(1.0, w) ** 2,
            lambda w: 0.5 * math.exp(-2.0 * w),
        )
        assert result.value == pytest.approx(0.5, abs=1e-8)

    def test_error_includes_tail(self):
        """The reported error is at least the tail bound at the cutoff."""
        result = integrate_semi_infinite(lambda x: math.exp(-x), lambda w: math.exp(-w))
        assert result.err_est >= math.exp(-result.cutoff)

    def test_no_cutoff_found(self):
        """A tail bound that never shrinks exhausts the cap."""
        cfg = QuadratureConfig(max_cutoff=1e3)
        with pytest.raises(NonConvergenceError):
            integrate_semi_infinite(lambda x: 1.0, lambda w: 1.0, cfg)


# --- Series ---

class TestSumSeries:
    """Truncated summation of non-negative terms."""

    def test_geometric_series(self):
        """Σ (1/2)^{k+1} = 1."""
        result = sum_series(lambda k: 0.5 ** (k + 1))
        assert result.value == pytest.approx(1.0, abs=1e-12)

    def test_zero_series(self):
        """All-zero terms stop quickly at 0."""
        result = sum_series(lambda k: 0.0)
        assert result.value == 0.0
        assert result.terms_used <= 3

    def test_exponential_series(self):
        """Σ e^{-1}/k! = 1."""
        result = sum_series(lambda k: math.exp(-1.0 - math.lgamma(k + 1)))
        assert result.value == pytest.approx(1.0, abs=1e-12)

    def test_vectorized_matches_scalar(self):
        """Block evaluation stops at the same term with the same sum."""
        scalar = sum_series(lambda k: 0.5 ** (k + 1))
        vector = sum_series(lambda ks: 0.5 ** (ks + 1.0), vectorized=True)
        assert vector.terms_used == scalar.terms_used
        assert vector.value == pytest.approx(scalar.value, rel=1e-15)

    def test_min_terms_respected(self):
        """The rule is not applied before min_terms."""
        result = sum_series(lambda ks: np.where(ks < 50, 0.0, 0.5 ** (ks - 49.0)), min_terms=80, vectorized=True)
        assert result.terms_used >= 80
        assert result.value == pytest.approx(1.0, abs=1e-12)

    def test_tail_estimate_bounds_omitted_mass(self):
        """For a geometric series the estimate exceeds the true remainder."""
        result = sum_series(lambda k: 0.5 ** (k + 1))
        assert result.tail_estimate >= 1.0 - result.value

    def test_max_terms_reached(self):
        """A non-decaying series raises with its partial sum."""
        with pytest.raises(NonConvergenceError) as info:
            sum_series(lambda k: 1.0, SeriesConfig(max_terms=100))
        assert info.value.estimate == pytest.approx(100.0)

    def test_max_terms_reached_vectorized(self):
        """Same limit in block mode."""
        with pytest.raises(NonConvergenceError):
            sum_series(lambda ks: np.ones(ks.shape), SeriesConfig(max_terms=500), vectorized=True)


# --- Configuration ---

class TestConfigs:
    """Tolerance configs and environment overrides."""

    def test_defaults(self):
        """Documented defaults."""
        q = QuadratureConfig()
        s = SeriesConfig()
        assert (q.rel_tol, q.abs_tol, q.max_subdivisions, q.tail_cut_tol) == (1e-10, 1e-12, 200, 1e-12)
        assert s.term_rel_tol == 1e-14

    @pytest.mark.parametrize("field", ["rel_tol", "abs_tol", "tail_cut_tol"])
    def test_rejects_non_positive_tolerance(self, field):
        """Tolerances must be positive."""
        with pytest.raises(ValidationError):
            QuadratureConfig(**{field: 0.0})

    def test_rejects_zero_terms(self):
        """max_terms ≥ 1."""
        with pytest.raises(ValidationError):
            SeriesConfig(max_terms=0)

    def test_env_overrides(self):
        """INEQ_REL_TOL and INEQ_SERIES_TOL replace the defaults."""
        env = {"INEQ_REL_TOL": "1e-8", "INEQ_SERIES_TOL": "1e-12"}
        assert QuadratureConfig.from_env(env).rel_tol == 1e-8
        assert SeriesConfig.from_env(env).term_rel_tol == 1e-12

    def test_env_missing_uses_default(self):
        """No variable, no change."""
        assert QuadratureConfig.from_env({}).rel_tol == 1e-10

    def test_env_malformed(self):
        """A non-numeric override names the variable."""
        with pytest.raises(ValidationError) as info:
            QuadratureConfig.from_env({"INEQ_REL_TOL": "tight"})
        assert info.value.field == "INEQ_REL_TOL"
