"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import math

import pytest

from crmcred.core.constants import DEFAULT_LAMBDA1, DEFAULT_LAMBDA2
from crmcred.core.credibility import components_agg
from crmcred.core.crm import (
    ClaimHistory,
    CovariateSpec,
    ModelParams,
    Portfolio,
    RiskClass,
    a_priori_rate,
    calibrate_psi,
    cov_aggregate_lag,
    cov_freq_severity_cross_period,
    cov_freq_severity_same_period,
    cov_frequency_lag,
    cov_severity_cross_period,
    cov_severity_same_period,
    hypothetical_second_moment,
    mean_aggregate,
    resolve_rate,
    var_aggregate,
    var_individual_severity,
    zeta,
)
from crmcred.core.exceptions import CalibrationError, DomainError, HistoryError, ParameterError


def _independent(b1: float = 0.0, b2: float = 0.0, psi2: float = 0.8) -> ModelParams:
    return ModelParams(
        b1=b1,
        b2=b2,
        beta0=0.0,
        lambda1=0.3,
        lambda2=1000.0,
        psi2=psi2,
    )


def test_model_params_validation() -> None:
    with pytest.raises(ParameterError):
        _independent().replace(lambda1=0.0)

    with pytest.raises(ParameterError):
        _independent().replace(psi2=-1.0)

    with pytest.raises(ParameterError):
        _independent().replace(b1=-0.5)

    with pytest.raises(ParameterError):
        _independent().replace(beta0=math.nan)


def test_zeta() -> None:
    params = _independent().replace(beta0=-0.1)

    assert zeta(params=params) == (
        0.3 * math.expm1(-0.1),
        0.3 * math.expm1(-0.2),
    )


def test_feasibility_names_the_violated_constraints() -> None:
    params = ModelParams(b1=3.0, b2=0.0, beta0=0.5, lambda1=1.0, lambda2=1.0, psi2=1.0)

    assert params.feasibility_violations() == ["zeta2_branch_point", "two_zeta1_branch_point"]

    with pytest.raises(DomainError, match="zeta2_branch_point"):
        params.check_feasible()


def test_negative_dependence_is_always_feasible(study_params) -> None:
    for beta0 in (0.0, -0.05, -0.1, -2.0):
        assert study_params(beta0=beta0, b1=3.0, b2=0.4).feasibility_violations() == []


def test_degenerate_frequency_effect_is_always_feasible() -> None:
    params = ModelParams(b1=0.0, b2=0.0, beta0=2.0, lambda1=1.0, lambda2=1.0, psi2=1.0)

    assert params.feasibility_violations() == []


def test_calibrate_psi_reproduces_the_severity_variance(study_params) -> None:
    for beta0, b1, b2 in ((0.0, 0.5, 0.01), (-0.05, 1.5, 0.2), (-0.1, 3.0, 0.4)):
        params = study_params(beta0=beta0, b1=b1, b2=b2)

        assert var_individual_severity(params=params) == pytest.approx(2.008e7, rel=1e-12)


def test_calibrate_psi_value_under_independence() -> None:
    psi2 = calibrate_psi(
        b1=0.5,
        b2=0.01,
        beta0=0.0,
        c=2.008e7,
        lambda1=DEFAULT_LAMBDA1,
        lambda2=DEFAULT_LAMBDA2,
    )

    assert psi2 == pytest.approx((2.008e7 / DEFAULT_LAMBDA2**2 + 1.0) / 1.01 - 1.0, rel=1e-14)


@pytest.mark.parametrize("beta0", [0.0, -0.05, -0.1])
@pytest.mark.parametrize("b2", [0.01, 0.2, 0.4])
def test_small_severity_variance_cannot_be_calibrated(beta0: float, b2: float) -> None:
    with pytest.raises(CalibrationError):
        calibrate_psi(
            b1=1.5,
            b2=b2,
            beta0=beta0,
            c=2.008,
            lambda1=DEFAULT_LAMBDA1,
            lambda2=DEFAULT_LAMBDA2,
        )


def test_calibrate_psi_rejects_infeasible_arguments() -> None:
    with pytest.raises(DomainError):
        calibrate_psi(b1=3.0, b2=0.0, beta0=0.5, c=1.0, lambda1=1.0, lambda2=1.0)


def test_moments_under_independence_without_random_effects() -> None:
    params = _independent()

    assert mean_aggregate(params=params) == pytest.approx(300.0, rel=1e-14)
    # Compound Poisson: E[N] E[Y^2]
    assert var_aggregate(params=params) == pytest.approx(0.3 * 1000.0**2 * 1.8, rel=1e-12)
    assert cov_aggregate_lag(params=params) == pytest.approx(0.0, abs=1e-6)
    assert cov_frequency_lag(params=params) == 0.0
    assert var_individual_severity(params=params) == pytest.approx(0.8 * 1000.0**2, rel=1e-12)
    assert cov_severity_same_period(params=params) == pytest.approx(0.0, abs=1e-6)
    assert cov_severity_cross_period(params=params) == pytest.approx(0.0, abs=1e-6)
    assert cov_freq_severity_same_period(params=params) == pytest.approx(0.0, abs=1e-9)
    assert cov_freq_severity_cross_period(params=params) == 0.0


def test_moments_under_independence_with_random_effects() -> None:
    params = _independent(b1=1.5, b2=0.2)

    assert mean_aggregate(params=params) == pytest.approx(300.0, rel=1e-14)
    assert cov_frequency_lag(params=params) == pytest.approx(0.3**2 * 1.5, rel=1e-14)
    # E[h^2] - u^2 with h = lambda1 lambda2 R1 R2
    assert cov_aggregate_lag(params=params) == pytest.approx(300.0**2 * (2.5 * 1.2 - 1.0), rel=1e-12)
    assert hypothetical_second_moment(params=params) == pytest.approx(300.0**2 * 2.5 * 1.2, rel=1e-12)
    assert cov_severity_same_period(params=params) == pytest.approx(1000.0**2 * 0.2, rel=1e-12)
    assert cov_severity_cross_period(params=params) == pytest.approx(1000.0**2 * 0.2, rel=1e-12)


def test_negative_dependence_lowers_severities_with_claims(study_params) -> None:
    params = study_params(beta0=-0.1, b1=1.5, b2=0.2)

    assert cov_freq_severity_same_period(params=params) < 0.0
    assert cov_freq_severity_cross_period(params=params) == 0.0


def test_aggregate_moments_match_the_structural_parameters(study_params) -> None:
    for beta0, b1, b2 in ((0.0, 0.5, 0.01), (-0.1, 3.0, 0.4)):
        params = study_params(beta0=beta0, b1=b1, b2=b2)
        components = components_agg(params=params, t=1)

        assert mean_aggregate(params=params) == pytest.approx(components.u, rel=1e-12)
        assert cov_aggregate_lag(params=params) == pytest.approx(components.a, rel=1e-9)
        assert var_aggregate(params=params) - cov_aggregate_lag(params=params) == pytest.approx(
            components.v,
            rel=1e-9,
        )


def test_a_priori_rate_and_resolve_rate() -> None:
    spec = CovariateSpec(covariates=[1.0, 2.0], coefficients=[-1.9, 0.25])

    assert a_priori_rate(spec=spec) == pytest.approx(math.exp(-1.4), rel=1e-14)
    assert resolve_rate(spec=spec) == a_priori_rate(spec=spec)
    assert resolve_rate(value=2.5) == 2.5

    with pytest.raises(ParameterError):
        resolve_rate()

    with pytest.raises(ParameterError):
        resolve_rate(value=1.0, spec=spec)


def test_covariate_spec_validation() -> None:
    with pytest.raises(ParameterError):
        CovariateSpec(covariates=[1.0], coefficients=[1.0, 2.0])

    with pytest.raises(ParameterError):
        CovariateSpec(covariates=[1.0], coefficients=[1.0], link="identity")


def test_portfolio_weights_must_sum_to_one() -> None:
    params = _independent()

    portfolio = Portfolio(
        classes=[
            RiskClass(params=params, weight=0.7),
            RiskClass(params=params, weight=0.3),
        ]
    )
    assert len(portfolio.classes) == 2

    with pytest.raises(ParameterError):
        Portfolio(classes=[RiskClass(params=params, weight=0.5)])

    with pytest.raises(ParameterError):
        Portfolio(classes=[])

    with pytest.raises(ParameterError):
        RiskClass(params=params, weight=1.5)


def test_claim_history_projections() -> None:
    history = ClaimHistory.from_pairs([(0, 0.0), (2, 300.0), (1, 50)])

    assert history.horizon == 3
    assert history.frequencies == (0, 2, 1)
    assert history.aggregates == (0.0, 300.0, 50.0)
    assert history.average_severities == (0.0, 150.0, 50.0)
    assert ClaimHistory().horizon == 0


@pytest.mark.parametrize(
    "periods",
    [
        [(0, 10.0)],
        [(2, 0.0)],
        [(-1, 0.0)],
        [(1, -5.0)],
        [(1.5, 5.0)],
        [(True, 5.0)],
        [(1, 5.0, 3)],
    ],
)
def test_claim_history_rejects_inconsistent_periods(periods: list[tuple]) -> None:
    with pytest.raises(HistoryError):
        ClaimHistory(periods=periods)
