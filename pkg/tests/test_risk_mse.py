"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import json
import math

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from crmcred.core.constants import (
    AGGREGATE_SEVERITY,
    FREQUENCY,
    FREQUENCY_COUNT,
    HMSE_CSV_HEADER,
    TIE,
)
from crmcred.core.credibility import components_agg, components_freq
from crmcred.core.crm import ModelParams, Portfolio, RiskClass, hypothetical_second_moment
from crmcred.core.exceptions import ParameterError, UsageError
from crmcred.core.risk_mse import (
    MseReport,
    MseRow,
    build_report,
    classify,
    crossover_horizon,
    hmse_agg_expanded,
    hmse_agg_simplified,
    hmse_for,
    hmse_freq_expanded,
    hmse_freq_limit,
    hmse_freq_simplified,
    recommend,
    weighted_hmse,
)


def test_reference_values(base_params: ModelParams, e13: float) -> None:
    assert hmse_agg_expanded(params=base_params, t=1) == pytest.approx(0.2195e6, rel=1e-3)
    assert hmse_freq_expanded(params=base_params, t=1) == pytest.approx(0.2125e6, rel=1e-3)
    assert hmse_freq_limit(params=base_params) == pytest.approx(0.01 * e13 * 1.5, rel=1e-12)


def test_limit_values(study_params) -> None:
    assert hmse_freq_limit(params=study_params(beta0=0.0, b1=0.5, b2=0.4)) == pytest.approx(
        265_448.0,
        rel=1e-6,
    )
    assert hmse_freq_limit(params=study_params(beta0=0.0, b1=3.0, b2=0.4)) == pytest.approx(
        707_861.4,
        rel=1e-6,
    )


@pytest.mark.parametrize("beta0", [0.0, -0.05, -0.1])
@pytest.mark.parametrize("b1", [0.5, 1.5, 3.0])
@pytest.mark.parametrize("b2", [0.01, 0.2, 0.4])
def test_expanded_and_simplified_forms_agree(study_params, beta0: float, b1: float, b2: float) -> None:
    params = study_params(beta0=beta0, b1=b1, b2=b2)

    for t in (1, 2, 5, 10, 100):
        assert hmse_agg_expanded(params=params, t=t) == pytest.approx(
            hmse_agg_simplified(params=params, t=t),
            rel=1e-8,
        )
        assert hmse_freq_expanded(params=params, t=t) == pytest.approx(
            hmse_freq_simplified(params=params, t=t),
            rel=1e-8,
        )

@pytest.mark.parametrize("beta0", [0.0, -0.05, -0.1])
@pytest.mark.parametrize("b1", [0.5, 1.5, 3.0])
@pytest.mark.parametrize("b2", [0.01, 0.2, 0.4])
def test_reciprocal_aggregate_error_is_affine_in_the_horizon(
    study_params,
    beta0: float,
    b1: float,
    b2: float,
) -> None:
    params = study_params(beta0=beta0, b1=b1, b2=b2)
    components = components_agg(params=params, t=1)
    # 1 / HMSE1(t) = t / v1 + 1 / a1
    points = [(t, 1.0 / hmse_agg_expanded(params=params, t=t)) for t in (1, 5, 10)]

    (t0, y0), (t1, y1), (t2, y2) = points
    first_slope = (y1 - y0) / (t1 - t0)
    second_slope = (y2 - y1) / (t2 - t1)

    assert second_slope == pytest.approx(first_slope, rel=1e-9)
    assert first_slope == pytest.approx(1.0 / components.v, rel=1e-9)
    assert y0 - t0 * first_slope == pytest.approx(1.0 / components.a, rel=1e-9)


def test_simplified_frequency_error_in_closed_form(base_params: ModelParams) -> None:
    a1 = components_agg(params=base_params, t=1).a
    freq = components_freq(params=base_params, t=3)

    assert hmse_freq_simplified(params=base_params, t=3) == pytest.approx(a1 - freq.z * freq.a)


def test_frequency_error_decreases_to_its_limit(study_params) -> None:
    params = study_params(beta0=-0.05, b1=1.5, b2=0.2)
    limit = hmse_freq_limit(params=params)
    errors = [hmse_freq_simplified(params=params, t=t) for t in (1, 10, 100, 10_000, 10_000_000)]

    assert errors == sorted(errors, reverse=True)
    assert all(error > limit for error in errors)
    assert errors[-1] == pytest.approx(limit, rel=1e-5)
    assert hmse_agg_simplified(params=params, t=10_000_000) == pytest.approx(0.0, abs=1.0)


def test_horizon_must_be_positive(base_params: ModelParams) -> None:
    for function in (hmse_agg_expanded, hmse_agg_simplified, hmse_freq_expanded, hmse_freq_simplified):
        with pytest.raises(UsageError):
            function(params=base_params, t=0)


def test_hmse_for_dispatches(base_params: ModelParams) -> None:
    assert hmse_for(params=base_params, t=2, variant=AGGREGATE_SEVERITY) == hmse_agg_expanded(
        params=base_params,
        t=2,
    )
    assert hmse_for(params=base_params, t=2, variant=FREQUENCY) == hmse_freq_expanded(
        params=base_params,
        t=2,
    )

    with pytest.raises(UsageError):
        hmse_for(params=base_params, t=2, variant=FREQUENCY_COUNT)


def test_weighted_hmse(study_params) -> None:
    first = study_params(beta0=0.0, b1=0.5, b2=0.01)
    second = study_params(beta0=-0.1, b1=3.0, b2=0.4)
    portfolio = Portfolio(
        classes=[
            RiskClass(params=first, weight=0.7),
            RiskClass(params=second, weight=0.3),
        ]
    )

    assert weighted_hmse(portfolio=portfolio, t=5, variant=FREQUENCY) == pytest.approx(
        0.7 * hmse_freq_expanded(params=first, t=5) + 0.3 * hmse_freq_expanded(params=second, t=5),
        rel=1e-12,
    )


def test_classify() -> None:
    assert classify(hmse1=1.0, hmse2=2.0) == AGGREGATE_SEVERITY
    assert classify(hmse1=2.0, hmse2=1.0) == FREQUENCY
    assert classify(hmse1=1.0, hmse2=1.0 + 1e-12) == TIE
    assert classify(hmse1=0.0, hmse2=0.0) == TIE


@pytest.mark.parametrize("beta0", [0.0, -0.05, -0.1])
@pytest.mark.parametrize("b1", [0.5, 1.5, 3.0])
def test_frequency_premium_wins_with_small_severity_heterogeneity(
    study_params,
    beta0: float,
    b1: float,
) -> None:
    params = study_params(beta0=beta0, b1=b1, b2=0.01)

    for t in (1, 5, 10):
        assert recommend(params=params, t=t).recommended == FREQUENCY


def test_aggregate_premium_wins_with_large_severity_heterogeneity(study_params) -> None:
    params = study_params(beta0=0.0, b1=0.5, b2=0.4)

    assert [recommend(params=params, t=t).recommended for t in range(1, 11)] == [
        AGGREGATE_SEVERITY
    ] * 10
    assert crossover_horizon(params=params) is None


def test_preference_switches_with_experience(study_params) -> None:
    params = study_params(beta0=-0.05, b1=3.0, b2=0.2)

    assert recommend(params=params, t=1).recommended == FREQUENCY
    assert recommend(params=params, t=10).recommended == AGGREGATE_SEVERITY


def test_crossover_horizon(study_params) -> None:
    params = study_params(beta0=0.0, b1=3.0, b2=0.2)

    assert [recommend(params=params, t=t).recommended for t in (1, 2, 3)] == [
        FREQUENCY,
        FREQUENCY,
        AGGREGATE_SEVERITY,
    ]
    assert crossover_horizon(params=params) == 3
    assert crossover_horizon(params=params, t_max=2) is None

    with pytest.raises(UsageError):
        crossover_horizon(params=params, t_max=0)


def test_frequency_premium_wins_for_good_without_severity_effect(study_params) -> None:
    params = study_params(beta0=-0.1, b1=1.5, b2=0.0)

    assert hmse_freq_limit(params=params) == 0.0
    assert crossover_horizon(params=params) is None
    assert all(recommend(params=params, t=t).recommended == FREQUENCY for t in (1, 10, 100))


def test_recommend_row(base_params: ModelParams) -> None:
    row = recommend(params=base_params, t=5)

    assert row.t == 5
    assert (row.beta0, row.b1, row.b2) == (0.0, 0.5, 0.01)
    assert row.hmse1 == pytest.approx(row.hmse1_simplified, rel=1e-8)
    assert row.hmse2 == pytest.approx(row.hmse2_simplified, rel=1e-8)
    assert row.csv_row() == [0.0, 0.5, 0.01, 5, row.hmse1, row.hmse2, row.hmse2_limit, FREQUENCY]


def test_mse_row_checks_its_recommendation() -> None:
    values = dict(
        b1=0.5,
        b2=0.01,
        beta0=0.0,
        hmse1=1.0,
        hmse1_simplified=1.0,
        hmse2=2.0,
        hmse2_limit=0.5,
        hmse2_simplified=2.0,
        t=1,
    )

    assert MseRow(recommended=AGGREGATE_SEVERITY, **values).crossover is None

    with pytest.raises(ParameterError):
        MseRow(recommended=FREQUENCY, **values)

    with pytest.raises(ParameterError):
        MseRow(recommended=AGGREGATE_SEVERITY, **{**values, "hmse2_limit": -1.0})


def test_build_report_keeps_input_order(study_params) -> None:
    first = study_params(beta0=0.0, b1=0.5, b2=0.01)
    second = study_params(beta0=-0.1, b1=3.0, b2=0.4)

    report = build_report(scenarios=[(first, [1, 5]), (second, [10])])

    assert [(row.beta0, row.t) for row in report.rows] == [(0.0, 1), (0.0, 5), (-0.1, 10)]
    assert report.csv_rows()[0] == list(HMSE_CSV_HEADER)
    assert len(report.csv_rows()) == 4

    document = json.loads(report.to_json())
    assert [row["t"] for row in document["rows"]] == [1, 5, 10]
    assert MseReport().csv_rows() == [list(HMSE_CSV_HEADER)]


def test_build_report_on_a_thread_pool_matches_the_serial_report(study_params) -> None:
    scenarios = [
        (study_params(beta0=beta0, b1=b1, b2=0.2), list(range(1, 11)))
        for beta0 in (0.0, -0.05, -0.1)
        for b1 in (0.5, 1.5, 3.0)
    ]

    serial = build_report(scenarios=scenarios)
    threaded = build_report(jobs=3, scenarios=iter(scenarios))

    assert threaded.rows == serial.rows
    assert [(row.beta0, row.b1, row.t) for row in threaded.rows][:11] == [
        *((0.0, 0.5, t) for t in range(1, 11)),
        (0.0, 1.5, 1),
    ]


def test_build_report_needs_a_worker(base_params: ModelParams) -> None:
    with pytest.raises(UsageError):
        build_report(jobs=0, scenarios=[(base_params, [1])])


@settings(deadline=None, max_examples=50)
@given(
    beta0=st.floats(min_value=-0.3, max_value=0.0),
    b1=st.floats(min_value=0.0, max_value=4.0),
    b2=st.floats(min_value=0.0, max_value=0.6),
    psi2=st.floats(min_value=0.1, max_value=3.0),
    lambda1=st.floats(min_value=0.05, max_value=1.0),
    t=st.integers(min_value=1, max_value=60),
)
def test_expanded_forms_match_the_reduced_ones(
    beta0: float,
    b1: float,
    b2: float,
    psi2: float,
    lambda1: float,
    t: int,
) -> None:
    params = ModelParams(b1=b1, b2=b2, beta0=beta0, lambda1=lambda1, lambda2=1000.0, psi2=psi2)
    scale = 1e-9 * hypothetical_second_moment(params=params)

    assert hmse_agg_expanded(params=params, t=t) == pytest.approx(
        hmse_agg_simplified(params=params, t=t),
        abs=scale,
    )
    assert hmse_freq_expanded(params=params, t=t) == pytest.approx(
        hmse_freq_simplified(params=params, t=t),
        abs=scale,
    )
    assert hmse_freq_simplified(params=params, t=t) >= hmse_freq_limit(params=params) - scale
    assert not math.isnan(hmse_agg_expanded(params=params, t=t))
