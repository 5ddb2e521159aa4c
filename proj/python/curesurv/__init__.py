"""Right-censored survival estimators and mixture cure models."""

from ._core import (
    DataError,
    EmptyNeighborhoodError,
    NumericError,
    SurvivalSample,
    beran_fit,
    cov_test,
    cure_rate,
    cure_rate_conditional,
    fit,
    jitter,
    km_fit,
    latency,
    link_eval,
    load_sample_csv,
    mz_test,
    select_bandwidth,
    simulate,
)

__all__ = [
    "DataError",
    "EmptyNeighborhoodError",
    "NumericError",
    "SurvivalSample",
    "beran_fit",
    "cov_test",
    "cure_rate",
    "cure_rate_conditional",
    "fit",
    "jitter",
    "km_fit",
    "latency",
    "link_eval",
    "load_sample_csv",
    "mz_test",
    "select_bandwidth",
    "simulate",
]
