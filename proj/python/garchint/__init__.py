"""Python bindings for the garchint C++ engine."""

from ._core import (
    ConfigError,
    DomainError,
    IoError,
    MeasurePolicy,
    ModelParams,
    PreconditionError,
    SideCoefficients,
    bessel_i,
    bs_price,
    build_smile,
    fit_mle,
    implied_vol,
    log_bessel_i,
    log_likelihood,
    price_european,
    risk_neutral_intensities,
    run,
    simulate,
    skellam_log_pmf,
    skellam_pmf,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "IoError",
    "MeasurePolicy",
    "ModelParams",
    "PreconditionError",
    "SideCoefficients",
    "bessel_i",
    "bs_price",
    "build_smile",
    "fit_mle",
    "implied_vol",
    "log_bessel_i",
    "log_likelihood",
    "price_european",
    "risk_neutral_intensities",
    "run",
    "simulate",
    "skellam_log_pmf",
    "skellam_pmf",
]
