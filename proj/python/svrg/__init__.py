"""Python interface to the variance-reduced optimization toolkit."""

from svrg._core import (
    Dataset,
    generate_synthetic,
    inflection_stage,
    load_libsvm,
    next_batch_size,
    parse_libsvm,
    preprocess,
    rates_report,
    rho,
    run_experiment,
    save_libsvm,
    split,
    to_csv,
)

__all__ = [
    "Dataset",
    "generate_synthetic",
    "inflection_stage",
    "load_libsvm",
    "next_batch_size",
    "parse_libsvm",
    "preprocess",
    "rates_report",
    "rho",
    "run_experiment",
    "save_libsvm",
    "split",
    "to_csv",
]
