"""Problem instances, nonsmooth terms and data ingestion."""

from .base import ProblemInstance
from .instances import (
    FAMILIES,
    kl_regression_instance,
    lasso_instance,
    least_squares_instance,
    logdet_simplex_instance,
    make_instance,
    poly_hessian_instance,
)
from .libsvm import read_libsvm, write_libsvm
from .regularizers import L1Norm, Regularizer, SimplexIndicator, ZeroFunction, soft_threshold

__all__ = [
    "ProblemInstance",
    "FAMILIES",
    "kl_regression_instance",
    "lasso_instance",
    "least_squares_instance",
    "logdet_simplex_instance",
    "make_instance",
    "poly_hessian_instance",
    "read_libsvm",
    "write_libsvm",
    "L1Norm",
    "Regularizer",
    "SimplexIndicator",
    "ZeroFunction",
    "soft_threshold",
]
