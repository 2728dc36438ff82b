"""Numerical products of distributions through delta-sequence regularisation."""

from .distrib import Bump, DistributionExpr, ProductBump, delta, hat
from .errors import DistmulError, NumericalError, UnsupportedOrder, UsageError
from .limits import LimitClass, LimitVerdict, NGrid, ToleranceSet, estimate_limit
from .mollifier import Kind, MollifierSpec
from .products import ProductKind, ProductQuery, eval_product_at_n
from .scanner import predict_critical, scan

__all__ = [
    "Bump",
    "DistmulError",
    "DistributionExpr",
    "Kind",
    "LimitClass",
    "LimitVerdict",
    "MollifierSpec",
    "NGrid",
    "NumericalError",
    "ProductBump",
    "ProductKind",
    "ProductQuery",
    "ToleranceSet",
    "UnsupportedOrder",
    "UsageError",
    "delta",
    "estimate_limit",
    "eval_product_at_n",
    "hat",
    "predict_critical",
    "scan",
]
