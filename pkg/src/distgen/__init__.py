"""Functional constructors for families of probability distributions.

A generator combines a baseline integrand CDF F, baseline CDFs G_1..G_m and
monotone limit maps into a new CDF H.  The main entry points:

- :func:`distgen.generator.validate` and :func:`distgen.generator.build`
- :func:`distgen.subcases.subcase` for the named special cases
- :mod:`distgen.catalog` for families known from the literature
"""
from . import analysis, baseline, catalog, dsl, generator, numerics, specfile, subcases
from .analysis import classify_nature, numeric_support_scan, support_exact_if_T4, support_upper_bound
from .baseline import from_spec as baseline_from_spec
from .errors import (
    ConvergenceError,
    DistgenError,
    DomainError,
    IntegrityError,
    ParseError,
    PreconditionError,
    SpecError,
    UnsupportedError,
    ValidationFailed,
)
from .generator import (
    GeneratedCdf,
    GeneratorSpec,
    build,
    complementary_spec,
    direct_spec,
    rewrap_as_uniform,
    validate,
)
from .subcases import fast_path, subcase

__version__ = "0.1.0"

__all__ = [
    "analysis", "baseline", "catalog", "dsl", "generator", "numerics", "specfile", "subcases",
    "classify_nature", "numeric_support_scan", "support_exact_if_T4", "support_upper_bound",
    "baseline_from_spec", "ConvergenceError", "DistgenError", "DomainError", "IntegrityError",
    "ParseError", "PreconditionError", "SpecError", "UnsupportedError", "ValidationFailed",
    "GeneratedCdf", "GeneratorSpec", "build", "complementary_spec", "direct_spec",
    "rewrap_as_uniform", "validate", "fast_path", "subcase",
]
