"""Numerical verification toolkit for fractional powers of the Ornstein-Uhlenbeck and Hermite operators."""

from .extension import ExtensionParams, neumann_trace, solve_profile
from .quadrature import QuadratureSpec
from .report import CheckReport
from .spectral import DegreeMultiplier, HermiteExpansion, analyze, synthesize
from .suites import SuiteConfig, run_suite

__all__ = [
    "CheckReport",
    "DegreeMultiplier",
    "ExtensionParams",
    "HermiteExpansion",
    "QuadratureSpec",
    "SuiteConfig",
    "analyze",
    "neumann_trace",
    "run_suite",
    "solve_profile",
    "synthesize",
]
