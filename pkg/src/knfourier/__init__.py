"""The (k, 2/n)-generalized Fourier transform on the real line.

Submodules: ``specfun`` (normalized Bessel, Gegenbauer, 1F1, Poisson
oracles), ``kernel`` (parameters, measure, kernel), ``quadrature``,
``transform``, ``heat``, ``audit`` (decay envelopes and uncertainty
classification), ``checks`` (identity suite) and ``cli``.
"""
from .errors import (
    ConvergenceError,
    DegenerateInput,
    DomainError,
    FitError,
    KnFourierError,
    ParamError,
    SingularPointError,
    TruncationWarning,
)
from .kernel import DeformParams, kernel_b, make_params
from .quadrature import GridFunction, QuadSpec
from .transform import Transformer, forward, inverse, plancherel_defect

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegenerateInput",
    "DomainError",
    "FitError",
    "KnFourierError",
    "ParamError",
    "SingularPointError",
    "TruncationWarning",
    "DeformParams",
    "kernel_b",
    "make_params",
    "GridFunction",
    "QuadSpec",
    "Transformer",
    "forward",
    "inverse",
    "plancherel_defect",
]
