"""Positive kernels built from Krein-type generators.

Closed-form kernels and Gram matrices, their spectral and Bernstein series
representations, discretized reproducing kernel Hilbert spaces, Gaussian
path sampling and the associated power-series transforms.
"""

from .errors import KernelError
from .kernels import (
    GeneratorFunction,
    GramMatrix,
    KernelSpec,
    PsdCertificate,
    bernstein_composite,
    bifbm,
    eval_closed,
    fbm,
    gram,
    krein,
    log_kernel,
    psd_certificate,
)
from .measures import WeightedMeasure, admissible, integrate
from .series import SeriesResult, TruncationPolicy
from .special import BernsteinFunction, bernstein_eval, gamma, generalized_gamma, v_h

__all__ = [
    "BernsteinFunction",
    "GeneratorFunction",
    "GramMatrix",
    "KernelError",
    "KernelSpec",
    "PsdCertificate",
    "SeriesResult",
    "TruncationPolicy",
    "WeightedMeasure",
    "admissible",
    "bernstein_composite",
    "bernstein_eval",
    "bifbm",
    "eval_closed",
    "fbm",
    "gamma",
    "generalized_gamma",
    "gram",
    "integrate",
    "krein",
    "log_kernel",
    "psd_certificate",
    "v_h",
]
