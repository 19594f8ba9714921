"""Spectral asymptotics of Hankel operators with log-power kernels."""

from ._hankelspec import (
    ConvergenceError,
    ResolutionError,
    Spectrum,
    ValidationError,
    __version__,
    beta,
    coefficients,
    coefficients_continuous,
    fit,
    hs_identity,
    laplace_ratios,
    model_sequence,
    psido_top,
    spectrum,
    v_alpha,
    weyl_coefficient,
)


def model_kernel(alpha, b1, bm1=0.0):
    """JSON description of the discrete model sequence."""
    return {"type": "discrete_model", "alpha": alpha, "b1": b1, "bm1": bm1}


__all__ = [
    "ConvergenceError",
    "ResolutionError",
    "Spectrum",
    "ValidationError",
    "__version__",
    "beta",
    "coefficients",
    "coefficients_continuous",
    "fit",
    "hs_identity",
    "laplace_ratios",
    "model_kernel",
    "model_sequence",
    "psido_top",
    "spectrum",
    "v_alpha",
    "weyl_coefficient",
]
