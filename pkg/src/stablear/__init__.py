"""Maximum likelihood fitting of causal and noncausal autoregressions driven
by alpha-stable noise, with m-out-of-n bootstrap and Fisher-information
uncertainty quantification."""

__version__ = "0.1.0"

from .exceptions import (BoundaryError, DomainError, InputError,
                         NumericalError, ParameterError)
from .stable_dist import (DensityTable, StableParams, build_density_table,
                          cdf, char_fn, fisher_info, log_pdf, pdf, quantile,
                          sample, score_tau, tilde_c)

__all__ = [
    "__version__",
    "BoundaryError", "DomainError", "InputError", "NumericalError",
    "ParameterError",
    "StableParams", "DensityTable", "build_density_table", "char_fn",
    "log_pdf", "pdf", "cdf", "quantile", "sample", "score_tau", "fisher_info",
    "tilde_c",
]
