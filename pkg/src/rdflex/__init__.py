"""rdflex: regression discontinuity estimation with flexible covariate adjustments."""

__version__ = "0.1.0"

from .kernels import KernelSpec, bias_constant, bias_constant_jump, kernel_eval, nu_bar_kappa_bar, one_sided_moments
from .locpoly import Dataset, LocalPolyWeights, RdFit, fold_restricted_weights, local_poly_weights, rd_point_estimate
from .inference import (
    ConfidenceInterval,
    NnVarianceConfig,
    ci_bias_aware,
    ci_rbc,
    ci_undersmoothing,
    nn_sigma2,
    nn_sigma2_corrected,
    standard_error,
    z_crit,
)
from .bandwidth import BandwidthSelection, pilot_v_n, select_bias_aware, select_cct_mse, select_undersmooth

__all__ = [name for name in dir() if not name.startswith("_")]
