"""Diversity-multiplexing analysis for sensing-constrained MIMO codewords.

Codewords satisfy ``X X^H = T R`` for a fixed transmit covariance ``R``, so
they live on a generalized Stiefel manifold. The package provides the
manifold geometry, Wishart exponent densities, closed-form and LP tradeoff
curves, an outage Monte Carlo engine and sensing BCRB helpers.
"""

__version__ = "0.1.0"

from .dmt import DmtCurve, OutageRegionSpec, constrained_dmt, exponent_lp, unconstrained_dmt
from .kernels import BACKEND
from .manifold import GeneralizedStiefel, GeometryReport, geometry_bounds, log_volume
from .outage import OutageEstimate, estimate_outage, finite_snr_mi_approx
from .sensing import SensingModel, bcrb_channel_estimation, rank_bound_curve
from .wishart import AlphaSample, CovarianceSpec, alpha_log_pdf, sample_wishart_eigs

__all__ = [
    "AlphaSample", "BACKEND", "CovarianceSpec", "DmtCurve", "GeneralizedStiefel",
    "GeometryReport", "OutageEstimate", "OutageRegionSpec", "SensingModel",
    "alpha_log_pdf", "bcrb_channel_estimation", "constrained_dmt", "estimate_outage",
    "exponent_lp", "finite_snr_mi_approx", "geometry_bounds", "log_volume",
    "rank_bound_curve", "sample_wishart_eigs", "unconstrained_dmt",
]
