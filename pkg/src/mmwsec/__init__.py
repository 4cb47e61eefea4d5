"""Secrecy analysis of MISO millimeter-wave links against Poisson eavesdroppers."""

from .an import (
    AnBoundDegenerateError,
    EtaOptimum,
    RhoSolverState,
    an_threshold,
    cdf_xe_an_bound,
    cdf_xe_an_exact,
    connection_probability_an,
    drho_deta,
    laplace_ie_an,
    max_secrecy_rate_an,
    optimal_eta,
    secrecy_throughput_an,
    solve_rho,
    sop_colluding_an,
    sop_noncolluding_an,
)
from .config import SystemConfig, dbm_to_mw
from .geometry import AngularGrid, CommonPathPmf, PathSets, common_path_pmf, path_sets
from .montecarlo import McEstimate, McParams, mc_metric, truncation_check
from .mrt import (
    RateResult,
    cdf_xe_mrt,
    connection_probability_mrt,
    laplace_ie_mrt,
    max_secrecy_rate_mrt,
    mrt_threshold,
    secrecy_throughput_mrt,
    secrecy_throughput_mrt_high_power,
    sop_colluding_mrt,
    sop_noncolluding_mrt,
)
from .specfun import ConvergenceError, QuadratureSettings, adaptive_quad, gauss_2f1_neg, v_aux

__version__ = "0.1.0"
