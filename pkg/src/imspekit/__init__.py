"""IMSPE of Gaussian-process designs over rectangles and the unit disk."""

from .convergence import ConvergenceEstimate, ConvergenceSeries, doubling_ladder, extrapolate, fit_tail, local_slopes
from .design import Design, DesignPoint, Hyperparameters, build_bordered, build_cov, kernel, trace_of_solve
from .errors import (
    BoundsError,
    BracketError,
    ConfigError,
    DomainError,
    DuplicatePointError,
    ImspeError,
    NonConvergenceError,
    SingularMatrixError,
)
from .imspe import (
    ImspeValue,
    TwinLimitResult,
    imspe,
    imspe_batch,
    imspe_converged,
    imspe_n1_closed,
    imspe_n2_symmetric,
    twin_limit,
)
from .optimizer import (
    DesignFamily,
    OptimizationResult,
    ScanResult,
    minimize_family,
    minimize_scalar,
    realize,
    scan_family,
)
from .rmatrix import DiskSpec, RectDomain, build_r_disk, build_r_rect, strip_center, width_avg, width_simple

__version__ = "0.1.0"
