"""Frequency-domain Granger-Geweke causality for VAR processes.

Two estimators of conditional spectral causality are provided: the classic
dual-model route (separate full and reduced VAR fits) and the state-space
route, which derives the reduced model exactly. Directed coherence and the
causal decomposition of power spectra complete the toolkit.
"""

from .classic import gc_spectral_classic, normalize_innovations
from .errors import (
    EigenFailure,
    FreqGCError,
    GridMismatch,
    IndefiniteIterate,
    InsufficientData,
    InvalidSpec,
    NoConvergence,
    NonDiagonalSigma,
    NonPosDefSigma,
    SingularAtFrequency,
    SingularRegressors,
    UnstableSystem,
)
from .estimation import VarFit, fit_ols, order_select_aic
from .spectral import (
    DcSpectrum,
    FrequencyGrid,
    GcSpectrum,
    SpectralMatrix,
    cpsd,
    directed_coherence,
    spectral_decomposition,
    transfer_function,
)
from .statespace import (
    DareSolution,
    StateSpaceModel,
    dare_solve,
    gc_spectral_ss,
    gc_time,
    reduce,
    ss_cpsd,
    ss_transfer,
    var_to_ss,
)
from .var import (
    Coupling,
    Oscillator,
    PolePlacementSpec,
    TimeSeriesData,
    VarModel,
    build_from_poles,
    companion,
    simulate,
    spectral_radius,
    stationary_covariance,
)

__version__ = "0.1.0"
