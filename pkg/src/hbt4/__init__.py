"""High-order photon coherence of displaced squeezed light measured by a
four-detector splitter tree, with loss, Poissonian background noise,
click-based estimators, closed-form references, a seeded Monte-Carlo
validator and parameter-sweep tooling.
"""

from .clicks import (
    ClickDistribution,
    CoherenceTriple,
    click_coherence,
    click_probabilities,
    coherence_from_clicks,
    multinomial_click_probabilities,
)
from .coherence import (
    AnalyticIntermediates,
    analytic_intermediates,
    factorial_moments,
    fourth_order_report,
    fourth_order_variant,
    gaussian_moments,
    ideal_coherence,
)
from .detection import DetectionParams, apply_detection, bernoulli_loss, noise_convolve
from .errors import (
    Hbt4Error,
    InternalInvariantError,
    InvalidParameterError,
    NoSignalError,
    TruncationError,
    UndefinedCoherenceError,
)
from .montecarlo import McConfig, McResult, run_mc
from .states import (
    PhotonDistribution,
    StateParams,
    coherent_distribution,
    fock_distribution,
    hermite_scaled,
    squeezed_distribution,
)
from .sweep import (
    ExtremumResult,
    SweepAxis,
    SweepSpec,
    SweepTable,
    evaluate_point,
    find_extremum,
    minimized_map,
    squeezing_db,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticIntermediates",
    "ClickDistribution",
    "CoherenceTriple",
    "DetectionParams",
    "ExtremumResult",
    "Hbt4Error",
    "InternalInvariantError",
    "InvalidParameterError",
    "McConfig",
    "McResult",
    "NoSignalError",
    "PhotonDistribution",
    "StateParams",
    "SweepAxis",
    "SweepSpec",
    "SweepTable",
    "TruncationError",
    "UndefinedCoherenceError",
    "analytic_intermediates",
    "apply_detection",
    "bernoulli_loss",
    "click_coherence",
    "click_probabilities",
    "coherence_from_clicks",
    "coherent_distribution",
    "evaluate_point",
    "factorial_moments",
    "find_extremum",
    "fock_distribution",
    "fourth_order_report",
    "fourth_order_variant",
    "gaussian_moments",
    "hermite_scaled",
    "ideal_coherence",
    "minimized_map",
    "multinomial_click_probabilities",
    "noise_convolve",
    "run_mc",
    "squeezed_distribution",
    "squeezing_db",
    "sweep",
]
