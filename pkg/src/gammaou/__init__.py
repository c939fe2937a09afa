"""Exact simulation of Gamma-OU and bilateral Gamma-OU processes.

The one-step law of these mean-reverting jump processes is the
self-decomposable remainder of their stationary (bilateral) gamma law,
an Erlang mixture with Polya or binomial weights.  That structure gives
closed-form transition densities and characteristic functions, which this
package uses both for fast exact path sampling and as built-in
statistical oracles for validating every sampler.
"""

__version__ = "0.1.0"

from gammaou._backend import ACTIVE as active_backend  # noqa: F401
from gammaou.params import (  # noqa: F401
    BgouParams,
    BilateralRemainderParams,
    ConfigurationError,
    DomainError,
    GouParams,
    Moments,
    ParameterError,
    PathSkeleton,
    RemainderParams,
)
from gammaou.rng import RngStream  # noqa: F401
from gammaou.weights import (  # noqa: F401
    MixtureWeights,
    binomial_mixture_weights,
    polya_mixture_weights,
    pseudo_mixture_weights,
    symmetric_remainder_weights,
)
from gammaou.gou import (  # noqa: F401
    GOU_ALGORITHMS,
    chf_gou_conditional,
    chf_remainder,
    gou_moments,
    remainder_cumulant,
    remainder_moments,
    sample_remainder_ar,
    sample_remainder_binomial,
    sample_remainder_polya,
    simulate_path,
    simulate_paths,
    simulate_terminal,
    transition_density_gou,
)
from gammaou.bgou import (  # noqa: F401
    BGOU_ALGORITHMS,
    bgou_cumulants,
    bgou_moments,
    chf_bgou_conditional,
    erlang_difference_pdf,
    simulate_path_bgou,
    simulate_paths_bgou,
    simulate_terminal_bgou,
    transition_density_bgou,
)
from gammaou.validation import (  # noqa: F401
    GofReport,
    SummaryStats,
    empirical_chf,
    gof_mixed,
    pairwise_deltas,
    summarize,
)
