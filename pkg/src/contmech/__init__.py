"""Differentially private running histograms under continual observation.

Mechanisms for all four settings of known/unknown item domain crossed with
bounded/unbounded items per event, plus the budget arithmetic, seeded noise
streams, synthetic stream lab, and the verification oracles that check the
privacy decompositions empirically.
"""

from .accounting import (
    DpBudget,
    MechanismSpec,
    PrivacyParams,
    ZcdpBudget,
    calibrate_rho,
    compose,
    mechanism_budget,
    zcdp_to_dp,
)
from .continual_unknown import (
    UnkBase,
    conditional_error_bound,
    discovery_probability_bound,
    release_threshold,
    unk_base_run,
)
from .known import KnownBase, known_base_run, known_gauss, known_gumbel_topk
from .meta import QuadrantSelector, meta_run
from .noise import NoiseSource, normal_cdf, normal_quantile
from .oneshot_unknown import LimitedHistogram, ThresholdSpec, unk_gauss, unk_gumbel
from .releases import BOTTOM, NoisyRelease, histogram_of_stream
from .sparse_topk import (
    ErrorReport,
    SparseGumbConfig,
    error_metric,
    recommended_eta,
    sparse_gumb_run,
)
from .streams import StreamSpec, generate
from .tree import (
    DigitDecomposition,
    PartialSumTable,
    TreeParams,
    TreeRunner,
    build_table,
    decompose,
    optimal_base,
    tree_run,
)

__version__ = "0.1.0"
