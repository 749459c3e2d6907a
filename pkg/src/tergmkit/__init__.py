"""Toolkit for discrete-time transition models of directed networks.

A network series A^1, ..., A^T is modeled one transition at a time: given
the previous snapshot, edges of the next snapshot are independent Bernoulli
draws whose log-odds are a weighted sum of per-edge change scores. The
package covers the building blocks around that model family:

- network containers, sliding-window ingestion of event logs (`graphs`)
- the statistic registry and change-score tables (`statistics`)
- transition likelihoods, gradients, Hessians (`model`)
- exact and Gibbs transition samplers, chain simulation (`sampling`)
- exact and simulation-based maximum likelihood (`estimation`)
- degeneracy bounds and exact second-step entropy (`degeneracy`)
- likelihood-ratio testing and label imputation (`inference`)
- recovery experiments and cross-validated fit bands (`evaluation`)

The command line lives in `tergmkit.cli`; figures in `tergmkit.plots`.
Both import lazily so that library use never pulls in matplotlib.
"""

__version__ = "0.1.0"

from .degeneracy import (
    DegeneracyReport,
    degeneracy_bounds,
    entropy_bruteforce,
    entropy_edgecount,
    second_step_distribution,
)
from .estimation import (
    DEFAULT_EXACT_CONFIG,
    DEFAULT_SAMPLED_CONFIG,
    FitConfig,
    FitResult,
    fit_exact,
    fit_sampled,
    random_init,
)
from .evaluation import (
    FitAssessment,
    RecoveryReport,
    crossval_assess,
    nearest_rank_band,
    recovery_experiment,
)
from .graphs import (
    NetworkSeries,
    NodeAttributeTable,
    SponsorshipEvent,
    build_sliding_windows,
    load_events,
    load_series,
    save_series,
)
from .inference import (
    ClassificationResult,
    GAConfig,
    HypothesisSpec,
    MCGEMConfig,
    TestResult,
    likelihood_ratio_test,
    majority_baseline,
    mcgem_classify,
)
from .model import (
    TransitionModel,
    TransitionTables,
    edge_probabilities,
    gradient,
    hessian,
    log_likelihood,
)
from .sampling import (
    SamplerConfig,
    bernoulli_network,
    sample_initial,
    sample_transition_exact,
    sample_transition_gibbs,
    simulate_chain,
)
from .statistics import (
    BUILTIN_STATISTICS,
    ChangeScoreTable,
    StatisticSet,
    change_scores,
    evaluate_all,
    load_model_spec,
    same_label_matrix,
)
from .util import (
    DataError,
    NumericalError,
    TergmkitError,
    UnsupportedModelError,
    substream,
)

__all__ = [
    "BUILTIN_STATISTICS",
    "ChangeScoreTable",
    "ClassificationResult",
    "DEFAULT_EXACT_CONFIG",
    "DEFAULT_SAMPLED_CONFIG",
    "DataError",
    "DegeneracyReport",
    "FitAssessment",
    "FitConfig",
    "FitResult",
    "GAConfig",
    "HypothesisSpec",
    "MCGEMConfig",
    "NetworkSeries",
    "NodeAttributeTable",
    "NumericalError",
    "RecoveryReport",
    "SamplerConfig",
    "SponsorshipEvent",
    "StatisticSet",
    "TergmkitError",
    "TestResult",
    "TransitionModel",
    "TransitionTables",
    "UnsupportedModelError",
    "bernoulli_network",
    "build_sliding_windows",
    "change_scores",
    "crossval_assess",
    "degeneracy_bounds",
    "edge_probabilities",
    "entropy_bruteforce",
    "entropy_edgecount",
    "evaluate_all",
    "fit_exact",
    "fit_sampled",
    "gradient",
    "hessian",
    "likelihood_ratio_test",
    "load_events",
    "load_model_spec",
    "load_series",
    "log_likelihood",
    "majority_baseline",
    "mcgem_classify",
    "nearest_rank_band",
    "random_init",
    "recovery_experiment",
    "sample_initial",
    "sample_transition_exact",
    "sample_transition_gibbs",
    "same_label_matrix",
    "save_series",
    "second_step_distribution",
    "simulate_chain",
    "substream",
    "__version__",
]
