"""truthfuse: truth discovery over conflicting multi-source claims.

Jointly estimates per-source accuracy and pairwise copying between
sources, then selects the most probable value for every object.
"""

__version__ = "0.1.0"

from .accuracy import (
    SourceAccuracy,
    ValuePosterior,
    accuracy_score,
    select_truth,
    source_accuracy,
    value_posteriors,
)
from .copydetect import (
    CopyEstimate,
    CopyMatrix,
    PairObservation,
    conditional_pair_probs,
    copy_posterior,
    detect_all,
    initial_copy_posterior,
    pair_observation,
)
from .engine import (
    FusionReport,
    FusionState,
    ModelVariant,
    Termination,
    check_termination,
    initial_state,
    run,
    step_round,
)
from .errors import FusionError
from .evaluation import (
    ErrorType,
    GeneratedWorld,
    WorldSpec,
    classify_errors,
    generate_world,
    precision,
    sampled_accuracy,
)
from .ingest import normalize_author_list, parse_claims, parse_golden
from .model import Claim, Dataset, FusionConfig, build_dataset, voters_of
from .similarity import ExactOnly, NGramJaccard, adjust_confidences, ngram_jaccard
from .vote import (
    Directed,
    SourceOrdering,
    Undirected,
    classify_direction,
    independence_factor,
    order_sources,
    value_confidence,
)

__all__ = [
    "__version__",
    "Claim",
    "CopyEstimate",
    "CopyMatrix",
    "Dataset",
    "Directed",
    "ErrorType",
    "ExactOnly",
    "FusionConfig",
    "FusionError",
    "FusionReport",
    "FusionState",
    "GeneratedWorld",
    "ModelVariant",
    "NGramJaccard",
    "PairObservation",
    "SourceAccuracy",
    "SourceOrdering",
    "Termination",
    "Undirected",
    "ValuePosterior",
    "WorldSpec",
    "accuracy_score",
    "adjust_confidences",
    "build_dataset",
    "check_termination",
    "classify_direction",
    "classify_errors",
    "conditional_pair_probs",
    "copy_posterior",
    "detect_all",
    "generate_world",
    "independence_factor",
    "initial_copy_posterior",
    "initial_state",
    "ngram_jaccard",
    "normalize_author_list",
    "order_sources",
    "pair_observation",
    "parse_claims",
    "parse_golden",
    "precision",
    "run",
    "sampled_accuracy",
    "select_truth",
    "source_accuracy",
    "step_round",
    "value_confidence",
    "value_posteriors",
    "voters_of",
]
