"""Model criticism toolkit for discrete Bayesian networks with latent variables."""

from ._version import __version__
from .critic import (
    Correction,
    CriticalBand,
    FitReport,
    Flag,
    Measure,
    ScoreMatrix,
    StudyConfig,
    TailMode,
    bootstrap_null,
    criticize,
    measures,
    score_dataset,
)
from .infer import Evidence, JointTable, PredictiveDistribution, joint_enumerate, loo_predictives, posterior
from .network import (
    Cpt,
    Network,
    ValidationReport,
    Variable,
    load_network,
    network_id,
    save_network,
    validate,
)
from .sample import Dataset, forward_sample, load_dataset, prefix, resample, save_dataset
from .score import ScoreKind, good_log_score, ranked_probability_score, weaver_surprise

__all__ = [
    "__version__",
    "Correction", "CriticalBand", "FitReport", "Flag", "Measure", "ScoreMatrix",
    "StudyConfig", "TailMode", "bootstrap_null", "criticize", "measures", "score_dataset",
    "Evidence", "JointTable", "PredictiveDistribution", "joint_enumerate",
    "loo_predictives", "posterior",
    "Cpt", "Network", "ValidationReport", "Variable", "load_network", "network_id",
    "save_network", "validate",
    "Dataset", "forward_sample", "load_dataset", "prefix", "resample", "save_dataset",
    "ScoreKind", "good_log_score", "ranked_probability_score", "weaver_surprise",
]
