"""Simulation engine for runtime performance estimation of actively
trained classifiers on synthetic tasks with known ground truth."""

__version__ = "0.1.0"

from .errors import ValidationError
from .synthdata import (
    GaussianComponent,
    LabeledSample,
    SamplingDistribution,
    TaskModel,
    UnlabeledSample,
    bayes_accuracy,
    bayes_posterior,
    default_task,
    draw_labeled,
    draw_unlabeled,
    sampling_density,
    unbiased_sampler,
)
from .parzen import ClassifierConfig, KernelStats, ParzenModel, accuracy_on, fit, posterior, predict
from .estimators import (
    LocalLabelStatistics,
    PerformanceEstimate,
    generalization_error_estimate,
    kfold_cv,
    local_label_statistics,
    probabilistic_performance,
    self_label_cv,
    subsample_baseline,
    true_baseline,
)
from .harness import (
    BoxplotStats,
    EstimatorSpec,
    ExperimentSpec,
    RunRecord,
    derive_substream,
    run_bias_sweep,
    run_cv_folds,
    run_estimator_comparison,
    run_eval_size_distribution,
    run_experiment,
    summarize,
)
from .config import parse_config, resolve_config

__all__ = [
    "ValidationError",
    "GaussianComponent",
    "LabeledSample",
    "SamplingDistribution",
    "TaskModel",
    "UnlabeledSample",
    "bayes_accuracy",
    "bayes_posterior",
    "default_task",
    "draw_labeled",
    "draw_unlabeled",
    "sampling_density",
    "unbiased_sampler",
    "ClassifierConfig",
    "KernelStats",
    "ParzenModel",
    "accuracy_on",
    "fit",
    "posterior",
    "predict",
    "LocalLabelStatistics",
    "PerformanceEstimate",
    "generalization_error_estimate",
    "kfold_cv",
    "local_label_statistics",
    "probabilistic_performance",
    "self_label_cv",
    "subsample_baseline",
    "true_baseline",
    "BoxplotStats",
    "EstimatorSpec",
    "ExperimentSpec",
    "RunRecord",
    "derive_substream",
    "run_bias_sweep",
    "run_cv_folds",
    "run_estimator_comparison",
    "run_eval_size_distribution",
    "run_experiment",
    "summarize",
    "parse_config",
    "resolve_config",
]
