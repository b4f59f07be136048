from qaction.experiments.catalog import CATALOG, ExperimentEntry, Param, experiment_names
from qaction.experiments.config import (
    ExperimentConfig,
    list_templates,
    load_config,
    load_template,
    validate_config,
)
from qaction.experiments.runners import RUNNERS, run_experiment

__all__ = [
    "CATALOG",
    "ExperimentConfig",
    "ExperimentEntry",
    "Param",
    "RUNNERS",
    "experiment_names",
    "list_templates",
    "load_config",
    "load_template",
    "run_experiment",
    "validate_config",
]
