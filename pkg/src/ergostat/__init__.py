"""Distributional-distance inference for stationary ergodic time series.

Estimates the distributional distance between real-valued series from
sliding-window cell frequencies over a dyadic cylinder hierarchy, and
builds three tests on top of it: goodness-of-fit against a known
process, three-sample classification, and offline change-point
estimation.
"""

from .changepoint import (
    ChangePointEstimate,
    estimate_changepoint,
    incremental_scan,
    naive_scan,
    parse_boundary_expr,
    resolve_boundary,
)
from .classify import ClassificationOutcome, classify
from .cylinder import (
    CellIndex,
    Cylinder,
    FreqTable,
    Interval,
    PartitionLevel,
    Sample,
    cell_of,
    freq_table,
    nu,
)
from .distance import (
    Comparison,
    DistanceValue,
    WeightScheme,
    compare_certified,
    dhat,
    dhat_model,
    dhat_model_batch,
    level_tv,
    level_tv_vs_model,
    model_distance,
)
from .errors import CapabilityError, ConfigError, ErgostatError, SampleFormatError
from .gof import (
    Calibration,
    GofConfig,
    GofOutcome,
    calibrate_gamma,
    calibration_distances,
    conformal_index,
    gof_test,
)
from .harness import (
    ExperimentResult,
    ExperimentSpec,
    TrialRecord,
    experiment_spec_from_dict,
    run_experiment,
    write_records_csv,
    write_summary_json,
)
from .kernels import available_backends, backend_name
from .process_models import (
    FiniteMarkov,
    FunctionOfMarkov,
    IIDDiscrete,
    MarkovSpec,
    MonteCarloModel,
    PiecewiseUniform,
    ProcessModel,
    Rotation,
    model_from_spec,
)
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "Calibration",
    "CellIndex",
    "ChangePointEstimate",
    "ClassificationOutcome",
    "Comparison",
    "ConfigError",
    "Cylinder",
    "DistanceValue",
    "ErgostatError",
    "ExperimentResult",
    "ExperimentSpec",
    "FiniteMarkov",
    "FreqTable",
    "FunctionOfMarkov",
    "GofConfig",
    "GofOutcome",
    "IIDDiscrete",
    "Interval",
    "MarkovSpec",
    "MonteCarloModel",
    "PartitionLevel",
    "PiecewiseUniform",
    "ProcessModel",
    "Rotation",
    "Sample",
    "SampleFormatError",
    "TrialRecord",
    "WeightScheme",
    "available_backends",
    "backend_name",
    "calibrate_gamma",
    "calibration_distances",
    "cell_of",
    "classify",
    "compare_certified",
    "conformal_index",
    "derive_seed",
    "dhat",
    "dhat_model",
    "dhat_model_batch",
    "estimate_changepoint",
    "experiment_spec_from_dict",
    "freq_table",
    "gof_test",
    "incremental_scan",
    "level_tv",
    "level_tv_vs_model",
    "model_distance",
    "model_from_spec",
    "naive_scan",
    "nu",
    "parse_boundary_expr",
    "resolve_boundary",
    "run_experiment",
    "write_records_csv",
    "write_summary_json",
]
