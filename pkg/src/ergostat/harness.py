"""Reproducible multi-trial experiment driver.

Runs seeded trials of the three tests over a grid of sample lengths
and reports per-trial records plus per-length summaries.  Per-trial
seeds are stable hashes of (master seed, test, length, trial index),
so results are independent of execution order and of the worker count;
``ERGOSTAT_THREADS`` bounds the process pool.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .changepoint import estimate_changepoint
from .classify import classify
from .cylinder import Sample
from .dataio import _atomic_write, write_json
from .distance import WeightScheme
from .errors import ConfigError
from .gof import GofConfig, calibrate_gamma, gof_test
from .process_models import model_from_spec
from .seeding import derive_seed

_TESTS = ("gof", "classify", "changepoint")

CSV_COLUMNS = (
    "test", "n", "trial", "seed", "truth", "outcome",
    "statistic", "gamma_hat", "d_xz", "d_yz", "k_hat", "abs_err",
    "duration_s",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a test, its models, a length grid, and seeding.

    Model roles: ``gof`` uses ``null`` (and optionally ``data`` for
    power studies; defaults to ``null``); ``classify`` and
    ``changepoint`` use ``x`` and ``y``.
    """

    test: str
    models: dict
    n_grid: tuple
    trials: int
    seed: int
    scheme: WeightScheme = WeightScheme()
    change_fraction: float | None = None
    alpha: float = 0.05
    n_cal: int | None = None

    def __post_init__(self):
        if self.test not in _TESTS:
            raise ConfigError(f"unknown test {self.test!r}; expected one of {_TESTS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be nonempty and strictly increasing")
        object.__setattr__(self, "n_grid", grid)
        roles = {"gof": ("null",), "classify": ("x", "y"),
                 "changepoint": ("x", "y")}[self.test]
        for role in roles:
            if role not in self.models:
                raise ConfigError(f"test {self.test!r} needs a model named {role!r}")
        if self.test == "changepoint":
            if self.change_fraction is None:
                raise ConfigError("changepoint experiments need change_fraction")
            if not (0.0 < self.change_fraction < 1.0):
                raise ConfigError("change_fraction must lie in (0, 1)")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError("alpha must lie in (0, 1)")


def experiment_spec_from_dict(d: dict) -> ExperimentSpec:
    """Build a spec from parsed JSON, reporting the offending key on errors."""
    if not isinstance(d, dict):
        raise ConfigError("experiment spec must be a mapping")
    known = {"test", "models", "n_grid", "trials", "seed", "scheme",
             "change_fraction", "alpha", "n_cal"}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unexpected experiment keys: {sorted(extra)}")
    for key in ("test", "models", "n_grid", "trials", "seed"):
        if key not in d:
            raise ConfigError(f"experiment spec is missing {key!r}")
    scheme_d = d.get("scheme", {})
    if not isinstance(scheme_d, dict):
        raise ConfigError("scheme must be a mapping with m_max / l_max")
    scheme = WeightScheme(int(scheme_d.get("m_max", 3)),
                          int(scheme_d.get("l_max", 8)))
    models = d["models"]
    if not isinstance(models, dict):
        raise ConfigError("models must map role names to model specs")
    for name, ms in models.items():
        model_from_spec(ms)  # validate early, with the role name on failure
    return ExperimentSpec(
        test=d["test"],
        models=models,
        n_grid=tuple(d["n_grid"]),
        trials=int(d["trials"]),
        seed=int(d["seed"]),
        scheme=scheme,
        change_fraction=d.get("change_fraction"),
        alpha=float(d.get("alpha", 0.05)),
        n_cal=d.get("n_cal"),
    )


@dataclass(frozen=True)
class TrialRecord:
    test: str
    n: int
    trial: int
    seed: int
    truth: object = None
    outcome: object = None
    statistic: float | None = None
    gamma_hat: float | None = None
    d_xz: float | None = None
    d_yz: float | None = None
    k_hat: int | None = None
    abs_err: int | None = None
    duration_s: float = 0.0

    def row(self) -> list:
        return ["" if getattr(self, c) is None else getattr(self, c)
                for c in CSV_COLUMNS]


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    records: tuple
    summary: dict = field(compare=False)


def _default_n_cal(alpha: float) -> int:
    # enough draws for a non-vacuous threshold with headroom
    return max(199, int(np.ceil(2.0 / alpha)))


def _gof_trial(spec: ExperimentSpec, n: int, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    trial_seed = derive_seed(spec.seed, "gof", n, trial)
    null_model = model_from_spec(spec.models["null"])
    data_spec = spec.models.get("data", spec.models["null"])
    data_model = model_from_spec(data_spec)
    n_cal = spec.n_cal if spec.n_cal is not None else _default_n_cal(spec.alpha)
    cfg = GofConfig(spec.alpha, n, n_cal, derive_seed(trial_seed, "cal"),
                    spec.scheme)
    calib = calibrate_gamma(null_model, cfg)
    x = data_model.sample(n, derive_seed(trial_seed, "data"))
    out = gof_test(x, null_model, calib, spec.scheme)
    truth = "H0" if data_spec == spec.models["null"] else "H1"
    return TrialRecord(
        test="gof", n=n, trial=trial, seed=trial_seed, truth=truth,
        outcome=out.decision, statistic=out.statistic.value,
        gamma_hat=out.gamma_hat, duration_s=time.perf_counter() - t0,
    )


def _classify_trial(spec: ExperimentSpec, n: int, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    trial_seed = derive_seed(spec.seed, "classify", n, trial)
    model_x = model_from_spec(spec.models["x"])
    model_y = model_from_spec(spec.models["y"])
    x = model_x.sample(n, derive_seed(trial_seed, "x"))
    y = model_y.sample(n, derive_seed(trial_seed, "y"))
    truth = 1 if trial % 2 == 0 else 2
    z_model = model_x if truth == 1 else model_y
    z = z_model.sample(n, derive_seed(trial_seed, "z"))
    out = classify(x, y, z, spec.scheme)
    return TrialRecord(
        test="classify", n=n, trial=trial, seed=trial_seed, truth=truth,
        outcome=out.label, d_xz=out.d_xz.value, d_yz=out.d_yz.value,
        duration_s=time.perf_counter() - t0,
    )


def _changepoint_trial(spec: ExperimentSpec, n: int, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    trial_seed = derive_seed(spec.seed, "changepoint", n, trial)
    model_x = model_from_spec(spec.models["x"])
    model_y = model_from_spec(spec.models["y"])
    k = int(round(spec.change_fraction * n))
    x = model_x.sample(k, derive_seed(trial_seed, "x"))
    y = model_y.sample(n - k, derive_seed(trial_seed, "y"))
    z = Sample(np.concatenate([x.values, y.values]))
    est = estimate_changepoint(z, spec.scheme)
    return TrialRecord(
        test="changepoint", n=n, trial=trial, seed=trial_seed, truth=k,
        outcome=est.k_hat, k_hat=est.k_hat, abs_err=abs(est.k_hat - k),
        duration_s=time.perf_counter() - t0,
    )


_TRIAL_FN = {
    "gof": _gof_trial,
    "classify": _classify_trial,
    "changepoint": _changepoint_trial,
}


def _run_task(args) -> TrialRecord:
    spec, n, trial = args
    return _TRIAL_FN[spec.test](spec, n, trial)


def _worker_count() -> int:
    raw = os.environ.get("ERGOSTAT_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"ERGOSTAT_THREADS must be an integer, got {raw!r}")
    return max(1, workers)


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentResult:
    """Execute ``trials`` seeded runs at every grid length and summarize.

    Records come back sorted by (length, trial index) regardless of the
    worker count, and rerunning the same spec reproduces them
    bit-for-bit apart from the wall-clock durations.
    """
    if workers is None:
        workers = _worker_count()
    tasks = [(spec, n, t) for n in spec.n_grid for t in range(spec.trials)]
    if workers == 1:
        records = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=1))
    records.sort(key=lambda r: (r.n, r.trial))
    return ExperimentResult(spec, tuple(records), _summarize(spec, records))


def _summarize(spec: ExperimentSpec, records) -> dict:
    summary = {"test": spec.test, "trials": spec.trials, "per_n": []}
    for n in spec.n_grid:
        rows = [r for r in records if r.n == n]
        entry = {"n": n}
        if spec.test == "gof":
            entry["rejection_rate"] = (
                sum(r.outcome == "reject_H0" for r in rows) / len(rows)
            )
        elif spec.test == "classify":
            correct = sum(r.outcome == r.truth for r in rows)
            entry["accuracy"] = correct / len(rows)
            entry["error_rate"] = 1.0 - entry["accuracy"]
        else:
            errs = np.array([r.abs_err for r in rows], dtype=float)
            entry["median_abs_err"] = float(np.median(errs))
            entry["median_err_frac"] = float(np.median(errs / n))
        summary["per_n"].append(entry)
    return summary


def write_records_csv(path: str, records):
    """All trial rows under a fixed documented header, written atomically."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.row())
    _atomic_write(path, buf.getvalue())


def write_summary_json(path: str, summary: dict):
    write_json(path, summary)
