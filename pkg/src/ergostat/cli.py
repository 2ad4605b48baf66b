"""Command-line interface.

Verbs: ``simulate`` (draw a sample from a model), ``gof``,
``classify``, ``changepoint`` (run one test), and ``experiment``
(seeded multi-trial grids from a spec file).  Results are JSON on
stdout; exit code 0 on success, 2 on configuration errors, 3 on
runtime failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .changepoint import estimate_changepoint
from .classify import classify
from .dataio import read_sample, write_json, write_sample
from .distance import WeightScheme
from .errors import ConfigError, SampleFormatError
from .gof import GofConfig, calibrate_gamma, gof_test
from .harness import (
    experiment_spec_from_dict,
    run_experiment,
    write_records_csv,
    write_summary_json,
)
from .process_models import model_from_spec
from .seeding import derive_seed


def _load_model(arg: str):
    """Model argument: inline JSON object or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith("{"):
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read model spec {arg!r}: {exc}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model spec is not valid JSON: {exc}") from exc
    return model_from_spec(spec)


def _add_scheme_flags(p: argparse.ArgumentParser):
    p.add_argument("--m-max", type=int, default=3,
                   help="max window length (default 3)")
    p.add_argument("--l-max", type=int, default=8,
                   help="max dyadic resolution level (default 8)")


def _scheme(args) -> WeightScheme:
    return WeightScheme(args.m_max, args.l_max)


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_simulate(args) -> int:
    model = _load_model(args.model)
    sample = model.sample(args.n, args.seed)
    print(json.dumps({"model": model.describe()}), file=sys.stderr)
    if args.out:
        write_sample(args.out, sample)
    else:
        for v in sample.values:
            sys.stdout.write(f"{v!r}\n")
    return 0


def _cmd_gof(args) -> int:
    model = _load_model(args.model)
    scheme = _scheme(args)
    cfg = GofConfig(args.alpha, args.n, args.n_cal, args.seed, scheme)
    calib = calibrate_gamma(model, cfg)
    if args.data:
        x = read_sample(args.data, args.column)
    else:
        x = model.sample(args.n, derive_seed(args.seed, "selftrial"))
    out = gof_test(x, model, calib, scheme)
    payload = out.to_dict()
    payload["config"] = {
        "alpha": args.alpha, "n": args.n, "n_cal": args.n_cal,
        "seed": args.seed, "m_max": args.m_max, "l_max": args.l_max,
        "self_trial": not bool(args.data),
    }
    payload["model"] = model.describe()
    _emit(payload)
    return 0


def _cmd_classify(args) -> int:
    scheme = _scheme(args)
    x = read_sample(args.x, args.column)
    y = read_sample(args.y, args.column)
    z = read_sample(args.z, args.column)
    out = classify(x, y, z, scheme)
    _emit(out.to_dict())
    return 0


def _cmd_changepoint(args) -> int:
    scheme = _scheme(args)
    z = read_sample(args.data, args.column)
    est = estimate_changepoint(z, scheme, boundary=args.boundary)
    if args.emit_scan:
        lines = ["t,dhat"] + [f"{t},{v!r}" for t, v in est.scan]
        with open(args.emit_scan, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    _emit(est.to_dict())
    return 0


def _cmd_experiment(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read experiment spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"experiment spec is not valid JSON: {exc}") from exc
    spec = experiment_spec_from_dict(raw)
    result = run_experiment(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    write_records_csv(os.path.join(args.out_dir, "records.csv"), result.records)
    write_summary_json(os.path.join(args.out_dir, "summary.json"), result.summary)
    _emit(result.summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergostat",
        description="Distributional-distance tests for stationary ergodic series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a sample from a process model")
    p.add_argument("--model", required=True, help="model spec: JSON file or inline JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("gof", help="goodness-of-fit test against a known model")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-cal", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--data", help="sample file; omit for a self-trial under H0")
    p.add_argument("--column", help="CSV column name (plain text if omitted)")
    _add_scheme_flags(p)
    p.set_defaults(fn=_cmd_gof)

    p = sub.add_parser("classify", help="is Z generated like X or like Y?")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--column")
    _add_scheme_flags(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("changepoint", help="estimate a single change point")
    p.add_argument("--data", required=True)
    p.add_argument("--column")
    p.add_argument("--boundary", help="margin expression over n, e.g. 'sqrt(n)'")
    p.add_argument("--emit-scan", help="write the per-split profile as CSV")
    _add_scheme_flags(p)
    p.set_defaults(fn=_cmd_changepoint)

    p = sub.add_parser("experiment", help="run a seeded multi-trial experiment")
    p.add_argument("--spec", required=True, help="experiment spec JSON file")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SampleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
