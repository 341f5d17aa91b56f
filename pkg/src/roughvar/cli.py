"""Command line front end: ``roughvar <experiment> [options]``.

Exit code 0 when every verdict passes, 1 when any fails, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, config_from_dict, run_experiment, write_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roughvar",
        description="Run a rough-path regularity experiment and report verdicts.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS, help="experiment to run")
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="directory for summary.json / raw.csv / manifest.json")
    parser.add_argument("--model", help="override the model (bm or fbm:H)")
    parser.add_argument("--replications", type=int, help="override the replication count")
    parser.add_argument("--overwrite", action="store_true", help="allow clobbering the out dir")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    data: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"roughvar: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 2
    if data.get("experiment", args.experiment) != args.experiment:
        print(
            f"roughvar: config is for {data['experiment']!r}, asked to run {args.experiment!r}",
            file=sys.stderr,
        )
        return 2
    data["experiment"] = args.experiment
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["out_dir"] = args.out
    if args.model is not None:
        data["model"] = args.model
    if args.replications is not None:
        data["replications"] = args.replications
    if args.overwrite:
        data["overwrite"] = True
    try:
        config = config_from_dict(data)
        report = run_experiment(config)
    except ValueError as exc:
        print(f"roughvar: config error: {exc}", file=sys.stderr)
        return 2

    for v in report.verdicts:
        status = "PASS" if v.passed else "FAIL"
        print(f"[{report.config.experiment}:{v.id}] {status} {json.dumps(v.details, default=str)}")
    print(
        f"[{report.config.experiment}] {'ALL PASSED' if report.passed else 'FAILURES'}"
        f" in {report.wall_clock:.1f}s"
    )
    if report.config.out_dir:
        try:
            write_report(report, report.config.out_dir, overwrite=report.config.overwrite)
        except FileExistsError as exc:
            print(f"roughvar: {exc}", file=sys.stderr)
            return 2
        print(f"report written to {report.config.out_dir}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
