#!/usr/bin/env python3
"""
detlab command line: search, replay, summarize

    python detlab_cli.py search --config config/search_smoke.yaml
    python detlab_cli.py search --checks thm1,conj1 --dims 2,3,4 --trials 10000 --seed 7 --p-grid 0.5:2.0:0.25 --out report.jsonl
    python detlab_cli.py replay --pair corpus/worked_example.json --check thm3 --p 3
    python detlab_cli.py replay --report report.jsonl --trial 0
    python detlab_cli.py summarize report.jsonl

Exit codes: 0 success, 1 a proven statement failed, 2 bad input or I/O error.
"""

import argparse
import json
import logging
import sys

import numpy as np

from checks.registry import get_available_checks
from replay_runner import replay, replay_trial
from report_summary import format_summary, summarize
from search_runner import SearchConfig, load_search_config, run_search
from utils.errors import ConfigError, DetlabError, MatrixParseError, ReportParseError
from utils.linalg_core import DEFAULT_EPS, TOLERANCE_ENV_VAR, Tolerance

logging.basicConfig(level=logging.INFO,
                    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROVEN_FAILURE = 1
EXIT_INPUT_ERROR = 2


def parse_grid(text, cast=float):
    """
    Parse "a:b:step" (inclusive range) or a comma-separated list

    Raises:
        ConfigError: malformed grid
    """
    if text is None:
        return None
    try:
        if ":" in text:
            parts = [float(part) for part in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ConfigError(f"Range grid must be 'start:stop:step' with step > 0, got {text!r}")
            start, stop, step = parts
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [cast(round(start + i * step, 12)) for i in range(count)]
        return [cast(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"Invalid grid {text!r}: {e}")


def parse_tolerance(text):
    if text is None:
        return None
    return Tolerance.from_env({TOLERANCE_ENV_VAR: text})


def search_command(args):
    overrides = {
        "checks": args.checks.split(",") if args.checks else None,
        "dims": parse_grid(args.dims, int),
        "trials_per_cell": args.trials,
        "seed": args.seed,
        "p_grid": parse_grid(args.p_grid),
        "t_grid": parse_grid(args.t_grid),
        "k_list": parse_grid(args.k_list, int),
        "out_path": args.out,
        "workers": args.workers,
        "tol": parse_tolerance(args.tol),
        "eps": args.eps,
    }
    if args.no_inject:
        overrides["inject_example"] = False

    if args.config:
        config = load_search_config(args.config, overrides)
    else:
        config = SearchConfig.from_dict({k: v for k, v in overrides.items() if v is not None})

    report = run_search(config)
    print(format_summary(report.summary))
    print(f"\nRecords: {report.records_path}")
    print(f"Summary: {report.summary_path}")
    return EXIT_PROVEN_FAILURE if report.summary["proven_failures"] else EXIT_OK


def replay_command(args):
    tol = parse_tolerance(args.tol)
    if args.report:
        if args.trial is None:
            raise ConfigError("--report needs --trial")
        record, result, difference = replay_trial(args.report, args.trial)
        output = {
            "trial_index": record["trial_index"],
            "seed": record.get("seed"),
            "stored_margin": record.get("margin"),
            "margin_difference": difference,
            "result": result.to_dict(),
        }
    else:
        if not args.pair or not args.check:
            raise ConfigError("replay needs --pair and --check (or --report and --trial)")
        params = {"p": args.p, "t": args.t, "k": args.k, "orientation": args.orientation}
        result = replay(args.pair, args.check, {k: v for k, v in params.items() if v is not None}, tol, args.eps)
        output = result.to_dict()

    print(json.dumps(output, indent=2))
    return EXIT_OK


def summarize_command(args):
    text, exit_code = summarize(args.report)
    print(text)
    return exit_code


def build_parser():
    parser = argparse.ArgumentParser(description="Determinant and majorization inequality lab")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    search = subparsers.add_parser("search", help="Run a randomized search")
    search.add_argument("--config", help="YAML or JSON search configuration")
    search.add_argument("--checks", help=f"Comma-separated check ids ({', '.join(get_available_checks())})")
    search.add_argument("--dims", help="Dimensions, e.g. 2,3,4 or 2:6:1")
    search.add_argument("--trials", type=int, help="Trials per (check, n, parameter) cell")
    search.add_argument("--seed", type=int, help="Master seed")
    search.add_argument("--p-grid", help="p values, 'start:stop:step' or a comma list")
    search.add_argument("--t-grid", help="t values, 'start:stop:step' or a comma list")
    search.add_argument("--k-list", help="k values for even_power, comma list")
    search.add_argument("--out", help="Report path; records go to <out>.jsonl")
    search.add_argument("--workers", type=int, help="Worker processes")
    search.add_argument("--tol", help="'rel' or 'rel,abs'")
    search.add_argument("--eps", type=float, help="Regularization strength")
    search.add_argument("--no-inject", action="store_true", help="Do not inject the bundled Example pair")
    search.set_defaults(handler=search_command)

    replay_parser = subparsers.add_parser("replay", help="Run one check on a stored pair or trial")
    replay_parser.add_argument("--pair", help="Matrix pair JSON file")
    replay_parser.add_argument("--check", help="Check id")
    replay_parser.add_argument("--report", help="Report .jsonl to take a trial from")
    replay_parser.add_argument("--trial", type=int, help="Trial index in --report")
    replay_parser.add_argument("--p", type=float)
    replay_parser.add_argument("--t", type=float)
    replay_parser.add_argument("--k", type=int)
    replay_parser.add_argument("--orientation", choices=["ba", "ab"], help="thm3 absolute-value orientation")
    replay_parser.add_argument("--tol", help="'rel' or 'rel,abs'")
    replay_parser.add_argument("--eps", type=float, default=DEFAULT_EPS)
    replay_parser.set_defaults(handler=replay_command)

    summary = subparsers.add_parser("summarize", help="Summarize a report")
    summary.add_argument("report", help="Report .jsonl")
    summary.set_defaults(handler=summarize_command)
    return parser


def main(argv=None):
    """Main function"""
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return args.handler(args)
    except (ConfigError, MatrixParseError, ReportParseError) as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT_ERROR
    except DetlabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
