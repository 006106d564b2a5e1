"""
Randomized search over PSD pairs

Runs every configured check over dimensions, parameter grids and sampled
pairs, streams one JSON record per trial and writes a summary document last.
Trials are independent: each one's matrices are determined by
derive_trial_seed(master_seed, trial_index), so a search is reproducible and
independent of the worker count.
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import islice
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from checks import Verdict, to_jsonable
from checks.registry import CHECK_CLASSES, PROVEN_CHECK_IDS, check_param_name, get_check
from report_summary import build_summary, load_records, write_summary
from utils.errors import ConfigError, DetlabError
from utils.linalg_core import DEFAULT_EPS, Tolerance
from utils.matrix_io import WORKED_EXAMPLE_FILE, load_corpus_pair
from utils.sampler import DEFAULT_COND, SamplerKind, SamplerSpec, derive_trial_seed, sample_psd

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"
CORPUS_KIND = "corpus"

# tasks handed to the process pool at a time
TASK_BATCH_SIZE = 4096

DEFAULT_P_GRIDS = {
    "thm3": [0.0, 0.5, 1.0, 1.5, 2.0],
    "conj1": [0.25 * i for i in range(1, 9)],
    "conj2": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0],
}
DEFAULT_T_GRID = [0.0, 0.25, 0.5, 0.75, 1.0]
DEFAULT_K_LIST = [1, 2]

# checks whose n = 2 cells start with the bundled Example pair
EXAMPLE_INJECTION_CHECKS = ("thm3", "conj1", "conj2")

CONFIG_SECTIONS = ("general", "sampler", "grids", "tolerance")


@dataclass
class SearchConfig:
    """
    One search run

    p_grid applies to every p-parametrized check; when None each check uses
    its own default grid from DEFAULT_P_GRIDS.
    """

    checks: List[str]
    dims: List[int]
    trials_per_cell: int = 100
    seed: int = 0
    sampler_kinds: List[str] = field(default_factory=lambda: [k.value for k in SamplerKind])
    cond: float = DEFAULT_COND
    rank: Optional[int] = None
    p_grid: Optional[List[float]] = None
    t_grid: List[float] = field(default_factory=lambda: list(DEFAULT_T_GRID))
    k_list: List[int] = field(default_factory=lambda: list(DEFAULT_K_LIST))
    tol: Tolerance = field(default_factory=Tolerance.from_env)
    eps: float = DEFAULT_EPS
    out_path: str = "report"
    workers: int = 1
    inject_example: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        """
        Raises:
            ConfigError: on the first invalid field
        """
        if not self.checks:
            raise ConfigError("'checks' must be a non-empty list")
        unknown = [c for c in self.checks if c not in CHECK_CLASSES]
        if unknown:
            raise ConfigError(f"Unknown checks {unknown} (available: {list(CHECK_CLASSES)})")
        if not self.dims:
            raise ConfigError("'dims' must be a non-empty list")
        if any(n < 1 for n in self.dims):
            raise ConfigError(f"'dims' entries must be >= 1, got {self.dims}")
        if self.trials_per_cell < 1:
            raise ConfigError(f"'trials_per_cell' must be >= 1, got {self.trials_per_cell}")
        if not self.sampler_kinds:
            raise ConfigError("'sampler_kinds' must be a non-empty list")
        for kind in self.sampler_kinds:
            if kind not in [k.value for k in SamplerKind]:
                raise ConfigError(f"Unknown sampler kind {kind!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"'seed' must be a 64-bit unsigned integer, got {self.seed}")
        if not self.eps > 0:
            raise ConfigError(f"'eps' must be > 0, got {self.eps}")
        if self.workers < 1:
            raise ConfigError(f"'workers' must be >= 1, got {self.workers}")
        if self.cond < 1:
            raise ConfigError(f"'cond' must be >= 1, got {self.cond}")

        # every grid value must be accepted by every check that uses it
        for check_id in self.checks:
            check = get_check(check_id, self.tol, self.eps)
            name = check.param_name
            if name is None:
                continue
            grid = self.grid_for(check_id)
            if not grid:
                raise ConfigError(f"Grid for parameter {name!r} of {check_id} is empty")
            for value in grid:
                try:
                    check.validate_param(value)
                except (DetlabError, ValueError) as e:
                    raise ConfigError(f"Invalid {name} grid for {check_id}: {e}")

    def grid_for(self, check_id):
        """Parameter values searched for `check_id` ([None] for parameterless checks)"""
        name = check_param_name(check_id)
        if name == "p":
            return list(self.p_grid) if self.p_grid is not None else list(DEFAULT_P_GRIDS.get(check_id, [1.0]))
        if name == "t":
            return list(self.t_grid)
        if name == "k":
            return list(self.k_list)
        return [None]

    def record_paths(self):
        """(records .jsonl path, summary .json path) derived from out_path"""
        out = Path(self.out_path)
        if out.suffix == ".jsonl":
            return out, out.with_suffix(".summary.json")
        return out.with_name(out.name + ".jsonl"), out.with_name(out.name + ".summary.json")

    def to_dict(self):
        data = asdict(self)
        data["tol"] = self.tol.to_dict()
        return to_jsonable(data)

    @classmethod
    def from_dict(cls, data):
        """
        Build a config from a flat mapping or the sectioned layout
        (general / sampler / grids / tolerance)

        Raises:
            ConfigError: unknown keys or values that cannot be coerced
        """
        flat = flatten_config(data)
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(flat) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys {unknown}")

        try:
            kwargs = {}
            for key, value in flat.items():
                if value is None:
                    continue
                kwargs[key] = _coerce(key, value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration value: {e}")
        if "checks" not in kwargs or "dims" not in kwargs:
            raise ConfigError("Configuration needs 'checks' and 'dims'")
        return cls(**kwargs)


def flatten_config(data):
    """Merge the general / sampler / grids / tolerance sections into one flat mapping"""
    if not isinstance(data, dict):
        raise ConfigError("Search configuration must be a mapping")
    flat = {}
    for key, value in data.items():
        if key not in CONFIG_SECTIONS or not isinstance(value, dict):
            flat[key] = value
        elif key == "tolerance":
            flat["tol"] = value
        else:
            flat.update(value)
    aliases = {"kinds": "sampler_kinds", "trials": "trials_per_cell", "out": "out_path"}
    for alias, name in aliases.items():
        if alias in flat:
            flat.setdefault(name, flat.pop(alias))
    return flat


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return [value]


def _coerce(key, value):
    """Coerce YAML/JSON values; PyYAML reads '1e-9' as a string"""
    if key == "checks" or key == "sampler_kinds":
        return [str(v) for v in _as_list(value)]
    if key == "dims":
        return [int(v) for v in _as_list(value)]
    if key in ("p_grid", "t_grid"):
        return [float(v) for v in _as_list(value)]
    if key == "k_list":
        return [int(v) for v in _as_list(value)]
    if key in ("trials_per_cell", "seed", "workers", "rank"):
        return int(value)
    if key in ("cond", "eps"):
        return float(value)
    if key == "tol":
        if isinstance(value, Tolerance):
            return value
        if isinstance(value, dict):
            return Tolerance.from_dict(value)
        return Tolerance(rel=float(value))
    if key == "inject_example":
        return bool(value)
    return str(value)


def load_search_config(config_path, overrides=None):
    """
    Load a YAML (or JSON) search configuration

    Args:
        config_path: Path to the file
        overrides: Flat mapping of values that win over the file (CLI flags)

    Returns:
        SearchConfig
    """
    try:
        with open(config_path, "r") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing config {config_path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config {config_path} must hold a mapping")

    flat = flatten_config(data)
    flat.update({k: v for k, v in (overrides or {}).items() if v is not None})
    logger.info(f"Loaded search config from {config_path}")
    return SearchConfig.from_dict(flat)


def _sampler_spec(kind, n, seed, config):
    rank = None
    if kind == SamplerKind.RANK_DEFICIENT.value:
        rank = config.rank if config.rank is not None else max(1, n - 1)
        rank = min(rank, n)
    return SamplerSpec(kind=kind, n=n, seed=seed, cond=config.cond, rank=rank).to_dict()


def _corpus_spec(name, n, matrix):
    return {"kind": CORPUS_KIND, "n": n, "file": name, "matrix": matrix}


def plan_trials(config):
    """
    Yield one task per trial in a fixed order: check, n, parameter, trial

    Each task is a plain dict so it can be shipped to worker processes.
    """
    kinds = list(config.sampler_kinds)
    trial_index = 0
    for check_id in config.checks:
        name = check_param_name(check_id)
        for n in config.dims:
            for value in config.grid_for(check_id):
                params = {} if name is None else {name: value}
                for trial in range(config.trials_per_cell):
                    seed = derive_trial_seed(config.seed, trial_index)
                    if config.inject_example and trial == 0 and n == 2 and check_id in EXAMPLE_INJECTION_CHECKS:
                        sampler_a = _corpus_spec(WORKED_EXAMPLE_FILE, n, "A")
                        sampler_b = _corpus_spec(WORKED_EXAMPLE_FILE, n, "B")
                    else:
                        kind = kinds[trial % len(kinds)]
                        sampler_a = _sampler_spec(kind, n, derive_trial_seed(seed, 0), config)
                        sampler_b = _sampler_spec(kind, n, derive_trial_seed(seed, 1), config)
                    yield {
                        "trial_index": trial_index,
                        "seed": seed,
                        "check_id": check_id,
                        "n": n,
                        "params": params,
                        "sampler_a": sampler_a,
                        "sampler_b": sampler_b,
                        "tol": config.tol.to_dict(),
                        "eps": config.eps,
                    }
                    trial_index += 1


def count_trials(config):
    return sum(
        len(config.dims) * len(config.grid_for(check_id)) * config.trials_per_cell
        for check_id in config.checks
    )


def trial_matrices(sampler_a, sampler_b):
    """Rebuild the (A, B) pair described by two recorded sampler specs"""
    if sampler_a.get("kind") == CORPUS_KIND:
        return load_corpus_pair(sampler_a["file"])
    A = sample_psd(SamplerSpec.from_dict(sampler_a))
    B = sample_psd(SamplerSpec.from_dict(sampler_b))
    return A, B


def run_trial(task):
    """
    Run one planned trial and return its record

    Structural errors (dimension, non-PSD, singular) become warn records
    with the message in details.error; inequality failures are ordinary
    fail records.
    """
    tol = Tolerance.from_dict(task["tol"])
    record = {
        "trial_index": task["trial_index"],
        "seed": task["seed"],
        "check_id": task["check_id"],
        "n": task["n"],
        "params": task["params"],
        "sampler_a": task["sampler_a"],
        "sampler_b": task["sampler_b"],
        "tol": task["tol"],
        "eps": task["eps"],
    }

    start = time.perf_counter()
    try:
        A, B = trial_matrices(task["sampler_a"], task["sampler_b"])
        check = get_check(task["check_id"], tol, task["eps"])
        result = check.evaluate(A, B, **task["params"])
    except (DetlabError, np.linalg.LinAlgError) as e:
        record.update({
            "lhs": None,
            "rhs": None,
            "margin": None,
            "raw_margin": None,
            "verdict": Verdict.WARN.value,
            "proven": task["check_id"] in PROVEN_CHECK_IDS,
            "accuracy_warning": False,
            "tol_used": task["tol"],
            "details": {"error": f"{type(e).__name__}: {e}"},
        })
    else:
        result_dict = result.to_dict()
        record.update({
            "params": result_dict["params"],
            "lhs": result_dict["lhs"],
            "rhs": result_dict["rhs"],
            "margin": result_dict["margin"],
            "raw_margin": result_dict["raw_margin"],
            "verdict": result_dict["verdict"],
            "proven": result_dict["proven"],
            "accuracy_warning": result_dict["accuracy_warning"],
            "tol_used": result_dict["tol_used"],
            "details": result_dict["details"],
        })
    record["wall_time"] = time.perf_counter() - start
    return record


def reproduce_trial(record):
    """
    Re-run a stored trial from its seed and sampler specs

    Returns:
        CheckResult
    """
    A, B = trial_matrices(record["sampler_a"], record["sampler_b"])
    tol = Tolerance.from_dict(record.get("tol") or {})
    check = get_check(record["check_id"], tol, record.get("eps", DEFAULT_EPS))
    return check.evaluate(A, B, **(record.get("params") or {}))


@dataclass
class SearchReport:
    """Result of run_search: where the records went plus the summary document"""

    records_path: Path
    summary_path: Path
    summary: dict

    @property
    def total_records(self):
        return self.summary["total_records"]

    def to_dict(self):
        return {
            "records_path": str(self.records_path),
            "summary_path": str(self.summary_path),
            **self.summary,
        }


def _execute(config, tasks):
    if config.workers <= 1:
        for task in tasks:
            yield run_trial(task)
        return
    tasks = iter(tasks)
    with ProcessPoolExecutor(max_workers=config.workers) as executor:
        # map submits its whole input at once, so feed it bounded batches
        while True:
            batch = list(islice(tasks, TASK_BATCH_SIZE))
            if not batch:
                break
            yield from executor.map(run_trial, batch, chunksize=64)


def run_search(config):
    """
    Execute a search and write its report

    Args:
        config: SearchConfig

    Returns:
        SearchReport

    Raises:
        OSError: the report destination is not writable
    """
    records_path, summary_path = config.record_paths()
    records_path.parent.mkdir(parents=True, exist_ok=True)
    total = count_trials(config)

    logger.info(
        f"Search: checks={config.checks} dims={config.dims} trials_per_cell={config.trials_per_cell} "
        f"seed={config.seed} workers={config.workers} ({total} trials)"
    )
    injected = [c for c in config.checks if c in EXAMPLE_INJECTION_CHECKS]
    if config.inject_example and injected and 2 not in config.dims:
        logger.warning(f"Example pair not injected for {injected}: dims do not include 2")
    start_time = time.time()
    written = 0
    with open(records_path, "w", encoding="utf-8") as f:
        for record in _execute(config, plan_trials(config)):
            f.write(json.dumps(to_jsonable(record), sort_keys=True) + "\n")
            f.flush()
            written += 1
            if written % 1000 == 0:
                logger.info(f"{written}/{total} trials written")

    duration = time.time() - start_time
    logger.info(f"Wrote {written} records to {records_path} in {duration:.2f} seconds")

    summary = build_summary(load_records(records_path), config=config.to_dict(), tool_version=TOOL_VERSION)
    write_summary(summary, summary_path)
    logger.info(f"Summary written to {summary_path}")
    return SearchReport(records_path=records_path, summary_path=summary_path, summary=summary)
