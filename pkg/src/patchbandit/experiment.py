"""Experiment orchestration: config matrix, worker pool, metric tables.

A plan names a bug set, a list of selection configs, and an attempt count.
Every (config, bug, attempt) cell derives its own seed from the base seed
by stable hashing, so any cell can be reproduced in isolation and reruns
are byte-identical regardless of worker count.
"""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .aos import (AosConfig, CADENCES, ConfigError, CREDITS, DEFAULT_ALPHA,
                  POLICIES, REWARDS)
from .corpus import DEFAULT_CORPUS_DIR, edits_to_jsonable, load_corpus
from .engine import (SearchConfig, derive_seed, run_repair,
                     run_repair_uniform, scheme_arm_count)
from .toylang import (DEFAULT_STEP_BUDGET, NothingToRepair, apply_edits,
                      run_tests)

# experiment searches cap the interpreter tighter than the library default:
# every true corpus fix runs in well under this, so only doomed variants
# are cut short
EXPERIMENT_STEP_BUDGET = 5000

CSV_COLUMNS = ("policy", "credit", "reward", "cadence", "arms", "alpha",
               "success_rate_micro", "success_rate_macro", "bugs_patched",
               "avg_variant", "median_variant")

_ARM_ALIASES = {"3": "arms3", "18": "arms18", "7": "arms7",
                "arms3": "arms3", "arms18": "arms18", "arms7": "arms7"}


class PlanFormatError(ValueError):
    """A plan manifest line could not be parsed."""


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


@dataclass(frozen=True)
class ConfigSpec:
    """One row of the selection-config matrix."""

    policy: str                      # "uniform" or a bandit policy
    credit: str = "avg"
    reward: str = "raw"
    cadence: str = "generation"
    arms: str = "arms3"
    alpha: float | None = None

    def __post_init__(self):
        scheme_arm_count(self.arms)
        if self.policy == "uniform":
            # the baseline has no bandit state; blank the unused axes
            object.__setattr__(self, "credit", "-")
            object.__setattr__(self, "reward", "-")
            object.__setattr__(self, "cadence", "-")
            object.__setattr__(self, "alpha", None)
            return
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.credit not in CREDITS:
            raise ConfigError(f"unknown credit {self.credit!r}")
        if self.reward not in REWARDS:
            raise ConfigError(f"unknown reward {self.reward!r}")
        if self.cadence not in CADENCES:
            raise ConfigError(f"unknown cadence {self.cadence!r}")
        if self.credit == "avg":
            object.__setattr__(self, "alpha", None)
        elif self.alpha is None:
            object.__setattr__(self, "alpha", DEFAULT_ALPHA[self.policy])
        if self.alpha is not None and not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in (0, 1], got {self.alpha}")

    @property
    def is_uniform(self) -> bool:
        return self.policy == "uniform"

    def key(self) -> str:
        """Canonical text identity, part of every cell's seed."""
        return "|".join((self.policy, self.credit, self.reward, self.cadence,
                         self.arms, _fmt(self.alpha)))

    def aos_config(self) -> AosConfig:
        if self.is_uniform:
            raise ConfigError("the uniform baseline has no bandit config")
        return AosConfig(policy=self.policy, credit=self.credit,
                         reward=self.reward, cadence=self.cadence,
                         alpha=self.alpha)


@dataclass(frozen=True)
class ExperimentPlan:
    configs: tuple
    bug_names: tuple | None = None      # None: the whole corpus
    attempts: int = 20
    base_seed: int = 0
    population_size: int = 40
    generations: int = 10
    step_budget: int = EXPERIMENT_STEP_BUDGET
    corpus_dir: str | None = None       # None: the packaged corpus

    def __post_init__(self):
        if not self.configs:
            raise PlanFormatError("a plan needs at least one config")
        if self.attempts < 1:
            raise PlanFormatError("attempts must be >= 1")

    def seed_for(self, bug_name: str, config: ConfigSpec,
                 attempt: int) -> int:
        return derive_seed(self.base_seed, bug_name, config.key(), attempt)


@dataclass(frozen=True)
class QualityScore:
    t_pass: int
    t_total: int

    @property
    def score(self) -> float:
        return self.t_pass / self.t_total


def evaluate_quality(edits, bug, step_budget: int = DEFAULT_STEP_BUDGET):
    """Held-out pass fraction of the patched program; None when the bug
    ships no held-out suite."""
    if bug.heldout_suite is None:
        return None
    patched, _ = apply_edits(bug.program, edits)
    report = run_tests(patched, bug.heldout_suite, step_budget=step_budget)
    return QualityScore(report.flags.count(True), len(report.flags))


# ------------------------------------------------------------ attempt pool

_BUG_CACHE = {}


def _bugs_for(corpus_dir):
    key = str(corpus_dir)
    if key not in _BUG_CACHE:
        _BUG_CACHE[key] = {bug.name: bug for bug in load_corpus(corpus_dir)}
    return _BUG_CACHE[key]


def _run_attempt(task):
    (corpus_dir, bug_name, spec_fields, seed, pop, gens, budget) = task
    bug = _bugs_for(corpus_dir)[bug_name]
    spec = ConfigSpec(*spec_fields)
    config = SearchConfig(
        seed=seed,
        aos=None if spec.is_uniform else spec.aos_config(),
        arm_scheme=spec.arms, population_size=pop, generations=gens)
    runner = run_repair_uniform if spec.is_uniform else run_repair
    try:
        outcome = runner(bug.program, bug.repair_suite, config,
                         step_budget=budget)
    except NothingToRepair:
        return {"seed": seed, "patched": False,
                "variants_evaluated_at_patch": None, "total_evaluations": 0,
                "edits": None, "quality": None, "aos_snapshot": None,
                "error": "nothing to repair"}
    record = {"seed": seed, "patched": outcome.patched,
              "variants_evaluated_at_patch": outcome.variants_evaluated_at_patch,
              "total_evaluations": outcome.total_evaluations,
              "edits": None, "quality": None,
              "aos_snapshot": (None if outcome.aos_snapshot is None
                               else list(outcome.aos_snapshot))}
    if outcome.patched:
        record["edits"] = edits_to_jsonable(outcome.patch.edits)
        quality = evaluate_quality(outcome.patch.edits, bug,
                                   step_budget=budget)
        if quality is not None:
            record["quality"] = {"t_pass": quality.t_pass,
                                 "t_total": quality.t_total,
                                 "score": quality.score}
    return record


def worker_count() -> int:
    """REPAIR_JOBS caps the pool; default is the machine's CPU count."""
    limit = os.environ.get("REPAIR_JOBS")
    if limit is not None:
        try:
            jobs = int(limit)
        except ValueError:
            raise ConfigError(f"REPAIR_JOBS must be an integer, got {limit!r}")
        if jobs < 1:
            raise ConfigError("REPAIR_JOBS must be >= 1")
        return jobs
    return os.cpu_count() or 1


# -------------------------------------------------------------- experiment

@dataclass(frozen=True)
class ExperimentReport:
    plan: ExperimentPlan
    detail: dict          # full JSON-ready structure
    errors: tuple         # (bug_name, message) pairs

    def to_json(self) -> str:
        return json.dumps(self.detail, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for block in self.detail["configs"]:
            metrics = block["metrics"]
            writer.writerow((
                block["policy"], block["credit"], block["reward"],
                block["cadence"], block["arms"], _fmt(block["alpha"]),
                _fmt(metrics["success_rate_micro"]),
                _fmt(metrics["success_rate_macro"]),
                _fmt(metrics["bugs_patched"]),
                _fmt(metrics["avg_variant"]),
                _fmt(metrics["median_variant"])))
        return out.getvalue()


def compute_metrics(per_bug_attempts: dict) -> dict:
    """Aggregate one config's attempt records, keyed by bug name."""
    total = sum(len(records) for records in per_bug_attempts.values())
    successes = [r for records in per_bug_attempts.values()
                 for r in records if r["patched"]]
    micro = len(successes) / total if total else 0.0
    per_bug = [sum(r["patched"] for r in records) / len(records)
               for records in per_bug_attempts.values() if records]
    macro = sum(per_bug) / len(per_bug) if per_bug else 0.0
    patched_bugs = sum(1 for records in per_bug_attempts.values()
                       if any(r["patched"] for r in records))
    counts = sorted(r["variants_evaluated_at_patch"] for r in successes)
    return {
        "success_rate_micro": micro,
        "success_rate_macro": macro,
        "bugs_patched": patched_bugs,
        "avg_variant": sum(counts) / len(counts) if counts else None,
        "median_variant": counts[(len(counts) - 1) // 2] if counts else None,
    }


def run_experiment(plan: ExperimentPlan) -> ExperimentReport:
    corpus_dir = str(plan.corpus_dir or DEFAULT_CORPUS_DIR)
    errors = []
    if plan.bug_names is None:
        names = sorted(_bugs_for(corpus_dir))
    else:
        available = _bugs_for(corpus_dir)
        names = []
        for name in plan.bug_names:
            if name in available:
                names.append(name)
            else:
                errors.append((name, f"bug {name!r} not in corpus"))

    tasks = []
    for spec in plan.configs:
        fields = (spec.policy, spec.credit, spec.reward, spec.cadence,
                  spec.arms, spec.alpha)
        for name in names:
            for attempt in range(plan.attempts):
                tasks.append((corpus_dir, name, fields,
                              plan.seed_for(name, spec, attempt),
                              plan.population_size, plan.generations,
                              plan.step_budget))

    jobs = worker_count()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_attempt, tasks, chunksize=4))
    else:
        results = [_run_attempt(task) for task in tasks]

    blocks = []
    cursor = 0
    for spec in plan.configs:
        per_bug = {}
        for name in names:
            records = []
            for attempt in range(plan.attempts):
                record = dict(results[cursor])
                record["attempt"] = attempt
                records.append(record)
                cursor += 1
            per_bug[name] = records
        blocks.append({
            "policy": spec.policy, "credit": spec.credit,
            "reward": spec.reward, "cadence": spec.cadence,
            "arms": spec.arms, "alpha": spec.alpha,
            "metrics": compute_metrics(per_bug),
            "bugs": per_bug,
        })

    detail = {
        "base_seed": plan.base_seed,
        "attempts": plan.attempts,
        "population_size": plan.population_size,
        "generations": plan.generations,
        "step_budget": plan.step_budget,
        "errors": [{"bug": name, "message": msg} for name, msg in errors],
        "configs": blocks,
    }
    return ExperimentReport(plan=plan, detail=detail, errors=tuple(errors))


def write_report(report: ExperimentReport, out_dir) -> None:
    """summary.csv, detail.json, and one patch file per successful attempt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.csv").write_text(report.to_csv())
    (out / "detail.json").write_text(report.to_json())
    patches = out / "patches"
    for index, block in enumerate(report.detail["configs"]):
        for bug_name, records in sorted(block["bugs"].items()):
            for record in records:
                if not record["patched"]:
                    continue
                patches.mkdir(exist_ok=True)
                name = f"c{index:02d}-{bug_name}-a{record['attempt']:02d}.patch"
                payload = {"bug": bug_name, "edits": record["edits"]}
                (patches / name).write_text(
                    json.dumps(payload, sort_keys=True, indent=2) + "\n")


# ------------------------------------------------------------ plan parsing

def _parse_config_line(value: str, line_no: int) -> ConfigSpec:
    tokens = value.split()
    if not tokens:
        raise PlanFormatError(f"line {line_no}: empty config")
    kwargs = {"policy": tokens[0]}
    for token in tokens[1:]:
        if "=" not in token:
            raise PlanFormatError(
                f"line {line_no}: expected key=value, got {token!r}")
        key, _, raw = token.partition("=")
        if key == "arms":
            if raw not in _ARM_ALIASES:
                raise PlanFormatError(f"line {line_no}: unknown arms {raw!r}")
            kwargs["arms"] = _ARM_ALIASES[raw]
        elif key == "alpha":
            kwargs["alpha"] = float(raw)
        elif key in ("credit", "reward", "cadence"):
            kwargs[key] = raw
        else:
            raise PlanFormatError(f"line {line_no}: unknown config key {key!r}")
    try:
        return ConfigSpec(**kwargs)
    except ConfigError as err:
        raise PlanFormatError(f"line {line_no}: {err}") from err


def parse_plan(text: str) -> ExperimentPlan:
    """Plain-text manifest: one key = value per line, # for comments."""
    fields = {"configs": []}
    int_keys = {"base_seed": "base_seed", "attempts": "attempts",
                "pop": "population_size", "gens": "generations",
                "step_budget": "step_budget"}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PlanFormatError(f"line {line_no}: expected key = value")
        key, _, value = (part.strip() for part in line.partition("="))
        if key == "config":
            fields["configs"].append(_parse_config_line(value, line_no))
        elif key in int_keys:
            try:
                fields[int_keys[key]] = int(value)
            except ValueError:
                raise PlanFormatError(
                    f"line {line_no}: {key} needs an integer") from None
        elif key == "corpus":
            fields["corpus_dir"] = value
        elif key == "bugs":
            fields["bug_names"] = tuple(
                name.strip() for name in value.split(",") if name.strip())
        else:
            raise PlanFormatError(f"line {line_no}: unknown key {key!r}")
    try:
        return ExperimentPlan(configs=tuple(fields.pop("configs")), **fields)
    except PlanFormatError:
        raise
    except (ConfigError, TypeError) as err:
        raise PlanFormatError(str(err)) from err


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    if not path.is_file():
        raise PlanFormatError(f"plan file not found: {path}")
    return parse_plan(path.read_text())
