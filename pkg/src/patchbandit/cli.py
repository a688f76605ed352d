"""Command line front end: repair run | bench | quality | gate."""

import argparse
import sys
from pathlib import Path

from .aos import ConfigError
from .corpus import CorpusError, DEFAULT_CORPUS_DIR, load_corpus, load_patch, run_gate
from .experiment import (ConfigSpec, EXPERIMENT_STEP_BUDGET, ExperimentPlan,
                         PlanFormatError, evaluate_quality, load_plan,
                         run_experiment, write_report)
from .toylang import DEFAULT_STEP_BUDGET

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CORPUS = 2
EXIT_GATE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; usage problems are exit code 1 here
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repair",
                     description="Bandit-guided program repair experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one selection config over the corpus")
    run.add_argument("--policy", required=True,
                     choices=("uniform", "pm", "ap", "egreedy", "ucb"))
    run.add_argument("--credit", choices=("avg", "erwa"), default="avg")
    run.add_argument("--alpha", type=float, default=None,
                     help="ERWA decay; defaults to the policy's tuned value")
    run.add_argument("--reward", choices=("raw", "relative"), default="raw")
    run.add_argument("--cadence", choices=("generation", "mutation"),
                     default="generation")
    run.add_argument("--arms", choices=("3", "18", "7"), default="3")
    run.add_argument("--pop", type=int, default=40)
    run.add_argument("--gens", type=int, default=10)
    run.add_argument("--attempts", type=int, default=20)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--corpus", default=None)
    run.add_argument("--out", required=True)
    run.add_argument("--bugs", default=None,
                     help="comma-separated bug names; default: all")
    run.add_argument("--step-budget", type=int,
                     default=EXPERIMENT_STEP_BUDGET)
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="run a plan manifest")
    bench.add_argument("--plan", required=True)
    bench.add_argument("--out", required=True)
    bench.set_defaults(func=cmd_bench)

    quality = sub.add_parser("quality",
                             help="held-out scores for saved patches")
    quality.add_argument("--patches", required=True)
    quality.add_argument("--corpus", default=None)
    quality.add_argument("--step-budget", type=int,
                         default=EXPERIMENT_STEP_BUDGET)
    quality.set_defaults(func=cmd_quality)

    gate = sub.add_parser("gate", help="corpus reachability oracle")
    gate.add_argument("--corpus", default=None)
    gate.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)
    gate.set_defaults(func=cmd_gate)
    return parser


def _finish(report, out_dir) -> int:
    write_report(report, out_dir)
    sys.stdout.write(report.to_csv())
    if report.errors:
        for name, message in report.errors:
            print(f"corpus error: {message}", file=sys.stderr)
        return EXIT_CORPUS
    return EXIT_OK


def cmd_run(args) -> int:
    spec = ConfigSpec(policy=args.policy, credit=args.credit,
                      reward=args.reward, cadence=args.cadence,
                      arms=f"arms{args.arms}", alpha=args.alpha)
    bug_names = None
    if args.bugs is not None:
        bug_names = tuple(n.strip() for n in args.bugs.split(",") if n.strip())
    plan = ExperimentPlan(configs=(spec,), bug_names=bug_names,
                          attempts=args.attempts, base_seed=args.seed,
                          population_size=args.pop, generations=args.gens,
                          step_budget=args.step_budget,
                          corpus_dir=args.corpus)
    return _finish(run_experiment(plan), args.out)


def cmd_bench(args) -> int:
    return _finish(run_experiment(load_plan(args.plan)), args.out)


def cmd_quality(args) -> int:
    corpus_dir = args.corpus or DEFAULT_CORPUS_DIR
    bugs = {bug.name: bug for bug in load_corpus(corpus_dir)}
    patch_dir = Path(args.patches)
    if not patch_dir.is_dir():
        raise _UsageError(f"not a directory: {patch_dir}")
    files = sorted(patch_dir.glob("*.patch"))
    if not files:
        print("no patch files found")
        return EXIT_OK
    scores = []
    for path in files:
        bug_name, edits = load_patch(path)
        if bug_name not in bugs:
            raise CorpusError(f"{path.name}: unknown bug {bug_name!r}")
        quality = evaluate_quality(edits, bugs[bug_name],
                                   step_budget=args.step_budget)
        print(f"{path.name} {bug_name} {quality.t_pass}/{quality.t_total} "
              f"{quality.score:.6g}")
        scores.append(quality.score)
    kept = [s for s in scores if s > 0.0]
    if kept:
        print(f"aggregate quality over {len(kept)} patches "
              f"(zero-pass excluded): {sum(kept) / len(kept):.6g}")
    else:
        print("aggregate quality: no patch passed any held-out test")
    return EXIT_OK


def cmd_gate(args) -> int:
    corpus_dir = args.corpus or DEFAULT_CORPUS_DIR
    report = run_gate(load_corpus(corpus_dir), step_budget=args.step_budget)
    for result in report.results:
        if result.ok:
            ops = ",".join(sorted(set(result.fixing_operators)))
            print(f"{result.name}: PASS ({result.single_edit_fixes} "
                  f"single-edit fixes via {ops})")
        else:
            print(f"{result.name}: FAIL")
            for error in result.errors:
                print(f"  {error}")
    verdict = "PASS" if report.ok else "FAIL"
    print(f"gate: {verdict} ({len(report.results)} bugs)")
    return EXIT_OK if report.ok else EXIT_GATE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PlanFormatError, ConfigError) as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as err:
        print(f"corpus error: {err}", file=sys.stderr)
        return EXIT_CORPUS


if __name__ == "__main__":
    sys.exit(main())
