"""Seeded-bug corpus: loading, validation, patch files, reachability gate.

A corpus directory holds one subdirectory per bug with four files:
``bug.toy`` (the seeded-defect program), ``fixed.toy`` (the reference
repair), ``repair.tests`` (the suite the search optimizes against), and
``heldout.tests`` (unseen tests used only for patch-quality scoring).

The gate re-derives every claim the experiments rely on: the reference
fix is perfect on both suites, the buggy program fails at least one and
passes at least one repair test, and brute-force enumeration of all
single-edit mutants over the localized region contains at least one
variant that passes the whole repair suite.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .toylang import (Edit, NothingToRepair, ParseError, SuiteFormatError,
                      enumerate_edits, apply_edit, load_suite, localize,
                      parse_program, passes_all, print_program, run_tests,
                      same_shape)
from .toylang.interp import DEFAULT_STEP_BUDGET

DEFAULT_CORPUS_DIR = Path(__file__).parent / "corpus"

BUG_FILES = ("bug.toy", "fixed.toy", "repair.tests", "heldout.tests")


class CorpusError(Exception):
    """A bug directory is missing, malformed, or unparseable."""


@dataclass(frozen=True)
class Bug:
    name: str
    path: Path
    program: object        # buggy Program
    fixed: object          # reference Program
    repair_suite: object
    heldout_suite: object


def load_bug(path) -> Bug:
    path = Path(path)
    for filename in BUG_FILES:
        if not (path / filename).is_file():
            raise CorpusError(f"{path.name}: missing {filename}")
    try:
        program = parse_program((path / "bug.toy").read_text())
        fixed = parse_program((path / "fixed.toy").read_text())
    except ParseError as err:
        raise CorpusError(f"{path.name}: {err}") from err
    try:
        repair = load_suite(path / "repair.tests")
        heldout = load_suite(path / "heldout.tests")
    except SuiteFormatError as err:
        raise CorpusError(f"{path.name}: {err}") from err
    return Bug(path.name, path, program, fixed, repair, heldout)


def load_corpus(path=None):
    """Load every bug under the corpus directory, sorted by name."""
    root = Path(path) if path is not None else DEFAULT_CORPUS_DIR
    if not root.is_dir():
        raise CorpusError(f"corpus directory not found: {root}")
    bugs = tuple(load_bug(sub) for sub in sorted(root.iterdir())
                 if sub.is_dir())
    if not bugs:
        raise CorpusError(f"no bug directories under {root}")
    names = [bug.name for bug in bugs]
    if len(names) != len(set(names)):
        raise CorpusError("duplicate bug names")
    return bugs


# ------------------------------------------------------------ patch files


def edits_to_jsonable(edits):
    return [{"op": e.op, "target": e.target, "path": list(e.path),
             "payload": list(e.payload)} for e in edits]


def edits_from_jsonable(records):
    try:
        return tuple(Edit(r["op"], int(r["target"]), tuple(r["path"]),
                          tuple(r["payload"])) for r in records)
    except (KeyError, TypeError) as err:
        raise CorpusError(f"malformed edit record: {err}") from err


def save_patch(path, bug_name: str, edits) -> None:
    payload = {"bug": bug_name, "edits": edits_to_jsonable(edits)}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True)
                          + "\n")


def load_patch(path):
    """Read a patch file; returns (bug name, edit tuple)."""
    try:
        data = json.loads(Path(path).read_text())
        return data["bug"], edits_from_jsonable(data["edits"])
    except (OSError, ValueError, KeyError) as err:
        raise CorpusError(f"unreadable patch file {path}: {err}") from err


# ------------------------------------------------------------------ gate


@dataclass(frozen=True)
class BugGateResult:
    name: str
    errors: tuple
    fixing_operators: tuple   # operators with >= 1 full-pass single edit
    single_edit_fixes: int
    edits_examined: int

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class GateReport:
    results: tuple

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def check_bug(bug: Bug, step_budget: int = DEFAULT_STEP_BUDGET) \
        -> BugGateResult:
    errors = []

    if not same_shape(parse_program(print_program(bug.program)), bug.program):
        errors.append("buggy program does not round-trip")
    if not same_shape(parse_program(print_program(bug.fixed)), bug.fixed):
        errors.append("fixed program does not round-trip")

    for label, suite in (("repair", bug.repair_suite),
                         ("held-out", bug.heldout_suite)):
        report = run_tests(bug.fixed, suite, step_budget)
        if report.fitness != 1.0:
            bad = [case.name for case, flag in zip(suite, report.flags)
                   if not flag]
            errors.append(f"reference fix fails {label} tests: {bad}")

    buggy_report = run_tests(bug.program, bug.repair_suite, step_budget)
    if True not in buggy_report.flags:
        errors.append("buggy program passes no repair test")
    if False not in buggy_report.flags:
        errors.append("buggy program fails no repair test")

    fixing = []
    examined = 0
    if False in buggy_report.flags:
        try:
            weights = localize(bug.program, bug.repair_suite,
                               step_budget).weights
        except NothingToRepair:   # unreachable given the flag check
            weights = {}
        for edit in enumerate_edits(bug.program, weights):
            examined += 1
            variant, applied = apply_edit(bug.program, edit)
            if not applied:
                errors.append(f"enumerated edit failed to apply: {edit}")
                continue
            if edit.op not in fixing and \
                    passes_all(variant, bug.repair_suite, step_budget):
                fixing.append(edit.op)
        if not fixing:
            errors.append("no single-edit variant passes the repair suite")

    fix_count = 0
    if fixing:
        # second pass to count every fixing edit, not just one per operator
        fix_count = sum(
            1 for edit in enumerate_edits(bug.program, weights)
            if passes_all(apply_edit(bug.program, edit)[0],
                          bug.repair_suite, step_budget))

    return BugGateResult(bug.name, tuple(errors), tuple(fixing),
                         fix_count, examined)


def run_gate(bugs, step_budget: int = DEFAULT_STEP_BUDGET) -> GateReport:
    return GateReport(tuple(check_bug(bug, step_budget) for bug in bugs))
