"""GP repair loop: schemes, determinism, memoization, credit accounting."""

import math
import random

import pytest

import patchbandit.engine as engine
from patchbandit.aos import AosConfig, ConfigError, Controller
from patchbandit.corpus import load_corpus
from patchbandit.engine import (ARM_SCHEMES, RepairOutcome, SearchConfig,
                                Variant, arm_of, derive_seed, fnv1a_64,
                                operator_for_arm, run_repair,
                                run_repair_uniform, scheme_arm_count,
                                scheme_operators)
from patchbandit.toylang import (ALL_OPERATORS, COARSE_OPERATORS, Edit,
                                 GROUP_OF, InapplicableOperator,
                                 NothingToRepair, apply_edits, run_tests)

BUDGET = 5000


@pytest.fixture(scope="module")
def bugs():
    return {bug.name: bug for bug in load_corpus()}


# ------------------------------------------------------------ seed hashing

def test_fnv1a_matches_published_vectors():
    assert fnv1a_64("") == 0xCBF29CE484222325
    assert fnv1a_64("a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64("foobar") == 0x85944171F73967E8


def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(7, "search") == derive_seed(7, "search")
    assert derive_seed(7, "search") != derive_seed(7, "aos")
    assert derive_seed(7, "aos") != derive_seed(8, "aos")


# ----------------------------------------------------------------- schemes

def test_arm_counts():
    assert [scheme_arm_count(s) for s in ARM_SCHEMES] == [3, 18, 7]
    with pytest.raises(ConfigError):
        scheme_arm_count("arms5")


def test_scheme_operator_sets():
    assert scheme_operators("arms3") == COARSE_OPERATORS
    assert scheme_operators("arms18") == ALL_OPERATORS
    assert scheme_operators("arms7") == ALL_OPERATORS


def test_coarse_arms_use_canonical_order():
    assert arm_of("stmt_append", "arms3") == 0
    assert arm_of("stmt_delete", "arms3") == 1
    assert arm_of("stmt_replace", "arms3") == 2


def test_off_by_one_lands_on_the_checks_arm():
    assert arm_of("off_by_one", "arms7") == 4


def test_arms7_group_layout():
    assert arm_of("stmt_delete", "arms7") == 1
    assert arm_of("expr_replace", "arms7") == 3
    assert arm_of("var_init_insert", "arms7") == 5
    assert arm_of("stmt_swap", "arms7") == 6


def test_arms18_round_trips_every_operator():
    rng = random.Random(0)
    for op in ALL_OPERATORS:
        assert operator_for_arm(arm_of(op, "arms18"), "arms18", rng) == op


def test_group_arm_draws_uniformly_within_group():
    rng = random.Random(42)
    draws = [operator_for_arm(3, "arms7", rng) for _ in range(8000)]
    members = ("func_call_swap", "expr_replace", "expr_add", "expr_remove")
    assert set(draws) == set(members)
    for op in members:
        assert abs(draws.count(op) / 8000 - 0.25) < 0.02


def test_template_operator_unavailable_under_arms3():
    with pytest.raises(ConfigError):
        arm_of("guard_insert", "arms3")
    with pytest.raises(ConfigError):
        operator_for_arm(3, "arms3", random.Random(0))


# ------------------------------------------------------------------ config

def test_search_config_rejects_bad_values():
    for kwargs in ({"arm_scheme": "arms4"}, {"population_size": 1},
                   {"generations": -1}, {"crossover_rate": 1.5},
                   {"tournament_size": 0}):
        with pytest.raises(ConfigError):
            SearchConfig(seed=1, **kwargs)


def test_run_repair_requires_a_controller_config(bugs):
    bug = bugs["mid3"]
    with pytest.raises(ConfigError, match="uniform"):
        run_repair(bug.program, bug.repair_suite, SearchConfig(seed=1))


# ------------------------------------------------------------- determinism

def test_uniform_repair_is_deterministic(bugs):
    bug = bugs["mid3"]
    cfg = SearchConfig(seed=7)
    first = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                               step_budget=BUDGET)
    second = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                                step_budget=BUDGET)
    assert first.patched and second.patched
    assert first.patch.edits == second.patch.edits
    assert first.variants_evaluated_at_patch == second.variants_evaluated_at_patch
    assert first.total_evaluations == second.total_evaluations


def test_adaptive_repair_is_deterministic(bugs):
    bug = bugs["span-1"]
    cfg = SearchConfig(seed=3, aos=AosConfig(policy="ucb", credit="erwa",
                                             cadence="mutation"))
    first = run_repair(bug.program, bug.repair_suite, cfg, step_budget=BUDGET)
    second = run_repair(bug.program, bug.repair_suite, cfg, step_budget=BUDGET)
    assert first == second


def test_different_seeds_diverge(bugs):
    bug = bugs["mid3"]
    outcomes = {run_repair_uniform(bug.program, bug.repair_suite,
                                   SearchConfig(seed=s), step_budget=BUDGET
                                   ).variants_evaluated_at_patch
                for s in range(6)}
    assert len(outcomes) > 1


# ---------------------------------------------------------- patch validity

def test_patches_revalidate_on_a_fresh_interpreter(bugs):
    for name in ("mid3", "span-1", "dupadd-1", "reset-1"):
        bug = bugs[name]
        out = run_repair_uniform(bug.program, bug.repair_suite,
                                 SearchConfig(seed=11), step_budget=BUDGET)
        assert out.patched, name
        patched, _ = apply_edits(bug.program, out.patch.edits)
        assert run_tests(patched, bug.repair_suite).fitness == 1.0, name
        assert out.patch.fitness == 1.0
        assert out.variants_evaluated_at_patch == out.patch.variant_index
        assert out.variants_evaluated_at_patch <= out.total_evaluations


def test_correct_program_raises_nothing_to_repair(bugs):
    bug = bugs["mid3"]
    with pytest.raises(NothingToRepair):
        run_repair_uniform(bug.fixed, bug.repair_suite, SearchConfig(seed=1))


# ------------------------------------------------------- evaluation budget

def test_evaluation_bound_holds(bugs):
    bug = bugs["guard-1"]          # no coarse fix exists: runs to exhaustion
    cfg = SearchConfig(seed=5, population_size=10, generations=4)
    out = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                             step_budget=BUDGET)
    assert not out.patched
    assert out.total_evaluations <= 10 * (4 + 1) + 10


def test_memoized_duplicates_do_not_recount(bugs, monkeypatch):
    bug = bugs["guard-1"]
    weighted = [sid for sid, w in __import__("patchbandit.toylang",
                fromlist=["localize"]).localize(
                    bug.program, bug.repair_suite).weights.items() if w > 0]
    fixed_edit = Edit("stmt_delete", weighted[0], (), ())

    def same_edit_every_time(operator, program, weights, rng):
        return fixed_edit

    monkeypatch.setattr(engine, "mint_edit", same_edit_every_time)
    cfg = SearchConfig(seed=2, population_size=8, generations=5,
                       crossover_rate=0.0)
    out = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                             step_budget=BUDGET)
    # every individual shares one lineage; without crossover the distinct
    # edit lists are exactly the repeat counts 1..generations+1
    assert out.total_evaluations == cfg.generations + 1


def test_first_evaluation_claims_the_variant_index(bugs, monkeypatch):
    bug = bugs["reset-1"]
    # reset-1's unique fix is deleting its spurious accumulator reset
    from patchbandit.toylang import enumerate_edits, localize, passes_all
    loc = localize(bug.program, bug.repair_suite)
    fixing = [e for e in enumerate_edits(bug.program, loc.weights)
              if e.op == "stmt_delete"
              and passes_all(apply_edits(bug.program, [e])[0],
                             bug.repair_suite)]
    assert len(fixing) == 1

    monkeypatch.setattr(engine, "mint_edit", lambda *a: fixing[0])
    out = run_repair_uniform(bug.program, bug.repair_suite,
                             SearchConfig(seed=9, population_size=6,
                                          generations=2), step_budget=BUDGET)
    # forty identical winners collapse to a single evaluation
    assert out.patched
    assert out.total_evaluations == 1
    assert out.variants_evaluated_at_patch == 1


# -------------------------------------------------------- credit discipline

class _SpyController(Controller):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.events = []

    def credit(self, arm, reward):
        self.events.append((arm, reward))
        super().credit(arm, reward)


@pytest.mark.parametrize("cadence", ["generation", "mutation"])
def test_one_credit_event_per_mutation_slot(bugs, monkeypatch, cadence):
    # unpatchable under arms3, so the loop runs all generations: every
    # mutation slot ends in exactly one credit (reward or inapplicable 0)
    monkeypatch.setattr(engine, "Controller", _SpyController)
    bug = bugs["guard-1"]
    pop, gens = 8, 4
    cfg = SearchConfig(seed=13, population_size=pop, generations=gens,
                       aos=AosConfig(policy="pm", credit="avg",
                                     cadence=cadence))
    out = run_repair(bug.program, bug.repair_suite, cfg, step_budget=BUDGET)
    assert not out.patched
    total_plays = sum(arm["plays"] for arm in out.aos_snapshot)
    assert total_plays == pop * (gens + 1)
    assert all(reward >= 0.0 for _, reward in
               [(a["arm"], 0.0) for a in out.aos_snapshot])


def test_snapshot_reflects_all_credits(bugs, monkeypatch):
    spies = []

    class Recorder(_SpyController):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, **kwargs)
            spies.append(self)

    monkeypatch.setattr(engine, "Controller", Recorder)
    bug = bugs["guard-1"]
    cfg = SearchConfig(seed=4, population_size=6, generations=3,
                       aos=AosConfig(policy="egreedy", credit="erwa",
                                     reward="relative"))
    out = run_repair(bug.program, bug.repair_suite, cfg, step_budget=BUDGET)
    events = spies[0].events
    assert len(events) == 6 * 4
    assert sum(arm["plays"] for arm in out.aos_snapshot) == len(events)
    assert all(reward >= 0.0 for _, reward in events)


# -------------------------------------------------- uniform draw frequency

def test_uniform_baseline_draws_each_coarse_operator_evenly(bugs, monkeypatch):
    seen = []

    def refuse(operator, program, weights, rng):
        seen.append(operator)
        raise InapplicableOperator(operator)

    monkeypatch.setattr(engine, "mint_edit", refuse)
    bug = bugs["mid3"]
    cfg = SearchConfig(seed=123, population_size=100, generations=99)
    out = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                             step_budget=BUDGET)
    assert not out.patched and out.total_evaluations == 0
    n = len(seen)
    assert n == 100 * 100
    sigma = math.sqrt((1 / 3) * (2 / 3) / n)
    for op in COARSE_OPERATORS:
        assert abs(seen.count(op) / n - 1 / 3) <= 3 * sigma


def test_adaptive_selection_covers_scheme_arms(bugs):
    bug = bugs["sched-1"]
    cfg = SearchConfig(seed=21, arm_scheme="arms7",
                       aos=AosConfig(policy="pm", credit="avg"))
    out = run_repair(bug.program, bug.repair_suite, cfg, step_budget=BUDGET)
    assert len(out.aos_snapshot) == 7
    played = [arm["plays"] for arm in out.aos_snapshot]
    assert sum(played) > 0


# ------------------------------------------------------------ search shape

def test_crossover_free_run_still_patches(bugs):
    bug = bugs["dupadd-1"]
    cfg = SearchConfig(seed=17, crossover_rate=0.0)
    out = run_repair_uniform(bug.program, bug.repair_suite, cfg,
                             step_budget=BUDGET)
    assert out.patched


def test_outcome_shape_for_unpatched_run(bugs):
    bug = bugs["guard-1"]
    out = run_repair_uniform(bug.program, bug.repair_suite,
                             SearchConfig(seed=1, population_size=4,
                                          generations=2), step_budget=BUDGET)
    assert out == RepairOutcome(False, None, None, out.total_evaluations, None)
    assert out.total_evaluations > 0


def test_patch_variants_record_their_operator(bugs):
    bug = bugs["reset-1"]
    out = run_repair_uniform(bug.program, bug.repair_suite,
                             SearchConfig(seed=29), step_budget=BUDGET)
    assert out.patched
    assert out.patch.born_by in COARSE_OPERATORS + ("crossover",)
    assert isinstance(out.patch, Variant)
    assert all(isinstance(e, Edit) for e in out.patch.edits)
