"""Genetic-programming repair loop with bandit-driven operator choice.

One repair attempt is a classic generational GP search over edit lists:
tournament selection, one-point crossover on the lists, then exactly one
fresh mutation per individual per generation.  The mutation operator for
every mint is chosen either by an adaptive controller (run_repair) or
uniformly over the scheme's operator set (run_repair_uniform).
"""

import random
from dataclasses import dataclass, field

from .aos import AosConfig, ConfigError, Controller, compute_reward
from .toylang import (ALL_OPERATORS, COARSE_OPERATORS, DEFAULT_STEP_BUDGET,
                      GROUP_OF, InapplicableOperator, OPERATOR_GROUPS,
                      apply_edits, localize, mint_edit, run_tests)

ARM_SCHEMES = ("arms3", "arms18", "arms7")

# arms7 keeps one arm per coarse operator and folds each template group
# into a single shared arm
_ARMS7_GROUPS = ("func_expr", "checks", "init_cast", "multi_line")

BORN_INITIAL = "initial"
BORN_CROSSOVER = "crossover"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of text."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(*parts) -> int:
    """Stable child seed from printable parts, reproducible in isolation."""
    return fnv1a_64("\x1f".join(str(part) for part in parts))


# ---------------------------------------------------------------- schemes

def scheme_arm_count(scheme: str) -> int:
    try:
        return {"arms3": 3, "arms18": 18, "arms7": 7}[scheme]
    except KeyError:
        raise ConfigError(f"unknown arm scheme {scheme!r}") from None


def scheme_operators(scheme: str) -> tuple:
    """Operator set reachable under the scheme."""
    scheme_arm_count(scheme)
    return COARSE_OPERATORS if scheme == "arms3" else ALL_OPERATORS


def arm_of(operator: str, scheme: str) -> int:
    """Arm credited for a concrete operator under the scheme."""
    ops = scheme_operators(scheme)
    if operator not in ops:
        raise ConfigError(f"operator {operator!r} unavailable under {scheme}")
    if scheme == "arms3":
        return COARSE_OPERATORS.index(operator)
    if scheme == "arms18":
        return ALL_OPERATORS.index(operator)
    group = GROUP_OF[operator]
    if group == "coarse":
        return COARSE_OPERATORS.index(operator)
    return 3 + _ARMS7_GROUPS.index(group)


def operator_for_arm(arm: int, scheme: str, rng) -> str:
    """Concrete operator for a selected arm; group arms draw uniformly."""
    count = scheme_arm_count(scheme)
    if not 0 <= arm < count:
        raise ConfigError(f"arm {arm} out of range for {scheme}")
    if scheme == "arms18":
        return ALL_OPERATORS[arm]
    if arm < 3:
        return COARSE_OPERATORS[arm]
    members = OPERATOR_GROUPS[_ARMS7_GROUPS[arm - 3]]
    return members[rng.randrange(len(members))]


# ------------------------------------------------------------------ types

@dataclass
class Variant:
    """One point in the search: an edit list plus its evaluation record."""

    edits: tuple
    born_by: str                        # operator id, crossover, or initial
    born_arm: int | None = None         # arm to credit; None credits nothing
    parent_fitness: float | None = None
    fitness: float | None = None
    variant_index: int | None = None
    program: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SearchConfig:
    seed: int
    aos: AosConfig | None = None
    arm_scheme: str = "arms3"
    population_size: int = 40
    generations: int = 10
    crossover_rate: float = 0.5
    tournament_size: int = 2

    def __post_init__(self):
        scheme_arm_count(self.arm_scheme)
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 0:
            raise ConfigError("generations must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError("crossover_rate must be in [0, 1]")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")


@dataclass(frozen=True)
class RepairOutcome:
    patched: bool
    patch: Variant | None
    variants_evaluated_at_patch: int | None
    total_evaluations: int
    aos_snapshot: tuple | None          # None when no controller was used


# ----------------------------------------------------------------- search

def _search(program, suite, config, step_budget, select, controller):
    """Shared loop; select() -> (operator, arm or None) per mutation."""
    located = localize(program, suite, step_budget=step_budget)
    weights = located.weights
    rng = random.Random(derive_seed(config.seed, "search"))
    pop_size = config.population_size
    reward_type = controller.config.reward if controller is not None else "raw"

    base = Variant(edits=(), born_by=BORN_INITIAL,
                   fitness=located.report.fitness, variant_index=0,
                   program=program)
    # the original's fitness comes from the localize run, not an evaluation
    memo = {(): (base.fitness, 0)}
    evaluated = 0

    def program_of(variant):
        if variant.program is None:
            variant.program = apply_edits(program, variant.edits)[0]
        return variant.program

    def mutate(individual):
        # inapplicable operator: the arm wasted the slot, reward 0, and the
        # individual carries forward unchanged
        operator, arm = select()
        try:
            edit = mint_edit(operator, program_of(individual), weights, rng)
        except InapplicableOperator:
            if controller is not None and arm is not None:
                controller.credit(arm, 0.0)
            return individual
        return Variant(edits=individual.edits + (edit,), born_by=operator,
                       born_arm=arm, parent_fitness=individual.fitness)

    def evaluate(batch):
        # first full-pass variant ends the search immediately
        nonlocal evaluated
        for variant in batch:
            if variant.fitness is not None:
                continue
            known = memo.get(variant.edits)
            if known is None:
                report = run_tests(program_of(variant), suite,
                                   step_budget=step_budget)
                evaluated += 1
                memo[variant.edits] = (report.fitness, evaluated)
                variant.fitness = report.fitness
                variant.variant_index = evaluated
            else:
                variant.fitness, variant.variant_index = known
            if controller is not None and variant.born_arm is not None:
                controller.credit(variant.born_arm,
                                  compute_reward(variant.fitness,
                                                 variant.parent_fitness,
                                                 reward_type))
            if variant.fitness == 1.0:
                return variant
        return None

    def pick_parent(population):
        # tournament: strictly fitter wins, ties keep the first drawn
        best = population[rng.randrange(pop_size)]
        for _ in range(config.tournament_size - 1):
            other = population[rng.randrange(pop_size)]
            if other.fitness > best.fitness:
                best = other
        return best

    population = [mutate(base) for _ in range(pop_size)]
    winner = None
    for generation in range(config.generations + 1):
        winner = evaluate(population)
        if winner is not None or generation == config.generations:
            break
        if controller is not None and controller.config.cadence == "generation":
            controller.flush_generation()
        parents = [pick_parent(population) for _ in range(pop_size)]
        for left in range(0, pop_size - 1, 2):
            if rng.random() >= config.crossover_rate:
                continue
            first, second = parents[left], parents[left + 1]
            cut_f = rng.randrange(len(first.edits) + 1)
            cut_s = rng.randrange(len(second.edits) + 1)
            parents[left] = Variant(
                edits=first.edits[:cut_f] + second.edits[cut_s:],
                born_by=BORN_CROSSOVER)
            parents[left + 1] = Variant(
                edits=second.edits[:cut_s] + first.edits[cut_f:],
                born_by=BORN_CROSSOVER)
        population = [mutate(individual) for individual in parents]

    snapshot = None
    if controller is not None:
        if controller.config.cadence == "generation":
            controller.flush_generation()
        snapshot = tuple(controller.snapshot())
    if winner is not None:
        return RepairOutcome(True, winner, winner.variant_index,
                             evaluated, snapshot)
    return RepairOutcome(False, None, None, evaluated, snapshot)


def run_repair(program, suite, config: SearchConfig, *,
               step_budget: int = DEFAULT_STEP_BUDGET) -> RepairOutcome:
    """Repair attempt with adaptive operator selection."""
    if config.aos is None:
        raise ConfigError("run_repair needs an AosConfig; "
                          "use run_repair_uniform for the baseline")
    controller = Controller(config.aos, scheme_arm_count(config.arm_scheme))
    aos_rng = random.Random(derive_seed(config.seed, "aos"))

    def select():
        arm = controller.select_arm(aos_rng)
        return operator_for_arm(arm, config.arm_scheme, aos_rng), arm

    return _search(program, suite, config, step_budget, select, controller)


def run_repair_uniform(program, suite, config: SearchConfig, *,
                       step_budget: int = DEFAULT_STEP_BUDGET) -> RepairOutcome:
    """Baseline attempt: uniform draw over the scheme's operator set."""
    operators = scheme_operators(config.arm_scheme)
    pick_rng = random.Random(derive_seed(config.seed, "aos"))

    def select():
        return operators[pick_rng.randrange(len(operators))], None

    return _search(program, suite, config, step_budget, select, None)
