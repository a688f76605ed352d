"""Tree-walking interpreter with a per-test step budget.

Programs are compiled once into nested closures (one per AST node) and then
run against test cases.  Values are Python ints plus int arrays (lists)
bound to parameters.  Any misuse (undefined variable, array index out of
bounds, division or modulus by zero, non-integer operand, unknown callee,
wrong arity, call depth past the cap, falling off a function without
returning) raises a runtime fault, which fails the current test.

A step is one statement execution; a while loop spends one step per
condition check.  Exhausting the budget is a fault.  Loops additionally
snapshot the frame after 64 iterations and fault as soon as an exact state
repeats, which catches no-progress infinite loops long before the budget
would.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

from .syntax import (Assign, Binary, Block, Call, Function, If, Index, Num,
                     Program, Return, Store, Unary, Var, While, BUILTIN_LEN)

_ARITH_FNS = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_CMP_FNS = {"<": operator.lt, "<=": operator.le, ">": operator.gt,
            ">=": operator.ge, "==": operator.eq, "!=": operator.ne}

DEFAULT_STEP_BUDGET = 100_000
MAX_CALL_DEPTH = 100
_CYCLE_CHECK_AFTER = 64


class ToyFault(Exception):
    """Runtime fault; `kind` is a short machine-readable tag."""

    def __init__(self, kind: str, msg: str):
        super().__init__(msg)
        self.kind = kind


class _ReturnSignal(Exception):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _Ctx:
    __slots__ = ("steps", "coverage", "depth")

    def __init__(self, steps: int, coverage):
        self.steps = steps
        self.coverage = coverage
        self.depth = 0


def _int_of(v, what: str):
    if type(v) is not int:
        raise ToyFault("type", f"{what} must be an integer")
    return v


def _trunc_div(a: int, b: int) -> int:
    q = a // b
    return q + 1 if q < 0 and q * b != a else q


def _state_key(env: dict) -> tuple:
    return tuple((k, tuple(v) if type(v) is list else v)
                 for k, v in env.items())


class CompiledProgram:
    def __init__(self, program: Program):
        self.program = program
        self.functions: dict[str, _CompiledFn] = {}
        for fn in program.functions:
            self.functions[fn.name] = _CompiledFn(fn)
        for cfn in self.functions.values():
            cfn.compile(self)

    def invoke(self, name: str, args: list, ctx: _Ctx):
        cfn = self.functions.get(name)
        if cfn is None:
            raise ToyFault("unknown-function", f"no function {name!r}")
        return cfn.invoke(args, ctx)


class _CompiledFn:
    def __init__(self, fn: Function):
        self.fn = fn
        self.params = fn.params
        self.body = None

    def compile(self, cp: CompiledProgram):
        self.body = tuple(_compile_stmt(s, cp) for s in self.fn.body)

    def invoke(self, args: list, ctx: _Ctx):
        if len(args) != len(self.params):
            raise ToyFault("arity",
                           f"{self.fn.name} expects {len(self.params)} "
                           f"arguments, got {len(args)}")
        ctx.depth += 1
        if ctx.depth > MAX_CALL_DEPTH:
            raise ToyFault("depth", "call depth limit exceeded")
        env = dict(zip(self.params, args))
        try:
            for stmt in self.body:
                stmt(env, ctx)
            raise ToyFault("missing-return",
                           f"{self.fn.name} fell off the end")
        except _ReturnSignal as sig:
            return sig.value
        finally:
            ctx.depth -= 1


# ------------------------------------------------------ expression compile


def _compile_expr(expr, cp: CompiledProgram):
    t = type(expr)
    if t is Num:
        v = expr.value
        return lambda env, ctx: v
    if t is Var:
        name = expr.name
        def var_read(env, ctx):
            try:
                return env[name]
            except KeyError:
                raise ToyFault("undefined-variable",
                               f"variable {name!r} read before assignment")
        return var_read
    if t is Index:
        name = expr.name
        idx = _compile_expr(expr.index, cp)
        def index_read(env, ctx):
            try:
                arr = env[name]
            except KeyError:
                raise ToyFault("undefined-variable",
                               f"array {name!r} is not defined")
            if type(arr) is not list:
                raise ToyFault("type", f"{name!r} is not an array")
            i = _int_of(idx(env, ctx), "array index")
            if 0 <= i < len(arr):
                return arr[i]
            raise ToyFault("index",
                           f"{name}[{i}] out of bounds (length {len(arr)})")
        return index_read
    if t is Unary:
        operand = _compile_expr(expr.operand, cp)
        return lambda env, ctx: -_int_of(operand(env, ctx), "operand of -")
    if t is Binary:
        return _compile_binary(expr, cp)
    if t is Call:
        return _compile_call(expr, cp)
    raise TypeError(f"not an expression node: {expr!r}")


def _compile_binary(expr: Binary, cp: CompiledProgram):
    op = expr.op
    left = _compile_expr(expr.left, cp)
    right = _compile_expr(expr.right, cp)
    if op == "&&":
        def and_(env, ctx):
            if _int_of(left(env, ctx), "operand of &&") == 0:
                return 0
            return 1 if _int_of(right(env, ctx), "operand of &&") != 0 else 0
        return and_
    if op == "||":
        def or_(env, ctx):
            if _int_of(left(env, ctx), "operand of ||") != 0:
                return 1
            return 1 if _int_of(right(env, ctx), "operand of ||") != 0 else 0
        return or_

    if op in _ARITH_FNS:
        fn = _ARITH_FNS[op]
        def arith(env, ctx):
            a = left(env, ctx)
            b = right(env, ctx)
            if type(a) is not int or type(b) is not int:
                raise ToyFault("type", f"operands of {op} must be integers")
            return fn(a, b)
        return arith
    if op in _CMP_FNS:
        fn = _CMP_FNS[op]
        def cmp(env, ctx):
            a = left(env, ctx)
            b = right(env, ctx)
            if type(a) is not int or type(b) is not int:
                raise ToyFault("type", f"operands of {op} must be integers")
            return 1 if fn(a, b) else 0
        return cmp
    if op == "/":
        def div(env, ctx):
            a = left(env, ctx)
            b = right(env, ctx)
            if type(a) is not int or type(b) is not int:
                raise ToyFault("type", "operands of / must be integers")
            if b == 0:
                raise ToyFault("div-zero", "division by zero")
            return _trunc_div(a, b)
        return div
    if op == "%":
        def mod(env, ctx):
            a = left(env, ctx)
            b = right(env, ctx)
            if type(a) is not int or type(b) is not int:
                raise ToyFault("type", "operands of % must be integers")
            if b == 0:
                raise ToyFault("div-zero", "modulus by zero")
            return a - _trunc_div(a, b) * b
        return mod
    raise TypeError(f"unknown binary operator {op!r}")


def _compile_call(expr: Call, cp: CompiledProgram):
    name = expr.name
    arg_fns = tuple(_compile_expr(a, cp) for a in expr.args)
    if name == BUILTIN_LEN:
        def len_call(env, ctx):
            if len(arg_fns) != 1:
                raise ToyFault("arity", "len takes exactly one argument")
            arr = arg_fns[0](env, ctx)
            if type(arr) is not list:
                raise ToyFault("type", "len expects an array")
            return len(arr)
        return len_call

    def call(env, ctx):
        cfn = cp.functions.get(name)
        if cfn is None:
            raise ToyFault("unknown-function", f"no function {name!r}")
        return cfn.invoke([fn(env, ctx) for fn in arg_fns], ctx)
    return call


# ------------------------------------------------------- statement compile


def _compile_stmt(stmt, cp: CompiledProgram):
    t = type(stmt)
    sid = stmt.sid
    if t is Assign:
        name = stmt.name
        value = _compile_expr(stmt.expr, cp)
        def assign(env, ctx):
            ctx.steps -= 1
            if ctx.steps < 0:
                raise ToyFault("budget", "step budget exhausted")
            if ctx.coverage is not None:
                ctx.coverage.add(sid)
            env[name] = value(env, ctx)
        return assign
    if t is Store:
        name = stmt.name
        idx = _compile_expr(stmt.index, cp)
        value = _compile_expr(stmt.expr, cp)
        def store(env, ctx):
            ctx.steps -= 1
            if ctx.steps < 0:
                raise ToyFault("budget", "step budget exhausted")
            if ctx.coverage is not None:
                ctx.coverage.add(sid)
            try:
                arr = env[name]
            except KeyError:
                raise ToyFault("undefined-variable",
                               f"array {name!r} is not defined")
            if type(arr) is not list:
                raise ToyFault("type", f"{name!r} is not an array")
            i = _int_of(idx(env, ctx), "array index")
            if not 0 <= i < len(arr):
                raise ToyFault("index",
                               f"{name}[{i}] out of bounds (length {len(arr)})")
            arr[i] = _int_of(value(env, ctx), "stored value")
        return store
    if t is Return:
        value = _compile_expr(stmt.expr, cp)
        def ret(env, ctx):
            ctx.steps -= 1
            if ctx.steps < 0:
                raise ToyFault("budget", "step budget exhausted")
            if ctx.coverage is not None:
                ctx.coverage.add(sid)
            raise _ReturnSignal(value(env, ctx))
        return ret
    if t is If:
        cond = _compile_expr(stmt.cond, cp)
        then = tuple(_compile_stmt(s, cp) for s in stmt.then)
        orelse = tuple(_compile_stmt(s, cp) for s in stmt.orelse)
        def if_(env, ctx):
            ctx.steps -= 1
            if ctx.steps < 0:
                raise ToyFault("budget", "step budget exhausted")
            if ctx.coverage is not None:
                ctx.coverage.add(sid)
            branch = then if _int_of(cond(env, ctx), "condition") != 0 else orelse
            for s in branch:
                s(env, ctx)
        return if_
    if t is While:
        cond = _compile_expr(stmt.cond, cp)
        body = tuple(_compile_stmt(s, cp) for s in stmt.body)
        def while_(env, ctx):
            iters = 0
            seen = None
            while True:
                ctx.steps -= 1
                if ctx.steps < 0:
                    raise ToyFault("budget", "step budget exhausted")
                if ctx.coverage is not None:
                    ctx.coverage.add(sid)
                if _int_of(cond(env, ctx), "condition") == 0:
                    return
                iters += 1
                if iters >= _CYCLE_CHECK_AFTER:
                    key = _state_key(env)
                    if seen is None:
                        seen = {key}
                    elif key in seen:
                        raise ToyFault("cycle", "loop state repeats; "
                                       "the loop cannot terminate")
                    else:
                        seen.add(key)
                for s in body:
                    s(env, ctx)
        return while_
    if t is Block:
        body = tuple(_compile_stmt(s, cp) for s in stmt.body)
        def block(env, ctx):
            ctx.steps -= 1
            if ctx.steps < 0:
                raise ToyFault("budget", "step budget exhausted")
            if ctx.coverage is not None:
                ctx.coverage.add(sid)
            for s in body:
                s(env, ctx)
        return block
    raise TypeError(f"not a statement node: {stmt!r}")


# --------------------------------------------------------------- running


def compile_program(program: Program) -> CompiledProgram:
    return CompiledProgram(program)


@dataclass
class FitnessReport:
    flags: list          # pass/fail per test, in suite order
    fitness: float       # passed / total, exactly
    faults: list         # fault kind per failed test, None when passed
    coverage: list | None = None  # per-test executed statement ids

    @property
    def all_passed(self) -> bool:
        return all(self.flags)


def _run_case(cp: CompiledProgram, case, step_budget: int, want_cov: bool):
    ctx = _Ctx(step_budget, set() if want_cov else None)
    args = [list(a) if type(a) in (list, tuple) else a for a in case.args]
    try:
        result = cp.invoke(case.entry, args, ctx)
        return result == case.expected, None, ctx.coverage
    except ToyFault as fault:
        return False, fault.kind, ctx.coverage


def run_tests(program, suite, step_budget: int = DEFAULT_STEP_BUDGET,
              coverage: bool = False) -> FitnessReport:
    """Run the whole suite; fitness is the exact fraction of passing tests.

    A missing entry function zeroes the variant: every test is marked
    failed and fitness is 0.0.
    """
    if step_budget <= 0:
        raise ValueError("step_budget must be positive")
    cp = program if isinstance(program, CompiledProgram) \
        else compile_program(program)
    cases = list(suite)
    if any(case.entry not in cp.functions for case in cases):
        return FitnessReport([False] * len(cases), 0.0,
                             ["missing-entry"] * len(cases),
                             [set() for _ in cases] if coverage else None)
    flags, faults, covs = [], [], []
    for case in cases:
        ok, fault, cov = _run_case(cp, case, step_budget, coverage)
        flags.append(ok)
        faults.append(fault)
        covs.append(cov)
    fitness = sum(flags) / len(flags) if flags else 0.0
    return FitnessReport(flags, fitness, faults, covs if coverage else None)


def passes_all(program, suite, step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Short-circuit check that every test passes (first failure stops)."""
    cp = program if isinstance(program, CompiledProgram) \
        else compile_program(program)
    cases = list(suite)
    if any(case.entry not in cp.functions for case in cases):
        return False
    for case in cases:
        ok, _, _ = _run_case(cp, case, step_budget, False)
        if not ok:
            return False
    return True
