"""Edit minting and application for the eighteen mutation operators.

Three coarse statement-level moves (append, delete, replace with a donor
statement from the same function) sit alongside fifteen finer templates
organized in four families: function/expression rewrites, bounds and
emptiness checks, initialization and condition fixes, and a multi-line
reorder.

An Edit freezes everything needed to replay a mutation: operator name,
target statement id, an optional expression path, and a payload.
Statement donors travel by id and are resolved against whatever program
the edit is applied to; expression donors travel as printed text and are
re-parsed on application. Application is total: an edit whose target,
donor, or path no longer resolves leaves the program unchanged and
reports a no-op, so edit lists can be replayed in any lineage.
"""

from dataclasses import dataclass, replace as _dc_replace

from .syntax import (Assign, Binary, Block, Call, Function, If, Index, Num,
                     ParseError, Program, Return, Store, Unary, Var, While,
                     parse_expression, print_expr, program_statements,
                     walk_statements)

COARSE_OPERATORS = ("stmt_append", "stmt_delete", "stmt_replace")

OPERATOR_GROUPS = {
    "coarse": COARSE_OPERATORS,
    "func_expr": ("func_call_swap", "expr_replace", "expr_add", "expr_remove"),
    "checks": ("guard_insert", "range_check_insert", "size_check_insert",
               "lower_bound_clamp", "upper_bound_clamp", "off_by_one"),
    "init_cast": ("var_init_insert", "const_perturb", "negate_condition",
                  "default_return_insert"),
    "multi_line": ("stmt_swap",),
}

ALL_OPERATORS = tuple(op for group in ("coarse", "func_expr", "checks",
                                       "init_cast", "multi_line")
                      for op in OPERATOR_GROUPS[group])

GROUP_OF = {op: group for group, ops in OPERATOR_GROUPS.items()
            for op in ops}

_CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
_NEGATED = {"<": ">=", ">=": "<", "<=": ">", ">": "<=", "==": "!=", "!=": "=="}


class InapplicableOperator(Exception):
    """The operator has no valid site in the weighted program region."""

    def __init__(self, operator: str):
        super().__init__(f"no valid site for operator {operator!r}")
        self.operator = operator


@dataclass(frozen=True)
class Edit:
    op: str
    target: int
    path: tuple = ()
    payload: tuple = ()


# --------------------------------------------------- expression addressing

_STMT_EXPR_FIELDS = {Assign: ("expr",), Store: ("index", "expr"),
                     If: ("cond",), While: ("cond",), Return: ("expr",),
                     Block: ()}


def _walk_expr(path, node):
    yield path, node
    if isinstance(node, Unary):
        yield from _walk_expr(path + ("operand",), node.operand)
    elif isinstance(node, Binary):
        yield from _walk_expr(path + ("left",), node.left)
        yield from _walk_expr(path + ("right",), node.right)
    elif isinstance(node, Index):
        yield from _walk_expr(path + ("index",), node.index)
    elif isinstance(node, Call):
        for i, arg in enumerate(node.args):
            yield from _walk_expr(path + (i,), arg)


def iter_own_expressions(stmt):
    """Yield (path, node) for expressions held directly by the statement."""
    for field in _STMT_EXPR_FIELDS.get(type(stmt), ()):
        yield from _walk_expr((field,), getattr(stmt, field))


def _get_expr(stmt, path):
    if not path or path[0] not in _STMT_EXPR_FIELDS.get(type(stmt), ()):
        return None
    node = getattr(stmt, path[0])
    for step in path[1:]:
        if isinstance(step, int):
            if not isinstance(node, Call) or step >= len(node.args):
                return None
            node = node.args[step]
        elif step == "left" and isinstance(node, Binary):
            node = node.left
        elif step == "right" and isinstance(node, Binary):
            node = node.right
        elif step == "operand" and isinstance(node, Unary):
            node = node.operand
        elif step == "index" and isinstance(node, Index):
            node = node.index
        else:
            return None
    return node


def _set_expr(stmt, path, new_node):
    """Rebuild stmt with new_node grafted at path; None if unaddressable."""
    if not path or path[0] not in _STMT_EXPR_FIELDS.get(type(stmt), ()):
        return None

    def rebuild(node, steps):
        if not steps:
            return new_node
        step, rest = steps[0], steps[1:]
        if isinstance(step, int) and isinstance(node, Call) \
                and step < len(node.args):
            child = rebuild(node.args[step], rest)
            if child is None:
                return None
            args = list(node.args)
            args[step] = child
            return Call(node.name, tuple(args))
        if step == "left" and isinstance(node, Binary):
            child = rebuild(node.left, rest)
            return None if child is None else Binary(node.op, child, node.right)
        if step == "right" and isinstance(node, Binary):
            child = rebuild(node.right, rest)
            return None if child is None else Binary(node.op, node.left, child)
        if step == "operand" and isinstance(node, Unary):
            child = rebuild(node.operand, rest)
            return None if child is None else Unary(child)
        if step == "index" and isinstance(node, Index):
            child = rebuild(node.index, rest)
            return None if child is None else Index(node.name, child)
        return None

    root = rebuild(getattr(stmt, path[0]), path[1:])
    if root is None:
        return None
    return _dc_replace(stmt, **{path[0]: root})


# ------------------------------------------------------- subtree collectors


def _dedup(seq):
    out = []
    for item in seq:
        if item not in out:
            out.append(item)
    return out


def _subtree_var_names(stmt):
    names = []
    for s in walk_statements((stmt,)):
        if isinstance(s, Assign):
            names.append(s.name)
        for _, node in iter_own_expressions(s):
            if isinstance(node, Var):
                names.append(node.name)
    return _dedup(names)


def _subtree_array_names(stmt):
    names = []
    for s in walk_statements((stmt,)):
        if isinstance(s, Store):
            names.append(s.name)
        for _, node in iter_own_expressions(s):
            if isinstance(node, Index):
                names.append(node.name)
            elif isinstance(node, Call) and node.name == "len":
                for arg in node.args:
                    if isinstance(arg, Var):
                        names.append(arg.name)
    return _dedup(names)


def _subtree_index_pairs(stmt):
    """(index expression text, array name) for every array access."""
    pairs = []
    for s in walk_statements((stmt,)):
        if isinstance(s, Store):
            pairs.append((print_expr(s.index), s.name))
        for _, node in iter_own_expressions(s):
            if isinstance(node, Index):
                pairs.append((print_expr(node.index), node.name))
    return _dedup(pairs)


def _subtree_index_vars(stmt):
    """(variable name, array name) where a plain variable indexes an array."""
    pairs = []
    for s in walk_statements((stmt,)):
        if isinstance(s, Store) and isinstance(s.index, Var):
            pairs.append((s.index.name, s.name))
        for _, node in iter_own_expressions(s):
            if isinstance(node, Index) and isinstance(node.index, Var):
                pairs.append((node.index.name, node.name))
    return _dedup(pairs)


def _condition_parts(expr):
    yield expr
    if isinstance(expr, Binary) and expr.op in ("&&", "||"):
        yield from _condition_parts(expr.left)
        yield from _condition_parts(expr.right)


def _condition_pool(fn: Function):
    """Printed texts of every branch/loop condition and their operands."""
    texts = []
    for s in walk_statements(fn.body):
        if isinstance(s, (If, While)):
            texts.extend(print_expr(part) for part in _condition_parts(s.cond))
    return _dedup(texts)


def _has_successor(body, sid):
    for i, stmt in enumerate(body):
        if stmt.sid == sid:
            return i + 1 < len(body)
        if isinstance(stmt, If):
            for sub in (stmt.then, stmt.orelse):
                found = _has_successor(sub, sid)
                if found is not None:
                    return found
        elif isinstance(stmt, (While, Block)):
            found = _has_successor(stmt.body, sid)
            if found is not None:
                return found
    return None


# ------------------------------------------------------------ site minting
#
# Each builder returns the (path, payload) options the operator admits on
# one target statement, in deterministic program order. An empty list
# means the operator cannot act there.


def _sites_stmt_append(program, fn, stmt):
    return [((), (donor.sid,)) for donor in walk_statements(fn.body)]


def _sites_stmt_delete(program, fn, stmt):
    return [((), ())]


def _sites_stmt_replace(program, fn, stmt):
    return [((), (donor.sid,)) for donor in walk_statements(fn.body)
            if donor.sid != stmt.sid]


def _sites_func_call_swap(program, fn, stmt):
    arity = {f.name: len(f.params) for f in program.functions}
    options = []
    for path, node in iter_own_expressions(stmt):
        if isinstance(node, Call) and node.name in arity:
            for f in program.functions:
                if f.name != node.name and len(f.params) == len(node.args):
                    options.append((path, (f.name,)))
    return options


def _sites_expr_replace(program, fn, stmt):
    if not isinstance(stmt, (If, While)):
        return []
    own = print_expr(stmt.cond)
    return [(("cond",), (text,)) for text in _condition_pool(fn)
            if text != own]


def _sites_expr_add(program, fn, stmt):
    if not isinstance(stmt, (If, While)):
        return []
    own = print_expr(stmt.cond)
    return [(("cond",), (text, op, side))
            for text in _condition_pool(fn) if text != own
            for op in ("&&", "||")
            for side in ("left", "right")]


def _sites_expr_remove(program, fn, stmt):
    if isinstance(stmt, (If, While)) and isinstance(stmt.cond, Binary) \
            and stmt.cond.op in ("&&", "||"):
        return [(("cond",), ("left",)), (("cond",), ("right",))]
    return []


def _sites_guard_insert(program, fn, stmt):
    return [((), (name,)) for name in _subtree_var_names(stmt)]


def _sites_range_check_insert(program, fn, stmt):
    return [((), pair) for pair in _subtree_index_pairs(stmt)]


def _sites_size_check_insert(program, fn, stmt):
    return [((), (name,)) for name in _subtree_array_names(stmt)]


def _sites_lower_bound_clamp(program, fn, stmt):
    return [((), (var,)) for var, _ in _subtree_index_vars(stmt)]


def _sites_upper_bound_clamp(program, fn, stmt):
    return [((), pair) for pair in _subtree_index_vars(stmt)]


def _sites_off_by_one(program, fn, stmt):
    paths = [path + ("index",) for path, node in iter_own_expressions(stmt)
             if isinstance(node, Index)]
    if isinstance(stmt, Store):
        paths.append(("index",))
    if isinstance(stmt, While) and isinstance(stmt.cond, Binary) \
            and stmt.cond.op in _CMP_OPS:
        paths.extend((("cond", "left"), ("cond", "right")))
    return [(path, (delta,)) for path in paths for delta in (1, -1)]


def _sites_var_init_insert(program, fn, stmt):
    return [((), (name,)) for name in _subtree_var_names(stmt)]


def _sites_const_perturb(program, fn, stmt):
    return [(path, (delta,)) for path, node in iter_own_expressions(stmt)
            if isinstance(node, Num) for delta in (1, -1)]


def _sites_negate_condition(program, fn, stmt):
    if isinstance(stmt, (If, While)):
        return [(("cond",), ())]
    return []


def _sites_default_return_insert(program, fn, stmt):
    return [((), (value,)) for value in (0, 1)]


def _sites_stmt_swap(program, fn, stmt):
    if _has_successor(fn.body, stmt.sid):
        return [((), ())]
    return []


_SITES = {
    "stmt_append": _sites_stmt_append,
    "stmt_delete": _sites_stmt_delete,
    "stmt_replace": _sites_stmt_replace,
    "func_call_swap": _sites_func_call_swap,
    "expr_replace": _sites_expr_replace,
    "expr_add": _sites_expr_add,
    "expr_remove": _sites_expr_remove,
    "guard_insert": _sites_guard_insert,
    "range_check_insert": _sites_range_check_insert,
    "size_check_insert": _sites_size_check_insert,
    "lower_bound_clamp": _sites_lower_bound_clamp,
    "upper_bound_clamp": _sites_upper_bound_clamp,
    "off_by_one": _sites_off_by_one,
    "var_init_insert": _sites_var_init_insert,
    "const_perturb": _sites_const_perturb,
    "negate_condition": _sites_negate_condition,
    "default_return_insert": _sites_default_return_insert,
    "stmt_swap": _sites_stmt_swap,
}


def operator_sites(operator, program, fn, stmt):
    return _SITES[operator](program, fn, stmt)


def mint_edit(operator, program, weights, rng) -> Edit:
    """Draw an Edit: target weight-proportional, site uniform within it."""
    if operator not in _SITES:
        raise KeyError(f"unknown operator {operator!r}")
    candidates = []
    for fn_name, stmt in program_statements(program):
        if weights.get(stmt.sid, 0.0) <= 0.0:
            continue
        options = _SITES[operator](program, program.function(fn_name), stmt)
        if options:
            candidates.append((stmt.sid, weights[stmt.sid], options))
    if not candidates:
        raise InapplicableOperator(operator)
    total = sum(w for _, w, _ in candidates)
    pick = rng.random() * total
    acc = 0.0
    chosen = candidates[-1]
    for cand in candidates:
        acc += cand[1]
        if pick < acc:
            chosen = cand
            break
    sid, _, options = chosen
    path, payload = options[rng.randrange(len(options))]
    return Edit(operator, sid, path, payload)


def enumerate_edits(program, weights, operators=ALL_OPERATORS):
    """Every mintable edit over weighted targets, in deterministic order."""
    statements = [(fn_name, stmt) for fn_name, stmt in
                  program_statements(program)
                  if weights.get(stmt.sid, 0.0) > 0.0]
    for operator in operators:
        for fn_name, stmt in statements:
            fn = program.function(fn_name)
            for path, payload in _SITES[operator](program, fn, stmt):
                yield Edit(operator, stmt.sid, path, payload)


# ------------------------------------------------------------- application


def _renumber(stmt, ctr):
    """Copy a statement subtree with fresh ids, allocated pre-order."""
    sid = ctr[0]
    ctr[0] += 1
    if isinstance(stmt, Assign):
        return Assign(sid, stmt.name, stmt.expr)
    if isinstance(stmt, Store):
        return Store(sid, stmt.name, stmt.index, stmt.expr)
    if isinstance(stmt, Return):
        return Return(sid, stmt.expr)
    if isinstance(stmt, If):
        return If(sid, stmt.cond,
                  tuple(_renumber(s, ctr) for s in stmt.then),
                  tuple(_renumber(s, ctr) for s in stmt.orelse))
    if isinstance(stmt, While):
        return While(sid, stmt.cond,
                     tuple(_renumber(s, ctr) for s in stmt.body))
    if isinstance(stmt, Block):
        return Block(sid, tuple(_renumber(s, ctr) for s in stmt.body))
    raise TypeError(f"not a statement node: {stmt!r}")


def _splice(body, sid, transform):
    """Rebuild body, replacing the sid-statement with transform(stmt).

    transform returns a tuple of statements to splice in, or None to
    veto. Returns (new_body, status) with status in {"done", "noop",
    "missing"}.
    """
    out = []
    status = "missing"
    for stmt in body:
        if status == "missing" and stmt.sid == sid:
            replacement = transform(stmt)
            if replacement is None:
                return body, "noop"
            out.extend(replacement)
            status = "done"
            continue
        if status == "missing" and isinstance(stmt, (If, While, Block)):
            new_stmt, status = _splice_children(stmt, sid, transform)
            if status == "noop":
                return body, "noop"
            out.append(new_stmt)
            continue
        out.append(stmt)
    return tuple(out), status


def _splice_children(stmt, sid, transform):
    if isinstance(stmt, If):
        then, status = _splice(stmt.then, sid, transform)
        if status == "done":
            return If(stmt.sid, stmt.cond, then, stmt.orelse), status
        if status == "noop":
            return stmt, status
        orelse, status = _splice(stmt.orelse, sid, transform)
        if status == "done":
            return If(stmt.sid, stmt.cond, stmt.then, orelse), status
        return stmt, status
    body, status = _splice(stmt.body, sid, transform)
    if status != "done":
        return stmt, status
    if isinstance(stmt, While):
        return While(stmt.sid, stmt.cond, body), status
    return Block(stmt.sid, body), status


def _stmt_by_sid(program, sid):
    for _, stmt in program_statements(program):
        if stmt.sid == sid:
            return stmt
    return None


def _owner_function(program, sid):
    for fn in program.functions:
        for stmt in walk_statements(fn.body):
            if stmt.sid == sid:
                return fn
    return None


def _parse_payload_expr(text):
    try:
        return parse_expression(text)
    except ParseError:
        return None


def _len_of(array_name):
    return Call("len", (Var(array_name),))


def _edit_stmt(stmt, new_stmt):
    return None if new_stmt is None else (new_stmt,)


# Handlers return the transform result for _splice: a tuple of statements
# to put in the target's place, or None to veto the whole edit.


def _tf_stmt_append(program, stmt, edit, ctr):
    donor = _stmt_by_sid(program, edit.payload[0])
    if donor is None:
        return None
    return (stmt, _renumber(donor, ctr))


def _tf_stmt_delete(program, stmt, edit, ctr):
    return ()


def _tf_stmt_replace(program, stmt, edit, ctr):
    donor = _stmt_by_sid(program, edit.payload[0])
    if donor is None:
        return None
    return (_renumber(donor, ctr),)


def _tf_func_call_swap(program, stmt, edit, ctr):
    node = _get_expr(stmt, edit.path)
    if not isinstance(node, Call):
        return None
    new_name = edit.payload[0]
    target_fn = program.function(new_name)
    if target_fn is None or len(target_fn.params) != len(node.args):
        return None
    return _edit_stmt(stmt, _set_expr(stmt, edit.path,
                                      Call(new_name, node.args)))


def _tf_expr_replace(program, stmt, edit, ctr):
    donor = _parse_payload_expr(edit.payload[0])
    if donor is None:
        return None
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, donor))


def _tf_expr_add(program, stmt, edit, ctr):
    text, op, side = edit.payload
    donor = _parse_payload_expr(text)
    current = _get_expr(stmt, edit.path)
    if donor is None or current is None or op not in ("&&", "||"):
        return None
    joined = Binary(op, donor, current) if side == "left" \
        else Binary(op, current, donor)
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, joined))


def _tf_expr_remove(program, stmt, edit, ctr):
    current = _get_expr(stmt, edit.path)
    if not isinstance(current, Binary) or current.op not in ("&&", "||"):
        return None
    kept = current.left if edit.payload[0] == "left" else current.right
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, kept))


def _tf_guard_insert(program, stmt, edit, ctr):
    cond = Binary("!=", Var(edit.payload[0]), Num(0))
    sid = ctr[0]
    ctr[0] += 1
    return (If(sid, cond, (stmt,), ()),)


def _tf_range_check_insert(program, stmt, edit, ctr):
    index_text, array_name = edit.payload
    idx = _parse_payload_expr(index_text)
    if idx is None:
        return None
    cond = Binary("&&", Binary(">=", idx, Num(0)),
                  Binary("<", idx, _len_of(array_name)))
    sid = ctr[0]
    ctr[0] += 1
    return (If(sid, cond, (stmt,), ()),)


def _tf_size_check_insert(program, stmt, edit, ctr):
    cond = Binary(">", _len_of(edit.payload[0]), Num(0))
    sid = ctr[0]
    ctr[0] += 1
    return (If(sid, cond, (stmt,), ()),)


def _tf_lower_bound_clamp(program, stmt, edit, ctr):
    var = edit.payload[0]
    if_sid = ctr[0]
    assign_sid = ctr[0] + 1
    ctr[0] += 2
    clamp = If(if_sid, Binary("<", Var(var), Num(0)),
               (Assign(assign_sid, var, Num(0)),), ())
    return (clamp, stmt)


def _tf_upper_bound_clamp(program, stmt, edit, ctr):
    var, array_name = edit.payload
    bound = Binary("-", _len_of(array_name), Num(1))
    if_sid = ctr[0]
    assign_sid = ctr[0] + 1
    ctr[0] += 2
    clamp = If(if_sid, Binary(">", Var(var), bound),
               (Assign(assign_sid, var, bound),), ())
    return (clamp, stmt)


def _tf_off_by_one(program, stmt, edit, ctr):
    node = _get_expr(stmt, edit.path)
    if node is None:
        return None
    delta = edit.payload[0]
    bumped = Binary("+" if delta > 0 else "-", node, Num(1))
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, bumped))


def _tf_var_init_insert(program, stmt, edit, ctr):
    sid = ctr[0]
    ctr[0] += 1
    return (Assign(sid, edit.payload[0], Num(0)), stmt)


def _tf_const_perturb(program, stmt, edit, ctr):
    node = _get_expr(stmt, edit.path)
    if not isinstance(node, Num):
        return None
    value = node.value + edit.payload[0]
    # negative literals print as unary minus, so store them that way
    new_node = Unary(Num(-value)) if value < 0 else Num(value)
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, new_node))


def _tf_negate_condition(program, stmt, edit, ctr):
    cond = _get_expr(stmt, edit.path)
    if cond is None:
        return None
    if isinstance(cond, Binary) and cond.op in _NEGATED:
        flipped = Binary(_NEGATED[cond.op], cond.left, cond.right)
    else:
        flipped = Binary("==", cond, Num(0))
    return _edit_stmt(stmt, _set_expr(stmt, edit.path, flipped))


_TRANSFORMS = {
    "stmt_append": _tf_stmt_append,
    "stmt_delete": _tf_stmt_delete,
    "stmt_replace": _tf_stmt_replace,
    "func_call_swap": _tf_func_call_swap,
    "expr_replace": _tf_expr_replace,
    "expr_add": _tf_expr_add,
    "expr_remove": _tf_expr_remove,
    "guard_insert": _tf_guard_insert,
    "range_check_insert": _tf_range_check_insert,
    "size_check_insert": _tf_size_check_insert,
    "lower_bound_clamp": _tf_lower_bound_clamp,
    "upper_bound_clamp": _tf_upper_bound_clamp,
    "off_by_one": _tf_off_by_one,
    "var_init_insert": _tf_var_init_insert,
    "const_perturb": _tf_const_perturb,
    "negate_condition": _tf_negate_condition,
}


def _swap_with_successor(body, sid):
    for i, stmt in enumerate(body):
        if stmt.sid == sid:
            if i + 1 >= len(body):
                return body, "noop"
            out = list(body)
            out[i], out[i + 1] = out[i + 1], out[i]
            return tuple(out), "done"
        if isinstance(stmt, If):
            then, status = _swap_with_successor(stmt.then, sid)
            if status == "done":
                out = list(body)
                out[i] = If(stmt.sid, stmt.cond, then, stmt.orelse)
                return tuple(out), status
            if status == "noop":
                return body, status
            orelse, status = _swap_with_successor(stmt.orelse, sid)
            if status == "done":
                out = list(body)
                out[i] = If(stmt.sid, stmt.cond, stmt.then, orelse)
                return tuple(out), status
            if status == "noop":
                return body, status
        elif isinstance(stmt, (While, Block)):
            sub, status = _swap_with_successor(stmt.body, sid)
            if status == "done":
                out = list(body)
                out[i] = While(stmt.sid, stmt.cond, sub) \
                    if isinstance(stmt, While) else Block(stmt.sid, sub)
                return tuple(out), status
            if status == "noop":
                return body, status
    return body, "missing"


def _function_with_body(program, fn, new_body, next_sid):
    functions = tuple(Function(f.name, f.params, new_body)
                      if f.name == fn.name else f
                      for f in program.functions)
    return Program(functions, next_sid)


def apply_edit(program: Program, edit: Edit):
    """Apply one edit; returns (program, applied). Never raises."""
    fn = _owner_function(program, edit.target)
    if fn is None:
        return program, False
    ctr = [program.next_sid]

    if edit.op == "stmt_swap":
        new_body, status = _swap_with_successor(fn.body, edit.target)
        if status != "done":
            return program, False
        return _function_with_body(program, fn, new_body, ctr[0]), True

    if edit.op == "default_return_insert":
        if edit.payload[0] not in (0, 1):
            return program, False
        sid = ctr[0]
        ctr[0] += 1
        new_body = fn.body + (Return(sid, Num(edit.payload[0])),)
        return _function_with_body(program, fn, new_body, ctr[0]), True

    transform = _TRANSFORMS.get(edit.op)
    if transform is None:
        return program, False
    new_body, status = _splice(fn.body, edit.target,
                               lambda stmt: transform(program, stmt,
                                                      edit, ctr))
    if status != "done":
        return program, False
    return _function_with_body(program, fn, new_body, ctr[0]), True


def apply_edits(program: Program, edits):
    """Apply an edit list left to right; returns (program, applied flags)."""
    flags = []
    for edit in edits:
        program, applied = apply_edit(program, edit)
        flags.append(applied)
    return program, tuple(flags)
