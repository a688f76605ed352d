"""Lexer, parser, AST, and pretty-printer for the toy imperative language.

Programs are lists of integer functions:

    fn mid(x, y, z) {
      m = z;
      if (y < z) { ... } else { ... }
      return m;
    }

Statements: assignment, array element write, if/else, while, return, and
bare blocks.  Expressions: integer literals, variables, array reads, unary
minus, binary arithmetic / comparison / logical operators, and calls.  The
only builtin is len(a) for array parameters.  A '#' starts a line comment.

Every statement node carries a small integer id (sid) assigned in pre-order
during parsing; mutation edits address statements through these ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KEYWORDS = ("fn", "if", "else", "while", "return")
BUILTIN_LEN = "len"

CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")
ADD_OPS = ("+", "-")
MUL_OPS = ("*", "/", "%")
LOGIC_OPS = ("&&", "||")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"parse error at {line}:{col}: {msg}")
        self.line = line
        self.col = col


# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Index:
    name: str
    index: object


@dataclass(frozen=True)
class Unary:
    operand: object  # unary minus is the only prefix operator


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Assign:
    sid: int
    name: str
    expr: object


@dataclass(frozen=True)
class Store:
    sid: int
    name: str
    index: object
    expr: object


@dataclass(frozen=True)
class If:
    sid: int
    cond: object
    then: tuple
    orelse: tuple  # empty tuple when there is no else branch


@dataclass(frozen=True)
class While:
    sid: int
    cond: object
    body: tuple


@dataclass(frozen=True)
class Return:
    sid: int
    expr: object


@dataclass(frozen=True)
class Block:
    sid: int
    body: tuple


STMT_TYPES = (Assign, Store, If, While, Return, Block)


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple
    body: tuple


@dataclass(frozen=True)
class Program:
    functions: tuple  # of Function, in source order
    next_sid: int     # first id free for mutation-inserted statements

    def function(self, name: str) -> Function | None:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def function_names(self) -> list[str]:
        return [fn.name for fn in self.functions]


def walk_statements(body):
    """Yield every statement in a body, pre-order, including nested ones."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_statements(stmt.then)
            yield from walk_statements(stmt.orelse)
        elif isinstance(stmt, (While, Block)):
            yield from walk_statements(stmt.body)


def program_statements(program: Program):
    for fn in program.functions:
        for stmt in walk_statements(fn.body):
            yield fn.name, stmt


def same_shape(a, b) -> bool:
    """Structural equality that ignores statement ids."""
    if type(a) is not type(b):
        return False
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(same_shape(x, y) for x, y in zip(a, b))
    if isinstance(a, STMT_TYPES + (Function, Program, Num, Var, Index, Unary,
                                   Binary, Call)):
        for name in a.__dataclass_fields__:
            if name in ("sid", "next_sid"):
                continue
            if not same_shape(getattr(a, name), getattr(b, name)):
                return False
        return True
    return a == b


# ---------------------------------------------------------------- lexer


_TWO_CHAR = ("<=", ">=", "==", "!=", "&&", "||")
_ONE_CHAR = "+-*/%<>=(){}[],;"


def tokenize(text: str):
    tokens = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            tokens.append((two, two, line, start_col))
            i += 2
            col += 2
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "ident"
            tokens.append((kind, word, line, start_col))
            col += j - i
            i = j
            continue
        if ch in _ONE_CHAR:
            tokens.append((ch, ch, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(("eof", None, line, col))
    return tokens


# --------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str, first_sid: int = 0):
        self.tokens = tokenize(text)
        self.pos = 0
        self.sid = first_sid

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}",
                             tok[2], tok[3])
        return tok

    def fail(self, msg):
        tok = self.peek()
        raise ParseError(msg, tok[2], tok[3])

    def fresh_sid(self) -> int:
        sid = self.sid
        self.sid += 1
        return sid

    # declarations

    def program(self) -> Program:
        functions = []
        seen = set()
        while self.peek()[0] != "eof":
            fn = self.function()
            if fn.name in seen:
                self.fail(f"duplicate function {fn.name!r}")
            seen.add(fn.name)
            functions.append(fn)
        if not functions:
            self.fail("empty program")
        return Program(tuple(functions), self.sid)

    def function(self) -> Function:
        self.expect("fn")
        name_tok = self.expect("ident")
        name = name_tok[1]
        if name == BUILTIN_LEN:
            raise ParseError(f"{BUILTIN_LEN!r} is reserved",
                             name_tok[2], name_tok[3])
        self.expect("(")
        params = []
        if self.peek()[0] != ")":
            params.append(self.expect("ident")[1])
            while self.peek()[0] == ",":
                self.next()
                params.append(self.expect("ident")[1])
        if len(set(params)) != len(params):
            raise ParseError(f"duplicate parameter in {name!r}",
                             name_tok[2], name_tok[3])
        self.expect(")")
        body = self.block_body()
        return Function(name, tuple(params), body)

    # statements

    def block_body(self) -> tuple:
        self.expect("{")
        body = []
        while self.peek()[0] != "}":
            body.append(self.statement())
        self.expect("}")
        return tuple(body)

    def statement(self):
        kind = self.peek()[0]
        if kind == "if":
            sid = self.fresh_sid()
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.block_body()
            orelse = ()
            if self.peek()[0] == "else":
                self.next()
                orelse = self.block_body()
            return If(sid, cond, then, orelse)
        if kind == "while":
            sid = self.fresh_sid()
            self.next()
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return While(sid, cond, self.block_body())
        if kind == "return":
            sid = self.fresh_sid()
            self.next()
            expr = self.expression()
            self.expect(";")
            return Return(sid, expr)
        if kind == "{":
            return Block(self.fresh_sid(), self.block_body())
        if kind == "ident":
            sid = self.fresh_sid()
            name = self.next()[1]
            if self.peek()[0] == "[":
                self.next()
                index = self.expression()
                self.expect("]")
                self.expect("=")
                expr = self.expression()
                self.expect(";")
                return Store(sid, name, index, expr)
            self.expect("=")
            expr = self.expression()
            self.expect(";")
            return Assign(sid, name, expr)
        self.fail("expected a statement")

    # expressions (precedence climbing)

    def expression(self):
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.peek()[0] == "||":
            self.next()
            left = Binary("||", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.cmp_expr()
        while self.peek()[0] == "&&":
            self.next()
            left = Binary("&&", left, self.cmp_expr())
        return left

    def cmp_expr(self):
        left = self.add_expr()
        if self.peek()[0] in CMP_OPS:
            op = self.next()[0]
            return Binary(op, left, self.add_expr())
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.peek()[0] in ADD_OPS:
            op = self.next()[0]
            left = Binary(op, left, self.mul_expr())
        return left

    def mul_expr(self):
        left = self.unary_expr()
        while self.peek()[0] in MUL_OPS:
            op = self.next()[0]
            left = Binary(op, left, self.unary_expr())
        return left

    def unary_expr(self):
        if self.peek()[0] == "-":
            self.next()
            return Unary(self.unary_expr())
        return self.atom()

    def atom(self):
        tok = self.next()
        kind = tok[0]
        if kind == "int":
            return Num(tok[1])
        if kind == "(":
            expr = self.expression()
            self.expect(")")
            return expr
        if kind == "ident":
            name = tok[1]
            if self.peek()[0] == "(":
                self.next()
                args = []
                if self.peek()[0] != ")":
                    args.append(self.expression())
                    while self.peek()[0] == ",":
                        self.next()
                        args.append(self.expression())
                self.expect(")")
                return Call(name, tuple(args))
            if self.peek()[0] == "[":
                self.next()
                index = self.expression()
                self.expect("]")
                return Index(name, index)
            return Var(name)
        raise ParseError(f"expected an expression, found {tok[1]!r}",
                         tok[2], tok[3])


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_expression(text: str):
    parser = _Parser(text)
    expr = parser.expression()
    if parser.peek()[0] != "eof":
        parser.fail("trailing input after expression")
    return expr


# -------------------------------------------------------- pretty-printer


_PRECEDENCE = {"||": 1, "&&": 2,
               "<": 3, "<=": 3, ">": 3, ">=": 3, "==": 3, "!=": 3,
               "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}


def print_expr(expr, parent_prec: int = 0) -> str:
    if isinstance(expr, Num):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Index):
        return f"{expr.name}[{print_expr(expr.index)}]"
    if isinstance(expr, Unary):
        return f"-{print_expr(expr.operand, 6)}"
    if isinstance(expr, Call):
        args = ", ".join(print_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        # comparison is non-associative; "+-*/%" chains associate left
        inner = f"{print_expr(expr.left, prec - 1)} {expr.op} " \
                f"{print_expr(expr.right, prec)}"
        return f"({inner})" if prec <= parent_prec else inner
    raise TypeError(f"not an expression node: {expr!r}")


def _print_block(body, indent: int, out: list) -> None:
    pad = "  " * indent
    for stmt in body:
        if isinstance(stmt, Assign):
            out.append(f"{pad}{stmt.name} = {print_expr(stmt.expr)};")
        elif isinstance(stmt, Store):
            out.append(f"{pad}{stmt.name}[{print_expr(stmt.index)}] = "
                       f"{print_expr(stmt.expr)};")
        elif isinstance(stmt, Return):
            out.append(f"{pad}return {print_expr(stmt.expr)};")
        elif isinstance(stmt, If):
            out.append(f"{pad}if ({print_expr(stmt.cond)}) {{")
            _print_block(stmt.then, indent + 1, out)
            if stmt.orelse:
                out.append(f"{pad}}} else {{")
                _print_block(stmt.orelse, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(stmt, While):
            out.append(f"{pad}while ({print_expr(stmt.cond)}) {{")
            _print_block(stmt.body, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(stmt, Block):
            out.append(f"{pad}{{")
            _print_block(stmt.body, indent + 1, out)
            out.append(f"{pad}}}")
        else:
            raise TypeError(f"not a statement node: {stmt!r}")


def print_statement(stmt) -> str:
    """Render one statement (and anything nested in it) as flat text."""
    out = []
    _print_block((stmt,), 0, out)
    return "\n".join(out)


def print_program(program: Program) -> str:
    out = []
    for fn in program.functions:
        out.append(f"fn {fn.name}({', '.join(fn.params)}) {{")
        _print_block(fn.body, 1, out)
        out.append("}")
        out.append("")
    return "\n".join(out)
