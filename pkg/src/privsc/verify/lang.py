"""Mini contract language: lexer, parser, AST and interpreter.

The language is a deliberately small Java-like subset, enough for the
annotated pseudo-code contracts this package verifies: integer fields and
locals, int[] parameters, straight-line statements, if/else, counted for
loops, and a single trailing return.  Annotations ride in comments:

    // requires amount > 0
    // ensures balance == \\old(balance) + amount

attach to the following method; `// invariant ...` attaches to the
following for loop, or to the class when it appears among the fields.
Annotation expressions add \\old(v) and \\result to the expression
grammar (integer comparisons, + - *, && || !).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class LangError(Exception):
    def __init__(self, message: str, line: int | None = None) -> None:
        where = f" (line {line})" if line else ""
        super().__init__(message + where)
        self.line = line


# --- expression AST ---------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Old:
    name: str


@dataclass(frozen=True)
class Result:
    pass


@dataclass(frozen=True)
class Index:
    name: str
    index: "Expr"


@dataclass(frozen=True)
class Un:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Lit | Var | Old | Result | Index | Un | Bin


@dataclass(frozen=True)
class Annotation:
    kind: str  # requires | ensures | invariant
    expr: Expr
    text: str
    line: int


# --- statement / declaration AST -------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: str
    index: Expr | None
    expr: Expr


@dataclass(frozen=True)
class Decl:
    name: str
    expr: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple


@dataclass(frozen=True)
class For:
    var: str
    start: Expr
    cond: Expr
    invariants: tuple[Annotation, ...]
    body: tuple


@dataclass(frozen=True)
class Return:
    expr: Expr


Stmt = Assign | Decl | If | For | Return


@dataclass(frozen=True)
class Param:
    name: str
    is_array: bool


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[Param, ...]
    returns_value: bool
    requires: tuple[Annotation, ...]
    ensures: tuple[Annotation, ...]
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class ClassDecl:
    name: str
    fields: tuple[tuple[str, int | None], ...]
    invariants: tuple[Annotation, ...]
    methods: tuple[Method, ...]

    def method(self, name: str) -> Method:
        for m in self.methods:
            if m.name == name:
                return m
        raise LangError(f"no method {name!r} in class {self.name}")

    def constant_fields(self) -> dict[str, int]:
        """Fields initialized and never assigned by any method."""
        assigned = set()

        def scan(stmts):
            for s in stmts:
                if isinstance(s, Assign):
                    assigned.add(s.target)
                elif isinstance(s, If):
                    scan(s.then)
                    scan(s.orelse)
                elif isinstance(s, For):
                    scan(s.body)

        for m in self.methods:
            scan(m.body)
        return {name: init for name, init in self.fields
                if init is not None and name not in assigned}


# --- lexer -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<annot>//\s*(requires|ensures|invariant)\b[^\n]*)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|!=|&&|\|\||\+\+|\+=|-=|[-+*<>=!;{}()\[\],])
  | (?P<back>\\(old|result))
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


def _lex(source: str) -> list[Token]:
    tokens = []
    line = 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise LangError(f"unexpected character {source[pos]!r}", line)
        pos = m.end()
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            continue
        if kind in ("ws", "comment"):
            continue
        tokens.append(Token(kind, m.group(), line))
    tokens.append(Token("eof", "", line))
    return tokens


# --- expression parsing (shared by program text and annotations) -------------


class _ExprParser:
    """Precedence-climbing parser over a token list."""

    def __init__(self, tokens: list[Token], allow_old: bool,
                 allow_result: bool) -> None:
        self.tokens = tokens
        self.pos = 0
        self.allow_old = allow_old
        self.allow_result = allow_result

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise LangError(f"expected {text!r}, got {tok.text!r}", tok.line)
        return tok

    def parse(self) -> Expr:
        e = self.parse_or()
        return e

    def parse_or(self) -> Expr:
        e = self.parse_and()
        while self.peek().text == "||":
            self.next()
            e = Bin("||", e, self.parse_and())
        return e

    def parse_and(self) -> Expr:
        e = self.parse_cmp()
        while self.peek().text == "&&":
            self.next()
            e = Bin("&&", e, self.parse_cmp())
        return e

    def parse_cmp(self) -> Expr:
        e = self.parse_add()
        while self.peek().text in ("<", "<=", ">", ">=", "==", "!="):
            op = self.next().text
            e = Bin(op, e, self.parse_add())
        return e

    def parse_add(self) -> Expr:
        e = self.parse_mul()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            e = Bin(op, e, self.parse_mul())
        return e

    def parse_mul(self) -> Expr:
        e = self.parse_unary()
        while self.peek().text == "*":
            self.next()
            e = Bin("*", e, self.parse_unary())
        return e

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.text == "-":
            self.next()
            return Un("-", self.parse_unary())
        if tok.text == "!":
            self.next()
            return Un("!", self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return Lit(int(tok.text))
        if tok.kind == "back":
            if tok.text == "\\result":
                if not self.allow_result:
                    raise LangError(
                        "\\result is only valid in ensures clauses", tok.line)
                return Result()
            self.expect("(")
            name = self.next()
            if name.kind != "ident":
                raise LangError("\\old expects a variable", name.line)
            self.expect(")")
            if not self.allow_old:
                raise LangError(
                    "\\old is only valid in annotations", tok.line)
            return Old(name.text)
        if tok.kind == "ident":
            if self.peek().text == "[":
                self.next()
                idx = self.parse_or()
                self.expect("]")
                return Index(tok.text, idx)
            return Var(tok.text)
        if tok.text == "(":
            e = self.parse_or()
            self.expect(")")
            return e
        raise LangError(f"unexpected token {tok.text!r}", tok.line)


def parse_expression(text: str, *, allow_old: bool = False,
                     allow_result: bool = False, line: int = 0) -> Expr:
    tokens = _lex(text)
    parser = _ExprParser(tokens, allow_old, allow_result)
    e = parser.parse()
    if parser.peek().kind != "eof":
        raise LangError(
            f"trailing input in expression: {parser.peek().text!r}",
            line or parser.peek().line)
    return e


_ANNOT_RE = re.compile(r"//\s*(requires|ensures|invariant)\b\s*(.*?)\s*;?\s*$")


def _parse_annotation(tok: Token) -> Annotation:
    m = _ANNOT_RE.match(tok.text)
    kind, body = m.group(1), m.group(2)
    expr = parse_expression(body, allow_old=True, allow_result=(kind == "ensures"),
                            line=tok.line)
    _reject_result_outside_ensures(expr, kind, tok.line)
    return Annotation(kind=kind, expr=expr, text=body, line=tok.line)


def _reject_result_outside_ensures(expr: Expr, kind: str, line: int) -> None:
    if kind == "ensures":
        return
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Result):
            raise LangError(f"\\result is not valid in a {kind} clause", line)
        if isinstance(e, Bin):
            stack.extend((e.left, e.right))
        elif isinstance(e, Un):
            stack.append(e.operand)
        elif isinstance(e, Index):
            stack.append(e.index)


# --- program parser -----------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise LangError(f"expected {text!r}, got {tok.text!r}", tok.line)
        return tok

    def take_annotations(self) -> list[Annotation]:
        out = []
        while self.peek().kind == "annot":
            out.append(_parse_annotation(self.next()))
        return out

    def parse_class(self) -> ClassDecl:
        self.expect("class")
        name = self.next()
        if name.kind != "ident":
            raise LangError("expected class name", name.line)
        self.expect("{")
        fields: list[tuple[str, int | None]] = []
        invariants: list[Annotation] = []
        methods: list[Method] = []
        while self.peek().text != "}":
            annots = self.take_annotations()
            class_invs = [a for a in annots if a.kind == "invariant"]
            hanging = [a for a in annots if a.kind != "invariant"]
            tok = self.peek()
            if tok.text == "int" and self.peek(2).text in ("=", ";"):
                if hanging:
                    raise LangError(
                        "requires/ensures must precede a method", tok.line)
                invariants.extend(class_invs)
                self.next()
                fname = self.next().text
                init = None
                if self.peek().text == "=":
                    self.next()
                    neg = self.peek().text == "-"
                    if neg:
                        self.next()
                    init = int(self.next().text) * (-1 if neg else 1)
                self.expect(";")
                fields.append((fname, init))
            else:
                # invariant comments between fields attach to the class
                invariants.extend(class_invs)
                methods.append(self.parse_method(hanging))
        self.expect("}")
        if self.peek().kind != "eof":
            raise LangError("trailing input after class", self.peek().line)
        return ClassDecl(name=name.text, fields=tuple(fields),
                         invariants=tuple(invariants), methods=tuple(methods))

    def parse_method(self, annots: list[Annotation]) -> Method:
        ret_tok = self.next()
        if ret_tok.text not in ("int", "void"):
            raise LangError(f"expected return type, got {ret_tok.text!r}",
                            ret_tok.line)
        name = self.next()
        if name.kind != "ident":
            raise LangError("expected method name", name.line)
        self.expect("(")
        params: list[Param] = []
        while self.peek().text != ")":
            self.expect("int")
            is_array = False
            if self.peek().text == "[":
                self.next()
                self.expect("]")
                is_array = True
            pname = self.next()
            params.append(Param(pname.text, is_array))
            if self.peek().text == ",":
                self.next()
        self.expect(")")
        body = self.parse_block()
        requires = tuple(a for a in annots if a.kind == "requires")
        ensures = tuple(a for a in annots if a.kind == "ensures")
        stray = [a for a in annots if a.kind == "invariant"]
        if stray:
            raise LangError("loop invariant not attached to a loop",
                            stray[0].line)
        return Method(name=name.text, params=tuple(params),
                      returns_value=ret_tok.text == "int",
                      requires=requires, ensures=ensures, body=body)

    def parse_block(self) -> tuple[Stmt, ...]:
        self.expect("{")
        stmts: list[Stmt] = []
        while self.peek().text != "}":
            stmts.append(self.parse_stmt())
        self.expect("}")
        return tuple(stmts)

    def parse_stmt(self) -> Stmt:
        annots = self.take_annotations()
        invs = tuple(a for a in annots if a.kind == "invariant")
        if any(a.kind != "invariant" for a in annots):
            raise LangError("requires/ensures not allowed inside a body",
                            annots[0].line)
        tok = self.peek()
        if invs and tok.text != "for":
            raise LangError("invariant must precede a for loop", tok.line)
        if tok.text == "int":
            self.next()
            name = self.next().text
            self.expect("=")
            expr = self.parse_expr_until(";")
            return Decl(name, expr)
        if tok.text == "if":
            self.next()
            self.expect("(")
            cond = self.parse_expr_until(")")
            then = self.parse_block()
            orelse: tuple = ()
            if self.peek().text == "else":
                self.next()
                orelse = self.parse_block()
            return If(cond, then, orelse)
        if tok.text == "for":
            return self.parse_for(invs)
        if tok.text == "return":
            self.next()
            expr = self.parse_expr_until(";")
            return Return(expr)
        # assignment forms: x = e; x += e; x -= e; a[i] = e;
        name = self.next()
        if name.kind != "ident":
            raise LangError(f"unexpected token {name.text!r}", name.line)
        index = None
        if self.peek().text == "[":
            self.next()
            index = self.parse_expr_until("]")
        op = self.next().text
        expr = self.parse_expr_until(";")
        target_expr = Index(name.text, index) if index is not None else Var(name.text)
        if op == "=":
            return Assign(name.text, index, expr)
        if op == "+=":
            return Assign(name.text, index, Bin("+", target_expr, expr))
        if op == "-=":
            return Assign(name.text, index, Bin("-", target_expr, expr))
        raise LangError(f"unsupported assignment operator {op!r}", name.line)

    def parse_for(self, invariants: tuple[Annotation, ...]) -> For:
        self.expect("for")
        self.expect("(")
        self.expect("int")
        var = self.next().text
        self.expect("=")
        start = self.parse_expr_until(";")
        cond = self.parse_expr_until(";")
        step_var = self.next()
        self.expect("++")
        if step_var.text != var:
            raise LangError("for loop must increment its own counter",
                            step_var.line)
        self.expect(")")
        body = self.parse_block()
        return For(var=var, start=start, cond=cond, invariants=invariants,
                   body=body)

    def parse_expr_until(self, closer: str) -> Expr:
        depth = 0
        collected: list[Token] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                raise LangError(f"expected {closer!r} before end of input",
                                tok.line)
            if depth == 0 and tok.text == closer:
                self.next()
                break
            if tok.text in ("(", "["):
                depth += 1
            elif tok.text in (")", "]"):
                depth -= 1
            collected.append(self.next())
        collected.append(Token("eof", "", 0))
        parser = _ExprParser(collected, allow_old=False, allow_result=False)
        e = parser.parse()
        if parser.peek().kind != "eof":
            raise LangError("trailing tokens in expression",
                            collected[parser.pos].line)
        return e


def parse_contract(source: str) -> ClassDecl:
    """Parse a contract class; raises LangError with a line number."""
    return _Parser(_lex(source)).parse_class()


def parse_annotations(source: str) -> tuple[ClassDecl, list[Annotation]]:
    """Parse and return (AST, all annotations in declaration order)."""
    cls = parse_contract(source)
    annots = list(cls.invariants)
    for m in cls.methods:
        annots.extend(m.requires)
        annots.extend(m.ensures)
        for stmt in _walk(m.body):
            if isinstance(stmt, For):
                annots.extend(stmt.invariants)
    return cls, annots


def _walk(stmts):
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from _walk(s.then)
            yield from _walk(s.orelse)
        elif isinstance(s, For):
            yield from _walk(s.body)


# --- interpreter -----------------------------------------------------------


class ExecutionError(Exception):
    pass


class InvariantViolation(ExecutionError):
    def __init__(self, annotation: Annotation, env: dict) -> None:
        super().__init__(f"loop invariant violated: {annotation.text}")
        self.annotation = annotation
        self.env = dict(env)


def eval_expr(expr: Expr, env: dict, old: dict | None = None,
              result: int | None = None) -> int:
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        if expr.name not in env:
            raise ExecutionError(f"unknown variable {expr.name!r}")
        return env[expr.name]
    if isinstance(expr, Old):
        if old is None or expr.name not in old:
            raise ExecutionError(f"no pre-state value for {expr.name!r}")
        return old[expr.name]
    if isinstance(expr, Result):
        if result is None:
            raise ExecutionError("\\result is not available here")
        return result
    if isinstance(expr, Index):
        arr = env.get(expr.name)
        if not isinstance(arr, list):
            raise ExecutionError(f"{expr.name!r} is not an array")
        i = eval_expr(expr.index, env, old, result)
        if not (0 <= i < len(arr)):
            raise ExecutionError(f"index {i} out of bounds for {expr.name!r}")
        return arr[i]
    if isinstance(expr, Un):
        v = eval_expr(expr.operand, env, old, result)
        return -v if expr.op == "-" else int(not v)
    assert isinstance(expr, Bin)
    l = eval_expr(expr.left, env, old, result)
    if expr.op == "&&":
        return int(bool(l) and bool(eval_expr(expr.right, env, old, result)))
    if expr.op == "||":
        return int(bool(l) or bool(eval_expr(expr.right, env, old, result)))
    r = eval_expr(expr.right, env, old, result)
    return {
        "+": lambda: l + r,
        "-": lambda: l - r,
        "*": lambda: l * r,
        "<": lambda: int(l < r),
        "<=": lambda: int(l <= r),
        ">": lambda: int(l > r),
        ">=": lambda: int(l >= r),
        "==": lambda: int(l == r),
        "!=": lambda: int(l != r),
    }[expr.op]()


def run_method(cls: ClassDecl, method: Method, fields: dict[str, int],
               args: dict) -> tuple[int | None, dict[str, int]]:
    """Execute a method; returns (result, post-state fields).

    Loop invariants are checked at entry and after every iteration and
    raise InvariantViolation with the offending environment.
    """
    env: dict = {}
    for fname, init in cls.fields:
        env[fname] = fields.get(fname, init if init is not None else 0)
    for p in method.params:
        if p.name not in args:
            raise ExecutionError(f"missing argument {p.name!r}")
        env[p.name] = list(args[p.name]) if p.is_array else int(args[p.name])
    result = _exec_block(method.body, env)
    post_fields = {fname: env[fname] for fname, _ in cls.fields}
    return result, post_fields


def _exec_block(stmts, env) -> int | None:
    for s in stmts:
        if isinstance(s, Decl):
            env[s.name] = eval_expr(s.expr, env)
        elif isinstance(s, Assign):
            if s.index is None:
                env[s.target] = eval_expr(s.expr, env)
            else:
                arr = env[s.target]
                i = eval_expr(s.index, env)
                if not (0 <= i < len(arr)):
                    raise ExecutionError(f"index {i} out of bounds")
                arr[i] = eval_expr(s.expr, env)
        elif isinstance(s, If):
            branch = s.then if eval_expr(s.cond, env) else s.orelse
            r = _exec_block(branch, env)
            if r is not None:
                return r
        elif isinstance(s, For):
            env[s.var] = eval_expr(s.start, env)
            for inv in s.invariants:
                if not eval_expr(inv.expr, env):
                    raise InvariantViolation(inv, env)
            guard = 0
            while eval_expr(s.cond, env):
                r = _exec_block(s.body, env)
                if r is not None:
                    return r
                env[s.var] += 1
                for inv in s.invariants:
                    if not eval_expr(inv.expr, env):
                        raise InvariantViolation(inv, env)
                guard += 1
                if guard > 100_000:
                    raise ExecutionError("loop iteration budget exceeded")
        elif isinstance(s, Return):
            return eval_expr(s.expr, env)
        else:
            raise ExecutionError(f"unknown statement {s!r}")
    return None
