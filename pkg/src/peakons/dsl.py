"""Expression language for the nonlinearities f(u, ux) and g(u, ux).

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

``u`` and ``ux`` are the two reserved variables; every other bare name is a
parameter.  Evaluation is vectorised over numpy arrays so the quadrature
layer can evaluate a whole Gauss-Kronrod panel in one call.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

VARIABLES = ("u", "ux")

_UNARY_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sign": np.sign,
}
_BINARY_FUNCS = {"pow"}
FUNCTIONS = frozenset(_UNARY_FUNCS) | _BINARY_FUNCS


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.message = message
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class ExprEvalError(ExprError, ArithmeticError):
    """Evaluation failure: unbound parameter or a domain violation."""

    def __init__(self, message: str, kind: str = "domain"):
        self.kind = kind
        super().__init__(message)


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Num, Var, Param, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# Lexer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str, functions: frozenset):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.functions = functions

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, tok[2], self.text)

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] not in ("op",):
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {value!r}, found {what}")
        return self.next()

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[1] == ")":
                raise self.error("unbalanced ')'")
            raise self.error(f"expected operator, found {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.next()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.next()
            return Num(float(value))
        if kind == "name":
            self.next()
            if self.peek()[1] == "(":
                if value not in self.functions:
                    raise self.error(f"unknown function {value!r}", tok)
                self.next()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                arity = 2 if value in _BINARY_FUNCS else 1
                if value not in FUNCTIONS:
                    arity = len(args)  # user-registered callables take any arity
                if len(args) != arity:
                    raise self.error(f"{value} takes {arity} argument(s), got {len(args)}", tok)
                return Call(value, tuple(args))
            if value in VARIABLES:
                return Var(value)
            return Param(value)
        if value == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {value!r}")


def parse_expr(text: str, functions: Mapping[str, Callable] | None = None) -> Expr:
    """Parse ``text`` into an expression tree.

    ``functions`` optionally registers extra callables (used by the periodic
    breather designer); their names become callable in the expression.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text if isinstance(text, str) else "")
    names = FUNCTIONS | frozenset(functions or ())
    return _Parser(text, names).parse()


# --------------------------------------------------------------------------
# Printing and inspection

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(node: Expr) -> str:
    """Render a tree back to source, parenthesising only where required."""
    return _to_text(node, 0)


def _to_text(node, parent_prec):
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        # a negative literal only arises from constant folding; wrap it
        return f"({s})" if node.value < 0 else s
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Neg):
        s = "-" + _to_text(node.arg, 3)
        return f"({s})" if parent_prec > 3 else s
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_to_text(a, 0) for a in node.args)})"
    prec = _PREC[node.op]
    if node.op == "^":
        s = f"{_to_text(node.left, prec + 1)}^{_to_text(node.right, 3)}"
    else:
        s = f"{_to_text(node.left, prec)}{node.op}{_to_text(node.right, prec + 1)}"
    return f"({s})" if prec < parent_prec else s


def walk(node: Expr):
    yield node
    if isinstance(node, Neg):
        yield from walk(node.arg)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Call):
        for a in node.args:
            yield from walk(a)


def free_params(node: Expr) -> set[str]:
    return {n.name for n in walk(node) if isinstance(n, Param)}


def uses_functions(node: Expr, names) -> bool:
    names = set(names)
    return any(isinstance(n, Call) and n.name in names for n in walk(node))


def depends_on(node: Expr, name: str) -> bool:
    return any(isinstance(n, (Var, Param)) and n.name == name for n in walk(node))


# --------------------------------------------------------------------------
# Evaluation


def _is_integer(x) -> np.ndarray:
    return np.equal(np.floor(x), x)


def _check(cond, message):
    if np.any(cond):
        raise ExprEvalError(message)


def _power(a, b):
    _check((a < 0) & ~_is_integer(b), "negative base raised to a non-integer power")
    _check((a == 0) & (b < 0), "division by zero (zero raised to a negative power)")
    with np.errstate(over="ignore"):
        return np.power(a, b)


def _divide(a, b):
    _check(b == 0, "division by zero")
    with np.errstate(over="ignore"):
        return a / b


def _call(name, args):
    if name == "pow":
        return _power(*args)
    (x,) = args
    if name == "log":
        _check(x <= 0, "log of a non-positive number")
    elif name == "sqrt":
        _check(x < 0, "sqrt of a negative number")
    with np.errstate(over="ignore"):
        return _UNARY_FUNCS[name](x)


def compile_expr(
    node: Expr,
    params: Mapping[str, float],
    functions: Mapping[str, Callable] | None = None,
) -> Callable:
    """Bind parameters and return ``fn(u, ux)`` evaluating the tree.

    Unbound parameters are reported at compile time.  The returned callable
    accepts scalars or broadcastable arrays and returns float64 values.
    """
    functions = dict(functions or {})

    def build(n):
        if isinstance(n, Num):
            v = np.float64(n.value)
            return lambda u, ux: v
        if isinstance(n, Var):
            return (lambda u, ux: u) if n.name == "u" else (lambda u, ux: ux)
        if isinstance(n, Param):
            if n.name not in params:
                raise ExprEvalError(f"unbound parameter {n.name!r}", kind="unbound")
            v = np.float64(params[n.name])
            return lambda u, ux: v
        if isinstance(n, Neg):
            inner = build(n.arg)
            return lambda u, ux: -inner(u, ux)
        if isinstance(n, BinOp):
            left, right = build(n.left), build(n.right)
            if n.op == "+":
                return lambda u, ux: left(u, ux) + right(u, ux)
            if n.op == "-":
                return lambda u, ux: left(u, ux) - right(u, ux)
            if n.op == "*":
                return lambda u, ux: left(u, ux) * right(u, ux)
            if n.op == "/":
                return lambda u, ux: _divide(left(u, ux), right(u, ux))
            return lambda u, ux: _power(left(u, ux), right(u, ux))
        if isinstance(n, Call):
            args = [build(a) for a in n.args]
            if n.name in functions:
                fn = functions[n.name]
                return lambda u, ux: np.asarray(fn(*[a(u, ux) for a in args]), dtype=float)
            return lambda u, ux: _call(n.name, [a(u, ux) for a in args])
        raise TypeError(f"not an expression node: {n!r}")

    body = build(node)

    def fn(u, ux):
        u = np.asarray(u, dtype=float)
        ux = np.asarray(ux, dtype=float)
        out = np.asarray(body(u, ux), dtype=float)
        shape = np.broadcast_shapes(u.shape, ux.shape)
        return out if out.shape == shape else np.broadcast_to(out, shape)

    return fn


def eval_expr(
    node: Expr,
    u: float,
    ux: float,
    params: Mapping[str, float] | None = None,
    functions: Mapping[str, Callable] | None = None,
) -> float:
    """Evaluate the tree at a single point ``(u, ux)``.

    >>> eval_expr(parse_expr("k*(u-2)*(u-1)"), 1.5, 0.0, {"k": 1.0})
    -0.25
    """
    return float(compile_expr(node, params or {}, functions)(u, ux))


def even_odd_at(node, u, ux, params=None, functions=None) -> tuple[float, float]:
    """Even and odd parts of the expression under the reflection ux -> -ux."""
    fn = compile_expr(node, params or {}, functions)
    plus = float(fn(u, ux))
    minus = float(fn(u, -ux))
    return 0.5 * (plus + minus), 0.5 * (plus - minus)


# --------------------------------------------------------------------------
# Symbolic partial derivative (internal: used for the acceleration law)


class NotDifferentiable(ExprError):
    pass


def _simp_add(a, b):
    if a == Num(0.0):
        return b
    if b == Num(0.0):
        return a
    return BinOp("+", a, b)


def _simp_sub(a, b):
    if b == Num(0.0):
        return a
    if a == Num(0.0):
        return Neg(b)
    return BinOp("-", a, b)


def _simp_mul(a, b):
    if a == Num(0.0) or b == Num(0.0):
        return Num(0.0)
    if a == Num(1.0):
        return b
    if b == Num(1.0):
        return a
    return BinOp("*", a, b)


def _simp_div(a, b):
    if a == Num(0.0):
        return Num(0.0)
    if b == Num(1.0):
        return a
    return BinOp("/", a, b)


def derivative(node: Expr, name: str, custom: frozenset = frozenset()) -> Expr:
    """Partial derivative with respect to the variable or parameter ``name``.

    Raises NotDifferentiable for abs/sign, and for registered callables on
    the differentiation path.
    """
    d = lambda n: derivative(n, name, custom)  # noqa: E731
    if not depends_on(node, name):
        return Num(0.0)
    if isinstance(node, (Var, Param)):
        return Num(1.0)
    if isinstance(node, Neg):
        inner = d(node.arg)
        return Num(0.0) if inner == Num(0.0) else Neg(inner)
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        if node.op == "+":
            return _simp_add(d(a), d(b))
        if node.op == "-":
            return _simp_sub(d(a), d(b))
        if node.op == "*":
            return _simp_add(_simp_mul(d(a), b), _simp_mul(a, d(b)))
        if node.op == "/":
            num = _simp_sub(_simp_mul(d(a), b), _simp_mul(a, d(b)))
            return _simp_div(num, BinOp("^", b, Num(2.0)))
        return _d_power(a, b, d, name)
    if isinstance(node, Call):
        if node.name in custom or node.name in ("abs", "sign"):
            raise NotDifferentiable(f"{node.name} is not differentiated symbolically")
        if node.name == "pow":
            return _d_power(node.args[0], node.args[1], d, name)
        (a,) = node.args
        da = d(a)
        if node.name == "exp":
            outer = node
        elif node.name == "log":
            return _simp_div(da, a)
        elif node.name == "sin":
            outer = Call("cos", (a,))
        elif node.name == "cos":
            outer = Neg(Call("sin", (a,)))
        elif node.name == "tan":
            return _simp_div(da, BinOp("^", Call("cos", (a,)), Num(2.0)))
        elif node.name == "sqrt":
            return _simp_div(da, BinOp("*", Num(2.0), node))
        else:
            raise NotDifferentiable(node.name)
        return _simp_mul(outer, da)
    raise TypeError(node)


def _d_power(a, b, d, name):
    da = d(a)
    if not depends_on(b, name):
        # b * a^(b-1) * a'
        lowered = BinOp("^", a, _simp_sub(b, Num(1.0))) if not isinstance(b, Num) else (
            BinOp("^", a, Num(b.value - 1.0)) if b.value != 1.0 else Num(1.0)
        )
        return _simp_mul(_simp_mul(b, lowered), da)
    # a^b * (b' log a + b a'/a)
    term = _simp_add(
        _simp_mul(d(b), Call("log", (a,))),
        _simp_div(_simp_mul(b, da), a),
    )
    return _simp_mul(BinOp("^", a, b), term)


# --------------------------------------------------------------------------
# The wave equation identity


@dataclass(frozen=True)
class NonlinearitySpec:
    """The pair (f, g) of ``m_t + f m + (g m)_x = 0`` with bound parameters."""

    f: Expr
    g: Expr
    params: Mapping[str, float] = field(default_factory=dict)
    functions: Mapping[str, Callable] = field(default_factory=dict, compare=False)
    f_text: str = ""
    g_text: str = ""

    def __post_init__(self):
        missing = (free_params(self.f) | free_params(self.g)) - set(self.params)
        if missing:
            raise ExprEvalError(f"unbound parameter(s): {', '.join(sorted(missing))}", kind="unbound")
        object.__setattr__(self, "params", dict(self.params))
        if not self.f_text:
            object.__setattr__(self, "f_text", to_text(self.f))
        if not self.g_text:
            object.__setattr__(self, "g_text", to_text(self.g))

    @classmethod
    def from_text(cls, f: str, g: str, params: Mapping[str, float] | None = None,
                  functions: Mapping[str, Callable] | None = None) -> "NonlinearitySpec":
        functions = dict(functions or {})
        return cls(parse_expr(f, functions), parse_expr(g, functions), dict(params or {}),
                   functions, f_text=f, g_text=g)

    def compiled(self):
        return (compile_expr(self.f, self.params, self.functions),
                compile_expr(self.g, self.params, self.functions))

    def describe(self) -> str:
        ps = ", ".join(f"{k}={_fmt_param(v)}" for k, v in sorted(self.params.items()))
        return f"f={self.f_text}; g={self.g_text}" + (f"; {ps}" if ps else "")


def _fmt_param(v: float) -> str:
    return repr(float(v)) if not math.isfinite(v) or v != int(v) else str(int(v))
