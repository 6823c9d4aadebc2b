"""The sg-polynomial expression language.

Expressions are immutable trees over integer constants, variables, ``+``,
``-``, ``*``, the sign test ``sg`` and calls to registered auxiliary
functions.  Besides parsing, printing and evaluation this module carries
the static analyses the fast solvers rely on: degree, essential constancy
and the decomposition of an essentially linear vector ``u`` into
``A . f + B``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NotEssentiallyLinear, ParseError, UnboundVariable, UnknownFunction
from .numeric import length, pow2, sg


class Expr:
    """Base class of expression nodes; arithmetic operators build trees."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: int


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Sg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]


ZERO = Const(0)
ONE = Const(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"cannot use {value!r} as an expression")
    return Const(value)


def cosg_expr(e) -> Expr:
    """(1 - sg(e)) * (1 - sg(0 - e)): equals 1 exactly when e == 0."""
    e = as_expr(e)
    return Mul(Sub(ONE, Sg(e)), Sub(ONE, Sg(Sub(ZERO, e))))


def ifz_expr(c, y, z) -> Expr:
    """Branch on zero: y when c == 0, else z (as z + cosg(c)*(y - z))."""
    y, z = as_expr(y), as_expr(z)
    return Add(z, Mul(cosg_expr(c), Sub(y, z)))


def ifnz_expr(c, y, z) -> Expr:
    """y when c != 0, else z (as y + cosg(c)*(z - y))."""
    y, z = as_expr(y), as_expr(z)
    return Add(y, Mul(cosg_expr(c), Sub(z, y)))


# Auxiliary functions every environment knows about.
BUILTINS: Mapping[str, Callable[..., int]] = MappingProxyType({
    "len": length,
    "pow2": pow2,
})

_SUGAR = {"sg": 1, "cosg": 1, "ifz": 3, "ifnz": 3}


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*(),])")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        if m.group(1) is not None:
            tokens.append(("INT", m.group(1), pos))
        elif m.group(2) is not None:
            tokens.append(("IDENT", m.group(2), pos))
        else:
            tokens.append((m.group(3), m.group(3), pos))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "EOF" else repr(tok[1])
            self.fail(f"expected {kind!r}, found {what}", tok)
        self.i += 1
        return tok

    def fail(self, message, tok):
        raise ParseError(message, _byte_offset(self.text, tok[2]))

    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "*":
            self.take()
            node = Mul(node, self.factor())
        return node

    def factor(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "INT":
            self.take()
            return Const(int(tok[1]))
        if kind == "-":
            # only a sign on an integer literal; '-x' is not in the grammar
            self.take()
            num = self.peek()
            if num[0] != "INT" or num[2] != tok[2] + 1:
                self.fail("'-' must directly prefix an integer literal", tok)
            self.take()
            return Const(-int(num[1]))
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "IDENT":
            self.take()
            if self.peek()[0] != "(":
                return Var(tok[1])
            self.take("(")
            args = [self.expr()]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.expr())
            self.take(")")
            return self.apply(tok, args)
        what = "end of input" if kind == "EOF" else repr(tok[1])
        self.fail(f"unexpected {what}", tok)

    def apply(self, tok, args):
        name = tok[1]
        if name in _SUGAR:
            if len(args) != _SUGAR[name]:
                self.fail(f"{name} takes {_SUGAR[name]} argument(s)", tok)
            if name == "sg":
                return Sg(args[0])
            if name == "cosg":
                return cosg_expr(args[0])
            if name == "ifz":
                return ifz_expr(*args)
            return ifnz_expr(*args)
        return Call(name, tuple(args))


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    ``ifz``, ``ifnz`` and ``cosg`` are desugared into sg form; every other
    ``name(...)`` becomes a :class:`Call`.

    >>> parse_expr("sg(x)*y + 1")
    Add(left=Mul(left=Sg(arg=Var(name='x')), right=Var(name='y')), right=Const(value=1))
    """
    parser = _Parser(text)
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "EOF":
        parser.fail(f"unexpected {tok[1]!r}", tok)
    return node


# ---------------------------------------------------------------------------
# printing

def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse_expr(to_text(e)) == e``."""
    return _fmt(e, 0)


def _fmt(e, prec):
    # prec: 0 = sum context, 1 = right operand of +/-, 2 = product, 3 = right of *
    match e:
        case Const(v):
            return str(v)
        case Var(name):
            return name
        case Sg(arg):
            return f"sg({_fmt(arg, 0)})"
        case Call(name, args):
            return f"{name}({', '.join(_fmt(a, 0) for a in args)})"
        case Add(a, b) | Sub(a, b):
            op = "+" if isinstance(e, Add) else "-"
            s = f"{_fmt(a, 0)} {op} {_fmt(b, 1)}"
            return f"({s})" if prec >= 1 else s
        case Mul(a, b):
            s = f"{_fmt(a, 2)}*{_fmt(b, 3)}"
            return f"({s})" if prec >= 3 else s
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class Env:
    """Variable bindings plus the auxiliary functions Call nodes may use."""

    bindings: Mapping[str, int] = field(default_factory=dict)
    functions: Mapping[str, Callable[..., int]] = BUILTINS

    def bind(self, **values) -> "Env":
        return Env({**self.bindings, **values}, self.functions)


def eval_expr(e: Expr, env: Env | Mapping[str, int]) -> int:
    if not isinstance(env, Env):
        env = Env(dict(env))
    return _eval(e, env.bindings, env.functions)


def _eval(e, b, fns):
    match e:
        case Const(v):
            return v
        case Var(name):
            try:
                return b[name]
            except KeyError:
                raise UnboundVariable(name) from None
        case Add(x, y):
            return _eval(x, b, fns) + _eval(y, b, fns)
        case Sub(x, y):
            return _eval(x, b, fns) - _eval(y, b, fns)
        case Mul(x, y):
            return _eval(x, b, fns) * _eval(y, b, fns)
        case Sg(x):
            return sg(_eval(x, b, fns))
        case Call(name, args):
            try:
                fn = fns[name]
            except KeyError:
                raise UnknownFunction(name) from None
            return fn(*(_eval(a, b, fns) for a in args))
    raise TypeError(f"not an expression: {e!r}")


def compile_exprs(exprs: Sequence[Expr], names: Sequence[str]):
    """Compile expressions into one Python function ``fn(functions, *values)``.

    ``values`` bind ``names`` positionally and ``functions`` maps call names
    to callables, looked up on every call so that one compiled object can
    serve many function tables.  The result is a tuple with one entry per
    expression.  Unbound variables are reported here; callers check call
    names against their table with :func:`call_names` before iterating.
    """
    slot = {name: f"a{i}" for i, name in enumerate(names)}
    parts = [_py(e, slot) for e in exprs]
    args = "".join(f", {slot[n]}" for n in names)
    src = f"lambda F{args}: ({', '.join(parts)}{',' if len(parts) == 1 else ''})"
    return eval(src, {})  # noqa: S307 - source built from a closed grammar


def _py(e, slot):
    match e:
        case Const(v):
            return f"({v})"
        case Var(name):
            if name not in slot:
                raise UnboundVariable(name)
            return slot[name]
        case Add(x, y):
            return f"({_py(x, slot)} + {_py(y, slot)})"
        case Sub(x, y):
            return f"({_py(x, slot)} - {_py(y, slot)})"
        case Mul(x, y):
            return f"({_py(x, slot)} * {_py(y, slot)})"
        case Sg(x):
            return f"(1 if {_py(x, slot)} > 0 else 0)"
        case Call(name, args):
            return f"F[{name!r}]({', '.join(_py(a, slot) for a in args)})"
    raise TypeError(f"not an expression: {e!r}")


def free_vars(e: Expr) -> set[str]:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        match node:
            case Var(name):
                out.add(name)
            case Add(x, y) | Sub(x, y) | Mul(x, y):
                stack += (x, y)
            case Sg(x):
                stack.append(x)
            case Call(_, args):
                stack.extend(args)
    return out


def call_names(e: Expr) -> set[str]:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        match node:
            case Add(x, y) | Sub(x, y) | Mul(x, y):
                stack += (x, y)
            case Sg(x):
                stack.append(x)
            case Call(name, args):
                out.add(name)
                stack.extend(args)
    return out


# ---------------------------------------------------------------------------
# static analysis

def degree(e: Expr, vars: Iterable[str]) -> int:
    """Total degree of ``e`` in ``vars``; anything under sg or a call counts 0."""
    vs = frozenset([vars] if isinstance(vars, str) else vars)
    return _deg(e, vs)


def _deg(e, vs):
    match e:
        case Var(name):
            return 1 if name in vs else 0
        case Add(x, y) | Sub(x, y):
            return max(_deg(x, vs), _deg(y, vs))
        case Mul(x, y):
            return _deg(x, vs) + _deg(y, vs)
    return 0


def is_essentially_constant(e: Expr, vars: Iterable[str]) -> bool:
    return degree(e, vars) == 0


def _is_zero(e):
    return isinstance(e, Const) and e.value == 0


def _add(x, y):
    if _is_zero(x):
        return y
    if _is_zero(y):
        return x
    return Add(x, y)


def _sub(x, y):
    if _is_zero(y):
        return x
    return Sub(x, y)


def _mul(x, y):
    if _is_zero(x) or _is_zero(y):
        return ZERO
    if x == ONE:
        return y
    if y == ONE:
        return x
    return Mul(x, y)


def linear_decompose(u: Sequence[Expr], state: Sequence[str]):
    """Split each ``u[i]`` into ``sum_j A[i][j]*state[j] + B[i]``.

    Every returned coefficient is essentially constant in ``state``; state
    variables may still occur inside sg or call arguments.  Raises
    :class:`NotEssentiallyLinear` when distributing products would create a
    term of state-degree two or more.
    """
    index = {name: j for j, name in enumerate(state)}
    A, B = [], []
    for i, ui in enumerate(u):
        try:
            lin, const = _split(ui, index)
        except NotEssentiallyLinear as exc:
            raise NotEssentiallyLinear(f"component {i}: {exc}") from None
        A.append([lin.get(j, ZERO) for j in range(len(state))])
        B.append(const)
    return A, B


def _split(e, index):
    match e:
        case Var(name) if name in index:
            return {index[name]: ONE}, ZERO
        case Add(x, y) | Sub(x, y):
            lx, cx = _split(x, index)
            ly, cy = _split(y, index)
            comb = _add if isinstance(e, Add) else _sub
            lin = dict(lx)
            for j, a in ly.items():
                lin[j] = comb(lin.get(j, ZERO), a)
            return lin, comb(cx, cy)
        case Mul(x, y):
            lx, cx = _split(x, index)
            ly, cy = _split(y, index)
            if lx and ly:
                raise NotEssentiallyLinear(f"product of state terms in {to_text(e)}")
            if lx:
                return {j: _mul(a, cy) for j, a in lx.items()}, _mul(cx, cy)
            return {j: _mul(cx, a) for j, a in ly.items()}, _mul(cx, cy)
    return {}, e
