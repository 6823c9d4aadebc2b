"""Initial value problems for discrete ODEs and their solvers.

A system ``f(0, y) = init(y)``, ``f' = rhs(f, x, y)`` is solved over the
naturals.  Derivation is either in the variable itself (``f(x+1) = f(x) +
rhs``) or along a function ``L`` (``f(x+1) = f(x) + (L(x+1) - L(x)) * rhs``),
the length function being the case that matters for polynomial time.

Every fast path has a naive counterpart so results can be cross-checked:

* :func:`solve_naive` iterates the defining recurrence one ``x`` at a time;
* :func:`solve_linear_closed_form` evaluates the falling-exponential
  closed form of an affine system;
* :func:`solve_lode_fast` only visits the jump points of ``L``;
* :func:`solve_linear_fast` runs ``f <- (1 + A) f + B`` through the
  essentially-linear decomposition, under a bit-size guard.
"""
from __future__ import annotations

import enum
import re
from operator import add
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Iterator, Mapping, Sequence

from . import calculus
from .errors import (
    BoundViolated,
    DimensionMismatch,
    EnumeratorMismatch,
    GrowthExceeded,
    NotEssentiallyLinear,
    ParseError,
    UnboundVariable,
    UnknownFunction,
)
from .expr import (
    BUILTINS,
    ZERO,
    Expr,
    call_names,
    compile_exprs,
    free_vars,
    linear_decompose,
    parse_expr,
    to_text,
)
from .numeric import bits, length


class Kind(enum.Enum):
    PLAIN = "plain"
    LINEAR = "linear"
    BOUNDED = "bounded"
    LODE = "lode"
    LINEAR_LENGTH = "linear-length"


@dataclass(frozen=True)
class LSpec:
    """A derivation function ``L(x, *y)`` and, optionally, its jump points.

    ``enumerator(j, y)`` must return the j-th point (increasing) where
    ``L(i + 1, y) != L(i, y)``; ``jump_size(j, y)``, when known, is the
    increment of ``L`` at that point.
    """

    name: str
    fn: Callable[..., int]
    enumerator: Callable[[int, tuple], int] | None = None
    uses_params: bool = True
    jump_size: Callable[[int, tuple], int] | None = None

    def __call__(self, x, *y):
        return self.fn(x, *y)


def _length_jump(j, y):
    return (1 << j) - 1


LENGTH = LSpec("len", lambda x, *y: length(x), _length_jump, uses_params=False,
               jump_size=lambda j, y: 1)
LENGTH_SQ = LSpec("lensq", lambda x, *y: length(x) ** 2, _length_jump, uses_params=False,
                  jump_size=lambda j, y: 2 * j + 1)

# (spec, params, window) triples whose enumerator already matched a scan
_validated: set = set()

LSPECS: dict[str, LSpec] = {LENGTH.name: LENGTH, LENGTH_SQ.name: LENGTH_SQ}


def register_lspec(spec: LSpec) -> LSpec:
    LSPECS[spec.name] = spec
    return spec


@dataclass(frozen=True)
class EvalReport:
    values: tuple[int, ...]
    steps: int
    max_bits: int

    @property
    def value(self) -> int:
        return self.values[0]


@dataclass(frozen=True)
class OdeSystem:
    """An IVP over ``state`` with parameters ``params``.

    ``wrt`` is ``None`` for derivation in ``var`` itself, otherwise the name
    of a registered :class:`LSpec` (``"len"`` for length-ODEs).  ``kind`` is
    inferred when omitted and validated when given.  ``functions`` supplies
    the auxiliary callables the expressions reference by name.
    """

    name: str
    state: tuple[str, ...]
    params: tuple[str, ...]
    init: tuple[Expr, ...]
    rhs: tuple[Expr, ...]
    var: str = "x"
    wrt: str | None = None
    bounds: tuple[Expr, ...] | None = None
    kind: Kind | None = None
    functions: Mapping[str, Callable[..., int]] = field(
        default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        for attr in ("state", "params", "init", "rhs"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(self.bounds))
        k = len(self.state)
        if len(self.init) != k or len(self.rhs) != k:
            raise DimensionMismatch(
                f"{self.name}: {k} state variables, {len(self.init)} init, {len(self.rhs)} rhs")
        if self.bounds is not None and len(self.bounds) != k:
            raise DimensionMismatch(f"{self.name}: {len(self.bounds)} bounds for {k} components")
        names = [*self.state, *self.params, self.var]
        if len(set(names)) != len(names):
            raise ValueError(f"{self.name}: state, params and variable names must be distinct")
        for e in self.init:
            extra = free_vars(e) - set(self.params)
            if extra:
                raise UnboundVariable(f"{self.name}: init uses {sorted(extra)}")
        for e in (*self.rhs, *(self.bounds or ())):
            extra = free_vars(e) - set(names)
            if extra:
                raise UnboundVariable(f"{self.name}: unknown names {sorted(extra)}")
        if self.wrt is not None and self.wrt not in LSPECS:
            raise ValueError(f"{self.name}: no derivation function named {self.wrt!r}")
        inferred = self._infer_kind()
        if self.kind is None:
            object.__setattr__(self, "kind", inferred)
        elif self.kind != inferred and not (
                self.kind in (Kind.PLAIN, Kind.LODE) and inferred in (Kind.LINEAR, Kind.LINEAR_LENGTH)):
            raise ValueError(f"{self.name}: declared {self.kind.value}, looks {inferred.value}")

    def _infer_kind(self):
        if self.bounds is not None:
            if self.wrt is not None:
                raise ValueError(f"{self.name}: bounds only apply to derivation in x")
            return Kind.BOUNDED
        try:
            linear_decompose(self.rhs, self.state)
            linear = True
        except NotEssentiallyLinear:
            linear = False
        if self.wrt is None:
            return Kind.LINEAR if linear else Kind.PLAIN
        if self.wrt == "len" and linear:
            return Kind.LINEAR_LENGTH
        return Kind.LODE

    @property
    def lspec(self) -> LSpec | None:
        return None if self.wrt is None else LSPECS[self.wrt]

    @cached_property
    def _compiled(self):
        init = compile_exprs(self.init, self.params)
        rhs = compile_exprs(self.rhs, [*self.state, *self.params, self.var])
        bounds = None
        if self.bounds is not None:
            bounds = compile_exprs(self.bounds, [*self.params, self.var])
        return init, rhs, bounds

    @cached_property
    def _call_names(self):
        needed = set()
        for e in (*self.init, *self.rhs, *(self.bounds or ())):
            needed |= call_names(e)
        return frozenset(needed)

    @cached_property
    def decomposition(self):
        """``(A, B)`` from :func:`linear_decompose`, or NotEssentiallyLinear."""
        return linear_decompose(self.rhs, self.state)

    @cached_property
    def _compiled_linear(self):
        A, B = self.decomposition
        entries = [(i, j) for i, row in enumerate(A) for j, a in enumerate(row)
                   if a != ZERO]
        exprs = [A[i][j] for i, j in entries] + list(B)
        fn = compile_exprs(exprs, [*self.state, *self.params, self.var])
        return entries, fn

    def table(self, functions=None) -> Mapping[str, Callable[..., int]]:
        """Function table for evaluation; checks every call name resolves."""
        table = {**BUILTINS, **self.functions, **(functions or {})}
        missing = self._call_names - table.keys()
        if missing:
            raise UnknownFunction(f"{self.name}: {sorted(missing)}")
        return table

    def initial(self, y: Sequence[int], functions=None) -> tuple[int, ...]:
        y = self._check_params(y)
        return self._compiled[0](self.table(functions), *y)

    def _check_params(self, y):
        y = tuple(y)
        if len(y) != len(self.params):
            raise DimensionMismatch(
                f"{self.name}: expected {len(self.params)} parameters, got {len(y)}")
        return y


# ---------------------------------------------------------------------------
# solvers

def _guard(values, step, guard, top):
    b = bits(values)
    if guard is not None and b > guard:
        raise GrowthExceeded(step, b, guard)
    return max(top, b)


def solve_naive(sys: OdeSystem, x: int, y: Sequence[int] = (), *,
                guard: int | None = None, functions=None) -> EvalReport:
    """Iterate the defining recurrence for ``x`` steps from the initial value.

    For derivation along ``L`` every step is taken, jump or not.  Bounded
    systems are checked against their bound at each visited point.
    """
    if x < 0:
        raise ValueError("systems are solved over the naturals: x >= 0")
    y = sys._check_params(y)
    F = sys.table(functions)
    init, rhs, bound = sys._compiled
    f = init(F, *y)
    top = _guard(f, 0, guard, 0)
    L = sys.lspec
    if bound is None and L is None:
        limit = guard if guard is not None else -1
        if len(f) == 1:
            (v,) = f
            for t in range(x):
                (d,) = rhs(F, v, *y, t)
                v += d
                b = abs(v).bit_length()
                if b > top:
                    top = b
                    if 0 <= limit < b:
                        raise GrowthExceeded(t + 1, b, guard)
            return EvalReport((v,), x, top)
        for t in range(x):
            f = tuple(map(add, f, rhs(F, *f, *y, t)))
            b = max(map(int.bit_length, map(abs, f)))
            if b > top:
                top = b
                if 0 <= limit < b:
                    raise GrowthExceeded(t + 1, b, guard)
        return EvalReport(f, x, top)
    for t in range(x):
        if bound is not None:
            _check_bound(sys, f, bound(F, *y, t), t)
        d = rhs(F, *f, *y, t)
        if L is None:
            f = tuple(a + b for a, b in zip(f, d))
        else:
            dl = L(t + 1, *y) - L(t, *y)
            f = tuple(a + dl * b for a, b in zip(f, d))
        top = _guard(f, t + 1, guard, top)
    if bound is not None:
        _check_bound(sys, f, bound(F, *y, x), x)
    return EvalReport(f, x, top)


def iterate_naive(sys: OdeSystem, y: Sequence[int] = (), *, functions=None) -> Iterator[tuple[int, ...]]:
    """Yield f(0), f(1), ... of a system derived in its own variable."""
    if sys.lspec is not None:
        raise ValueError(f"{sys.name}: use solve_naive for derivation along L")
    y = sys._check_params(y)
    F = sys.table(functions)
    init, rhs, _ = sys._compiled
    f = init(F, *y)
    t = 0
    while True:
        yield f
        f = tuple(a + b for a, b in zip(f, rhs(F, *f, *y, t)))
        t += 1


def _check_bound(sys, f, limits, step):
    for name, v, lim in zip(sys.state, f, limits):
        if v > lim:
            raise BoundViolated(step, name, v, lim)


def solve_linear_closed_form(A: Sequence[Sequence[Expr]], B: Sequence[Expr],
                             G: Sequence[Expr], x: int, y: Sequence[int] = (), *,
                             params: Sequence[str] = (), var: str = "x",
                             functions=None) -> tuple[int, ...]:
    """Closed-form solution of ``f' = A(x, y) f + B(x, y)``, ``f(0) = G(y)``.

    Evaluates ``fexp(0, x) G + sum_{u<x} fexp(u+1, x) B(u)`` where
    ``fexp(a, x) = (I + A(x-1)) ... (I + A(a))`` is the falling exponential
    of the integral of ``A`` started at ``a`` (identity when ``a == x``).
    """
    k = len(G)
    if len(A) != k or any(len(row) != k for row in A) or len(B) != k:
        raise DimensionMismatch(f"A must be {k}x{k} and B of length {k}")
    if x < 0:
        raise ValueError("x >= 0 required")
    table = {**BUILTINS, **(functions or {})}
    names = [*params, var]
    a_fn = compile_exprs([a for row in A for a in row], names)
    b_fn = compile_exprs(B, names)
    g = compile_exprs(G, params)(table, *y)

    def A_at(t):
        flat = a_fn(table, *y, t)
        return [list(flat[i * k:(i + 1) * k]) for i in range(k)]

    # fexp(a) = fexp(a + 1) * (I + A(a)); walk a downwards from fexp(x) = I
    out = [0] * k
    P = calculus.identity(k)
    for a in range(x - 1, -1, -1):
        term = calculus.mat_vec(P, list(b_fn(table, *y, a)))
        out = [p + q for p, q in zip(out, term)]
        P = calculus.mat_mul(P, calculus.falling_exp_matrix([A_at(a)]))
    out = [p + q for p, q in zip(out, calculus.mat_vec(P, list(g)))]
    return tuple(out)


def jump_set(L: LSpec, x: int, y: Sequence[int] = (), *, validate: int = 64) -> list[int]:
    """Increasing list of ``i < x`` with ``L(i + 1, y) != L(i, y)``.

    With an enumerator the points come from it; the first ``validate``
    positions are cross-checked against a direct scan.
    """
    if x < 0:
        raise ValueError("x >= 0 required")
    y = tuple(y)
    if L.enumerator is None:
        return _scan_jumps(L, x, y)
    out = []
    j = 0
    while True:
        a = L.enumerator(j, y)
        if a >= x:
            break
        out.append(a)
        j += 1
    window = min(x, validate)
    key = (L, y if L.uses_params else (), window)
    if window and key not in _validated:
        expected = _scan_jumps(L, window, y)
        got = [a for a in out if a < window]
        if got != expected:
            raise EnumeratorMismatch(f"{L.name}: enumerator {got} vs scan {expected}")
        if L.jump_size is not None:
            for j, a in enumerate(got):
                if L.jump_size(j, y) != L(a + 1, *y) - L(a, *y):
                    raise EnumeratorMismatch(f"{L.name}: wrong jump size at {a}")
        _validated.add(key)
    return out


def _scan_jumps(L, x, y):
    out = []
    prev = L(0, *y)
    for i in range(x):
        nxt = L(i + 1, *y)
        if nxt != prev:
            out.append(i)
        prev = nxt
    return out


def solve_lode_fast(sys: OdeSystem, x: int, y: Sequence[int] = (), *,
                    view: str = "jumps", functions=None) -> EvalReport:
    """Solve an L-ODE by visiting only the points where ``L`` changes.

    ``view="jumps"`` sums ``dL(a) * h(f(a), a, y)`` over the jump points
    ``a`` of ``L`` below ``x``.  ``view="time"`` instead treats the system
    as converging in time ``L(x, y)``: it iterates ``F(t + 1) = F(t) +
    h(F(t), t, y)`` for ``t < L(x, y)`` (``L(0, y)`` must be 0) and
    returns ``F(L(x, y))``.
    """
    L = sys.lspec
    if L is None:
        raise ValueError(f"{sys.name}: not derived along a function L")
    y = sys._check_params(y)
    F = sys.table(functions)
    init, rhs, _ = sys._compiled
    f = init(F, *y)
    top = bits(f)
    if view == "time":
        if L(0, *y) != 0:
            raise ValueError(f"{sys.name}: time view needs L(0) == 0")
        n = L(x, *y)
        for t in range(n):
            d = rhs(F, *f, *y, t)
            f = tuple(a + b for a, b in zip(f, d))
            top = max(top, bits(f))
        return EvalReport(f, n, top)
    if view != "jumps":
        raise ValueError(f"unknown view {view!r}")
    points = jump_set(L, x, y)
    if len(f) == 1 and L.jump_size is not None:
        (v,) = f
        size = L.jump_size
        for j, a in enumerate(points):
            (d,) = rhs(F, v, *y, a)
            v += size(j, y) * d
            b = abs(v).bit_length()
            if b > top:
                top = b
        return EvalReport((v,), len(points), top)
    for j, a in enumerate(points):
        dl = L(a + 1, *y) - L(a, *y) if L.jump_size is None else L.jump_size(j, y)
        d = rhs(F, *f, *y, a)
        f = tuple(p + dl * q for p, q in zip(f, d))
        top = max(top, bits(f))
    return EvalReport(f, len(points), top)


def _positions(sys, y):
    """Yields ``(point, dL)`` for successive effective steps of ``sys``."""
    L = sys.lspec
    t = 0
    while True:
        if L is None:
            yield t, 1
        elif L.enumerator is not None:
            a = L.enumerator(t, y)
            yield a, L(a + 1, *y) - L(a, *y) if L.jump_size is None else L.jump_size(t, y)
        else:
            raise ValueError(f"{sys.name}: stepping along {L.name} needs an enumerator")
        t += 1


def iterate_linear(sys: OdeSystem, y: Sequence[int] = (), *, functions=None) -> Iterator[tuple[int, ...]]:
    """Yield the state after 0, 1, 2, ... effective steps.

    Each step evaluates the decomposition at the current state and applies
    ``f <- f + dL * (A f + B)``, i.e. ``(1 + A) f + B`` for unit ``dL``.
    For length-ODEs the points are ``2**t - 1``; the derivation variable is
    bound to that point.
    """
    y = sys._check_params(y)
    F = sys.table(functions)
    entries, fn = sys._compiled_linear
    k = len(sys.state)
    f = sys._compiled[0](F, *y)
    yield f
    for point, dl in _positions(sys, y):
        vals = fn(F, *f, *y, point)
        acc = list(vals[len(entries):])
        for (i, j), a in zip(entries, vals):
            acc[i] += a * f[j]
        f = tuple(f[i] + dl * acc[i] for i in range(k))
        yield f


def solve_linear_fast(sys: OdeSystem, T: int, y: Sequence[int] = (), *,
                      guard: int | None = None, functions=None) -> EvalReport:
    """Run ``T`` effective steps of an essentially linear system under ``guard`` bits."""
    if T < 0:
        raise ValueError("T >= 0 required")
    sys.decomposition  # raises NotEssentiallyLinear before any work
    top = 0
    f = ()
    for t, f in enumerate(iterate_linear(sys, y, functions=functions)):
        top = _guard(f, t, guard, top)
        if t == T:
            break
    return EvalReport(f, T, top)


# ---------------------------------------------------------------------------
# system files

_WRT = re.compile(r"^(?:len\(\s*([A-Za-z_]\w*)\s*\)|L\s*=\s*([A-Za-z_]\w*)|([A-Za-z_]\w*))$")


def parse_system(text: str, functions=None) -> OdeSystem:
    """Read the line-based system format (``system``/``state``/``param``/``wrt``/
    ``init``/``deriv``/``bound`` directives, ``#`` comments)."""
    name = None
    state: list[str] = []
    params: list[str] = []
    var, wrt = "x", None
    init: dict[str, Expr] = {}
    deriv: dict[str, Expr] = {}
    bound: dict[str, Expr] = {}
    offset = 0
    for raw in text.splitlines(keepends=True):
        line_start = offset
        offset += len(raw.encode("utf-8"))
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "system":
            name = rest
        elif word == "state":
            state = rest.split()
        elif word == "param":
            params = rest.split()
        elif word == "wrt":
            m = _WRT.match(rest)
            if not m:
                raise ParseError(f"bad wrt directive {rest!r}", line_start)
            if m.group(1):
                var, wrt = m.group(1), "len"
            elif m.group(2):
                var, wrt = "x", m.group(2)
            else:
                var, wrt = m.group(3), None
        elif word in ("init", "deriv", "bound"):
            target, eq, body = rest.partition("=")
            target = target.strip()
            if not eq or not target:
                raise ParseError(f"expected '{word} NAME = EXPR'", line_start)
            try:
                e = parse_expr(body)
            except ParseError as exc:
                raise ParseError(f"in {word} {target}: {exc}", line_start) from None
            {"init": init, "deriv": deriv, "bound": bound}[word][target] = e
        else:
            raise ParseError(f"unknown directive {word!r}", line_start)
    if name is None:
        raise ParseError("missing 'system' directive", 0)
    for table, what in ((init, "init"), (deriv, "deriv")):
        missing = [s for s in state if s not in table]
        if missing:
            raise ParseError(f"missing {what} for {missing}", 0)
    for table in (init, deriv, bound):
        extra = set(table) - set(state)
        if extra:
            raise ParseError(f"directives for undeclared state {sorted(extra)}", 0)
    bounds = None
    if bound:
        if set(bound) != set(state):
            raise ParseError("bounds must be given for every state component", 0)
        bounds = tuple(bound[s] for s in state)
    return OdeSystem(name, tuple(state), tuple(params),
                     tuple(init[s] for s in state), tuple(deriv[s] for s in state),
                     var=var, wrt=wrt, bounds=bounds,
                     functions=MappingProxyType(dict(functions or {})))


def dump_system(sys: OdeSystem, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append(f"system {sys.name}")
    lines.append("state " + " ".join(sys.state))
    if sys.params:
        lines.append("param " + " ".join(sys.params))
    if sys.wrt is None:
        lines.append(f"wrt {sys.var}")
    elif sys.wrt == "len":
        lines.append(f"wrt len({sys.var})")
    else:
        if sys.var != "x":
            raise ValueError("systems derived along a named L use variable x")
        lines.append(f"wrt L={sys.wrt}")
    for s, e in zip(sys.state, sys.init):
        lines.append(f"init {s} = {to_text(e)}")
    for s, e in zip(sys.state, sys.rhs):
        lines.append(f"deriv {s} = {to_text(e)}")
    for s, e in zip(sys.state, sys.bounds or ()):
        lines.append(f"bound {s} = {to_text(e)}")
    return "\n".join(lines) + "\n"
