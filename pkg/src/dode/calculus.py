"""Discrete calculus over the integers.

Derivatives are forward differences, integrals are signed sums, and the
falling exponential plays the role ``exp`` plays for continuous ODEs.
Everything is exact; :func:`check_identity` evaluates both sides of the
classical finite-calculus identities on an explicit window of points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import DimensionMismatch, UnknownIdentity


@dataclass(frozen=True)
class IntFn:
    """A total integer function with a label saying where it came from."""

    fn: Callable[..., int]
    arity: int = 1
    provenance: str = "closed-form"

    def __call__(self, *args):
        return self.fn(*args)

    @classmethod
    def from_table(cls, start: int, values: Sequence[int]) -> "IntFn":
        """Unary function defined on ``start .. start+len(values)-1``."""
        table = tuple(values)
        stop = start + len(table)

        def lookup(x):
            if not start <= x < stop:
                raise ValueError(f"{x} outside table window [{start}, {stop})")
            return table[x - start]

        return cls(lookup, 1, "table")


def delta(f: Callable, slot: int = 0) -> IntFn:
    """Forward difference of ``f`` in argument ``slot``; componentwise on tuples."""

    def df(*args):
        shifted = list(args)
        shifted[slot] += 1
        hi, lo = f(*shifted), f(*args)
        if isinstance(hi, tuple):
            return tuple(a - b for a, b in zip(hi, lo))
        return hi - lo

    return IntFn(df, getattr(f, "arity", max(1, slot + 1)), "expression")


def dint(f: Callable[[int], int], a: int, b: int) -> int:
    """Signed sum of f over [a, b): 0 when a == b, antisymmetric in (a, b)."""
    if a > b:
        return -dint(f, b, a)
    return sum(f(x) for x in range(a, b))


def primitive(f: Callable[[int], int], c: int = 0) -> IntFn:
    """The primitive F with F(0) == c and delta(F) == f (on x >= 0 and x < 0)."""
    return IntFn(lambda x: c + dint(f, 0, x), 1, "expression")


def falling_power(x: int, m: int) -> int:
    if m < 0:
        raise ValueError("falling power needs m >= 0")
    out = 1
    for i in range(m):
        out *= x - i
    return out


def falling_exp(U: Callable[[int], int], x: int) -> int:
    """prod_{t<x} (1 + delta(U)(t)); 1 at x == 0."""
    if x < 0:
        raise ValueError("falling exponential is defined for x >= 0")
    out = 1
    prev = U(0)
    for t in range(x):
        nxt = U(t + 1)
        out *= 1 + nxt - prev
        prev = nxt
    return out


# --- small exact matrix helpers (lists of lists of int) ---------------------

def identity(k: int) -> list[list[int]]:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def mat_mul(P, Q):
    if len(P[0]) != len(Q):
        raise DimensionMismatch(f"{len(P)}x{len(P[0])} times {len(Q)}x{len(Q[0])}")
    cols = list(zip(*Q))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in P]


def mat_vec(P, v):
    if len(P[0]) != len(v):
        raise DimensionMismatch(f"{len(P)}x{len(P[0])} times vector of {len(v)}")
    return [sum(a * b for a, b in zip(row, v)) for row in P]


def falling_exp_matrix(steps: Iterable) -> list[list[int]]:
    """Ordered product ``(I + S_{n-1}) ... (I + S_1)(I + S_0)``.

    ``steps`` yields the increments ``delta(U)(t)`` for t = 0, 1, ... as
    square matrices; the latest increment multiplies on the left.  An empty
    sequence gives no dimension to work with, so callers pass at least one
    step or use :func:`identity` directly.
    """
    out = None
    for S in steps:
        k = len(S)
        step = [[S[i][j] + (i == j) for j in range(k)] for i in range(k)]
        out = step if out is None else mat_mul(step, out)
    if out is None:
        raise DimensionMismatch("empty product has no dimension; use identity(k)")
    return out


# --- identity checks ---------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    name: str
    checked: int
    counterexample: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _product_rule(f, g, x):
    lhs = delta(lambda t: f(t) * g(t))(x)
    rhs1 = delta(f)(x) * g(x + 1) + f(x) * delta(g)(x)
    rhs2 = f(x + 1) * delta(g)(x) + delta(f)(x) * g(x)
    # both displayed forms must hold; report whichever disagrees
    return (lhs, rhs1) if rhs1 != lhs else (lhs, rhs2)


def _fundamental(F, _, point):
    a, b = point
    return dint(delta(F), a, b), F(b) - F(a)


def _by_parts(u, v, point):
    a, b = point
    dv, du = delta(v), delta(u)
    lhs = dint(lambda x: u(x) * dv(x), a, b)
    rhs = u(b) * v(b) - u(a) * v(a) - dint(lambda x: du(x) * v(x + 1), a, b)
    return lhs, rhs


def _composition(f, g, x):
    df = delta(f)
    lhs = f(g(x + 1)) - f(g(x))
    rhs = dint(lambda k: df(g(x) + k), 0, g(x + 1) - g(x))
    return lhs, rhs


def _falling_exp_derivative(U, _, x):
    lhs = falling_exp(U, x + 1) - falling_exp(U, x)
    return lhs, delta(U)(x) * falling_exp(U, x)


def _falling_power_derivative(m, _, x):
    lhs = falling_power(x + 1, m) - falling_power(x, m)
    return lhs, m * falling_power(x, m - 1)


def _parameterized_integral(f, bounds, x):
    a, b = bounds

    def F(s):
        return dint(lambda t: f(s, t), a(s), b(s))

    lhs = F(x + 1) - F(x)
    rhs = (dint(lambda t: f(x + 1, t) - f(x, t), a(x), b(x))
           + dint(lambda t: f(x + 1, a(x + 1) + t), 0, -(a(x + 1) - a(x)))
           + dint(lambda t: f(x + 1, b(x) + t), 0, b(x + 1) - b(x)))
    return lhs, rhs


IDENTITIES = {
    "product_rule": _product_rule,
    "fundamental_theorem": _fundamental,
    "integration_by_parts": _by_parts,
    "composition_derivative": _composition,
    "falling_exp_derivative": _falling_exp_derivative,
    "falling_power_derivative": _falling_power_derivative,
    "parameterized_integral": _parameterized_integral,
}


def check_identity(name: str, f, g, window: Iterable) -> IdentityReport:
    """Evaluate both sides of identity ``name`` at every point of ``window``.

    The roles of ``f`` and ``g`` depend on the identity:

    ==========================  =====================  =====================
    name                        f                      g
    ==========================  =====================  =====================
    product_rule                f                      g
    fundamental_theorem         F                      unused
    integration_by_parts        u                      v
    composition_derivative      outer f                inner g
    falling_exp_derivative      U                      unused
    falling_power_derivative    exponent m (int >= 1)  unused
    parameterized_integral      f(x, t)                pair (a, b) of bounds
    ==========================  =====================  =====================

    Window points are integers, or ``(a, b)`` pairs for the two integral
    identities.  Stops at the first counterexample.
    """
    try:
        side = IDENTITIES[name]
    except KeyError:
        raise UnknownIdentity(name) from None
    n = 0
    for point in window:
        lhs, rhs = side(f, g, point)
        n += 1
        if lhs != rhs:
            return IdentityReport(name, n, (point, lhs, rhs))
    return IdentityReport(name, n)
