"""Functions programmed as discrete ODEs.

Each function is an :class:`~dode.ode.OdeSystem` plus a thin wrapper; the
length-ODE ones take ``len(x)`` effective steps.  ``*_report`` variants
return the solver's :class:`~dode.ode.EvalReport` with the final value in
``values[0]`` so step and size accounting can be inspected.
"""
from __future__ import annotations

from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Sequence

from .errors import CapExceeded, DivByZero
from .expr import parse_expr
from .numeric import cosg, ifnz, ifz, length, sg
from .ode import EvalReport, OdeSystem, iterate_naive, solve_lode_fast, solve_naive


def _system(name, state, params, init, rhs, **kw):
    return OdeSystem(name, tuple(state), tuple(params),
                     tuple(parse_expr(e) for e in init),
                     tuple(parse_expr(e) for e in rhs), **kw)


def _result(value, report):
    return EvalReport((value,), report.steps, report.max_bits)


# --- dichotomy: isqrt and division -----------------------------------------

# At the point u = 2**t - 1 the step is 2**(len(x) - t - 1); it is taken when
# h of the candidate still does not exceed f(x).  After len(x) steps G is
# the largest value below 2**len(x) with h(G) <= f(x).
SOME_H = _system(
    "some_h", ["G"], ["x"], ["0"],
    ["pow2(len(x) - len(u) - 1)*(1 - sg(h(G + pow2(len(x) - len(u) - 1)) - f(x)))"],
    var="u", wrt="len")


def some_h_report(h: Callable[[int], int], f: Callable[[int], int], x: int) -> EvalReport:
    if x < 0:
        raise ValueError("some_h needs x >= 0")
    return solve_lode_fast(SOME_H, x, (x,), functions={"h": h, "f": f})


def some_h(h: Callable[[int], int], f: Callable[[int], int], x: int) -> int:
    """Largest ``y < 2**len(x)`` with ``h(y) <= f(x)``, for nondecreasing ``h``."""
    return some_h_report(h, f, x).value


def _square(y):
    return y * y


def _identity(x):
    return x


def isqrt_report(x: int) -> EvalReport:
    rep = some_h_report(_square, _identity, x)
    s = rep.value
    return _result(ifz(sg(s * s - x), s, s - 1), rep)


def isqrt(x: int) -> int:
    return isqrt_report(x).value


def idiv_report(x: int, y: int) -> EvalReport:
    if y == 0:
        raise DivByZero("idiv by zero")
    if y < 0:
        raise ValueError("idiv needs y >= 1")
    return some_h_report(lambda z: z * y, _identity, x)


def idiv(x: int, y: int) -> int:
    """floor(x / y) for x >= 0 and y >= 1."""
    return idiv_report(x, y).value


# --- suffix --------------------------------------------------------------------

# Strip the leading bit of F while it is longer than y.
SUFFIX = _system(
    "suffix", ["F"], ["x", "y"], ["x"],
    ["sg(len(F) - len(y))*(0 - pow2(len(F) - 1))"],
    var="u", wrt="len")


def suffix_report(x: int, y: int) -> EvalReport:
    if x < 0 or y < 0:
        raise ValueError("suffix needs x, y >= 0")
    return solve_lode_fast(SUFFIX, x, (x, y))


def suffix(x: int, y: int) -> int:
    """The ``len(y)`` least significant bits of ``x``."""
    return suffix_report(x, y).value


# --- powers of two of lengths ------------------------------------------------------

POW2_LEN = _system("pow2_len", ["f"], [], ["1"], ["f"], var="x", wrt="len")

# Derived along len(x)**2 and read in time len(x)**2: F' = F, F(0) = 1.
POW2_LEN_SQ = _system("pow2_len_sq", ["f"], [], ["1"], ["f"], var="x", wrt="lensq")


def pow2_len_report(x: int) -> EvalReport:
    return solve_lode_fast(POW2_LEN, x)


def pow2_len(x: int) -> int:
    return pow2_len_report(x).value


def pow2_len_sq_report(x: int) -> EvalReport:
    return solve_lode_fast(POW2_LEN_SQ, x, view="time")


def pow2_len_sq(x: int) -> int:
    return pow2_len_sq_report(x).value


# Starts at 1 = 2**(len(0) * len(y)); each jump of len(x) multiplies by 2**len(y).
POW2_LENPROD = _system(
    "pow2_lenprod", ["f"], ["y"], ["1"], ["f*(pow2_len(y) - 1)"],
    var="x", wrt="len",
    # the same argument recurs at every jump; pow2_len is pure, so cache it
    functions=MappingProxyType({"pow2_len": lru_cache(maxsize=4096)(pow2_len)}))


def pow2_lenprod_report(x: int, y: int) -> EvalReport:
    return solve_lode_fast(POW2_LENPROD, x, (y,))


def pow2_lenprod(x: int, y: int) -> int:
    return pow2_lenprod_report(x, y).value


# --- bounded sum / product -----------------------------------------------------------

@lru_cache(maxsize=None)
def _bounded_systems(arity):
    ys = [f"y{i}" for i in range(1, arity + 1)]
    call = "g(" + ", ".join(["x", *ys]) + ")"
    bsum = _system(f"bsum{arity}", ["f"], ys, ["0"], [call])
    bprod = _system(f"bprod{arity}", ["f"], ys, ["1"], [f"f*({call} - 1)"])
    return bsum, bprod


def bounded_sum_report(g: Callable[..., int], x: int, y: Sequence[int] = ()) -> EvalReport:
    return solve_naive(_bounded_systems(len(y))[0], x, y, functions={"g": g})


def bounded_sum(g: Callable[..., int], x: int, y: Sequence[int] = ()) -> int:
    """sum of g(z, *y) for z < x (0 when x == 0)."""
    return bounded_sum_report(g, x, y).value


def bounded_product_report(g: Callable[..., int], x: int, y: Sequence[int] = ()) -> EvalReport:
    return solve_naive(_bounded_systems(len(y))[1], x, y, functions={"g": g})


def bounded_product(g: Callable[..., int], x: int, y: Sequence[int] = ()) -> int:
    """product of g(z, *y) for z < x (1 when x == 0)."""
    return bounded_product_report(g, x, y).value


# --- minimum of a function over a prefix ------------------------------------------------

F_MIN = _system("f_min", ["F"], [], ["f(0)"], ["sg(F - f(t + 1))*(f(t + 1) - F)"], var="t")


def f_min_report(f: Callable[[int], int], x: int) -> EvalReport:
    return solve_naive(F_MIN, x, functions={"f": f})


def f_min(f: Callable[[int], int], x: int) -> int:
    """min of f(t) for 0 <= t <= x."""
    return f_min_report(f, x).value


# --- programmed minimization --------------------------------------------------------

@lru_cache(maxsize=None)
def _smin_system(arity):
    ys = [f"y{i}" for i in range(1, arity + 1)]
    call = "g(" + ", ".join(["f", *ys]) + ")"
    # increment while g(f, y) != 0
    return _system(f"smin{arity}", ["f"], ys, ["0"], [f"ifnz({call}, 1, 0)"])


def smin_trajectory(g: Callable[..., int], y: Sequence[int], cap: int) -> list[int]:
    """f(0), f(1), ... of the minimization IVP, up to the first zero of g
    or ``cap`` steps, whichever comes first."""
    out = []
    for x, (f,) in enumerate(iterate_naive(_smin_system(len(y)), y, functions={"g": g})):
        out.append(f)
        if x == cap or g(f, *y) == 0:
            return out
    raise AssertionError("unreachable")


def smin_ode(g: Callable[..., int], y: Sequence[int] = (), cap: int = 1024) -> int:
    """min{x : g(x, *y) == 0}, found by running the IVP for at most ``cap`` steps.

    Raises :class:`CapExceeded` when no zero is reached within the budget;
    that says nothing about whether a zero exists further out.
    """
    if cap < 0:
        raise ValueError("cap >= 0 required")
    traj = smin_trajectory(g, tuple(y), cap)
    if g(traj[-1], *y) != 0:
        raise CapExceeded(cap)
    return traj[-1]


# --- registry for Call nodes and the CLI ----------------------------------------------

LIBRARY = MappingProxyType({
    "len": length,
    "sg": sg,
    "cosg": cosg,
    "ifz": ifz,
    "ifnz": ifnz,
    "isqrt": isqrt,
    "idiv": idiv,
    "suffix": suffix,
    "pow2_len": pow2_len,
    "pow2_len_sq": pow2_len_sq,
    "pow2_lenprod": pow2_lenprod,
})

REPORTS = MappingProxyType({
    "isqrt": isqrt_report,
    "idiv": idiv_report,
    "suffix": suffix_report,
    "pow2_len": pow2_len_report,
    "pow2_len_sq": pow2_len_sq_report,
    "pow2_lenprod": pow2_lenprod_report,
})
