"""Exact discrete ODEs over the integers."""
from .calculus import check_identity, delta, dint, falling_exp, falling_power, primitive
from .compiler import bound_steps, compile_rm, load_corpus, package_sll, run_compiled
from .errors import (
    BadLabel,
    BadRegister,
    BoundViolated,
    CapExceeded,
    DimensionMismatch,
    DivByZero,
    DodeError,
    EnumeratorMismatch,
    GrowthExceeded,
    NegativeAddress,
    NotEssentiallyLinear,
    ParseError,
    UnboundVariable,
    UnknownFunction,
    UnknownIdentity,
)
from .expr import Env, degree, eval_expr, is_essentially_constant, linear_decompose, parse_expr, to_text
from .funclib import (
    bounded_product,
    bounded_sum,
    f_min,
    idiv,
    isqrt,
    pow2_len,
    pow2_len_sq,
    pow2_lenprod,
    smin_ode,
    some_h,
    suffix,
)
from .machines import load_program, load_ram, run, run_ram
from .numeric import cosg, ifz, length, sg
from .ode import (
    EvalReport,
    OdeSystem,
    dump_system,
    jump_set,
    parse_system,
    solve_linear_closed_form,
    solve_linear_fast,
    solve_lode_fast,
    solve_naive,
)

__version__ = "0.1.0"
