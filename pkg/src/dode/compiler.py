"""Register machines compiled to linear length-ODEs.

The state is ``(inst, R0, ..., Rk)``.  For every label ``l`` the selector

    sg(inst - 0) * ... * sg(inst - (l-1)) * cosg(inst - l)

is 1 exactly when ``inst == l`` (for ``inst >= 0``), so each derivative is a
sum over labels of selector times that instruction's effect.  Selectors are
sg-expressions, and every effect is linear in the state, which is what
makes the system essentially linear.  One length-ODE step is one machine
step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Iterator, Sequence

from .expr import ONE, ZERO, Const, Expr, Sg, Var, cosg_expr, ifz_expr, linear_decompose
from .funclib import pow2_len, pow2_lenprod
from .machines import MachineProgram, load_program, trace
from .numeric import bits, length
from .ode import EvalReport, Kind, OdeSystem, dump_system, iterate_linear, solve_linear_fast

# bundled programs and how many inputs each reads (the rest is scratch)
CORPUS = {"add": 2, "countdown": 1, "double": 1, "max": 2, "triangular": 1}


def load_corpus(name: str) -> MachineProgram:
    """One of the bundled example programs (see :data:`CORPUS`)."""
    if name not in CORPUS:
        raise KeyError(f"no corpus program {name!r}")
    text = resources.files("dode.corpus").joinpath(f"{name}.rm").read_text()
    return load_program(text)


@dataclass(frozen=True)
class CompiledSystem:
    system: OdeSystem
    program: MachineProgram
    arity: int

    @cached_property
    def decomposition(self):
        """``(A, B)`` with ``rhs = A * state + B``, A and B free of the state."""
        return linear_decompose(self.system.rhs, self.system.state)

    def text(self) -> str:
        return dump_system(self.system, [f"compiled from register machine sha256:{self.program.digest()}",
                                         f"instructions {len(self.program)} registers {self.program.num_registers}"])


def _selector(l: int, inst: Expr) -> Expr:
    sel = cosg_expr(inst - Const(l))
    for i in reversed(range(l)):
        sel = Sg(inst - Const(i)) * sel
    return sel


def _sum(terms):
    terms = list(terms)
    if not terms:
        return ZERO
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def compile_rm(prog: MachineProgram, arity: int | None = None) -> CompiledSystem:
    """Translate ``prog`` into a linear length-ODE over ``(inst, R0..Rk)``.

    Inputs go to ``R1..R_arity`` (default: every register but R0).  Labels
    whose effect on a component is zero contribute no term.
    """
    k = prog.num_registers
    if arity is None:
        arity = k - 1
    if not 0 <= arity <= k - 1:
        raise ValueError(f"arity {arity} does not fit registers R1..R{k - 1}")
    inst = Var("inst")
    R = [Var(f"R{j}") for j in range(k)]
    params = [f"x{i}" for i in range(1, arity + 1)]
    d_inst, d_reg = [], [[] for _ in range(k)]
    for l, ins in enumerate(prog.instructions):
        sel = _selector(l, inst)
        match ins.op:
            case "ADD":
                j, src = ins.args
                d_inst.append(sel * ONE)
                d_reg[j].append(sel * R[src])
            case "SUB":
                j, src = ins.args
                d_inst.append(sel * ONE)
                d_reg[j].append(sel * (ZERO - R[src]))
            case "SET":
                j, c = ins.args
                d_inst.append(sel * ONE)
                d_reg[j].append(sel * (Const(c) - R[j]))
            case "JZ":
                j, p = ins.args
                d_inst.append(sel * ifz_expr(R[j], Const(p) - inst, ONE))
            case "HALT":
                pass  # next^I = 0: the machine stays where it is
    init = [ZERO] + [Var(params[j - 1]) if 1 <= j <= arity else ZERO for j in range(k)]
    system = OdeSystem(
        "rm_" + prog.digest()[:12],
        ("inst", *(r.name for r in R)),
        tuple(params),
        tuple(init),
        (_sum(d_inst), *(_sum(t) for t in d_reg)),
        var="t", wrt="len", kind=Kind.LINEAR_LENGTH)
    cs = CompiledSystem(system, prog, arity)
    cs.decomposition  # certificate; never fails for compile_rm output
    return cs


def bound_steps(n: int, c: int) -> int:
    """len(B^(c)(v)) for len(v) == n, where B(v) = 2**(len(v)**2).

    Since len(2**(m*m)) == m*m + 1 this is n -> n*n + 1 applied c times.
    """
    if c < 1:
        raise ValueError("c >= 1 required")
    for _ in range(c):
        n = n * n + 1
    return n


def default_guard(cs: CompiledSystem, inputs: Sequence[int], T: int, c: int = 2) -> int:
    """l(G) + T*(T + l(y))*c bits, plus room for inst to reach the last label.

    l(G) is the size of the initial state and l(y) the total input length.
    """
    init = cs.system.initial(tuple(inputs))
    ly = sum(length(v) for v in inputs)
    return bits(init) + T * (T + ly) * c + length(len(cs.program))


def run_compiled(cs: CompiledSystem, inputs: Sequence[int], T: int, *,
                 guard: int | None = None, c: int = 2) -> EvalReport:
    """State after ``T`` length-ODE steps; the output is ``values[1]`` (R0)."""
    if guard is None:
        guard = default_guard(cs, inputs, T, c)
    return solve_linear_fast(cs.system, T, tuple(inputs), guard=guard)


def output(report: EvalReport) -> int:
    return report.values[1]


def compiled_trajectory(cs: CompiledSystem, inputs: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """States ``(inst, R0, ..., Rk)`` after 0, 1, 2, ... steps."""
    return iterate_linear(cs.system, tuple(inputs))


def lockstep(cs: CompiledSystem, inputs: Sequence[int], max_steps: int):
    """Compare compiled and simulated states up to halting (or ``max_steps``).

    Returns ``None`` on agreement, else ``(t, compiled_state, machine_state)``.
    """
    expected = trace(cs.program, inputs, max_steps)
    for t, (got, want) in enumerate(zip(compiled_trajectory(cs, inputs), expected)):
        if got != want:
            return t, got, want
    return None


@dataclass(frozen=True)
class SLLForm:
    """``f(y) = R0 of g after len(h(y)) steps``, with ``h = B^(c)`` of a seed.

    ``g`` is the compiled system (sg-polynomial right-hand sides only).  The
    seed ``prod(2**len(y_i)) - 1`` has length ``sum(len(y_i))``, and ``B(v)
    = 2**(len(v)*len(v))`` is the length-ODE function pow2_lenprod(v, v).
    """

    g: CompiledSystem
    c: int

    def h(self, inputs: Sequence[int]) -> int:
        v = math.prod(pow2_len(x) for x in inputs) - 1
        for _ in range(self.c):
            v = pow2_lenprod(v, v)
        return v

    def steps(self, inputs: Sequence[int]) -> int:
        return length(self.h(inputs))

    def evaluate_report(self, inputs: Sequence[int]) -> EvalReport:
        return run_compiled(self.g, inputs, self.steps(inputs), c=self.c)

    def evaluate(self, inputs: Sequence[int]) -> int:
        return output(self.evaluate_report(inputs))


def package_sll(cs: CompiledSystem, c: int = 2) -> SLLForm:
    if c < 1:
        raise ValueError("c >= 1 required")
    return SLLForm(cs, c)

