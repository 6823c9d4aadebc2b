"""Command-line interface: ``dode eval|solve|simulate|compile|verify|bench``.

Exit status is 0 on success, 1 on domain errors (anything raised as a
:class:`~dode.errors.DodeError`, plus unreadable files) and 2 on usage
errors.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from . import calculus, compiler, funclib, machines, ode
from .errors import DodeError
from .numeric import length


def _csv(text):
    if text.strip() == "":
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _nat(text):
    try:
        n = int(text)
    except ValueError:
        n = -1
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return n


def _positive(text):
    n = _nat(text)
    if n == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dode", description="Exact discrete ODE toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a library function")
    e.add_argument("--fn", required=True, choices=sorted(funclib.LIBRARY))
    e.add_argument("--args", required=True, type=_csv)

    s = sub.add_parser("solve", help="solve a system file")
    s.add_argument("--system", required=True, type=Path)
    at = s.add_mutually_exclusive_group(required=True)
    at.add_argument("--x", type=_nat, help="evaluate f(x, inputs)")
    at.add_argument("--T", type=_nat, help="run T effective steps (essentially linear systems)")
    s.add_argument("--inputs", type=_csv, default=())
    s.add_argument("--guard", type=_positive, help="bit-size guard")

    m = sub.add_parser("simulate", help="run a register machine or RAM program")
    m.add_argument("--program", required=True, type=Path)
    m.add_argument("--inputs", type=_csv, default=())
    m.add_argument("--max-steps", type=_nat, default=10**6)
    m.add_argument("--ram", action="store_true")
    m.add_argument("--opset", choices=sorted(machines.OPSETS), default="full")

    c = sub.add_parser("compile", help="compile a register machine to a length-ODE file")
    c.add_argument("--program", required=True, type=Path)
    c.add_argument("--out", required=True, type=Path)
    c.add_argument("--c", type=_positive, default=2, help="exponent of the step bound B^(c)")
    c.add_argument("--arity", type=_nat, help="number of inputs (default: all registers but R0)")

    v = sub.add_parser("verify", help="run randomized self-checks")
    v.add_argument("--suite", required=True, choices=["calculus", "ode", "funclib", "compiler", "all"])
    v.add_argument("--limit", type=_positive, default=200, help="random cases per check")
    v.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="time a length-ODE library function on N-bit inputs")
    b.add_argument("--fn", required=True, choices=sorted(funclib.REPORTS))
    b.add_argument("--bits", required=True, type=_positive)
    b.add_argument("--seed", type=int, default=0)
    return p


# --- subcommands ---------------------------------------------------------------

def cmd_eval(args, out):
    print(funclib.LIBRARY[args.fn](*args.args), file=out)


def _is_compiled(sys_):
    return sys_.state[:2] == ("inst", "R0")


def cmd_solve(args, out):
    system = ode.parse_system(args.system.read_text(), functions=funclib.LIBRARY)
    if args.T is not None:
        rep = ode.solve_linear_fast(system, args.T, args.inputs, guard=args.guard)
    elif system.wrt is None:
        rep = ode.solve_naive(system, args.x, args.inputs, guard=args.guard)
    else:
        rep = ode.solve_lode_fast(system, args.x, args.inputs)
    # a compiled machine's result is its output register
    values = rep.values[1:2] if _is_compiled(system) else rep.values
    for v in values:
        print(v, file=out)


def cmd_simulate(args, out):
    text = args.program.read_text()
    if args.ram:
        res = machines.run_ram(machines.load_ram(text, args.opset), args.inputs, args.max_steps)
    else:
        res = machines.run(machines.load_program(text), args.inputs, args.max_steps)
    print(res.output, file=out)
    print(f"steps={res.steps}", file=out)
    if not res.halted:
        print("halted=false", file=out)


def cmd_compile(args, out):
    prog = machines.load_program(args.program.read_text())
    cs = compiler.compile_rm(prog, args.arity)
    header = cs.text().splitlines()
    # step bound recorded for reference: T = bound_steps(sum of input lengths, c)
    text = "\n".join([header[0], header[1], f"# step bound c={args.c}", *header[2:]]) + "\n"
    args.out.write_text(text)
    print(f"wrote {args.out} ({len(cs.system.state)} components)", file=out)


def cmd_bench(args, out):
    rng = random.Random(args.seed)
    x = rng.getrandbits(args.bits) | (1 << (args.bits - 1))
    fn = funclib.REPORTS[args.fn]
    t0 = time.perf_counter()
    if args.fn == "idiv":
        rep = fn(x, rng.getrandbits(args.bits) | 1)
    elif args.fn in ("suffix", "pow2_lenprod"):
        rep = fn(x, rng.getrandbits(args.bits))
    else:
        rep = fn(x)
    elapsed = time.perf_counter() - t0
    print(f"steps={rep.steps}", file=out)
    print(f"max_bits={rep.max_bits}", file=out)
    print(f"seconds={elapsed:.4f}", file=out)


# --- verify ----------------------------------------------------------------------

def _table_fn(rng):
    offset = rng.randint(-(2**32), 2**32)
    coeffs = [rng.randint(-9, 9) for _ in range(3)]
    return lambda x: offset + coeffs[0] + coeffs[1] * x + coeffs[2] * x * x


def _verify_calculus(rng, n):
    rows = []
    for name in ("product_rule", "integration_by_parts", "composition_derivative",
                 "fundamental_theorem", "falling_exp_derivative", "falling_power_derivative"):
        failures = 0
        for _ in range(n):
            f, g = _table_fn(rng), _table_fn(rng)
            x = rng.randint(-30, 30)
            if name in ("fundamental_theorem", "integration_by_parts"):
                window = [(rng.randint(-20, 20), rng.randint(-20, 20))]
            elif name == "composition_derivative":
                c = [rng.randint(-3, 3) for _ in range(2)]
                g = lambda t, c=c: c[0] + c[1] * t
                window = [x]
            elif name == "falling_exp_derivative":
                window = [rng.randint(0, 20)]
            elif name == "falling_power_derivative":
                f = rng.randint(1, 6)
                window = [x]
            else:
                window = [x]
            failures += not calculus.check_identity(name, f, g, window).ok
        rows.append(("calculus", name, n, failures))
    failures = 0
    for _ in range(n):
        c = [rng.randint(-9, 9) for _ in range(4)]
        a0, b0, da, db = (rng.randint(-10, 10) for _ in range(4))
        bounds = (lambda s, a0=a0, da=da: a0 + da * s, lambda s, b0=b0, db=db: b0 + db * s)
        f = lambda s, t, c=c: c[0] + c[1] * s + c[2] * t + c[3] * s * t
        failures += not calculus.check_identity("parameterized_integral", f, bounds, [rng.randint(-5, 5)]).ok
    rows.append(("calculus", "parameterized_integral", n, failures))
    return rows


def _verify_ode(rng, n):
    from .expr import Const, Var
    failures = 0
    for _ in range(n):
        k = rng.randint(1, 3)
        state = [f"f{i}" for i in range(k)]
        A = [[Const(rng.randint(-2, 2)) + Const(rng.randint(-1, 1)) * Var("x") for _ in range(k)]
             for _ in range(k)]
        B = [Const(rng.randint(-5, 5)) for _ in range(k)]
        G = [Const(rng.randint(-5, 5)) for _ in range(k)]
        rhs = []
        for i in range(k):
            e = B[i]
            for j in range(k):
                e = e + A[i][j] * Var(state[j])
            rhs.append(e)
        system = ode.OdeSystem("rand", state, (), G, rhs)
        x = rng.randint(0, 20)
        failures += ode.solve_naive(system, x).values != ode.solve_linear_closed_form(A, B, G, x)
    return [("ode", "closed_form_vs_naive", n, failures)]


def _verify_funclib(rng, n):
    checks = {
        "isqrt": (lambda x: funclib.isqrt(x) ** 2 <= x < (funclib.isqrt(x) + 1) ** 2, 1),
        "pow2_len": (lambda x: funclib.pow2_len(x) == 2 ** length(x), 1),
        "idiv": (lambda x, y: funclib.idiv(x, y + 1) == x // (y + 1), 2),
        "suffix": (lambda x, y: funclib.suffix(x, y) == x % 2 ** length(y), 2),
        "pow2_lenprod": (lambda x, y: funclib.pow2_lenprod(x, y) == 2 ** (length(x) * length(y)), 2),
    }
    rows = []
    for name, (check, arity) in checks.items():
        failures = sum(not check(*(rng.randrange(2**12) for _ in range(arity))) for _ in range(n))
        rows.append(("funclib", name, n, failures))
    return rows


def _verify_compiler(rng, n):
    rows = []
    for name, arity in compiler.CORPUS.items():
        prog = compiler.load_corpus(name)
        cs = compiler.compile_rm(prog, arity)
        failures = 0
        for _ in range(n):
            inputs = tuple(rng.randrange(8) for _ in range(arity))
            res = machines.run(prog, inputs, 10**5)
            failures += compiler.lockstep(cs, inputs, res.steps) is not None
        rows.append(("compiler", name, n, failures))
    return rows


SUITES = {
    "calculus": _verify_calculus,
    "ode": _verify_ode,
    "funclib": _verify_funclib,
    "compiler": _verify_compiler,
}


def cmd_verify(args, out):
    rng = random.Random(args.seed)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = [row for name in names for row in SUITES[name](rng, args.limit)]
    width = max(len(r[1]) for r in rows)
    print(f"{'suite':<9} {'check':<{width}} {'cases':>6} {'failures':>8}", file=out)
    for suite, check, cases, failures in rows:
        print(f"{suite:<9} {check:<{width}} {cases:>6} {failures:>8}", file=out)
    return 1 if any(r[3] for r in rows) else 0


COMMANDS = {
    "eval": cmd_eval,
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "compile": cmd_compile,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out) or 0
    except (DodeError, OSError, ValueError) as exc:
        print(f"dode: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
