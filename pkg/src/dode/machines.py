"""Register machines and RAMs with unit cost.

Register machine text format, one instruction per line (labels are 0-based
line numbers, ``#`` starts a comment, blank lines are ignored)::

    ADD j k     R_j := R_j + R_k
    SUB j k     R_j := R_j - R_k
    SET j c     R_j := c, c in {0, 1}
    JZ j p      if R_j == 0 goto p
    HALT

RAM programs use accumulators A and B and unboundedly many registers::

    LA c | LB c        A := c | B := c (c >= 0)
    AOP op | BOP op    A := A op B | B := A op B, op in + - * /
    MAB | MBA          B := A | A := B
    LOAD | STORE       A := R[A] | R[A] := B
    JEQ i j            goto i if A == B else goto j
    HALT
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from .errors import BadLabel, BadRegister, DivByZero, NegativeAddress, ParseError


@dataclass(frozen=True)
class Instr:
    op: str
    args: tuple[int, ...] = ()

    def __str__(self):
        return " ".join([self.op, *map(str, self.args)])


@dataclass(frozen=True)
class MachineProgram:
    instructions: tuple[Instr, ...]
    num_registers: int

    def __len__(self):
        return len(self.instructions)

    def text(self) -> str:
        return "".join(f"{ins}\n" for ins in self.instructions)

    def digest(self) -> str:
        return hashlib.sha256(self.text().encode()).hexdigest()


@dataclass
class MachineConfig:
    pc: int
    registers: list[int]

    def snapshot(self) -> tuple[int, ...]:
        return (self.pc, *self.registers)


@dataclass(frozen=True)
class RunResult:
    output: int
    steps: int
    halted: bool


_RM_ARITY = {"ADD": 2, "SUB": 2, "SET": 2, "JZ": 2, "HALT": 0}


def _lines(text):
    """Yield (line number, byte offset, words) for non-blank lines."""
    offset = 0
    for lineno, raw in enumerate(text.splitlines(keepends=True), 1):
        start = offset
        offset += len(raw.encode("utf-8"))
        words = raw.split("#", 1)[0].split()
        if words:
            yield lineno, start, words


def _operands(words, arity, lineno, start, signed=False):
    if len(words) - 1 != arity:
        raise ParseError(f"line {lineno}: {words[0]} takes {arity} operand(s)", start)
    out = []
    for w in words[1:]:
        body = w[1:] if signed and w.startswith("-") else w
        if not body.isdigit() or not body.isascii():
            raise ParseError(f"line {lineno}: bad operand {w!r}", start)
        out.append(int(w))
    return tuple(out)


def load_program(text: str, num_registers: int | None = None) -> MachineProgram:
    """Parse and validate a register-machine program.

    ``num_registers`` defaults to one more than the largest index used.
    """
    instrs = []
    for lineno, start, words in _lines(text):
        op = words[0].upper()
        if op not in _RM_ARITY:
            raise ParseError(f"line {lineno}: unknown instruction {words[0]!r}", start)
        args = _operands(words, _RM_ARITY[op], lineno, start)
        if op == "SET" and args[1] not in (0, 1):
            raise ParseError(f"line {lineno}: SET constant must be 0 or 1", start)
        instrs.append(Instr(op, args))
    if not instrs:
        raise ParseError("empty program", 0)
    used = [ins.args[0] for ins in instrs if ins.op != "HALT"]
    used += [ins.args[1] for ins in instrs if ins.op in ("ADD", "SUB")]
    needed = max(used, default=0) + 1
    if num_registers is None:
        num_registers = needed
    elif needed > num_registers:
        raise BadRegister(f"register R{needed - 1} used, only {num_registers} declared")
    for label, ins in enumerate(instrs):
        if ins.op == "JZ" and ins.args[1] >= len(instrs):
            raise BadLabel(f"instruction {label} jumps to {ins.args[1]}, "
                           f"program has {len(instrs)} instructions")
    return MachineProgram(tuple(instrs), num_registers)


def initial_config(prog: MachineProgram, inputs: Sequence[int]) -> MachineConfig:
    if len(inputs) > prog.num_registers - 1:
        raise BadRegister(f"{len(inputs)} inputs but only R1..R{prog.num_registers - 1}")
    regs = [0] * prog.num_registers
    regs[1:1 + len(inputs)] = inputs
    return MachineConfig(0, regs)


def step(prog: MachineProgram, cfg: MachineConfig) -> bool:
    """Execute one instruction in place; returns False once halted."""
    if cfg.pc >= len(prog.instructions):
        return False
    ins = prog.instructions[cfg.pc]
    r = cfg.registers
    match ins.op:
        case "ADD":
            j, k = ins.args
            r[j] += r[k]
            cfg.pc += 1
        case "SUB":
            j, k = ins.args
            r[j] -= r[k]
            cfg.pc += 1
        case "SET":
            j, c = ins.args
            r[j] = c
            cfg.pc += 1
        case "JZ":
            j, p = ins.args
            cfg.pc = p if r[j] == 0 else cfg.pc + 1
        case "HALT":
            return False
    return True


def trace(prog: MachineProgram, inputs: Sequence[int], max_steps: int) -> list[tuple[int, ...]]:
    """Configurations (pc, R0, ..., Rk) after 0, 1, ... steps.

    A HALT counts as one step that leaves the configuration unchanged;
    the trace stops right after it, or after ``max_steps`` steps.
    """
    cfg = initial_config(prog, inputs)
    out = [cfg.snapshot()]
    for _ in range(max_steps):
        running = step(prog, cfg)
        out.append(cfg.snapshot())
        if not running:
            break
    return out


def run(prog: MachineProgram, inputs: Sequence[int], max_steps: int) -> RunResult:
    """Run until HALT (or falling off the end) or ``max_steps`` instructions.

    Running out of steps is reported with ``halted=False``, not raised.
    """
    cfg = initial_config(prog, inputs)
    steps = 0
    while steps < max_steps:
        if cfg.pc >= len(prog.instructions):
            return RunResult(cfg.registers[0], steps, True)
        running = step(prog, cfg)
        steps += 1
        if not running:
            return RunResult(cfg.registers[0], steps, True)
    return RunResult(cfg.registers[0], steps, False)


# ---------------------------------------------------------------------------
# RAM

OPSETS = {"basic": frozenset("+-"), "full": frozenset("+-*/")}

_RAM_ARITY = {"LA": 1, "LB": 1, "AOP": 1, "BOP": 1, "MAB": 0, "MBA": 0,
              "LOAD": 0, "STORE": 0, "JEQ": 2, "HALT": 0}


@dataclass(frozen=True)
class RamProgram:
    instructions: tuple[Instr, ...]
    opset: frozenset

    def __len__(self):
        return len(self.instructions)


def load_ram(text: str, opset: str = "full") -> RamProgram:
    try:
        ops = OPSETS[opset]
    except KeyError:
        raise ValueError(f"unknown opset {opset!r}; use 'basic' or 'full'") from None
    instrs = []
    for lineno, start, words in _lines(text):
        op = words[0].upper()
        if op not in _RAM_ARITY:
            raise ParseError(f"line {lineno}: unknown instruction {words[0]!r}", start)
        if op in ("AOP", "BOP"):
            if len(words) != 2 or words[1] not in "+-*/" or len(words[1]) != 1:
                raise ParseError(f"line {lineno}: {op} needs one of + - * /", start)
            if words[1] not in ops:
                raise ParseError(f"line {lineno}: operation {words[1]!r} not in opset {opset}", start)
            instrs.append(Instr(op, ("+-*/".index(words[1]),)))
            continue
        instrs.append(Instr(op, _operands(words, _RAM_ARITY[op], lineno, start)))
    if not instrs:
        raise ParseError("empty program", 0)
    for label, ins in enumerate(instrs):
        if ins.op == "JEQ" and max(ins.args) >= len(instrs):
            raise BadLabel(f"instruction {label} jumps outside the program")
    return RamProgram(tuple(instrs), ops)


def _apply(code, a, b):
    if code == 0:
        return a + b
    if code == 1:
        return a - b
    if code == 2:
        return a * b
    if b == 0:
        raise DivByZero("RAM division by zero")
    return a // b


def run_ram(prog: RamProgram, inputs: Sequence[int], max_steps: int) -> RunResult:
    """Unit-cost run; inputs go to R1..Rp and the output is accumulator A."""
    regs = {i + 1: v for i, v in enumerate(inputs)}
    a = b = 0
    pc = 0
    steps = 0
    n = len(prog.instructions)
    while steps < max_steps:
        if pc >= n:
            return RunResult(a, steps, True)
        ins = prog.instructions[pc]
        steps += 1
        pc += 1
        match ins.op:
            case "LA":
                a = ins.args[0]
            case "LB":
                b = ins.args[0]
            case "AOP":
                a = _apply(ins.args[0], a, b)
            case "BOP":
                b = _apply(ins.args[0], a, b)
            case "MAB":
                b = a
            case "MBA":
                a = b
            case "LOAD":
                if a < 0:
                    raise NegativeAddress(f"LOAD from address {a}")
                a = regs.get(a, 0)
            case "STORE":
                if a < 0:
                    raise NegativeAddress(f"STORE to address {a}")
                regs[a] = b
            case "JEQ":
                pc = ins.args[0] if a == b else ins.args[1]
            case "HALT":
                return RunResult(a, steps, True)
    return RunResult(a, steps, False)
