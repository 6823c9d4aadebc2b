import random

import pytest

from dode.compiler import CORPUS, load_corpus
from dode.errors import BadLabel, BadRegister, DivByZero, NegativeAddress, ParseError
from dode.machines import load_program, load_ram, run, run_ram, step, initial_config, trace

ADD = "ADD 0 1\nADD 0 2\nHALT\n"


def test_load_examples():
    assert len(load_program("ADD 0 1\nHALT")) == 2
    with pytest.raises(BadLabel):
        load_program("JZ 0 99\nHALT")
    assert load_program("SET 2 1\nHALT").num_registers == 3


@pytest.mark.parametrize("text, err", [
    ("SET 2 5\nHALT", ParseError),
    ("MUL 0 1\nHALT", ParseError),
    ("ADD 0\nHALT", ParseError),
    ("ADD 0 x\nHALT", ParseError),
    ("", ParseError),
    ("# only a comment\n\n", ParseError),
])
def test_load_errors(text, err):
    with pytest.raises(err):
        load_program(text)


def test_declared_register_count():
    with pytest.raises(BadRegister):
        load_program(ADD, num_registers=2)
    with pytest.raises(BadRegister):
        run(load_program(ADD), (1, 2, 3), 10)


def test_comments_and_blank_lines():
    prog = load_program("# adds\n\nADD 0 1   # R0 += R1\n\nHALT\n")
    assert run(prog, (9,), 10).output == 9


def test_run_examples():
    prog = load_program(ADD)
    res = run(prog, (3, 4), 100)
    assert (res.output, res.steps, res.halted) == (7, 3, True)
    res = run(prog, (3, 4), 0)
    assert (res.output, res.steps, res.halted) == (0, 0, False)
    res = run(load_corpus("countdown"), (5,), 1000)
    assert res.output == 5 and res.halted


def test_countdown_is_five_instructions_plus_halt():
    prog = load_corpus("countdown")
    assert len(prog) == 6 and prog.instructions[-1].op == "HALT"


def test_corpus_outputs():
    oracles = {
        "add": lambda a, b: a + b,
        "countdown": lambda a: a,
        "double": lambda a: 2 * a,
        "max": max,
        "triangular": lambda a: a * (a + 1) // 2,
    }
    for name, arity in CORPUS.items():
        prog = load_corpus(name)
        for _ in range(40):
            inputs = [random.randrange(30) for _ in range(arity)]
            res = run(prog, inputs, 10**5)
            assert res.halted and res.output == oracles[name](*inputs)


def test_step_monotonicity_and_determinism():
    prog = load_corpus("triangular")
    full = run(prog, (6,), 10**5)
    for budget in (full.steps, full.steps + 1, 10**6):
        assert run(prog, (6,), budget) == full
    assert trace(prog, (6,), 50) == trace(prog, (6,), 50)


def test_register_non_interference():
    prog = load_program("ADD 1 2\nSUB 3 1\nSET 0 1\nJZ 4 0\nHALT", num_registers=6)
    cfg = initial_config(prog, (5, 7, 11, 0, 13))
    touched = {0: {1}, 1: {3}, 2: {0}, 3: set()}
    for pc in range(4):
        before = list(cfg.registers)
        assert cfg.pc == pc
        step(prog, cfg)
        changed = {i for i, (a, b) in enumerate(zip(before, cfg.registers)) if a != b}
        assert changed <= touched[pc]


def test_halt_counts_and_freezes():
    prog = load_program("HALT")
    assert trace(prog, (), 5) == [(0, 0), (0, 0)]
    assert run(prog, (), 5).steps == 1


def test_falling_off_the_end_halts():
    prog = load_program("ADD 0 1")
    res = run(prog, (4,), 10)
    assert (res.output, res.steps, res.halted) == (4, 1, True)


def test_negative_registers():
    prog = load_program("SUB 0 1\nHALT")
    assert run(prog, (5,), 10).output == -5


def test_ram_examples():
    res = run_ram(load_ram("LA 5\nMAB\nAOP +\nHALT"), (), 10)
    assert (res.output, res.halted) == (10, True)
    with pytest.raises(ParseError):
        load_ram("LA 2\nLB 3\nAOP *\nHALT", opset="basic")
    with pytest.raises(DivByZero):
        run_ram(load_ram("LA 1\nLB 0\nAOP /\nHALT"), (), 10)


def test_ram_indirect_addressing():
    # R[3] := 42, then A := R[3]; inputs live in R1..Rp
    prog = load_ram("LA 3\nLB 42\nSTORE\nLA 3\nLOAD\nHALT")
    assert run_ram(prog, (), 20).output == 42
    assert run_ram(load_ram("LA 2\nLOAD\nHALT"), (7, 9), 10).output == 9
    assert run_ram(load_ram("LA 9\nLOAD\nHALT"), (), 10).output == 0
    with pytest.raises(NegativeAddress):
        run_ram(load_ram("LA 0\nLB 1\nAOP -\nLOAD\nHALT"), (), 10)


def test_ram_loop_and_step_limit():
    # double A until it equals 8
    prog = load_ram("LA 1\nLB 8\nJEQ 7 3\nMAB\nAOP +\nLB 8\nJEQ 7 2\nHALT")
    res = run_ram(prog, (), 100)
    assert (res.output, res.halted) == (8, True)
    assert run_ram(load_ram("LA 0\nLB 0\nJEQ 2 2"), (), 7).halted is False
    res = run_ram(load_ram("LA 7\nLB 2\nAOP /\nMAB\nLA 7\nBOP *\nMBA\nHALT"), (), 20)
    assert res.output == 7 * 3


def test_ram_bad_jump():
    with pytest.raises(BadLabel):
        load_ram("JEQ 0 5\nHALT")
