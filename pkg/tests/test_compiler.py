import itertools

import pytest

from dode.compiler import (
    CORPUS, bound_steps, compile_rm, compiled_trajectory, default_guard, load_corpus, lockstep,
    output, package_sll, run_compiled,
)
from dode.errors import GrowthExceeded
from dode.expr import call_names, degree
from dode.machines import load_program, run
from dode.ode import Kind, parse_system, solve_linear_fast


def grid(arity, top):
    return list(itertools.product(range(top), repeat=arity))


def test_halt_only_program():
    cs = compile_rm(load_program("HALT"))
    assert [str(e) for e in cs.system.rhs] == ["0", "0"]
    assert output(run_compiled(cs, (), 10)) == 0
    assert package_sll(cs).evaluate(()) == 0


def test_add_structure():
    cs = compile_rm(load_corpus("add"))
    assert cs.system.state == ("inst", "R0", "R1", "R2")
    assert cs.system.kind is Kind.LINEAR_LENGTH
    assert cs.system.initial((3, 4)) == (0, 0, 3, 4)
    insts = [s[0] for s, _ in zip(compiled_trajectory(cs, (3, 4)), range(6))]
    assert insts == [0, 1, 2, 2, 2, 2]


def test_run_compiled_examples():
    add = compile_rm(load_corpus("add"))
    assert output(run_compiled(add, (3, 4), 8)) == 7
    countdown = compile_rm(load_corpus("countdown"), 1)
    assert output(run_compiled(countdown, (5,), 40)) == 5


def test_short_horizon_matches_partial_run():
    prog = load_corpus("triangular")
    cs = compile_rm(prog, 1)
    for T in range(30):
        assert output(run_compiled(cs, (6,), T)) == run(prog, (6,), T).output


@pytest.mark.parametrize("name", list(CORPUS))
def test_lockstep(name):
    prog = load_corpus(name)
    cs = compile_rm(prog, CORPUS[name])
    for inputs in grid(CORPUS[name], 7 if CORPUS[name] == 1 else 5):
        res = run(prog, inputs, 10**5)
        assert lockstep(cs, inputs, res.steps) is None


@pytest.mark.parametrize("name", list(CORPUS))
def test_linearity_certificate(name):
    cs = compile_rm(load_corpus(name))
    A, B = cs.decomposition
    state = set(cs.system.state)
    for e in cs.system.rhs:
        assert degree(e, state) <= 1
        assert not call_names(e)
    assert any(degree(e, state) == 1 for e in cs.system.rhs)


def test_fixed_point_after_halt():
    prog = load_corpus("max")
    cs = compile_rm(prog, 2)
    res = run(prog, (4, 2), 1000)
    states = [s for s, _ in zip(compiled_trajectory(cs, (4, 2)), range(res.steps + 20))]
    assert all(s == states[res.steps] for s in states[res.steps:])


def test_bound_steps():
    assert bound_steps(3, 1) == 10
    assert bound_steps(1, 1) == 2
    assert bound_steps(0, 1) == 1
    assert bound_steps(2, 2) == 26
    for n in range(1, 12):
        for c in (1, 2, 3):
            assert bound_steps(n, c) >= n**c
    with pytest.raises(ValueError):
        bound_steps(3, 0)


def test_growth_accounting():
    prog = load_corpus("double")
    cs = compile_rm(prog, 1)
    for x in range(20):
        T = 60
        rep = run_compiled(cs, (x,), T)
        assert rep.steps == T
        # each machine step at most doubles one register
        assert rep.max_bits <= max(x.bit_length(), 3) + T + 1
        assert rep.max_bits <= default_guard(cs, (x,), T)


def test_guard_trips_on_doubling_loop():
    prog = load_program("SET 1 1\nADD 1 1\nJZ 2 1\nHALT")
    cs = compile_rm(prog, 0)
    with pytest.raises(GrowthExceeded):
        run_compiled(cs, (), 200, guard=50)


def test_file_roundtrip():
    cs = compile_rm(load_corpus("max"), 2)
    text = cs.text()
    assert text.startswith("# compiled from register machine sha256:" + cs.program.digest())
    again = parse_system(text)
    assert again == cs.system
    for inputs in grid(2, 4):
        assert solve_linear_fast(again, 40, inputs).values == run_compiled(cs, inputs, 40).values


@pytest.mark.parametrize("name", ["add", "countdown"])
def test_sll(name):
    prog = load_corpus(name)
    sll = package_sll(compile_rm(prog, CORPUS[name]), c=2)
    inputs_list = grid(2, 5) if name == "add" else [(x,) for x in range(32)]
    for inputs in inputs_list:
        assert sll.evaluate(inputs) == run(prog, inputs, 10**5).output


def test_sll_h_is_iterated_bound():
    sll = package_sll(compile_rm(load_corpus("add")), c=2)
    for inputs in grid(2, 9):
        n = sum(v.bit_length() for v in inputs)
        assert sll.steps(inputs) == bound_steps(n, 2)


def test_arity_validation():
    with pytest.raises(ValueError):
        compile_rm(load_corpus("add"), 3)
    with pytest.raises(ValueError):
        package_sll(compile_rm(load_corpus("add")), 0)
