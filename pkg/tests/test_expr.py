import pytest
from hypothesis import given, settings, strategies as st

from dode.errors import NotEssentiallyLinear, ParseError, UnboundVariable, UnknownFunction
from dode.expr import (
    Add, Call, Const, Env, Mul, Sg, Var, compile_exprs, degree, eval_expr, free_vars,
    is_essentially_constant, linear_decompose, parse_expr, to_text,
)
from dode.numeric import cosg, from_signpair, ifnz, ifz, length, sg, to_signpair

ints = st.integers(-2**64, 2**64)


def test_length_examples():
    assert length(0) == 0
    assert length(5) == 3
    assert length(-8) == 4


def test_sign_helpers():
    assert (sg(7), sg(0), sg(-3)) == (1, 0, 0)
    assert (cosg(0), cosg(5)) == (1, 0)
    assert ifz(0, 4, 9) == 4
    assert ifz(2, 4, 9) == 9
    # the literal formula reading: first branch when the condition is nonzero
    assert ifnz(2, 4, 9) == 4 and ifnz(0, 4, 9) == 9


@given(ints)
def test_sign_partition(x):
    assert sg(x) + cosg(x) + sg(-x) == 1


@given(ints, ints)
def test_ifz_same_branches(c, y):
    assert ifz(c, y, y) == y


@given(ints)
def test_signpair_roundtrip(x):
    assert from_signpair(to_signpair(x)) == x


def test_parse_examples():
    assert parse_expr("sg(x)*y + 1") == Add(Mul(Sg(Var("x")), Var("y")), Const(1))
    e = parse_expr("x*sg((x*x-z)*y)+y*y*y")
    assert free_vars(e) == {"x", "y", "z"}
    with pytest.raises(ParseError):
        parse_expr("x +")


def test_parse_negative_literal_and_offsets():
    assert eval_expr(parse_expr("x - -2"), {"x": 1}) == 3
    with pytest.raises(ParseError) as info:
        parse_expr("x + )")
    assert info.value.offset == 4
    with pytest.raises(ParseError):
        parse_expr("-x")


def test_precedence_and_associativity():
    assert eval_expr(parse_expr("2 + 3*4"), {}) == 14
    assert eval_expr(parse_expr("10 - 4 - 3"), {}) == 3


def test_sugar_desugars_to_sg():
    for text, expect in (("ifz(0, 4, 9)", 4), ("ifz(3, 4, 9)", 9), ("cosg(0)", 1), ("ifnz(3, 4, 9)", 4)):
        e = parse_expr(text)
        assert "ifz" not in repr(e) and "cosg" not in repr(e)
        assert eval_expr(e, {}) == expect


def test_eval_examples():
    assert eval_expr(parse_expr("x*y"), {"x": 3, "y": 4}) == 12
    assert eval_expr(parse_expr("sg(x-5)"), {"x": 5}) == 0
    assert eval_expr(parse_expr("len(x)"), {"x": 12}) == 4


def test_eval_errors():
    with pytest.raises(UnboundVariable):
        eval_expr(parse_expr("x + y"), {"x": 1})
    with pytest.raises(UnknownFunction):
        eval_expr(parse_expr("nope(1)"), {})


def test_env_functions():
    env = Env({"x": 3}, {"twice": lambda v: 2 * v}).bind(y=4)
    assert eval_expr(parse_expr("twice(x) + y"), env) == 10


def test_degree_examples():
    p = parse_expr("x*sg((x*x-z)*y)+y*y*y")
    assert degree(p, {"x"}) == 1
    assert degree(p, {"z"}) == 0
    assert degree(p, {"y"}) == 3
    assert degree(parse_expr("sg(x*x*x)"), {"x"}) == 0
    assert degree(parse_expr("5"), {"x"}) == 0
    assert degree(Call("len", (Mul(Var("x"), Var("x")),)), {"x"}) == 0


def test_essentially_constant():
    assert is_essentially_constant(parse_expr("sg(x*x-z)*z*z+w"), {"x"})
    assert not is_essentially_constant(parse_expr("x+1"), {"x"})
    assert is_essentially_constant(parse_expr("sg(f)*sg(g)"), {"f", "g"})


def test_linear_decompose_examples():
    A, B = linear_decompose([parse_expr("sg(t)*f + t*t")], ["f"])
    env = {"t": 3, "f": 10}
    assert eval_expr(A[0][0], env) == 1 and eval_expr(B[0], env) == 9
    A, B = linear_decompose([parse_expr("ifz(x, y, z)")], ["y", "z"])
    for x in (0, 2):
        assert [eval_expr(a, {"x": x}) for a in A[0]] == ([1, 0] if x == 0 else [0, 1])
        assert eval_expr(B[0], {"x": x}) == 0
    with pytest.raises(NotEssentiallyLinear):
        linear_decompose([parse_expr("f*f")], ["f"])


# random sg-polynomials over a fixed vocabulary
leaves = st.one_of(st.integers(-5, 5).map(Const), st.sampled_from(["f", "g", "t", "y"]).map(Var))


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: p[0] + p[1]),
        st.tuples(children, children).map(lambda p: p[0] - p[1]),
        st.tuples(children, children).map(lambda p: p[0] * p[1]),
        children.map(Sg),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs, st.lists(ints, min_size=4, max_size=4))
def test_linear_decompose_sound(e, values):
    env = dict(zip("fgty", values))
    try:
        A, B = linear_decompose([e], ["f", "g"])
    except NotEssentiallyLinear:
        assert degree(e, {"f", "g"}) >= 2
        return
    got = sum(eval_expr(a, env) * env[s] for a, s in zip(A[0], "fg")) + eval_expr(B[0], env)
    assert got == eval_expr(e, env)
    assert all(is_essentially_constant(a, {"f", "g"}) for a in (*A[0], B[0]))


@settings(max_examples=300, deadline=None)
@given(exprs, st.lists(ints, min_size=4, max_size=4))
def test_text_roundtrip_and_compile(e, values):
    env = dict(zip("fgty", values))
    assert parse_expr(to_text(e)) == e
    fn = compile_exprs([e], list("fgty"))
    assert fn({}, *values) == (eval_expr(e, env),)


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_degree_rules_node_by_node(e):
    vs = {"f"}
    match e:
        case Const(_):
            assert degree(e, vs) == 0
        case Var(name):
            assert degree(e, vs) == (name in vs)
        case Sg(_):
            assert degree(e, vs) == 0
        case Mul(a, b):
            assert degree(e, vs) == degree(a, vs) + degree(b, vs)
        case _:
            assert degree(e, vs) == max(degree(e.left, vs), degree(e.right, vs))
