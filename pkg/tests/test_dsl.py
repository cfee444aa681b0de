import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from peakons.dsl import (BinOp, Call, ExprEvalError, ExprSyntaxError, Neg, NonlinearitySpec, Num,
                         Param, Var, derivative, eval_expr, even_odd_at, free_params, parse_expr,
                         to_text)

ACCEPT = [
    ("ux", Var("ux")),
    ("u", Var("u")),
    ("k*(u-2)*(u-1)", BinOp("*", BinOp("*", Param("k"), BinOp("-", Var("u"), Num(2.0))),
                           BinOp("-", Var("u"), Num(1.0)))),
    ("u^(p-1)*(u^2 + lam*ux^2)", BinOp("*", BinOp("^", Var("u"), BinOp("-", Param("p"), Num(1.0))),
                                      BinOp("+", BinOp("^", Var("u"), Num(2.0)),
                                            BinOp("*", Param("lam"), BinOp("^", Var("ux"), Num(2.0)))))),
    ("2^3^2", BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))),
    ("-u^2", Neg(BinOp("^", Var("u"), Num(2.0)))),
    ("a-b-c", BinOp("-", BinOp("-", Param("a"), Param("b")), Param("c"))),
    ("a/b*c", BinOp("*", BinOp("/", Param("a"), Param("b")), Param("c"))),
    ("pow(u, 2) + abs(ux)", BinOp("+", Call("pow", (Var("u"), Num(2.0))), Call("abs", (Var("ux"),)))),
    ("k*sqrt((a/u)^2 - 1)", BinOp("*", Param("k"), Call("sqrt", (BinOp("-", BinOp(
        "^", BinOp("/", Param("a"), Var("u")), Num(2.0)), Num(1.0)),)))),
]

REJECT = [
    ("2u", 1),
    ("u +", 3),
    ("(u", 2),
    ("u)", 1),
    ("foo(u)", 0),
    ("u @ 2", 2),
]


@pytest.mark.parametrize("text,tree", ACCEPT, ids=[t for t, _ in ACCEPT])
def test_grammar_accepts(text, tree):
    assert parse_expr(text) == tree


@pytest.mark.parametrize("text,offset", REJECT, ids=[t for t, _ in REJECT])
def test_grammar_rejects_with_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.offset == offset


def test_offsets_are_bytes():
    # 'é' is two bytes in UTF-8, so the stray '@' sits at byte 4
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("é+u@")
    assert info.value.offset in (0, 4)


def test_unknown_function_and_arity():
    with pytest.raises(ExprSyntaxError, match="unknown function"):
        parse_expr("besselj(u)")
    with pytest.raises(ExprSyntaxError):
        parse_expr("pow(u)")
    with pytest.raises(ExprSyntaxError):
        parse_expr("")


@pytest.mark.parametrize("text,params,u,ux,expected", [
    ("ux", {}, 5.0, 3.0, 3.0),
    ("k*(u-2)*(u-1)", {"k": 1.0}, 1.5, 0.0, -0.25),
    ("u^2 - ux^2", {}, 2.0, 1.0, 3.0),
    ("sign(ux)", {}, 1.0, 0.0, 0.0),
    ("sign(-ux)", {}, 1.0, 2.0, -1.0),
    ("2^3^2", {}, 0.0, 0.0, 512.0),
    ("-u^2", {}, 3.0, 0.0, -9.0),
])
def test_evaluation(text, params, u, ux, expected):
    assert eval_expr(parse_expr(text), u, ux, params) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("text,u,ux", [
    ("1/ux", 1.0, 0.0),
    ("log(u)", -1.0, 0.0),
    ("log(u)", 0.0, 0.0),
    ("sqrt(u)", -1e-3, 0.0),
    ("u^0.5", -2.0, 0.0),
])
def test_domain_errors_raise(text, u, ux):
    with pytest.raises(ExprEvalError) as info:
        eval_expr(parse_expr(text), u, ux)
    assert info.value.kind == "domain"


def test_unbound_parameter():
    with pytest.raises(ExprEvalError) as info:
        eval_expr(parse_expr("k*u"), 1.0, 0.0, {})
    assert info.value.kind == "unbound"
    with pytest.raises(ExprEvalError):
        NonlinearitySpec.from_text("k*u", "lam*u", {"k": 1.0})


@pytest.mark.parametrize("text,params,u,ux,even,odd", [
    ("ux", {}, 1.3, -0.7, 0.0, -0.7),
    ("k*u^p", {"k": 1.0, "p": 3.0}, 2.0, 7.0, 8.0, 0.0),
    ("lam*u^q*ux", {"lam": 1.0, "q": 1.0}, 2.0, 3.0, 0.0, 6.0),
])
def test_even_odd_examples(text, params, u, ux, even, odd):
    e, o = even_odd_at(parse_expr(text), u, ux, params)
    assert e == pytest.approx(even, abs=1e-15)
    assert o == pytest.approx(odd, abs=1e-15)


def test_free_params():
    assert free_params(parse_expr("k*u^p + lam*ux")) == {"k", "p", "lam"}


# -- property tests --------------------------------------------------------

leaf = st.one_of(
    st.sampled_from([Var("u"), Var("ux"), Param("k"), Param("lam")]),
    st.floats(0.1, 5.0, allow_nan=False).map(lambda v: Num(round(v, 3))),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: BinOp(*t)),
        children.map(Neg),
        st.tuples(children, st.integers(0, 3)).map(lambda t: BinOp("^", t[0], Num(float(t[1])))),
        st.tuples(st.sampled_from(["sin", "cos", "exp"]), children).map(lambda t: Call(t[0], (t[1],))),
    )


trees = st.recursive(leaf, _extend, max_leaves=12)
PARAMS = {"k": 0.7, "lam": -1.3}


@given(trees)
def test_print_parse_round_trip(tree):
    text = to_text(tree)
    again = parse_expr(text)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2.0, 2.0, size=(100, 2))
    for u, ux in pts:
        try:
            a = eval_expr(tree, u, ux, PARAMS)
        except (ExprEvalError, OverflowError):
            continue
        b = eval_expr(again, u, ux, PARAMS)
        assert a == b or (math.isnan(a) and math.isnan(b))


@given(trees, st.floats(-3, 3), st.floats(-3, 3))
def test_reflection_identity_and_completeness(tree, u, ux):
    try:
        e1, o1 = even_odd_at(tree, u, ux, PARAMS)
        e2, o2 = even_odd_at(tree, u, -ux, PARAMS)
        full = eval_expr(tree, u, ux, PARAMS)
    except ExprEvalError:
        return
    if not all(map(math.isfinite, (e1, o1, e2, o2, full))):
        return
    scale = max(1.0, abs(full), abs(e1), abs(o1))
    assert e1 == pytest.approx(e2, abs=1e-14 * scale)
    assert o1 == pytest.approx(-o2, abs=1e-14 * scale)
    assert e1 + o1 == pytest.approx(full, abs=1e-14 * scale)


@given(trees, st.floats(0.2, 2), st.floats(-2, 2))
def test_symbolic_u_derivative_matches_difference(tree, u, ux):
    d = derivative(tree, "u")
    h = 1e-5
    try:
        exact = eval_expr(d, u, ux, PARAMS)
        fd = (eval_expr(tree, u + h, ux, PARAMS) - eval_expr(tree, u - h, ux, PARAMS)) / (2 * h)
    except ExprEvalError:
        return
    if not (math.isfinite(exact) and math.isfinite(fd)) or abs(exact) > 1e6:
        return
    assert exact == pytest.approx(fd, rel=1e-5, abs=1e-5)
