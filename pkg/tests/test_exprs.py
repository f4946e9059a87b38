"""Parser, evaluator, and exact-derivative checks for the expression DSL."""

import math

import numpy as np
import pytest

from jetspectra.exprs import (
    Add,
    Call,
    Const,
    Div,
    EvalError,
    ExprNameError,
    ExprSyntaxError,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    differentiate,
    evaluate,
    free_variables,
    parse,
    substitute,
)


def test_parse_cos_q():
    e = parse("cos(q)", fiber_dim=0)
    assert e == Call("cos", Var("q"))


def test_parse_fiber_mix():
    e = parse("w1^2 - w2^2 + 0.1*sin(q)", fiber_dim=2)
    expected = Add(
        Sub(Pow(Var("w1"), 2), Pow(Var("w2"), 2)),
        Mul(Const(0.1), Call("sin", Var("q"))),
    )
    assert e == expected


def test_parse_fiber_index_out_of_range():
    with pytest.raises(ExprNameError) as err:
        parse("cos(q) + w3", fiber_dim=2)
    assert err.value.offset == 9


def test_parse_unknown_identifier():
    with pytest.raises(ExprNameError):
        parse("cos(x)", fiber_dim=0)


def test_parse_syntax_error_has_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("cos(q", fiber_dim=0)
    assert err.value.offset == 5


def test_parse_empty():
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_parse_integer_exponent_required():
    with pytest.raises(ExprSyntaxError):
        parse("q^2.5")
    with pytest.raises(ExprSyntaxError):
        parse("q^q")


def test_parse_precedence():
    # ^ binds tighter than unary -, * tighter than +
    assert parse("-q^2") == Neg(Pow(Var("q"), 2))
    assert parse("1+2*q") == Add(Const(1.0), Mul(Const(2.0), Var("q")))


def test_eval_identity_case():
    assert evaluate(parse("cos(q)"), {"q": 0.0}) == 1.0


def test_eval_arithmetic():
    e = parse("w1^2 - w2^2", fiber_dim=2)
    assert evaluate(e, {"w1": 2.0, "w2": 1.0}) == 3.0


def test_eval_division_by_zero():
    with pytest.raises(EvalError):
        evaluate(parse("1/q"), {"q": 0.0})


def test_eval_unbound_variable():
    with pytest.raises(EvalError):
        evaluate(parse("cos(q) + t"), {"q": 0.0})


def test_eval_array_broadcast():
    e = parse("sin(q)*t")
    q = np.linspace(0, 2 * np.pi, 17)
    out = evaluate(e, {"q": q, "t": 2.0})
    assert np.allclose(out, 2.0 * np.sin(q))


def test_diff_cos():
    assert differentiate(parse("cos(q)"), "q") == Neg(Call("sin", Var("q")))


def test_diff_quadratic():
    e = parse("w1^2 - w2^2", fiber_dim=2)
    assert differentiate(e, "w1") == Mul(Const(2.0), Var("w1"))


def test_diff_family_slice():
    e = parse("cos(q) + t*(2 + sin(q))")
    d = differentiate(e, "t")
    assert d == Add(Const(2.0), Call("sin", Var("q")))


def test_diff_illegal_variable():
    with pytest.raises(ExprNameError):
        differentiate(parse("q"), "bogus")


def test_substitute():
    e = parse("cos(q) + t*(2 + sin(q))")
    sliced = substitute(e, "t", 0.5)
    assert "t" not in free_variables(sliced)
    assert evaluate(sliced, {"q": 0.3}) == pytest.approx(
        math.cos(0.3) + 0.5 * (2 + math.sin(0.3))
    )


def test_free_variables():
    e = parse("cos(q) + w1*lambda", fiber_dim=1)
    assert free_variables(e) == frozenset({"q", "w1", "lambda"})


# --- properties -----------------------------------------------------------


def _random_expr(rng, fiber_dim, depth):
    leaves = ["q", "t", "w1", "w2"][: 2 + fiber_dim]
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.35:
            return Const(round(float(rng.uniform(-2, 2)), 3))
        return Var(str(rng.choice(leaves)))
    kind = rng.integers(0, 8)
    a = _random_expr(rng, fiber_dim, depth - 1)
    b = _random_expr(rng, fiber_dim, depth - 1)
    if kind == 0:
        return Add(a, b)
    if kind == 1:
        return Sub(a, b)
    if kind == 2:
        return Mul(a, b)
    if kind == 3:
        return Div(a, Add(Mul(b, b), Const(0.5)))  # denominator bounded away from 0
    if kind == 4:
        return Pow(a, int(rng.integers(2, 4)))
    if kind == 5:
        return Neg(a)
    if kind == 6:
        return Call(str(rng.choice(["sin", "cos"])), a)
    return Call("exp", a)


def test_symbolic_vs_finite_difference_100_random():
    rng = np.random.default_rng(20240817)
    h = 1e-5
    checked = 0
    while checked < 100:
        e = _random_expr(rng, 2, depth=4)
        names = sorted(free_variables(e))
        if not names:
            continue
        point = {n: float(rng.uniform(-1.2, 1.2)) for n in names}
        try:
            val = evaluate(e, point)
        except EvalError:
            continue
        if not np.isfinite(val) or abs(val) > 1e3:
            continue
        ok_expr = True
        for n in names:
            d_sym = evaluate(differentiate(e, n), point)
            up = dict(point)
            dn = dict(point)
            up[n] += h
            dn[n] -= h
            d_fd = (evaluate(e, up) - evaluate(e, dn)) / (2 * h)
            if not np.isfinite(d_sym) or abs(d_sym) > 1e3:
                ok_expr = False
                break
            assert abs(d_sym - d_fd) / max(1.0, abs(d_sym)) < 1e-6
        if ok_expr:
            checked += 1
    assert checked == 100


def test_print_parse_round_trip():
    rng = np.random.default_rng(7)
    cases = [
        "cos(q)",
        "w1^2 - w2^2 + 0.1*sin(q)",
        "-(q + t)*sin(q)/(1 + q^2)",
        "q^2^3",
        "-q^2",
        "2e-3*exp(q) - .5",
    ]
    for _ in range(60):
        cases.append(str(_random_expr(rng, 2, depth=4)))
    for text in cases:
        t1 = parse(text, fiber_dim=2)
        t2 = parse(str(t1), fiber_dim=2)
        assert t1 == t2, text
