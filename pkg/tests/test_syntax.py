import pytest
from hypothesis import given, strategies as st

from ordcalc import parse, render
from ordcalc.syntax import ParseError, render_set
from pools import closed, opened


def test_zero_forms():
    assert parse("buchholz", "0") is parse("poly", "0")
    assert render(parse("xi", "0")) == "0"


def test_whitespace_insensitive():
    a = parse("poly", "th( O^(0) # O^(-1) )")
    b = parse("poly", "th(O^(0)#O^(-1))")
    assert a is b


def test_sum_canonical_order():
    t = parse("buchholz", "O_2 # O_1 # w^(0)")
    assert render(t) == render(parse("buchholz", "w^(0) # O_1 # O_2"))


@pytest.mark.parametrize(
    "system,text",
    [
        ("buchholz", "O^(0)"),
        ("buchholz", "th(0)"),
        ("poly", "O_1"),
        ("poly", "Xi^(0)(0)"),
        ("xi", "O^(0)"),
        ("xi", "th_1(0)"),
        ("mixed", "O^(0)"),
        ("mixed", "th(0)"),
        ("mixed", "V.F^(0)(0)"),
        ("poly", "v.x_1"),
        ("buchholz", "v.x^(0)"),
    ],
)
def test_heads_rejected_outside_their_system(system, text):
    with pytest.raises(ParseError):
        parse(system, text)


@pytest.mark.parametrize(
    "system,text",
    [
        ("poly", "O^(1)"),
        ("xi", "Xi^(2)(0)"),
        ("buchholz", "O_0"),
        ("mixed", "OO_0^(0)"),
        ("buchholz", "th_0(0)"),
    ],
)
def test_index_ranges_enforced(system, text):
    with pytest.raises(ParseError):
        parse(system, text)


def test_variable_scope_rule_rejected_with_span():
    with pytest.raises(ParseError) as exc:
        parse("buchholz", "th_1(v.x_1)")
    assert exc.value.span.start == 0
    parse("buchholz", "th_2(v.x_1)")  # in scope


def test_error_span_points_at_token():
    with pytest.raises(ParseError) as exc:
        parse("poly", "th(O^(0) # )")
    assert exc.value.span.start == 11


def test_trailing_garbage_rejected():
    with pytest.raises(ParseError):
        parse("poly", "0 # w^(0)")
    with pytest.raises(ParseError):
        parse("poly", "w^(0) w^(0)")


def test_function_variable_not_under_collapse():
    with pytest.raises(ParseError):
        parse("xi", "th(V.F^(0)(0))")


@pytest.mark.parametrize("system", ["buchholz", "poly", "xi", "mixed"])
@given(data=st.data())
def test_roundtrip_closed(system, data):
    t = data.draw(st.sampled_from(closed(system)))
    assert parse(system, render(t)) is t


@pytest.mark.parametrize("system", ["buchholz", "poly", "xi", "mixed"])
@given(data=st.data())
def test_roundtrip_open(system, data):
    t = data.draw(st.sampled_from(opened(system, max_size=4)))
    assert parse(system, render(t)) is t


def test_render_set_deterministic():
    terms = {parse("poly", "O^(0)"), parse("poly", "w^(0)")}
    assert render_set(terms) == "{w^(0), O^(0)}"
