import pytest
from hypothesis import given, strategies as st

from ordcalc.core import (
    ONE,
    TermError,
    ZERO,
    add,
    flatten_sum,
    is_h,
    is_sc,
    omega_idx,
    omega_lev,
    omega_pow,
    size,
    structural_key,
    subterms,
    sum_of,
    theta_idx,
    var_idx,
    var_names,
    xi,
)
from pools import closed


def test_empty_sum_is_zero():
    assert flatten_sum([]) is ZERO
    assert size(ZERO) == 1


def test_singleton_collapses():
    assert flatten_sum([ONE]) is ONE


def test_nested_sums_flatten():
    inner = sum_of([ONE, omega_idx(1)])
    t = flatten_sum([ONE, inner])
    assert [c for c in t.children] == sorted(t.children, key=structural_key)
    assert len(t.children) == 3


def test_zero_merges_away():
    assert add(ZERO, omega_idx(1)) is omega_idx(1)


def test_mixed_system_components_rejected():
    with pytest.raises(TermError):
        sum_of([omega_lev(0), omega_idx(1)])  # poly head with a stratified head


def test_size_counts_nodes_and_levels():
    assert size(ONE) == 2
    assert size(sum_of([ONE, omega_idx(1)])) == 4
    assert size(omega_lev(0)) == 2  # the level superscript costs a node
    assert size(omega_idx(3)) == 1
    assert size(xi(0, ZERO)) == 3


def test_structural_key_identity():
    assert structural_key(ZERO) == structural_key(sum_of([]))
    assert structural_key(ONE) != structural_key(ZERO)


def test_interning_gives_identity():
    a = theta_idx(2, add(ONE, omega_idx(1)))
    b = theta_idx(2, add(omega_idx(1), ONE))
    assert a is b


def test_classification_helpers():
    assert is_h(ONE) and not is_sc(ONE)
    assert is_sc(omega_idx(1))
    assert not is_h(sum_of([ONE, ONE]))


def test_var_names_and_validity():
    t = theta_idx(1, var_idx("x", 1))
    assert var_names(t) == {"x"}
    assert not t.valid
    assert theta_idx(2, var_idx("x", 1)).valid


@given(st.data())
def test_flatten_idempotent(data):
    pool = closed("buchholz", max_size=4)
    parts = data.draw(st.lists(st.sampled_from(pool), max_size=4))
    t = flatten_sum(parts)
    from ordcalc.core import summands

    assert flatten_sum(summands(t)) is t


@given(st.data())
def test_key_total_order(data):
    pool = closed("mixed", max_size=4)
    a = data.draw(st.sampled_from(pool))
    b = data.draw(st.sampled_from(pool))
    ka, kb = structural_key(a), structural_key(b)
    assert (ka == kb) == (a is b)
    assert (ka < kb) + (ka == kb) + (ka > kb) == 1


@given(st.data())
def test_size_subadditive_over_sums(data):
    pool = [t for t in closed("poly", max_size=4) if is_h(t)]
    parts = data.draw(st.lists(st.sampled_from(pool), min_size=2, max_size=4))
    assert size(flatten_sum(parts)) <= 1 + sum(size(p) for p in parts)


def test_subterms_preorder():
    t = omega_pow(add(omega_idx(1), ONE))
    seen = list(subterms(t))
    assert seen[0] is t
    assert omega_idx(1) in seen and ZERO in seen
