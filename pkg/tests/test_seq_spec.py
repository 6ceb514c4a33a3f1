from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from tracerefine.history import EMPTY, UNIT, History, HistoryError, inv, sequential_history
from tracerefine.seq_spec import SpecDomainError, legal, run_spec


def test_pop_empty(stack):
    assert stack.transition((), "pop", None) == [((), EMPTY)]


def test_push_prepends(stack):
    assert [s for _, s in run_spec(stack, [("push", 1), ("push", 2)])][-1] == (2, 1)


def test_pop_takes_top(stack):
    assert stack.transition((2, 1), "pop", None) == [((1,), 2)]


@pytest.mark.parametrize("bad", [EMPTY, UNIT, None])
def test_reserved_push(stack, bad):
    with pytest.raises(SpecDomainError, match="reserved value"):
        stack.transition((), "push", bad)


def test_legal_push_pop(stack):
    assert legal(stack, sequential_history([(1, "push", 1, UNIT), (1, "pop", None, 1)]))


def test_pop_from_empty_cannot_return_value(stack):
    assert not legal(stack, sequential_history([(1, "pop", None, 1)]))


def test_sc2_witness_is_legal(stack):
    s = sequential_history([
        (1, "push", 1, UNIT), (1, "push", 2, UNIT), (2, "pop", None, 2), (1, "pop", None, 1),
    ])
    assert legal(stack, s)


def test_legal_rejects_concurrent(stack):
    with pytest.raises(HistoryError, match="not sequential"):
        legal(stack, History([inv(1, "push", 1), inv(2, "pop")]))


def test_run_spec_empty(stack):
    assert run_spec(stack, []) == []


def test_run_spec_single_push(stack):
    assert run_spec(stack, [("push", 1)]) == [(UNIT, (1,))]


def test_run_spec_last_pop(stack):
    assert run_spec(stack, [("push", 1), ("push", 2), ("pop", None)])[-1] == (2, (1,))


def _list_stack(ops):
    """Reference model on a Python list (top at the end)."""
    lst, out = [], []
    for op, arg in ops:
        if op == "push":
            lst.append(arg)
            out.append(UNIT)
        else:
            out.append(lst.pop() if lst else EMPTY)
    return out, tuple(reversed(lst))


ops = st.lists(st.one_of(st.tuples(st.just("push"), st.integers(0, 5)), st.just(("pop", None))), max_size=15)


@given(ops)
def test_matches_list_model(seq):
    from tracerefine.seq_spec import stack_spec

    spec = stack_spec()
    rets, final = _list_stack(seq)
    run = run_spec(spec, seq)
    assert [r for r, _ in run] == rets
    assert (run[-1][1] if run else ()) == final
    assert legal(spec, sequential_history((1, op, arg, r) for (op, arg), r in zip(seq, rets)))
