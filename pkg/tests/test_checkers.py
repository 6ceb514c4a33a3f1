from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from tracerefine.checkers import (
    LIN,
    SC,
    OracleBoundError,
    brute_force_check,
    check,
    check_file,
    is_linearizable,
    is_sequentially_consistent,
)
from tracerefine.history import EMPTY, UNIT, History, HistoryError, history_to_json, inv, resp, sequential_history
from tracerefine.seq_spec import legal

from conftest import sc2_schedule_history

PUSH_THEN_EMPTY_POP = History([
    inv(1, "push", 1), resp(1, "push", UNIT), inv(2, "pop"), resp(2, "pop", EMPTY),
])
OVERLAP = History([inv(1, "push", 1), inv(2, "pop"), resp(1, "push", UNIT), resp(2, "pop", 1)])
POP_FROM_NOTHING = History([inv(1, "pop"), resp(1, "pop", 1)])


class TestSC:
    def test_reorders_across_threads(self, stack):
        v = is_sequentially_consistent(PUSH_THEN_EMPTY_POP, stack)
        assert v.holds
        assert v.witness == sequential_history([(2, "pop", None, EMPTY), (1, "push", 1, UNIT)])

    def test_sc2_schedule(self, stack):
        v = is_sequentially_consistent(sc2_schedule_history(), stack)
        assert v.holds
        assert v.witness == sequential_history([
            (1, "push", 1, UNIT), (1, "push", 2, UNIT), (2, "pop", None, 2), (1, "pop", None, 1),
        ])

    def test_impossible_pop(self, stack):
        v = is_sequentially_consistent(POP_FROM_NOTHING, stack)
        assert not v.holds and v.witness is None


class TestLIN:
    def test_overlap(self, stack):
        assert is_linearizable(OVERLAP, stack).holds

    def test_sc2_schedule_not_linearizable(self, stack):
        assert not is_linearizable(sc2_schedule_history(), stack).holds

    def test_empty(self, stack):
        v = is_linearizable(History(), stack)
        assert v.holds and v.witness == History()

    def test_real_time_respected_by_witness(self, stack):
        assert not is_linearizable(PUSH_THEN_EMPTY_POP, stack).holds

    def test_pending_push_may_take_effect(self, stack):
        h = History([inv(1, "push", 1), inv(2, "pop"), resp(2, "pop", 1)])
        assert is_linearizable(h, stack).holds

    def test_pending_push_may_be_dropped(self, stack):
        h = History([inv(1, "push", 1), inv(2, "pop"), resp(2, "pop", EMPTY)])
        v = is_linearizable(h, stack)
        assert v.holds and v.witness == sequential_history([(2, "pop", None, EMPTY)])

    def test_invalid_history_rejected(self, stack):
        with pytest.raises(HistoryError, match="invalid history"):
            is_linearizable(History([resp(1, "pop", 1)]), stack)


EXAMPLES = [PUSH_THEN_EMPTY_POP, OVERLAP, POP_FROM_NOTHING, sc2_schedule_history(), History()]


@pytest.mark.parametrize("h", EXAMPLES)
@pytest.mark.parametrize("mode", [SC, LIN])
def test_oracle_agrees_on_examples(stack, h, mode):
    a, b = check(h, stack, mode), brute_force_check(h, stack, mode)
    assert (a.holds, a.witness) == (b.holds, b.witness)


def test_oracle_bound(stack):
    h = sequential_history([(1, "push", 1, UNIT)] * 11)
    with pytest.raises(OracleBoundError, match="oracle bound"):
        brute_force_check(h, stack, LIN)


def test_unknown_mode(stack):
    with pytest.raises(ValueError):
        check(History(), stack, "strict")


class TestCheckFile:
    def test_legal_sequential(self, stack, tmp_path):
        p = tmp_path / "h.json"
        p.write_text(json.dumps(history_to_json(PUSH_THEN_EMPTY_POP[:2])))
        assert check_file(str(p), stack, LIN).holds

    def test_unknown_field(self, stack, tmp_path):
        p = tmp_path / "h.json"
        p.write_text('[{"kind": "inv", "thread": 1, "op": "pop", "colour": "red"}]')
        with pytest.raises(HistoryError):
            check_file(str(p), stack, LIN)

    def test_sc2_file(self, stack, tmp_path):
        p = tmp_path / "h.json"
        p.write_text(json.dumps(history_to_json(sc2_schedule_history())))
        assert not check_file(str(p), stack, LIN).holds
        assert check_file(str(p), stack, SC).holds


def test_verdict_json(stack):
    d = is_sequentially_consistent(PUSH_THEN_EMPTY_POP, stack).to_json()
    assert set(d) == {"holds", "witness", "note"}
    assert d["witness"][0] == {"kind": "inv", "thread": 2, "op": "pop"}


# -- property: random small histories ------------------------------------------------

@st.composite
def histories(draw, max_calls=6):
    """Valid two- or three-thread histories built by a random scheduler."""
    n_threads = draw(st.integers(1, 3))
    plans = {t: draw(st.lists(st.sampled_from(["push1", "push2", "pop"]), max_size=3)) for t in range(1, n_threads + 1)}
    rets = st.sampled_from([1, 2, EMPTY])
    events, open_ = [], {}
    budget = max_calls
    while True:
        choices = [t for t in plans if t in open_ or (plans[t] and budget > 0)]
        if not choices:
            break
        t = draw(st.sampled_from(choices))
        if t in open_:
            if draw(st.integers(0, 9)) == 0 and not plans[t]:
                del open_[t]  # leave it pending
                plans[t] = []
                continue
            op = open_.pop(t)
            events.append(resp(t, op, UNIT if op == "push" else draw(rets)))
        else:
            item = plans[t].pop(0)
            budget -= 1
            op = "pop" if item == "pop" else "push"
            events.append(inv(t, op, None if op == "pop" else int(item[-1])))
            open_[t] = op
    return History(events)


@settings(max_examples=300, deadline=None)
@given(histories())
def test_checkers_match_oracle(h):
    from tracerefine.seq_spec import stack_spec

    spec = stack_spec()
    lin, sc = is_linearizable(h, spec), is_sequentially_consistent(h, spec)
    assert (lin.holds, lin.witness) == tuple(getattr(brute_force_check(h, spec, LIN), f) for f in ("holds", "witness"))
    assert (sc.holds, sc.witness) == tuple(getattr(brute_force_check(h, spec, SC), f) for f in ("holds", "witness"))
    if lin.holds:
        assert sc.holds
    for v in (lin, sc):
        if v.holds:
            assert legal(spec, v.witness)
