from __future__ import annotations

import pytest

from tracerefine.client import BUILTIN_PROGRAMS, program_sc2
from tracerefine.explorer import TraceSet, explore
from tracerefine.history import EMPTY
from tracerefine.machines import SELECTORS, make_object
from tracerefine.refinement import (
    FINAL,
    TRACE,
    RefinementVerdict,
    contextual_refines,
    final_inclusion,
    observational_refines,
    quantified_note,
    refines,
    trace_inclusion,
)

SC2_TRACE = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 2, 1))


def objects(p, *selectors):
    return [make_object(s, p.push_values()) for s in selectors]


def test_sc2_sc_stack_counterexample():
    p = program_sc2()
    v = contextual_refines(p, *objects(p, "atomic-stack", "sc-stack"))
    assert not v.holds and v.counterexample == SC2_TRACE
    assert v.to_json() == {"holds": False, "mode": TRACE, "counterexample": [list(s) for s in SC2_TRACE]}


def test_counterexample_is_valid():
    p = program_sc2()
    a, c = objects(p, "atomic-stack", "sc-stack")
    v = contextual_refines(p, a, c)
    assert v.counterexample in explore(p, c) and v.counterexample not in explore(p, a)


def test_sc2_treiber_holds():
    p = program_sc2()
    assert contextual_refines(p, *objects(p, "atomic-stack", "treiber")).holds


def test_final_mode_contrast():
    p = program_sc2()
    a, c = objects(p, "atomic-stack", "sc-stack")
    assert observational_refines(p, a, c).holds
    assert not contextual_refines(p, a, c).holds


@pytest.mark.parametrize("name", sorted(BUILTIN_PROGRAMS))
@pytest.mark.parametrize("selector", SELECTORS)
def test_reflexive(name, selector):
    p = BUILTIN_PROGRAMS[name]()
    (o,) = objects(p, selector)
    assert contextual_refines(p, o, o).holds
    assert observational_refines(p, o, o).holds


@pytest.mark.parametrize("name", sorted(BUILTIN_PROGRAMS))
@pytest.mark.parametrize("concrete", SELECTORS)
def test_trace_implies_final(name, concrete):
    p = BUILTIN_PROGRAMS[name]()
    a, c = objects(p, "atomic-stack", concrete)
    if refines(p, a, c, TRACE).holds:
        assert refines(p, a, c, FINAL).holds


def test_smallest_counterexample_order():
    conc = TraceSet(("x",), frozenset({((0,), (2,)), ((0,), (1,)), ((0,), (EMPTY,)), ((0,), (1,), (3,))}),
                    frozenset())
    abst = TraceSet(("x",), frozenset(), frozenset())
    assert trace_inclusion(conc, abst).counterexample == ((0,), (1,))
    conc2 = TraceSet(("x",), frozenset(), frozenset({(EMPTY,), (5,)}))
    assert final_inclusion(conc2, abst).counterexample == (5,)


def test_verdict_invariant():
    with pytest.raises(ValueError):
        RefinementVerdict(True, ((0,),), TRACE)
    with pytest.raises(ValueError):
        RefinementVerdict(False, None, TRACE)


def test_unknown_mode():
    p = program_sc2()
    with pytest.raises(ValueError):
        refines(p, *objects(p, "atomic-stack", "treiber"), mode="prefix")


class TestNote:
    def test_two_rows(self):
        ok = RefinementVerdict(True, None, TRACE)
        lines = quantified_note([("a", ok), ("b", ok)]).splitlines()
        assert len(lines) == 4 and lines[2].startswith("a") and lines[3].startswith("b")

    def test_empty(self):
        assert len(quantified_note([]).splitlines()) == 2

    def test_flags_failure(self):
        bad = RefinementVerdict(False, SC2_TRACE, TRACE)
        text = quantified_note([("sc2", bad)])
        assert "FAILS" in text and "<(0,0,0), (1,0,0), (1,0,1), (1,2,1)>" in text
