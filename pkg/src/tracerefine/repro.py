"""Canned reproductions of the two stack examples.

Each scenario returns a ``Reproduction``: whether the expected outcome was
observed, a text report, and a JSON-ready payload.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .checkers import is_linearizable, is_sequentially_consistent
from .client import BUILTIN_PROGRAMS
from .explorer import DEFAULT_BUDGET, explore, format_trace, format_valuation
from .history import UNIT, History, history_to_json, inv, resp, value_to_json
from .machines import make_object
from .refinement import FINAL, TRACE, final_inclusion, trace_inclusion
from .seq_spec import stack_spec

# Observable trace of sc2 when thread 1 runs to completion before thread 2
# and the pops return 1 then 2.
SC2_TRACE = ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 2, 1))


def sc2_sequential_history(first_pop: int = 1, second_pop: int = 2) -> History:
    """Object history of sc2's schedule T1..T4 then U1..U3."""
    return History([
        inv(1, "push", 1), resp(1, "push", UNIT),
        inv(1, "push", 2), resp(1, "push", UNIT),
        inv(1, "pop"), resp(1, "pop", first_pop),
        inv(2, "pop"), resp(2, "pop", second_pop),
    ])


@dataclass
class Reproduction:
    name: str
    reproduced: bool
    lines: list[str] = field(default_factory=list)
    payload: dict = field(default_factory=dict)

    def text(self) -> str:
        status = "REPRODUCED" if self.reproduced else "NOT REPRODUCED"
        return "\n".join([f"repro {self.name}: {status}"] + ["  " + ln for ln in self.lines]) + "\n"

    def to_json(self) -> dict:
        return {"example": self.name, "reproduced": self.reproduced, **self.payload}


def _traces_json(ts) -> list:
    return [[[value_to_json(v) for v in s] for s in t] for t in ts.sorted_traces()]


def _refinement(program: str, concrete: str, budget: int):
    p = BUILTIN_PROGRAMS[program]()
    pushes = p.push_values()
    abstract_ts = explore(p, make_object("atomic-stack", pushes), budget)
    concrete_ts = explore(p, make_object(concrete, pushes), budget)
    return p, abstract_ts, concrete_ts


def repro_example1(budget: int = DEFAULT_BUDGET) -> Reproduction:
    p, a, c = _refinement("example1", "treiber", budget)
    v = trace_inclusion(c, a)
    r = Reproduction("example1", v.holds)
    r.lines.append(f"variables ({','.join(p.shared_names)})")
    r.lines.append(f"atomic-stack: {len(a.traces)} traces, finals {', '.join(map(format_valuation, a.sorted_finals()))}")
    r.lines.append(f"treiber:      {len(c.traces)} traces")
    r.lines += ["  " + format_trace(t) for t in c.sorted_traces()]
    r.lines.append(f"atomic-stack <= treiber (trace): {v.describe()}")
    r.payload = {"refinement": v.to_json(), "traces": _traces_json(c)}
    return r


def repro_sc2_counterexample(budget: int = DEFAULT_BUDGET) -> Reproduction:
    p, a, c = _refinement("sc2", "sc-stack", budget)
    v = trace_inclusion(c, a)
    ok = not v.holds and v.counterexample == SC2_TRACE and SC2_TRACE not in a.traces
    r = Reproduction("sc2-counterexample", ok)
    r.lines.append(f"variables ({','.join(p.shared_names)})")
    r.lines.append(f"atomic-stack <= sc-stack (trace): {v.describe()}")
    r.lines.append(f"trace {format_trace(SC2_TRACE)} in atomic-stack traces: {SC2_TRACE in a.traces}")
    r.lines.append(f"trace {format_trace(SC2_TRACE)} in sc-stack traces: {SC2_TRACE in c.traces}")
    r.payload = {"refinement": v.to_json()}
    return r


def repro_sc2_treiber(budget: int = DEFAULT_BUDGET) -> Reproduction:
    p, a, c = _refinement("sc2", "treiber", budget)
    v = trace_inclusion(c, a)
    r = Reproduction("sc2-treiber", v.holds)
    r.lines.append(f"variables ({','.join(p.shared_names)})")
    r.lines.append(f"treiber: {len(c.traces)} traces")
    r.lines += ["  " + format_trace(t) for t in c.sorted_traces()]
    r.lines.append(f"atomic-stack <= treiber (trace): {v.describe()}")
    r.payload = {"refinement": v.to_json(), "traces": _traces_json(c)}
    return r


def repro_lin_vs_sc(budget: int = DEFAULT_BUDGET) -> Reproduction:
    spec = stack_spec()
    h = sc2_sequential_history()
    lin = is_linearizable(h, spec)
    sc = is_sequentially_consistent(h, spec)
    p, a, c = _refinement("sc2", "sc-stack", budget)
    tv, fv = trace_inclusion(c, a), final_inclusion(c, a)
    ok = sc.holds and not lin.holds and fv.holds and not tv.holds
    r = Reproduction("lin-vs-sc", ok)
    r.lines.append("history: " + " ".join(map(str, h)))
    r.lines.append(f"linearizable: {lin.holds}")
    r.lines.append(f"sequentially consistent: {sc.holds}, witness " + " ".join(map(str, sc.witness or ())))
    r.lines.append(f"sc2, atomic-stack <= sc-stack ({TRACE}): {tv.describe()}")
    r.lines.append(f"sc2, atomic-stack <= sc-stack ({FINAL}): {fv.describe()}")
    r.payload = {
        "history": history_to_json(h),
        "lin": lin.to_json(),
        "sc": sc.to_json(),
        "trace": tv.to_json(),
        "final": fv.to_json(),
    }
    return r


SCENARIOS = {
    "example1": repro_example1,
    "sc2-counterexample": repro_sc2_counterexample,
    "sc2-treiber": repro_sc2_treiber,
    "lin-vs-sc": repro_lin_vs_sc,
}
