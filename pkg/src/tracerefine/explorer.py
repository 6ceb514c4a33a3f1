"""Exhaustive interleaving exploration of a client program composed with an object.

Each client statement is one step. An object call expands into an
invocation step, the object's internal steps, and a final step that takes
the response and writes the result variable. Only the shared (``init``)
variables are observed; traces are stutter-reduced, so object-internal
steps never show up in them.

The search is a depth-first traversal that memoizes, per canonical global
state, the set of stutter-reduced trace suffixes reachable from it. The
result is a set and does not depend on the order successors are visited.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Hashable, Iterable

from .client import Assign, ClientProgram, check_program
from .history import History, Value, format_value, value_sort_key
from .machines import ObjectMachine

DEFAULT_BUDGET = 1_000_000

Valuation = tuple  # tuple[Value, ...] aligned with ClientProgram.shared_names
Trace = tuple  # tuple[Valuation, ...]


class BudgetExceeded(RuntimeError):
    def __init__(self, states: int, budget: int):
        super().__init__(f"budget exceeded: visited {states} states (budget {budget})")
        self.states = states
        self.budget = budget


class ExplorationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceSet:
    variables: tuple[str, ...]
    traces: frozenset
    finals: frozenset

    def __contains__(self, trace) -> bool:
        return tuple(map(tuple, trace)) in self.traces

    def sorted_traces(self) -> list[Trace]:
        return sorted(self.traces, key=trace_sort_key)

    def sorted_finals(self) -> list[Valuation]:
        return sorted(self.finals, key=valuation_sort_key)


@dataclass(frozen=True)
class ExploreStats:
    states: int
    executions: int
    traces: int
    max_depth: int


@dataclass(frozen=True)
class _Node:
    traces: frozenset
    paths: int
    depth: int
    histories: frozenset | None


@dataclass(frozen=True)
class _ThreadState:
    pc: int
    locals: tuple
    waiting: bool


def valuation_sort_key(v: Iterable[Value]) -> tuple:
    return tuple(value_sort_key(x) for x in v)


def trace_sort_key(t: Trace) -> tuple:
    return (len(t), tuple(valuation_sort_key(v) for v in t))


def stutter_reduce(seq: Iterable[Valuation]) -> Trace:
    out: list = []
    for v in seq:
        v = tuple(v)
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)


def format_valuation(v: Valuation) -> str:
    return "(" + ",".join(format_value(x) for x in v) + ")"


def format_trace(t: Trace) -> str:
    return "<" + ", ".join(format_valuation(v) for v in t) + ">"


class _Explorer:
    def __init__(
        self,
        program: ClientProgram,
        machine: ObjectMachine,
        budget: int = DEFAULT_BUDGET,
        reverse: bool = False,
        histories: bool = False,
    ):
        check_program(program)
        self.program = program
        self.machine = machine
        self.budget = budget
        self.reverse = reverse
        self.want_histories = histories
        self.shared_index = {n: i for i, n in enumerate(program.shared_names)}
        self.locals = [program.locals_of(t) for t, _ in program.threads]
        self.memo: dict[Hashable, _Node] = {}
        self.active: set[Hashable] = set()

    def run(self) -> _Node:
        threads = tuple(_ThreadState(0, (None,) * len(ls), False) for ls in self.locals)
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 20_000))
        try:
            return self._visit(self.program.initial, threads, self.machine)
        finally:
            sys.setrecursionlimit(old)

    # -- client semantics -------------------------------------------------------------

    def _read(self, k: int, threads, shared, name):
        if name in self.shared_index:
            return shared[self.shared_index[name]]
        return threads[k].locals[self.locals[k].index(name)]

    def _write(self, k: int, shared, ts: _ThreadState, name, value):
        if name is None:
            return shared, ts.locals
        if name in self.shared_index:
            s = list(shared)
            s[self.shared_index[name]] = value
            return tuple(s), ts.locals
        ls = list(ts.locals)
        ls[self.locals[k].index(name)] = value
        return shared, tuple(ls)

    def _successors(self, shared, threads, m: ObjectMachine):
        out = []
        for k, (tid, body) in enumerate(self.program.threads):
            ts = threads[k]
            if ts.waiting:
                stmt = body[ts.pc]
                if m.ready(tid):
                    value, m2 = m.try_return(tid)
                    sh, ls = self._write(k, shared, ts, stmt.target, value)
                    nts = _ThreadState(ts.pc + 1, ls, False)
                    out.append((sh, _replace(threads, k, nts), m2))
                else:
                    for m2 in m.step(tid):
                        out.append((shared, threads, m2))
            elif ts.pc < len(body):
                stmt = body[ts.pc]
                if isinstance(stmt, Assign):
                    src = stmt.source
                    value = src if isinstance(src, int) else self._read(k, threads, shared, src)
                    sh, ls = self._write(k, shared, ts, stmt.target, value)
                    out.append((sh, _replace(threads, k, _ThreadState(ts.pc + 1, ls, False)), m))
                else:
                    m2 = m.invoke(tid, stmt.op, stmt.arg)
                    out.append((shared, _replace(threads, k, _ThreadState(ts.pc, ts.locals, True)), m2))
        if self.reverse:
            out.reverse()
        return out

    # -- search -------------------------------------------------------------------------

    def _visit(self, shared, threads, m: ObjectMachine) -> _Node:
        key = (shared, threads, m.key())
        node = self.memo.get(key)
        if node is not None:
            return node
        if key in self.active:
            raise ExplorationError("cycle in state graph: execution may not terminate")
        if len(self.memo) + len(self.active) >= self.budget:
            raise BudgetExceeded(len(self.memo) + len(self.active), self.budget)
        self.active.add(key)
        succ = self._successors(shared, threads, m)
        if not succ:
            if any(m.frames.values()) or any(ts.waiting for ts in threads):
                raise ExplorationError("deadlock: pending operation cannot progress")
            ok = m.accepts()
            node = _Node(
                frozenset({(shared,)}) if ok else frozenset(),
                1 if ok else 0,
                0,
                (frozenset({()}) if ok else frozenset()) if self.want_histories else None,
            )
        else:
            traces: set = set()
            hists: set | None = set() if self.want_histories else None
            paths = depth = 0
            for sh, th, m2 in succ:
                child = self._visit(sh, th, m2)
                paths += child.paths
                depth = max(depth, child.depth + 1)
                for t in child.traces:
                    traces.add(t if t[0] == shared else (shared,) + t)
                if hists is not None:
                    emitted = m2.history[len(m.history):]
                    hists.update(emitted + h for h in child.histories)
            node = _Node(frozenset(traces), paths, depth, None if hists is None else frozenset(hists))
        self.active.discard(key)
        self.memo[key] = node
        return node


def _replace(threads: tuple, k: int, ts: _ThreadState) -> tuple:
    return threads[:k] + (ts,) + threads[k + 1:]


def explore(
    p: ClientProgram, o: ObjectMachine, budget: int = DEFAULT_BUDGET, reverse: bool = False
) -> TraceSet:
    """All stutter-reduced observable traces of terminated executions of ``p[o]``."""
    root = _Explorer(p, o, budget, reverse).run()
    return TraceSet(p.shared_names, root.traces, frozenset(t[-1] for t in root.traces))


def final_states(
    p: ClientProgram, o: ObjectMachine, budget: int = DEFAULT_BUDGET, reverse: bool = False
) -> frozenset:
    return explore(p, o, budget, reverse).finals


def count_states(
    p: ClientProgram, o: ObjectMachine, budget: int = DEFAULT_BUDGET, reverse: bool = False
) -> ExploreStats:
    ex = _Explorer(p, o, budget, reverse)
    root = ex.run()
    return ExploreStats(len(ex.memo), root.paths, len(root.traces), root.depth)


def complete_histories(
    p: ClientProgram, o: ObjectMachine, budget: int = DEFAULT_BUDGET
) -> frozenset[History]:
    """Object histories emitted by the kept terminated executions of ``p[o]``."""
    root = _Explorer(p, o, budget, histories=True).run()
    return frozenset(History(h) for h in root.histories)

