"""Sequential consistency and linearizability checking of histories.

The search extends a partial witness one operation at a time, trying
candidates in invocation order, and memoizes failed
``(committed set, abstract state)`` pairs. The first witness found is
therefore the lexicographically least by invocation index.
"""

from __future__ import annotations

import functools
import itertools
import operator
from dataclasses import dataclass
from typing import Hashable

from .history import (
    History,
    HistoryError,
    OpCall,
    completions,
    history_to_json,
    load_history,
    sequential_history,
    validate_history,
)
from .seq_spec import SeqObjectSpec, legal

SC = "sc"
LIN = "lin"
MODES = (SC, LIN)

ORACLE_BOUND = 10


class OracleBoundError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: History | None
    note: str

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "witness": None if self.witness is None else history_to_json(self.witness),
            "note": self.note,
        }


def _require_valid(h: History) -> None:
    v = validate_history(h)
    if v is not None:
        raise HistoryError(f"invalid history: {v}")


def _order_constraints(calls: list[OpCall], real_time: bool) -> list[int]:
    """Bitmask per call of the calls that must be committed before it."""
    masks = []
    for i, c in enumerate(calls):
        m = 0
        for j, d in enumerate(calls):
            if j == i:
                continue
            same_thread_before = d.thread == c.thread and d.inv_index < c.inv_index
            rt_before = real_time and d.resp_index is not None and d.resp_index < c.inv_index
            if same_thread_before or rt_before:
                m |= 1 << j
        masks.append(m)
    return masks


def _search(h: History, spec: SeqObjectSpec, real_time: bool) -> list[OpCall] | None:
    calls = h.calls()
    n = len(calls)
    full = (1 << n) - 1
    cands = [(1 << i, m, c.op, c.arg, c.ret) for i, (c, m) in enumerate(zip(calls, _order_constraints(calls, real_time)))]
    transition = spec.transition
    dead: set[tuple[int, Hashable]] = set()

    def extend(mask: int, state: Hashable) -> list[int] | None:
        if mask == full:
            return []
        if (mask, state) in dead:
            return None
        for i, (bit, before, op, arg, want) in enumerate(cands):
            if mask & bit or before & ~mask:
                continue
            for nxt, ret in transition(state, op, arg):
                if ret == want:
                    rest = extend(mask | bit, nxt)
                    if rest is not None:
                        rest.append(i)
                        return rest
        dead.add((mask, state))
        return None

    order = extend(0, spec.initial)
    return None if order is None else [calls[i] for i in reversed(order)]


def _as_witness(calls: list[OpCall]) -> History:
    return sequential_history((c.thread, c.op, c.arg, c.ret) for c in calls)


def _check(h: History, spec: SeqObjectSpec, real_time: bool) -> Verdict:
    _require_valid(h)
    name = "linearizable" if real_time else "sequentially consistent"
    for comp in completions(h):
        found = _search(comp, spec, real_time)
        if found is not None:
            return Verdict(True, _as_witness(found), f"{name} w.r.t. {spec.name}")
    order = "program and real-time order" if real_time else "program order"
    return Verdict(False, None, f"no legal {spec.name} ordering preserves {order}")


def is_sequentially_consistent(h: History, spec: SeqObjectSpec) -> Verdict:
    return _check(h, spec, real_time=False)


def is_linearizable(h: History, spec: SeqObjectSpec) -> Verdict:
    return _check(h, spec, real_time=True)


def check(h: History, spec: SeqObjectSpec, mode: str) -> Verdict:
    if mode == SC:
        return is_sequentially_consistent(h, spec)
    if mode == LIN:
        return is_linearizable(h, spec)
    raise ValueError(f"unknown mode {mode!r}")


@functools.lru_cache(maxsize=1 << 18)
def _legal_sequence(spec: SeqObjectSpec, labels: tuple) -> bool:
    return legal(spec, sequential_history((0, op, arg, ret) for op, arg, ret in labels))


@functools.lru_cache(maxsize=4096)
def _program_order_interleavings(per_thread: tuple[tuple[int, ...], ...]) -> list[tuple[int, ...]]:
    """Every permutation of the calls that keeps each thread's own order, sorted."""
    out = []
    n = sum(map(len, per_thread))
    # Assign positions thread by thread; a thread's calls fill its positions in order.
    def place(k: int, free: tuple[int, ...], slots: list[int]):
        if k == len(per_thread):
            out.append(tuple(slots))
            return
        q = per_thread[k]
        for chosen in itertools.combinations(free, len(q)):
            for pos, call in zip(chosen, q):
                slots[pos] = call
            rest = tuple(p for p in free if p not in chosen)
            place(k + 1, rest, slots)

    place(0, tuple(range(n)), [0] * n)
    out.sort()
    return out


@functools.lru_cache(maxsize=1 << 16)
def _admissible_orders(per_thread: tuple, real_time: frozenset) -> list[tuple[int, ...]]:
    """Program-order interleavings that also respect the real-time pairs ``(a, b)``."""
    out = []
    for perm in _program_order_interleavings(per_thread):
        pos = {i: p for p, i in enumerate(perm)}
        if not any(pos[a] > pos[b] for a, b in real_time):
            out.append(perm)
    return out


def brute_force_check(h: History, spec: SeqObjectSpec, mode: str) -> Verdict:
    """Reference check by exhaustive enumeration.

    For every completion, enumerate the permutations of its calls that keep
    per-thread order, drop those violating real-time order (LIN), and replay
    each survivor against ``spec``. No pruning, no shared search code.
    Candidates are produced in lexicographic order of invocation index.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    _require_valid(h)
    n_ops = sum(1 for e in h if e.kind == "inv")
    if n_ops > ORACLE_BOUND:
        raise OracleBoundError(f"oracle bound: {n_ops} operations > {ORACLE_BOUND}")
    for comp in completions(h):
        calls = comp.calls()
        threads = sorted({c.thread for c in calls})
        per_thread = tuple(tuple(i for i, c in enumerate(calls) if c.thread == t) for t in threads)
        rt = frozenset(
            (a, b)
            for a, ca in enumerate(calls)
            for b, cb in enumerate(calls)
            if mode == LIN and ca.resp_index < cb.inv_index
        )
        labels = [(c.op, c.arg, c.ret) for c in calls] + [None]
        for perm in _admissible_orders(per_thread, rt):
            # two trailing Nones keep itemgetter returning a tuple for short perms
            if _legal_sequence(spec, operator.itemgetter(*perm, -1, -1)(labels)[:-2]):
                witness = sequential_history(
                    (calls[i].thread, calls[i].op, calls[i].arg, calls[i].ret) for i in perm
                )
                return Verdict(True, witness, f"brute force ({mode}): witness found")
    return Verdict(False, None, f"brute force ({mode}): no witness")


def check_file(path: str, spec: SeqObjectSpec, mode: str) -> Verdict:
    return check(load_history(path), spec, mode)
