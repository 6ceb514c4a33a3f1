"""Exhaustive generators for small histories and small client programs.

Both generators quotient by symmetries that provably preserve the
properties being swept, so that the sweeps fit a desk-scale budget:

* histories: renaming the two threads, swapping the values 1 and 2, and
  commuting adjacent events of different threads that have the same kind
  (two invocations or two responses). None of these changes the per-thread
  order, the real-time order, or legality against the stack.
* programs: renaming the two threads and swapping the pushed values 1 and 2.

Pass ``reduce=False`` for the raw, unreduced enumeration.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterator, Sequence

from .client import Assign, Call, ClientProgram
from .history import EMPTY, INV, RESP, UNIT, Event, History, Value, value_sort_key

PENDING_RET = "pending"


def _swap(v, values):
    a, b = values
    return b if v == a else a if v == b else v


def call_labels(values: Sequence[int] = (1, 2)) -> list[tuple[str, Value | None, Value]]:
    """Complete call labels ``(op, arg, ret)`` over ``values``."""
    return [("push", v, UNIT) for v in values] + [("pop", None, r) for r in (*values, EMPTY)]


def pending_labels(values: Sequence[int] = (1, 2)) -> list[tuple[str, Value | None, str]]:
    return [("push", v, PENDING_RET) for v in values] + [("pop", None, PENDING_RET)]


def thread_sequences(k: int, values: Sequence[int] = (1, 2), pending: bool = True) -> list[tuple]:
    """Call sequences of length ``k`` for one thread; only the last call may be pending."""
    if k == 0:
        return [()]
    full = call_labels(values)
    out = [tuple(s) for s in itertools.product(full, repeat=k)]
    if pending:
        out += [tuple(s) + (p,) for s in itertools.product(full, repeat=k - 1) for p in pending_labels(values)]
    return out


def _thread_events(thread: int, seq: tuple) -> list[Event]:
    events = []
    for op, arg, ret in seq:
        events.append(Event(INV, thread, op, arg))
        if ret != PENDING_RET:
            events.append(Event(RESP, thread, op, ret))
    return events


@functools.lru_cache(maxsize=None)
def _merge_patterns(kinds_a: tuple[str, ...], kinds_b: tuple[str, ...], normal_form: bool) -> tuple:
    """Thread choices (0 or 1) for every merge of two event sequences.

    In normal form a thread-2 event is never directly followed by a
    thread-1 event of the same kind; that keeps one merge per commutation
    class.
    """
    out = []

    def rec(i: int, j: int, last: tuple[int, str] | None, acc: list[int]):
        if i == len(kinds_a) and j == len(kinds_b):
            out.append(tuple(acc))
            return
        if i < len(kinds_a) and not (normal_form and last == (1, kinds_a[i])):
            acc.append(0)
            rec(i + 1, j, (0, kinds_a[i]), acc)
            acc.pop()
        if j < len(kinds_b):
            acc.append(1)
            rec(i, j + 1, (1, kinds_b[j]), acc)
            acc.pop()

    rec(0, 0, None, [])
    return tuple(out)


def _interleavings(a: list[Event], b: list[Event], normal_form: bool) -> Iterator[list[Event]]:
    pattern_set = _merge_patterns(tuple(e.kind for e in a), tuple(e.kind for e in b), normal_form)
    for pattern in pattern_set:
        its = (iter(a), iter(b))
        yield [next(its[k]) for k in pattern]


def _seq_key(seq: tuple) -> tuple:
    return tuple(
        (op, -1 if arg is None else arg, (3, 0) if ret == PENDING_RET else value_sort_key(ret))
        for op, arg, ret in seq
    )


def _pair_key(a: tuple, b: tuple) -> tuple:
    return (len(a), _seq_key(a), len(b), _seq_key(b))


def _swap_seq(seq: tuple, values) -> tuple:
    return tuple(
        (op, None if arg is None else _swap(arg, values), ret if ret in (UNIT, EMPTY, PENDING_RET) else _swap(ret, values))
        for op, arg, ret in seq
    )


def generate_histories(
    max_ops: int = 6,
    values: Sequence[int] = (1, 2),
    pending: bool = True,
    reduce: bool = True,
) -> Iterator[History]:
    """Valid two-thread histories with at most ``max_ops`` calls."""
    seqs = {k: thread_sequences(k, values, pending) for k in range(max_ops + 1)}
    for na in range(max_ops + 1):
        for nb in range(max_ops + 1 - na):
            for a in seqs[na]:
                for b in seqs[nb]:
                    if reduce:
                        k = _pair_key(a, b)
                        sa, sb = _swap_seq(a, values), _swap_seq(b, values)
                        if k > min(_pair_key(b, a), _pair_key(sa, sb), _pair_key(sb, sa)):
                            continue
                    ea, eb = _thread_events(1, a), _thread_events(2, b)
                    for events in _interleavings(ea, eb, normal_form=reduce):
                        yield History(events)


# -- client programs ----------------------------------------------------------------

SHARED = (("x", 0), ("y", 0))


def statement_alphabet(values: Sequence[int] = (1, 2)) -> list[tuple]:
    """Statement templates; ``o`` is a thread-local register.

    Covers pushes, pops stored straight into shared variables, a pop into
    a local later copied out, a shared-to-shared copy and a constant write.
    """
    return (
        [("push", v) for v in values]
        + [("pop", "x"), ("pop", "y"), ("pop", "o"), ("copy", "x", "o"), ("copy", "x", "y"), ("const", "y", 1)]
    )


def _swap_template(t: tuple, values) -> tuple:
    return ("push", _swap(t[1], values)) if t[0] == "push" else t


def _valid_body(body: tuple) -> bool:
    seen_local = False
    for t in body:
        if t == ("pop", "o"):
            seen_local = True
        if t[0] == "copy" and t[2] == "o" and not seen_local:
            return False
    return True


def _statement(label: str, t: tuple, local: str):
    kind = t[0]
    t = tuple(local if x == "o" else x for x in t)
    if kind == "push":
        return Call(label, "push", t[1])
    if kind == "pop":
        return Call(label, "pop", None, t[1])
    return Assign(label, t[1], t[2])


def _build(bodies: Sequence[tuple]) -> ClientProgram:
    threads = []
    for k, body in enumerate(bodies):
        letter = "TU"[k]
        threads.append((k + 1, tuple(_statement(f"{letter}{i + 1}", t, f"o{k + 1}") for i, t in enumerate(body))))
    return ClientProgram(SHARED, tuple(threads))


def generate_programs(
    max_statements: int = 3,
    values: Sequence[int] = (1, 2),
    reduce: bool = True,
) -> Iterator[ClientProgram]:
    """Two-thread client programs with at most ``max_statements`` per thread."""
    alphabet = statement_alphabet(values)
    index = {t: i for i, t in enumerate(alphabet)}
    bodies = [
        body
        for n in range(max_statements + 1)
        for body in itertools.product(alphabet, repeat=n)
        if _valid_body(body)
    ]

    def key(a, b):
        return (len(a), [index[t] for t in a], len(b), [index[t] for t in b])

    for a in bodies:
        for b in bodies:
            if reduce:
                sa = tuple(_swap_template(t, values) for t in a)
                sb = tuple(_swap_template(t, values) for t in b)
                if key(a, b) > min(key(b, a), key(sa, sb), key(sb, sa)):
                    continue
            yield _build((a, b))
