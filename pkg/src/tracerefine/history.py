"""Invocation/response histories of concurrent objects.

A history is a finite sequence of events. Each thread alternates
invocation and response, so a response is matched positionally to the
last pending invocation of the same thread. Operation instances are
identified by the index of their invocation event.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union


class Special(enum.Enum):
    EMPTY = "empty"
    UNIT = "unit"

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return self.value.upper()


EMPTY = Special.EMPTY
UNIT = Special.UNIT

Value = Union[int, Special]

INV = "inv"
RESP = "resp"
PENDING = None


def value_sort_key(v: Value) -> tuple[int, int]:
    """Total order on values: integers first, then EMPTY, then UNIT."""
    if isinstance(v, Special):
        return (1, 0) if v is EMPTY else (2, 0)
    return (0, v)


def format_value(v: Value | None) -> str:
    if v is None:
        return "-"
    if isinstance(v, Special):
        return v.value
    return str(v)


class Event(NamedTuple):
    kind: str
    thread: int
    op: str
    value: Value | None = None

    def __str__(self) -> str:
        if self.kind == INV:
            arg = "" if self.value is None else format_value(self.value)
            return f"inv(T{self.thread},{self.op}{',' + arg if arg else ''})"
        return f"resp(T{self.thread},{self.op},{format_value(self.value)})"


def inv(thread: int, op: str, value: Value | None = None) -> Event:
    return Event(INV, thread, op, value)


def resp(thread: int, op: str, value: Value) -> Event:
    return Event(RESP, thread, op, value)


class OpCall(NamedTuple):
    """One operation call: an invocation and, if complete, its response."""

    op_instance: int
    thread: int
    op: str
    arg: Value | None
    ret: Value | None
    inv_index: int
    resp_index: int | None

    @property
    def pending(self) -> bool:
        return self.resp_index is None


@dataclass(frozen=True)
class Violation:
    index: int
    reason: str

    def __str__(self) -> str:
        return f"event {self.index}: {self.reason}"


class HistoryError(ValueError):
    pass


class History(tuple):
    """Immutable event sequence; a tuple subclass so it hashes and compares."""

    def __new__(cls, events: Iterable[Event] = ()) -> History:
        return super().__new__(cls, tuple(events))

    def __repr__(self) -> str:
        return "History<" + ", ".join(map(str, self)) + ">"

    @property
    def threads(self) -> list[int]:
        return sorted({e.thread for e in self})

    def calls(self) -> tuple[OpCall, ...]:
        """Pair responses with invocations, ordered by invocation; ``self`` must be valid."""
        cached = self.__dict__.get("_calls")
        if cached is not None:
            return cached
        open_: dict[int, int] = {}
        resp_at: dict[int, tuple[int, Value]] = {}
        for i, e in enumerate(self):
            if e.kind == INV:
                open_[e.thread] = i
            else:
                resp_at[open_.pop(e.thread)] = (i, e.value)
        out = []
        for i, e in enumerate(self):
            if e.kind == INV:
                r = resp_at.get(i)
                if r is None:
                    out.append(OpCall(i, e.thread, e.op, e.value, PENDING, i, None))
                else:
                    out.append(OpCall(i, e.thread, e.op, e.value, r[1], i, r[0]))
        cached = self.__dict__["_calls"] = tuple(out)
        return cached

    def is_complete(self) -> bool:
        return all(not c.pending for c in self.calls())

    def is_sequential(self) -> bool:
        if len(self) % 2:
            return False
        for a, b in zip(self[::2], self[1::2]):
            if a.kind != INV or b.kind != RESP or a.thread != b.thread or a.op != b.op:
                return False
        return True


def validate_history(h: Iterable[Event]) -> Violation | None:
    """Return ``None`` if ``h`` is well formed, else the first violation."""
    open_: dict[int, Event] = {}
    for i, e in enumerate(h):
        if e.kind == INV:
            if e.thread in open_:
                return Violation(i, f"thread {e.thread} already has a pending operation")
            if e.op == "push" and isinstance(e.value, Special):
                return Violation(i, f"reserved value {e.value.value} pushed")
            open_[e.thread] = e
        else:
            pending = open_.pop(e.thread, None)
            if pending is None:
                return Violation(i, f"response without invocation on thread {e.thread}")
            if pending.op != e.op:
                return Violation(i, f"response op {e.op} does not match invocation op {pending.op}")
    return None


def thread_projection(h: History, thread: int) -> History:
    return History(e for e in h if e.thread == thread)


def real_time_precedes(h: History, a: int, b: int) -> bool:
    """True iff call ``a`` responds before call ``b`` is invoked."""
    calls = {c.op_instance: c for c in h.calls()}
    for x in (a, b):
        if x not in calls:
            raise HistoryError(f"no such operation: {x}")
    ra = calls[a].resp_index
    return ra is not None and ra < calls[b].inv_index


def value_domain(h: History) -> list[Value]:
    """Push arguments occurring in ``h`` plus EMPTY and UNIT."""
    pushed = {e.value for e in h if e.kind == INV and e.op == "push" and e.value is not None}
    return sorted(pushed | {EMPTY, UNIT}, key=value_sort_key)


def _returns_for(call: OpCall, domain: list[Value]) -> list[Value]:
    if call.op == "push":
        return [UNIT]
    return [v for v in domain if v is not UNIT]


def completions(h: History, domain: Iterable[Value] | None = None) -> list[History]:
    """All completions of ``h``: each pending call is dropped or given a response.

    Results are ordered so that dropping comes before completing, and
    smaller return values come first. No duplicates.
    """
    if domain is None:
        cached = h.__dict__.get("_completions")
        if cached is None:
            cached = h.__dict__["_completions"] = tuple(_completions(h, value_domain(h)))
        return list(cached)
    return _completions(h, sorted(set(domain), key=value_sort_key))


def _completions(h: History, dom: list[Value]) -> list[History]:
    pending = [c for c in h.calls() if c.pending]
    if not pending:
        return [h]
    options = [[None] + _returns_for(c, dom) for c in pending]
    out = []
    for choice in itertools.product(*options):
        dropped = {c.inv_index for c, v in zip(pending, choice) if v is None}
        events = [e for i, e in enumerate(h) if i not in dropped]
        events += [resp(c.thread, c.op, v) for c, v in zip(pending, choice) if v is not None]
        out.append(History(events))
    return out


def sequential_history(calls: Iterable[tuple[int, str, Value | None, Value]]) -> History:
    """Build a sequential history from ``(thread, op, arg, ret)`` tuples."""
    events: list[Event] = []
    for t, op, arg, ret in calls:
        events += [inv(t, op, arg), resp(t, op, ret)]
    return History(events)


# -- JSON ---------------------------------------------------------------------

_FIELDS = {"kind", "thread", "op", "value"}


def value_to_json(v: Value | None) -> int | str | None:
    if isinstance(v, Special):
        return v.value
    return v


def value_from_json(raw: object, where: str) -> Value:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise HistoryError(f"{where}: field 'value' must be an integer, 'empty' or 'unit'")
    if isinstance(raw, int):
        return raw
    try:
        return Special(raw)
    except ValueError:
        raise HistoryError(f"{where}: unknown value {raw!r}") from None


def event_to_json(e: Event) -> dict:
    d: dict = {"kind": e.kind, "thread": e.thread, "op": e.op}
    if e.value is not None:
        d["value"] = value_to_json(e.value)
    return d


def history_to_json(h: Iterable[Event]) -> list[dict]:
    return [event_to_json(e) for e in h]


def history_from_json(data: object) -> History:
    """Parse the History JSON array; raises HistoryError with element/field context."""
    if not isinstance(data, list):
        raise HistoryError("history must be a JSON array")
    events = []
    for i, item in enumerate(data):
        where = f"element {i}"
        if not isinstance(item, dict):
            raise HistoryError(f"{where}: expected an object")
        unknown = set(item) - _FIELDS
        if unknown:
            raise HistoryError(f"{where}: unknown field(s) {sorted(unknown)}")
        for f in ("kind", "thread", "op"):
            if f not in item:
                raise HistoryError(f"{where}: missing field {f!r}")
        kind, thread, op = item["kind"], item["thread"], item["op"]
        if kind not in (INV, RESP):
            raise HistoryError(f"{where}: field 'kind' must be 'inv' or 'resp'")
        if isinstance(thread, bool) or not isinstance(thread, int):
            raise HistoryError(f"{where}: field 'thread' must be an integer")
        if op not in ("push", "pop"):
            raise HistoryError(f"{where}: field 'op' must be 'push' or 'pop'")
        raw = item.get("value")
        needs_value = kind == RESP or op == "push"
        if raw is None:
            if needs_value:
                raise HistoryError(f"{where}: missing field 'value'")
            value = None
        else:
            if not needs_value:
                raise HistoryError(f"{where}: pop invocation takes no value")
            value = value_from_json(raw, where)
        events.append(Event(kind, thread, op, value))
    return History(events)


def load_history(path: str) -> History:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise HistoryError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return history_from_json(data)
    except HistoryError as exc:
        raise HistoryError(f"{path}: {exc}") from None
