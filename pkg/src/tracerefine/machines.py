"""Concurrent objects as labeled-step state machines.

Every machine is an immutable value. ``invoke`` installs a frame for a
thread, ``step`` runs that thread's next atomic step (returning every
successor), and ``try_return`` hands back the result once the frame has
reached a return label.

Three machines ship:

* ``treiber_stack()`` -- the lock-free stack, one atomic step per label
  H1..H6 (push) and P1..P7 (pop).
* ``atomic_object(spec)`` -- each operation takes effect in a single step.
* ``sc_oracle(spec, domain)`` -- each operation returns an arbitrary value
  from ``domain``; an execution is accepted at termination only if its
  history is sequentially consistent w.r.t. ``spec``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from typing import ClassVar, Hashable, Iterable, Mapping

from .checkers import is_sequentially_consistent
from .history import EMPTY, INV, RESP, UNIT, Event, History, Special, Value, value_sort_key
from .seq_spec import SeqObjectSpec, stack_spec


class MachineError(RuntimeError):
    pass


class _NotReady:
    def __repr__(self) -> str:
        return "NOT_READY"

    def __bool__(self) -> bool:
        return False


NOT_READY = _NotReady()

PUSH_LABELS = ("H1", "H2", "H3", "H4", "H5", "H6")
POP_LABELS = ("P1", "P2", "P3", "P4", "P5", "P6", "P7")
RETURN_LABELS = frozenset({"H6", "P3", "P7", "ret"})


@dataclass(frozen=True)
class Frame:
    """An in-flight operation: program counter plus local registers."""

    op: str
    arg: Value | None
    pc: str
    n: int | None = None
    ss: int | None = None
    ssn: int | None = None
    lv: Value | None = None


@dataclass(frozen=True)
class ObjectMachine:
    frames: Mapping[int, Frame] = field(default_factory=dict)
    history: tuple[Event, ...] = ()

    selector: ClassVar[str] = ""
    ops: ClassVar[tuple[str, ...]] = ("push", "pop")

    # -- public protocol ------------------------------------------------------

    def invoke(self, thread: int, op: str, arg: Value | None = None) -> ObjectMachine:
        if thread in self.frames:
            raise MachineError(f"operation pending on thread {thread}")
        if op not in self.ops:
            raise MachineError(f"unknown operation {op!r}")
        if op == "push" and (arg is None or isinstance(arg, Special)):
            raise MachineError(f"reserved value: cannot push {arg!r}")
        frame = self._start(op, arg)
        return replace(
            self,
            frames={**self.frames, thread: frame},
            history=self.history + self._on_invoke(thread, op, arg),
        )

    def step(self, thread: int) -> list[ObjectMachine]:
        frame = self.frames.get(thread)
        if frame is None:
            raise MachineError(f"no active operation on thread {thread}")
        if frame.pc in RETURN_LABELS:
            return []
        return self._step(thread, frame)

    def ready(self, thread: int) -> bool:
        frame = self.frames.get(thread)
        return frame is not None and frame.pc in RETURN_LABELS

    def try_return(self, thread: int):
        """``(value, machine)`` once the frame is at a return label, else NOT_READY."""
        frame = self.frames.get(thread)
        if frame is None:
            raise MachineError(f"no active operation on thread {thread}")
        if frame.pc not in RETURN_LABELS:
            return NOT_READY
        frames = dict(self.frames)
        del frames[thread]
        m = replace(self, frames=frames, history=self.history + self._on_return(thread, frame))
        return frame.lv, m

    def accepts(self) -> bool:
        """Whether a terminated execution ending here is kept."""
        return True

    def key(self) -> Hashable:
        raise NotImplementedError

    # -- hooks ------------------------------------------------------------------

    def _start(self, op: str, arg: Value | None) -> Frame:
        raise NotImplementedError

    def _step(self, thread: int, frame: Frame) -> list[ObjectMachine]:
        raise NotImplementedError

    def _on_invoke(self, thread: int, op: str, arg: Value | None) -> tuple[Event, ...]:
        return (Event(INV, thread, op, arg),)

    def _on_return(self, thread: int, frame: Frame) -> tuple[Event, ...]:
        return (Event(RESP, thread, frame.op, frame.lv),)

    def _with_frame(self, thread: int, frame: Frame, **changes) -> ObjectMachine:
        return replace(self, frames={**self.frames, thread: frame}, **changes)


# -- Treiber stack --------------------------------------------------------------


@dataclass(frozen=True)
class TreiberStack(ObjectMachine):
    """Heap of nodes ``id -> (val, next)``; ids come from a counter and are never reused."""

    head: int | None = None
    nodes: Mapping[int, tuple[Value | None, int | None]] = field(default_factory=dict)
    next_id: int = 0

    selector: ClassVar[str] = "treiber"

    def _start(self, op: str, arg: Value | None) -> Frame:
        return Frame(op, arg, "H1" if op == "push" else "P1")

    def _step(self, thread: int, f: Frame) -> list[ObjectMachine]:
        pc = f.pc
        if pc == "H1":
            nid = self.next_id
            nodes = {**self.nodes, nid: (None, None)}
            return [self._with_frame(thread, replace(f, pc="H2", n=nid), nodes=nodes, next_id=nid + 1)]
        if pc == "H2":
            _, nxt = self.nodes[f.n]
            return [self._with_frame(thread, replace(f, pc="H3"), nodes={**self.nodes, f.n: (f.arg, nxt)})]
        if pc == "H3":
            return [self._with_frame(thread, replace(f, pc="H4", ss=self.head))]
        if pc == "H4":
            val, _ = self.nodes[f.n]
            return [self._with_frame(thread, replace(f, pc="H5"), nodes={**self.nodes, f.n: (val, f.ss)})]
        if pc == "H5":
            if self.head == f.ss:
                return [self._with_frame(thread, replace(f, pc="H6", lv=UNIT), head=f.n)]
            return [self._with_frame(thread, replace(f, pc="H3", ss=None))]
        if pc == "P1":
            return [self._with_frame(thread, replace(f, pc="P2", ss=self.head))]
        if pc == "P2":
            if f.ss is None:
                return [self._with_frame(thread, replace(f, pc="P3", lv=EMPTY))]
            return [self._with_frame(thread, replace(f, pc="P4"))]
        if pc == "P4":
            return [self._with_frame(thread, replace(f, pc="P5", ssn=self.nodes[f.ss][1]))]
        if pc == "P5":
            return [self._with_frame(thread, replace(f, pc="P6", lv=self.nodes[f.ss][0]))]
        if pc == "P6":
            if self.head == f.ss:
                return [self._with_frame(thread, replace(f, pc="P7"), head=f.ssn)]
            return [self._with_frame(thread, replace(f, pc="P1", ss=None, ssn=None, lv=None))]
        raise MachineError(f"bad program counter {pc!r}")

    def chain(self) -> list[int]:
        """Node ids from Head following next pointers."""
        out, ref = [], self.head
        while ref is not None:
            if ref in out:
                raise MachineError("cycle in Head chain")
            out.append(ref)
            ref = self.nodes[ref][1]
        return out

    def contents(self) -> list[Value | None]:
        return [self.nodes[r][0] for r in self.chain()]

    def key(self) -> Hashable:
        # Rename nodes in discovery order: Head chain, then frame registers.
        ren: dict[int, int] = {}
        order: list[int] = []

        def visit(ref: int | None) -> None:
            while ref is not None and ref not in ren:
                ren[ref] = len(order)
                order.append(ref)
                ref = self.nodes[ref][1]

        visit(self.head)
        threads = sorted(self.frames)
        for t in threads:
            f = self.frames[t]
            visit(f.n)
            visit(f.ss)
            visit(f.ssn)
        heap = tuple((self.nodes[r][0], ren.get(self.nodes[r][1])) for r in order)
        frames = tuple(
            (t, f.op, f.arg, f.pc, ren.get(f.n), ren.get(f.ss), ren.get(f.ssn), f.lv)
            for t in threads
            for f in (self.frames[t],)
        )
        return ("treiber", ren.get(self.head), heap, frames)


def treiber_stack(first_node_id: int = 0) -> TreiberStack:
    """Empty Treiber stack (Head = null)."""
    return TreiberStack(next_id=first_node_id)


# -- atomic wrapper --------------------------------------------------------------


def _frames_key(frames: Mapping[int, Frame]) -> tuple:
    return tuple((t, f.op, f.arg, f.pc, f.lv) for t, f in sorted(frames.items()))


@dataclass(frozen=True)
class AtomicObject(ObjectMachine):
    """Invocation, effect and response happen together in one ``step``."""

    spec: SeqObjectSpec = field(default_factory=stack_spec)
    state: Hashable = ()

    selector: ClassVar[str] = "atomic-stack"

    def _start(self, op: str, arg: Value | None) -> Frame:
        return Frame(op, arg, "call")

    def _on_invoke(self, thread, op, arg):
        return ()

    def _on_return(self, thread, frame):
        return ()

    def _step(self, thread: int, f: Frame) -> list[ObjectMachine]:
        events = (Event(INV, thread, f.op, f.arg),)
        return [
            self._with_frame(
                thread,
                replace(f, pc="ret", lv=ret),
                state=nxt,
                history=self.history + events + (Event(RESP, thread, f.op, ret),),
            )
            for nxt, ret in self.spec.transition(self.state, f.op, f.arg)
        ]

    def key(self) -> Hashable:
        return ("atomic", self.spec.name, self.state, _frames_key(self.frames))


def atomic_object(spec: SeqObjectSpec | None = None) -> AtomicObject:
    spec = spec or stack_spec()
    return AtomicObject(spec=spec, state=spec.initial)


# -- most general sequentially consistent object ---------------------------------


@functools.lru_cache(maxsize=65536)
def _sc_accepts(spec: SeqObjectSpec, per_thread: tuple) -> bool:
    # SC ignores cross-thread order, so any arrangement of the per-thread logs will do.
    events = []
    for thread, log in per_thread:
        for op, arg, ret in log:
            events += [Event(INV, thread, op, arg), Event(RESP, thread, op, ret)]
    return is_sequentially_consistent(History(events), spec).holds


@dataclass(frozen=True)
class SCOracle(ObjectMachine):
    """Chooses any return value; keeps only sequentially consistent runs."""

    spec: SeqObjectSpec = field(default_factory=stack_spec)
    domain: tuple[Value, ...] = (EMPTY,)
    log: tuple[tuple[int, str, Value | None, Value], ...] = ()

    selector: ClassVar[str] = "sc-stack"

    def _start(self, op: str, arg: Value | None) -> Frame:
        return Frame(op, arg, "call")

    def _on_invoke(self, thread, op, arg):
        return ()

    def _on_return(self, thread, frame):
        return ()

    def _choices(self, f: Frame) -> tuple[Value, ...]:
        # Operations with an argument (push) return UNIT.
        if f.arg is not None:
            return (UNIT,)
        return tuple(v for v in self.domain if v is not UNIT)

    def _step(self, thread: int, f: Frame) -> list[ObjectMachine]:
        return [
            self._with_frame(
                thread,
                replace(f, pc="ret", lv=ret),
                log=self.log + ((thread, f.op, f.arg, ret),),
                history=self.history + (Event(INV, thread, f.op, f.arg), Event(RESP, thread, f.op, ret)),
            )
            for ret in self._choices(f)
        ]

    def per_thread_log(self) -> tuple:
        threads = sorted({t for t, *_ in self.log})
        return tuple(
            (t, tuple((op, arg, ret) for u, op, arg, ret in self.log if u == t)) for t in threads
        )

    def accepts(self) -> bool:
        return _sc_accepts(self.spec, self.per_thread_log())

    def key(self) -> Hashable:
        return ("sc", self.spec.name, self.per_thread_log(), _frames_key(self.frames))


def sc_oracle(spec: SeqObjectSpec | None = None, domain: Iterable[Value] = (EMPTY,)) -> SCOracle:
    dom = tuple(sorted(set(domain) | {EMPTY}, key=value_sort_key))
    return SCOracle(spec=spec or stack_spec(), domain=dom)


SELECTORS = ("treiber", "atomic-stack", "sc-stack")


def make_object(selector: str, push_values: Iterable[Value] = ()) -> ObjectMachine:
    """Build a machine from its CLI selector; ``push_values`` sizes the SC oracle's domain."""
    if selector == "treiber":
        return treiber_stack()
    if selector == "atomic-stack":
        return atomic_object(stack_spec())
    if selector == "sc-stack":
        return sc_oracle(stack_spec(), set(push_values) | {EMPTY})
    raise MachineError(f"unknown object selector {selector!r}; expected one of {', '.join(SELECTORS)}")
