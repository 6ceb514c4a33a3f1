"""Client programs: threads of atomic statements over shared variables and one stack ``s``.

DSL::

    init x=0, y=0, z=0;
    thread 1 { s.push(1); s.push(2); out1 := s.pop(); x := out1; }
    thread 2 { z := 1; out2 := s.pop(); y := out2; }

Variables under ``init`` are shared and observable. Any other assignment
target is a local of the thread that assigns it. Statements may carry a
label (``T1: s.push(1);``); missing labels are assigned in order, using
``T`` for the first thread, ``U`` for the second, and so on.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Union

from .history import Value

OBJECT_NAME = "s"
OPS = {"push": True, "pop": False}  # op -> takes an argument
LABEL_LETTERS = "TUVWXYZABCDEFGHIJKLMNOPQRS"


@dataclass(frozen=True)
class Assign:
    label: str
    target: str
    source: Union[int, str]


@dataclass(frozen=True)
class Call:
    label: str
    op: str
    arg: int | None = None
    target: str | None = None


Statement = Union[Assign, Call]


class ProgramError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line, self.col = line, col


@dataclass(frozen=True)
class ClientProgram:
    shared: tuple[tuple[str, int], ...]
    threads: tuple[tuple[int, tuple[Statement, ...]], ...]

    @property
    def shared_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.shared)

    @property
    def initial(self) -> tuple[Value, ...]:
        return tuple(v for _, v in self.shared)

    def locals_of(self, thread: int) -> tuple[str, ...]:
        names = set(self.shared_names)
        out: list[str] = []
        for stmt in dict(self.threads)[thread]:
            tgt = stmt.target
            if tgt is not None and tgt not in names and tgt not in out:
                out.append(tgt)
        return tuple(out)

    def push_values(self) -> set[int]:
        return {
            s.arg
            for _, body in self.threads
            for s in body
            if isinstance(s, Call) and s.op == "push" and s.arg is not None
        }

    def render(self) -> str:
        lines = []
        if self.shared:
            lines.append("init " + ", ".join(f"{n}={v}" for n, v in self.shared) + ";")
        for tid, body in self.threads:
            lines.append(f"thread {tid} {{")
            for stmt in body:
                lines.append(f"  {stmt.label}: {_render_stmt(stmt)};")
            lines.append("}")
        return "\n".join(lines) + "\n"


def _render_stmt(stmt: Statement) -> str:
    if isinstance(stmt, Assign):
        return f"{stmt.target} := {stmt.source}"
    call = f"{OBJECT_NAME}.{stmt.op}({'' if stmt.arg is None else stmt.arg})"
    return call if stmt.target is None else f"{stmt.target} := {call}"


def check_program(p: ClientProgram) -> None:
    """Raise ProgramError if ``p`` breaks a structural invariant."""
    shared = set(p.shared_names)
    if len(shared) != len(p.shared):
        raise ProgramError("duplicate shared variable")
    tids = [t for t, _ in p.threads]
    if len(set(tids)) != len(tids):
        raise ProgramError("duplicate thread id")
    owner: dict[str, int] = {}
    for tid, body in p.threads:
        labels = [s.label for s in body]
        if len(set(labels)) != len(labels):
            raise ProgramError(f"duplicate statement label in thread {tid}")
        known = set(shared)
        for s in body:
            if isinstance(s, Call):
                if s.op not in OPS:
                    raise ProgramError(f"unknown operation {s.op!r}")
                if OPS[s.op] != (s.arg is not None):
                    raise ProgramError(f"bad argument for {s.op} ({s.label})")
                if s.op == "push" and s.target is not None:
                    raise ProgramError(f"push returns no value ({s.label})")
            elif isinstance(s.source, str) and s.source not in known:
                if owner.get(s.source, tid) != tid:
                    raise ProgramError(f"local {s.source!r} of thread {owner[s.source]} used in thread {tid}")
                raise ProgramError(f"undeclared variable {s.source!r} in thread {tid} ({s.label})")
            if s.target is not None and s.target not in shared:
                if owner.setdefault(s.target, tid) != tid:
                    raise ProgramError(f"local {s.target!r} of thread {owner[s.target]} used in thread {tid}")
                known.add(s.target)


def program_example1() -> ClientProgram:
    return ClientProgram(
        shared=(("x", 0), ("y", 0), ("z", 0)),
        threads=(
            (1, (Call("T1", "push", 1), Call("T2", "push", 2), Call("T3", "pop", None, "x"))),
            (2, (Call("U1", "pop", None, "y"), Assign("U2", "z", "x"))),
        ),
    )


def program_sc2() -> ClientProgram:
    return ClientProgram(
        shared=(("x", 0), ("y", 0), ("z", 0)),
        threads=(
            (
                1,
                (
                    Call("T1", "push", 1),
                    Call("T2", "push", 2),
                    Call("T3", "pop", None, "out1"),
                    Assign("T4", "x", "out1"),
                ),
            ),
            (2, (Assign("U1", "z", 1), Call("U2", "pop", None, "out2"), Assign("U3", "y", "out2"))),
        ),
    )


BUILTIN_PROGRAMS = {"example1": program_example1, "sc2": program_sc2}


# -- parsing ----------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+|#[^\n]*)|(?P<nl>\n)|(?P<assign>:=)|(?P<int>-?\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[;,{}().=:])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ProgramError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ProgramError:
        tok = tok or self.tok
        return ProgramError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def take(self, kind: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            what = {"ident": "identifier", "int": "integer"}[kind]
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def program(self) -> ClientProgram:
        shared: list[tuple[str, int]] = []
        if self.accept("init"):
            while True:
                name = self.take("ident")
                if name.text in dict(shared):
                    raise self.error(f"duplicate shared variable {name.text!r}", name)
                self.expect("=")
                shared.append((name.text, int(self.take("int").text)))
                if not self.accept(","):
                    break
            self.expect(";")
        threads: list[tuple[int, tuple[Statement, ...], list[_Tok]]] = []
        while self.tok.kind != "eof":
            kw = self.tok
            if kw.text != "thread":
                raise self.error(f"expected 'thread', found {kw.text!r}")
            self.i += 1
            tid_tok = self.take("int")
            tid = int(tid_tok.text)
            if any(t == tid for t, _, _ in threads):
                raise self.error(f"duplicate thread {tid}", tid_tok)
            self.expect("{")
            body, where = [], []
            while not self.accept("}"):
                if self.tok.kind == "eof":
                    raise self.error("unterminated thread body")
                where.append(self.tok)
                body.append(self.statement(len(threads), len(body)))
            threads.append((tid, tuple(body), where))
        self._resolve(shared, threads)
        return ClientProgram(tuple(shared), tuple((t, b) for t, b, _ in threads))

    def statement(self, thread_index: int, index: int) -> Statement:
        label = None
        if self.tok.kind == "ident" and self.peek().text == ":":
            label = self.take("ident").text
            self.expect(":")
        if label is None:
            label = f"{LABEL_LETTERS[thread_index % len(LABEL_LETTERS)]}{index + 1}"
        if self.tok.text == OBJECT_NAME and self.peek().text == ".":
            stmt: Statement = self.call(label, None)
        else:
            target = self.take("ident").text
            self.expect(":=")
            if self.tok.text == OBJECT_NAME and self.peek().text == ".":
                stmt = self.call(label, target)
            elif self.tok.kind == "int":
                stmt = Assign(label, target, int(self.take("int").text))
            else:
                stmt = Assign(label, target, self.take("ident").text)
        self.expect(";")
        return stmt

    def call(self, label: str, target: str | None) -> Call:
        self.take("ident")
        self.expect(".")
        op_tok = self.take("ident")
        if op_tok.text not in OPS:
            raise self.error(f"call to unknown op {op_tok.text!r}", op_tok)
        self.expect("(")
        arg = None
        if OPS[op_tok.text]:
            arg = int(self.take("int").text)
        self.expect(")")
        if op_tok.text == "push" and target is not None:
            raise self.error("push returns no value", op_tok)
        return Call(label, op_tok.text, arg, target)

    def _resolve(self, shared, threads) -> None:
        shared_names = {n for n, _ in shared}
        owner: dict[str, int] = {}
        for tid, body, where in threads:
            labels = [s.label for s in body]
            for k, lab in enumerate(labels):
                if lab in labels[:k]:
                    raise self.error(f"duplicate label {lab!r} in thread {tid}", where[k])
            known = set(shared_names)
            for s, tok in zip(body, where):
                if isinstance(s, Assign) and isinstance(s.source, str):
                    src = s.source
                    if src not in known:
                        if src in owner and owner[src] != tid:
                            raise self.error(f"local {src!r} of thread {owner[src]} used in thread {tid}", tok)
                        raise self.error(f"undeclared variable {src!r}", tok)
                if s.target is not None and s.target not in shared_names:
                    if owner.setdefault(s.target, tid) != tid:
                        raise self.error(
                            f"local {s.target!r} of thread {owner[s.target]} used in thread {tid}", tok
                        )
                    known.add(s.target)


def parse_program(text: str) -> ClientProgram:
    return _Parser(text).program()


def load_program(name_or_path: str) -> ClientProgram:
    """A builtin program name (``example1``, ``sc2``) or a DSL file path."""
    if name_or_path in BUILTIN_PROGRAMS and not os.path.exists(name_or_path):
        return BUILTIN_PROGRAMS[name_or_path]()
    try:
        with open(name_or_path) as f:
            text = f.read()
    except OSError as exc:
        raise ProgramError(
            f"no builtin program or readable file {name_or_path!r} "
            f"(builtins: {', '.join(BUILTIN_PROGRAMS)}): {exc.strerror}"
        ) from None
    return parse_program(text)
