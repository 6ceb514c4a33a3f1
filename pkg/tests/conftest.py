from __future__ import annotations

import contextlib
import time

import pytest

from tracerefine.history import UNIT, History, inv, resp
from tracerefine.seq_spec import stack_spec


@pytest.fixture
def stack():
    return stack_spec()


def sc2_schedule_history(first_pop=1, second_pop=2) -> History:
    """T1..T4 then U1..U3 of the sc2 client, as object events."""
    return History([
        inv(1, "push", 1), resp(1, "push", UNIT),
        inv(1, "push", 2), resp(1, "push", UNIT),
        inv(1, "pop"), resp(1, "pop", first_pop),
        inv(2, "pop"), resp(2, "pop", second_pop),
    ])


# -- acceptance reporting -------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str, limit_s: float | None = None):
    """Record a pass/fail line for one acceptance criterion, with its wall time."""
    info: dict = {}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        ACCEPTANCE[number] = (False, title, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        raise
    elapsed = time.perf_counter() - t0
    detail = f"{elapsed:.2f}s" + (f" (limit {limit_s:g}s)" if limit_s else "")
    if info.get("detail"):
        detail += "; " + info["detail"]
    ok = limit_s is None or elapsed < limit_s
    ACCEPTANCE[number] = (ok, title, detail)
    assert ok, f"criterion {number} took {elapsed:.1f}s, limit {limit_s}s"


def _line(number: int) -> str:
    ok, title, detail = ACCEPTANCE[number]
    return f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} [{detail}]"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(_line(n))
