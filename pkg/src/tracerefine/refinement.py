"""Contextual trace refinement and final-state (observational) refinement.

``contextual_refines(p, abstract, concrete)`` holds iff every observable
trace of ``p[concrete]`` is also a trace of ``p[abstract]``. On failure the
counterexample is the smallest offending trace, by length and then
lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .client import ClientProgram
from .explorer import (
    DEFAULT_BUDGET,
    TraceSet,
    explore,
    format_trace,
    format_valuation,
    trace_sort_key,
    valuation_sort_key,
)
from .history import value_to_json
from .machines import ObjectMachine

TRACE = "trace"
FINAL = "final"


@dataclass(frozen=True)
class RefinementVerdict:
    holds: bool
    counterexample: tuple | None
    mode: str
    variables: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.holds != (self.counterexample is None):
            raise ValueError("a counterexample is present exactly when refinement fails")

    def to_json(self) -> dict:
        cex = None
        if self.counterexample is not None:
            states = self.counterexample if self.mode == TRACE else (self.counterexample,)
            cex = [[value_to_json(v) for v in s] for s in states]
        return {"holds": self.holds, "mode": self.mode, "counterexample": cex}

    def counterexample_text(self) -> str:
        if self.counterexample is None:
            return ""
        if self.mode == TRACE:
            return format_trace(self.counterexample)
        return "final " + format_valuation(self.counterexample)

    def describe(self) -> str:
        return "holds" if self.holds else "fails: " + self.counterexample_text()


def trace_inclusion(concrete: TraceSet, abstract: TraceSet) -> RefinementVerdict:
    missing = concrete.traces - abstract.traces
    cex = min(missing, key=trace_sort_key) if missing else None
    return RefinementVerdict(not missing, cex, TRACE, concrete.variables)


def final_inclusion(concrete: TraceSet, abstract: TraceSet) -> RefinementVerdict:
    missing = concrete.finals - abstract.finals
    cex = min(missing, key=valuation_sort_key) if missing else None
    return RefinementVerdict(not missing, cex, FINAL, concrete.variables)


def contextual_refines(
    p: ClientProgram,
    abstract_o: ObjectMachine,
    concrete_o: ObjectMachine,
    budget: int = DEFAULT_BUDGET,
    reverse: bool = False,
) -> RefinementVerdict:
    return trace_inclusion(explore(p, concrete_o, budget, reverse), explore(p, abstract_o, budget, reverse))


def observational_refines(
    p: ClientProgram,
    abstract_o: ObjectMachine,
    concrete_o: ObjectMachine,
    budget: int = DEFAULT_BUDGET,
    reverse: bool = False,
) -> RefinementVerdict:
    return final_inclusion(explore(p, concrete_o, budget, reverse), explore(p, abstract_o, budget, reverse))


def refines(p, abstract_o, concrete_o, mode: str = TRACE, **kw) -> RefinementVerdict:
    if mode == TRACE:
        return contextual_refines(p, abstract_o, concrete_o, **kw)
    if mode == FINAL:
        return observational_refines(p, abstract_o, concrete_o, **kw)
    raise ValueError(f"unknown refinement mode {mode!r}")


def quantified_note(results: Iterable[tuple[str, RefinementVerdict]]) -> str:
    """Per-program summary table.

    Holding for each listed program is evidence for refinement over all
    clients, not a proof of it.
    """
    rows = [(name, v.mode, "holds" if v.holds else "FAILS", v.counterexample_text())
            for name, v in results]
    header = ("program", "mode", "verdict", "counterexample")
    widths = [max([len(header[i])] + [len(r[i]) for r in rows]) for i in range(4)]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    lines = [fmt.format(*header).rstrip(), fmt.format(*("-" * w for w in widths)).rstrip()]
    lines += [fmt.format(*r).rstrip() for r in rows]
    return "\n".join(lines) + "\n"
