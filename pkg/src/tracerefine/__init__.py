"""Checking concurrent stack histories and client-observable refinement."""

from __future__ import annotations

from .checkers import (
    LIN,
    SC,
    Verdict,
    brute_force_check,
    check,
    is_linearizable,
    is_sequentially_consistent,
)
from .client import ClientProgram, ProgramError, parse_program, program_example1, program_sc2
from .explorer import BudgetExceeded, TraceSet, complete_histories, explore, final_states
from .history import EMPTY, UNIT, Event, History, HistoryError, completions, inv, resp, validate_history
from .machines import atomic_object, make_object, sc_oracle, treiber_stack
from .refinement import RefinementVerdict, contextual_refines, observational_refines, refines
from .seq_spec import legal, stack_spec

__all__ = [
    "EMPTY", "UNIT", "SC", "LIN",
    "Event", "History", "HistoryError", "inv", "resp", "validate_history", "completions",
    "stack_spec", "legal",
    "Verdict", "check", "is_linearizable", "is_sequentially_consistent", "brute_force_check",
    "treiber_stack", "atomic_object", "sc_oracle", "make_object",
    "ClientProgram", "ProgramError", "parse_program", "program_example1", "program_sc2",
    "TraceSet", "BudgetExceeded", "explore", "final_states", "complete_histories",
    "RefinementVerdict", "contextual_refines", "observational_refines", "refines",
]
