"""Command line: ``tracerefine {check,explore,refine,repro}``.

Exit codes: 0 when the check or refinement holds (or exploration
succeeds, or a repro matches), 1 when a verdict is negative, 2 on usage,
parse or budget errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .checkers import LIN, MODES, check_file
from .client import ProgramError, load_program
from .explorer import DEFAULT_BUDGET, BudgetExceeded, ExplorationError, count_states, explore
from .explorer import format_trace, format_valuation
from .history import HistoryError, value_to_json
from .machines import SELECTORS, MachineError, make_object
from .refinement import FINAL, TRACE, refines
from .repro import SCENARIOS
from .seq_spec import SPECS

EXIT_HOLDS, EXIT_REFUTED, EXIT_ERROR = 0, 1, 2


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    spec = SPECS[args.spec]()
    v = check_file(args.history, spec, args.mode)
    text = f"{args.mode}: {'holds' if v.holds else 'does not hold'} ({v.note})\n"
    if v.witness is not None:
        text += "witness: " + (" ".join(map(str, v.witness)) or "(empty history)") + "\n"
    _emit(args, v.to_json(), text)
    return EXIT_HOLDS if v.holds else EXIT_REFUTED


def cmd_explore(args) -> int:
    p = load_program(args.program)
    o = make_object(args.object, p.push_values())
    ts = explore(p, o, args.budget)
    st = count_states(p, o, args.budget)
    payload = {
        "variables": list(p.shared_names),
        "traces": [[[value_to_json(v) for v in s] for s in t] for t in ts.sorted_traces()],
        "finals": [[value_to_json(v) for v in s] for s in ts.sorted_finals()],
        "stats": {"states": st.states, "executions": st.executions, "traces": st.traces,
                  "max_depth": st.max_depth},
    }
    lines = [f"{args.program} with {args.object}: variables ({','.join(p.shared_names)})"]
    lines.append(f"{len(ts.traces)} traces:")
    lines += ["  " + format_trace(t) for t in ts.sorted_traces()]
    lines.append("finals: " + ", ".join(map(format_valuation, ts.sorted_finals())))
    lines.append(
        f"states {st.states}, executions {st.executions}, traces {st.traces}, max depth {st.max_depth}"
    )
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_HOLDS


def cmd_refine(args) -> int:
    p = load_program(args.program)
    pushes = p.push_values()
    v = refines(p, make_object(args.abstract, pushes), make_object(args.concrete, pushes),
                args.mode, budget=args.budget)
    text = f"{args.program}: {args.abstract} <= {args.concrete} ({args.mode}): "
    text += "holds\n" if v.holds else "fails\n"
    if not v.holds:
        text += f"counterexample over ({','.join(p.shared_names)}): {v.counterexample_text()}\n"
    _emit(args, v.to_json(), text)
    return EXIT_HOLDS if v.holds else EXIT_REFUTED


def cmd_repro(args) -> int:
    r = SCENARIOS[args.example](args.budget)
    _emit(args, r.to_json(), r.text())
    return EXIT_HOLDS if r.reproduced else EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="explorer state budget (default %(default)s)")

    parser = argparse.ArgumentParser(prog="tracerefine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check a history file")
    p.add_argument("--history", required=True, help="history JSON file")
    p.add_argument("--spec", choices=sorted(SPECS), default="stack")
    p.add_argument("--mode", choices=MODES, default=LIN)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("explore", parents=[common], help="enumerate observable traces")
    p.add_argument("--program", required=True, help="builtin name (example1, sc2) or DSL file")
    p.add_argument("--object", choices=SELECTORS, default="atomic-stack")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("refine", parents=[common], help="decide refinement for one program")
    p.add_argument("--program", required=True, help="builtin name (example1, sc2) or DSL file")
    p.add_argument("--abstract", choices=SELECTORS, default="atomic-stack")
    p.add_argument("--concrete", choices=SELECTORS, required=True)
    p.add_argument("--mode", choices=(TRACE, FINAL), default=TRACE)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("repro", parents=[common], help="reproduce a canned example")
    p.add_argument("example", choices=list(SCENARIOS))
    p.set_defaults(func=cmd_repro)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_HOLDS
    try:
        return args.func(args)
    except (HistoryError, ProgramError, MachineError, BudgetExceeded, ExplorationError, OSError) as exc:
        sys.stderr.write(f"tracerefine: error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
