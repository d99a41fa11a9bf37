"""Command-line entry point.

    minibmc <file.cpp> [options]     verify one file
    minibmc --corpus <dir>           run a regression corpus

Verdicts go to standard output; diagnostics to standard error.  Exit code
0 = SUCCESSFUL, 1 = FAILED, 2 = ERROR.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from minibmc.driver import RunOptions, format_verdict, run_corpus, verify_file


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="minibmc",
        description="Bounded model checker for MiniCxx programs")
    p.add_argument("file", nargs="?", help="MiniCxx source file to verify")
    p.add_argument("--corpus", metavar="DIR",
                   help="run every .cpp case under DIR and report a pass rate")
    p.add_argument("--unwind", type=int, default=10, metavar="K",
                   help="loop/recursion unwinding bound (default 10)")
    p.add_argument("--memory-leak-check", action="store_true",
                   help="assert that every dynamic object is freed at exit")
    p.add_argument("--unwinding-assertions", action="store_true",
                   help="assert that the unwinding bound is never exceeded")
    p.add_argument("--int-width", type=int, default=32, choices=(8, 16, 32),
                   help="bit width of int (default 32)")
    p.add_argument("--emit-smt2", metavar="PATH", default="",
                   help="write the SMT-LIB2 encoding of all claims to PATH")
    p.add_argument("--solver", choices=("builtin", "none"), default="builtin",
                   help="decision procedure ('none' skips solving)")
    p.add_argument("--show-goto", action="store_true",
                   help="print the GOTO program")
    p.add_argument("--show-ssa", action="store_true",
                   help="print the SSA equations and claims")
    p.add_argument("--show-layout", action="store_true",
                   help="print object models and vtables")
    p.add_argument("--show-instances", action="store_true",
                   help="print instantiated template names")
    p.add_argument("--timeout", type=float, default=900.0, metavar="SEC",
                   help="wall-clock limit per verification task (default 900)")
    return p


def options_from_args(args) -> RunOptions:
    return RunOptions(
        unwind=args.unwind,
        memory_leak_check=args.memory_leak_check,
        unwinding_assertions=args.unwinding_assertions,
        int_width=args.int_width,
        show_goto=args.show_goto,
        show_ssa=args.show_ssa,
        show_layout=args.show_layout,
        show_instances=args.show_instances,
        emit_smt2_path=args.emit_smt2,
        solver=args.solver,
        timeout=args.timeout,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    if bool(args.file) == bool(args.corpus):
        print("error: give exactly one of <file> or --corpus DIR", file=sys.stderr)
        return 2
    try:
        opts = options_from_args(args)
    except ValueError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    if args.corpus:
        if not Path(args.corpus).is_dir():
            print(f"error: {args.corpus} is not a directory", file=sys.stderr)
            return 2
        summary = run_corpus(args.corpus, opts)
        sys.stdout.write(summary.text)
        return 0 if summary.all_passed else 1
    verdict = verify_file(args.file, opts)
    for name in ("instances", "layout", "goto", "ssa"):
        if name in verdict.artifacts:
            sys.stdout.write(verdict.artifacts[name])
    if verdict.status == "ERROR":
        print(f"error: {verdict.message}", file=sys.stderr)
        return 2
    sys.stdout.write(format_verdict(verdict))
    return verdict.exit_code


if __name__ == "__main__":
    sys.exit(main())
