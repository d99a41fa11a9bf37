"""Pipeline orchestration: verify a file, format the verdict, run corpora.

A FAILED verdict reports the first violated claim in program order: the
goal is restricted to one claim at a time and solved in order, stopping
at the first satisfiable one.
"""

from __future__ import annotations

import shlex
import textwrap
from dataclasses import dataclass, field
from pathlib import Path

from minibmc.errors import InternalError, MiniCxxError, SourceLocation
from minibmc.gotoprog import emit_goto_text
from minibmc.layout import build_object_models, layout_text
from minibmc.lexer import lex
from minibmc.lower import lower
from minibmc.parser import parse
from minibmc.solver.core import solve
from minibmc.solver.encode import encode
from minibmc.solver.smt2 import emit_smt2
from minibmc.solver.trace import TraceStep, extract_trace
from minibmc.symex import SymexOptions, ssa_text, symex
from minibmc.templates import instantiate_program
from minibmc.typecheck import typecheck
from minibmc.util import Deadline, VerificationTimeout

DEFAULT_TIMEOUT = 900.0


@dataclass
class RunOptions:
    unwind: int = 10
    memory_leak_check: bool = False
    unwinding_assertions: bool = False
    int_width: int = 32
    show_goto: bool = False
    show_ssa: bool = False
    show_layout: bool = False
    show_instances: bool = False
    emit_smt2_path: str = ""
    solver: str = "builtin"     # builtin | none
    timeout: float | None = DEFAULT_TIMEOUT
    vsids: bool = False

    def __post_init__(self):
        if self.unwind < 1:
            raise ValueError("unwind bound must be at least 1")
        if self.int_width not in (8, 16, 32):
            raise ValueError("int width must be 8, 16 or 32")
        if self.solver not in ("builtin", "none"):
            raise ValueError("solver must be `builtin` or `none`")


@dataclass
class ViolatedProperty:
    loc: SourceLocation
    property_class: str
    comment: str
    condition: str


@dataclass
class Verdict:
    status: str                               # SUCCESSFUL | FAILED | ERROR | SKIPPED
    violated: ViolatedProperty | None = None
    trace: list[TraceStep] = field(default_factory=list)
    message: str = ""                         # ERROR diagnostic
    artifacts: dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"SUCCESSFUL": 0, "SKIPPED": 0, "FAILED": 1, "ERROR": 2}[self.status]


def verify_source(source: str, filename: str = "<input>",
                  opts: RunOptions | None = None) -> Verdict:
    opts = opts or RunOptions()
    deadline = Deadline(opts.timeout)
    artifacts: dict[str, str] = {}
    try:
        tokens = lex(source, filename)
        ast = parse(tokens, filename, opts.int_width)
        program, instances = instantiate_program(ast, int_width=opts.int_width)
        if opts.show_instances:
            artifacts["instances"] = "".join(f"{x}\n" for x in instances)
        tp = typecheck(program, opts.int_width)
        layouts = build_object_models(tp)
        if opts.show_layout:
            artifacts["layout"] = layout_text(layouts)
        goto = lower(tp, layouts)
        if opts.show_goto:
            artifacts["goto"] = emit_goto_text(goto)
        sopts = SymexOptions(unwind=opts.unwind,
                             unwinding_assertions=opts.unwinding_assertions,
                             memory_leak_check=opts.memory_leak_check,
                             int_width=opts.int_width)
        bundle = symex(goto, tp, layouts, sopts, deadline)
        if opts.show_ssa:
            artifacts["ssa"] = ssa_text(bundle)
        if opts.emit_smt2_path:
            Path(opts.emit_smt2_path).write_text(emit_smt2(encode(bundle)),
                                                 encoding="utf-8")
        if opts.solver == "none":
            return Verdict("SKIPPED", artifacts=artifacts)
        for i, claim in enumerate(bundle.claims):
            deadline.check()
            model = solve(encode(bundle, i), vsids=opts.vsids, deadline=deadline)
            if model is None:
                continue
            trace = extract_trace(model, bundle, claim)
            violated = ViolatedProperty(claim.loc, claim.property_class,
                                        claim.comment, claim.display)
            return Verdict("FAILED", violated=violated, trace=trace,
                           artifacts=artifacts)
        return Verdict("SUCCESSFUL", artifacts=artifacts)
    except MiniCxxError as ex:
        return Verdict("ERROR", message=str(ex), artifacts=artifacts)
    except VerificationTimeout:
        return Verdict("ERROR", message=f"timeout after {opts.timeout}s",
                       artifacts=artifacts)
    except RecursionError:
        return Verdict("ERROR", message="expression nesting too deep",
                       artifacts=artifacts)
    except InternalError as ex:
        return Verdict("ERROR", message=f"internal error: {ex}",
                       artifacts=artifacts)


def verify_file(path: str | Path, opts: RunOptions | None = None) -> Verdict:
    p = Path(path)
    try:
        source = p.read_text(encoding="utf-8")
    except OSError as ex:
        return Verdict("ERROR", message=f"cannot read {p}: {ex.strerror}")
    except UnicodeDecodeError:
        return Verdict("ERROR", message=f"{p} is not valid UTF-8")
    return verify_source(source, str(p), opts)


def format_verdict(verdict: Verdict) -> str:
    if verdict.status == "SUCCESSFUL":
        return "VERIFICATION SUCCESSFUL\n"
    if verdict.status == "ERROR":
        return f"ERROR: {verdict.message}\n"
    if verdict.status == "SKIPPED":
        return ""
    v = verdict.violated
    lines = ["Violated property:"]
    lines.append(f"  file {v.loc.file} line {v.loc.line} column {v.loc.column} "
                 f"function {v.loc.function}")
    block = [v.property_class]
    if v.comment and v.comment != v.property_class:
        block.append(v.comment)
    if v.condition and v.condition not in (v.comment, v.property_class):
        block.append(v.condition)
    for b in block:
        lines.extend(textwrap.wrap(b, width=80, initial_indent="  ",
                                   subsequent_indent="   ") or ["  "])
    lines.append("")
    lines.append("VERIFICATION FAILED")
    return "\n".join(lines) + "\n"


# --- corpus runner -----------------------------------------------------------

@dataclass
class CorpusCase:
    path: Path
    expected_status: str
    expected_property: str = ""
    flags: list[str] = field(default_factory=list)


@dataclass
class CorpusResult:
    case: CorpusCase
    passed: bool
    detail: str = ""


@dataclass
class CorpusSummary:
    results: list[CorpusResult]
    text: str

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def parse_directives(source: str, path: Path) -> CorpusCase:
    """Read `// VERDICT:`, `// PROPERTY:`, `// FLAGS:` from leading comments."""
    status, prop, flags = "", "", []
    for line in source.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if not stripped.startswith("//"):
            break
        body = stripped[2:].strip()
        if body.startswith("VERDICT:"):
            status = body[len("VERDICT:"):].strip()
        elif body.startswith("PROPERTY:"):
            prop = body[len("PROPERTY:"):].strip()
        elif body.startswith("FLAGS:"):
            flags = shlex.split(body[len("FLAGS:"):])
    if status not in ("SUCCESSFUL", "FAILED", "ERROR"):
        raise ValueError(f"{path}: missing or malformed VERDICT directive")
    return CorpusCase(path, status, prop, flags)


def apply_flags(opts: RunOptions, flags: list[str]) -> RunOptions:
    out = RunOptions(**vars(opts))
    i = 0
    while i < len(flags):
        f = flags[i]
        if f == "--unwind":
            out.unwind = int(flags[i + 1])
            i += 2
        elif f == "--memory-leak-check":
            out.memory_leak_check = True
            i += 1
        elif f == "--unwinding-assertions":
            out.unwinding_assertions = True
            i += 1
        elif f == "--int-width":
            out.int_width = int(flags[i + 1])
            i += 2
        elif f == "--timeout":
            out.timeout = float(flags[i + 1])
            i += 2
        else:
            raise ValueError(f"unknown corpus flag {f!r}")
    return out


def run_corpus(directory: str | Path, opts: RunOptions | None = None) -> CorpusSummary:
    opts = opts or RunOptions()
    root = Path(directory)
    files = sorted(root.rglob("*.cpp"))
    results: list[CorpusResult] = []
    lines: list[str] = []
    if not files:
        lines.append(f"warning: no corpus cases found under {root}")
    for path in files:
        rel = path.relative_to(root)
        try:
            case = parse_directives(path.read_text(encoding="utf-8"), path)
            case_opts = apply_flags(opts, case.flags)
        except ValueError as ex:
            results.append(CorpusResult(
                CorpusCase(path, "ERROR"), False, f"harness error: {ex}"))
            lines.append(f"FAIL {rel}: harness error: {ex}")
            continue
        verdict = verify_file(path, case_opts)
        ok = verdict.status == case.expected_status
        detail = f"expected {case.expected_status}, got {verdict.status}"
        if ok and case.expected_property:
            got = verdict.violated.property_class if verdict.violated else ""
            ok = got == case.expected_property
            detail = f"expected property {case.expected_property!r}, got {got!r}"
        results.append(CorpusResult(case, ok, "" if ok else detail))
        lines.append(f"PASS {rel}" if ok else f"FAIL {rel}: {detail}")
    total = len(results)
    passed = sum(1 for r in results if r.passed)
    rate = 100.0 if total == 0 else 100.0 * passed / total
    lines.append(f"{passed}/{total} passed ({rate:.0f}%)")
    return CorpusSummary(results, "\n".join(lines) + "\n")
