"""HTTP verification service wrapping the core pipeline.

POST /verify takes MiniCxx source text plus options and returns the
verdict, the violated property, the counterexample trace, and any
requested artifacts (GOTO listing, SSA, layouts, template instances).
"""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from minibmc.driver import RunOptions, Verdict, format_verdict, verify_source

app = FastAPI(title="minibmc", description="MiniCxx bounded model checker",
              version="0.1.0")


class VerifyOptions(BaseModel):
    unwind: int = Field(default=10, ge=1)
    memory_leak_check: bool = False
    unwinding_assertions: bool = False
    int_width: int = Field(default=32)
    show_goto: bool = False
    show_ssa: bool = False
    show_layout: bool = False
    show_instances: bool = False
    timeout: float | None = Field(default=60.0, gt=0)


class VerifyRequest(BaseModel):
    source: str
    filename: str = "input.cpp"
    options: VerifyOptions = VerifyOptions()


class ViolatedPropertyModel(BaseModel):
    file: str
    line: int
    column: int
    function: str
    property_class: str
    comment: str
    condition: str


class TraceStepModel(BaseModel):
    file: str
    line: int
    function: str
    symbol: str
    value: str
    kind: str


class VerifyResponse(BaseModel):
    status: str
    exit_code: int
    output: str
    error: str = ""
    violated_property: ViolatedPropertyModel | None = None
    trace: list[TraceStepModel] = []
    artifacts: dict[str, str] = {}


def _to_response(verdict: Verdict) -> VerifyResponse:
    violated = None
    if verdict.violated is not None:
        v = verdict.violated
        violated = ViolatedPropertyModel(
            file=v.loc.file, line=v.loc.line, column=v.loc.column,
            function=v.loc.function, property_class=v.property_class,
            comment=v.comment, condition=v.condition)
    trace = [
        TraceStepModel(file=s.loc.file, line=s.loc.line, function=s.loc.function,
                       symbol=s.symbol, value=s.value, kind=s.kind)
        for s in verdict.trace if not s.hidden
    ]
    return VerifyResponse(
        status=verdict.status, exit_code=verdict.exit_code,
        output=format_verdict(verdict), error=verdict.message,
        violated_property=violated, trace=trace, artifacts=verdict.artifacts)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/verify", response_model=VerifyResponse)
def verify(request: VerifyRequest) -> VerifyResponse:
    o = request.options
    try:
        opts = RunOptions(
            unwind=o.unwind, memory_leak_check=o.memory_leak_check,
            unwinding_assertions=o.unwinding_assertions, int_width=o.int_width,
            show_goto=o.show_goto, show_ssa=o.show_ssa, show_layout=o.show_layout,
            show_instances=o.show_instances, timeout=o.timeout)
    except ValueError as ex:
        bad = Verdict("ERROR", message=str(ex))
        return _to_response(bad)
    verdict = verify_source(request.source, request.filename, opts)
    return _to_response(verdict)


def serve() -> None:
    import argparse

    import uvicorn

    p = argparse.ArgumentParser(prog="minibmc-serve",
                                description="Run the minibmc verification service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    args = p.parse_args()
    uvicorn.run(app, host=args.host, port=args.port)
