"""HTTP front end: one POST endpoint per command, wrapping the handlers.

Responses reuse the Report schema of the command line's --format json; bad
input maps to 400, internal contract violations to 500.  Run locally with
`varc serve` or `uvicorn varcalc.service:app`.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .api import HANDLERS, ProblemRequest, Report, UsageError, run_command

app = FastAPI(
    title="varcalc",
    description=(
        "Exact symbolic engine for variational calculus on jet bundles: "
        "Euler-Lagrange derivation, conservation laws, and bracket checks."
    ),
    version=__version__,
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__, "commands": sorted(HANDLERS)}


def _run(command: str, req: ProblemRequest) -> Report:
    try:
        return run_command(command, req)
    except UsageError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/el", response_model=Report)
def el(req: ProblemRequest) -> Report:
    return _run("el", req)


@app.post("/lambda1", response_model=Report)
def lambda1(req: ProblemRequest) -> Report:
    return _run("lambda1", req)


@app.post("/pc", response_model=Report)
def pc(req: ProblemRequest) -> Report:
    return _run("pc", req)


@app.post("/verify-ff", response_model=Report)
def verify_ff(req: ProblemRequest) -> Report:
    return _run("verify-ff", req)


@app.post("/symcheck", response_model=Report)
def symcheck(req: ProblemRequest) -> Report:
    return _run("symcheck", req)


@app.post("/noether", response_model=Report)
def noether(req: ProblemRequest) -> Report:
    return _run("noether", req)


@app.post("/bracket", response_model=Report)
def bracket(req: ProblemRequest) -> Report:
    return _run("bracket", req)


@app.post("/noether2", response_model=Report)
def noether2(req: ProblemRequest) -> Report:
    return _run("noether2", req)


@app.post("/hampair", response_model=Report)
def hampair(req: ProblemRequest) -> Report:
    return _run("hampair", req)


@app.post("/symplectic", response_model=Report)
def symplectic(req: ProblemRequest) -> Report:
    return _run("symplectic", req)


@app.post("/linf-jacobi", response_model=Report)
def linf_jacobi(req: ProblemRequest) -> Report:
    return _run("linf-jacobi", req)


@app.post("/graded-check", response_model=Report)
def graded_check(req: ProblemRequest) -> Report:
    return _run("graded-check", req)
