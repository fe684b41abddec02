"""FastAPI wiring: one POST endpoint per workbench verb."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..dehn import DehnConditionError
from ..words import ParseError, SpecError
from . import handlers
from .schemas import (
    CheckCancellationRequest,
    ConedBallRequest,
    CorpusRequest,
    DehnReduceRequest,
    DimBoundsRequest,
    OneEndedRequest,
    OperationResponse,
    SpectrumBracketRequest,
    SpectrumEquivRequest,
    SpectrumUnionRequest,
    TautSpectrumRequest,
    WordProblemRequest,
)

app = FastAPI(
    title="smallcancel",
    description="Small cancellation workbench over free products",
)


def _run(fn, request):
    try:
        return fn(request)
    except (ParseError, SpecError, DehnConditionError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/check-cancellation", response_model=OperationResponse)
def check_cancellation(request: CheckCancellationRequest):
    return _run(handlers.check_cancellation, request)


@app.post("/dehn-reduce", response_model=OperationResponse)
def dehn_reduce(request: DehnReduceRequest):
    return _run(handlers.dehn_reduce, request)


@app.post("/word-problem", response_model=OperationResponse)
def word_problem(request: WordProblemRequest):
    return _run(handlers.word_problem, request)


@app.post("/taut-spectrum", response_model=OperationResponse)
def taut_spectrum(request: TautSpectrumRequest):
    return _run(handlers.taut_spectrum, request)


@app.post("/spectrum-union", response_model=OperationResponse)
def spectrum_union(request: SpectrumUnionRequest):
    return _run(handlers.spectrum_union, request)


@app.post("/spectrum-bracket", response_model=OperationResponse)
def spectrum_bracket(request: SpectrumBracketRequest):
    return _run(handlers.spectrum_bracket, request)


@app.post("/spectrum-equiv", response_model=OperationResponse)
def spectrum_equiv(request: SpectrumEquivRequest):
    return _run(handlers.spectrum_equiv, request)


@app.post("/coned-ball", response_model=OperationResponse)
def coned_ball(request: ConedBallRequest):
    return _run(handlers.coned_ball_handler, request)


@app.post("/dim-bounds", response_model=OperationResponse)
def dim_bounds(request: DimBoundsRequest):
    return _run(handlers.dim_bounds, request)


@app.post("/one-ended", response_model=OperationResponse)
def one_ended(request: OneEndedRequest):
    return _run(handlers.one_ended, request)


@app.post("/corpus", response_model=OperationResponse)
def corpus(request: CorpusRequest):
    return _run(handlers.corpus, request)
