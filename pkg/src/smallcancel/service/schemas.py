"""Pydantic request/response models for the service endpoints.

The CLI builds these same models and dispatches them in-process, so the
wire format and the command line stay in lockstep.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class BudgetModel(BaseModel):
    max_cells: int = 10
    max_cosets: int = 200_000
    perm_degree: int = 6
    rewrite_slack: int = 1
    max_states: int = 20_000
    max_assignments: int = 200_000


class CheckCancellationRequest(BaseModel):
    presentation: str
    lambda_value: Optional[str] = Field(default=None, description="exact rational like 1/7")


class DehnReduceRequest(BaseModel):
    presentation: str
    word: str
    unsafe_override: bool = False


class WordProblemRequest(BaseModel):
    presentation: str
    word: str
    unsafe_override: bool = False


class TautSpectrumRequest(BaseModel):
    graph: Optional[str] = Field(default=None, description="cycle:N or path:N")
    graph_text: Optional[str] = Field(default=None, description="edge-list text")
    presentation: Optional[str] = Field(default=None, description="Cayley-graph mode")
    radius: int = 2
    horizon: int = 10
    budget: BudgetModel = BudgetModel()
    seed: int = 0


class SpectrumInput(BaseModel):
    values: Optional[list[int]] = None
    horizon: Optional[int] = None
    record: Optional[dict] = None


class SpectrumUnionRequest(BaseModel):
    left: SpectrumInput
    right: SpectrumInput


class SpectrumBracketRequest(BaseModel):
    length: int
    direction: str
    presentation: Optional[str] = None
    ell0: Optional[int] = None


class SpectrumEquivRequest(BaseModel):
    left: SpectrumInput
    right: SpectrumInput
    k: int = 1


class ConedBallRequest(BaseModel):
    presentation: str
    radius: int
    lambda_value: Optional[str] = None


class DimBoundsRequest(BaseModel):
    profile: str


class OneEndedRequest(BaseModel):
    presentation: str
    profile: str


class CorpusRequest(BaseModel):
    seed: int = 0
    only: Optional[list[int]] = None
    budget: BudgetModel = BudgetModel()


class OperationResponse(BaseModel):
    status: str  # "decided" | "unknown" | "error"
    summary: str
    report: dict
