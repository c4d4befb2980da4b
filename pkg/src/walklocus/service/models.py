"""Request and response schemas for the HTTP service.

Semantic validation (parity constraints, dimension floors, budget rules)
lives in the core modules; these models only pin shapes and obvious ranges,
so the service and the core never disagree about what a parameter means.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator


class WalkRequest(BaseModel):
    dimension: int = Field(..., ge=1)
    steps: Optional[int] = Field(None, ge=0)
    range_target: Optional[int] = Field(None, ge=1)
    trace: Literal["edge", "vertex", "range"] = "edge"
    seed: int = 0
    budget: Optional[int] = Field(None, ge=1)
    include_walk: bool = False

    @model_validator(mode="after")
    def _steps_or_target(self) -> "WalkRequest":
        if self.trace == "range":
            if self.range_target is None:
                raise ValueError("range walks need range_target")
            if self.steps is not None:
                raise ValueError("range walks take range_target, not steps")
        else:
            if self.steps is None:
                raise ValueError(f"{self.trace} traces need steps")
            if self.range_target is not None:
                raise ValueError("range_target only applies to range walks")
            if self.budget is not None:
                raise ValueError("budget only applies to range walks")
        return self


class WalkResponse(BaseModel):
    schema_id: str = Field(..., alias="schema")
    trace: dict
    walk: Optional[dict] = None
    n_steps: int
    n_vertices: int
    n_edges: int

    model_config = {"populate_by_name": True}


class CutEdgesRequest(BaseModel):
    dimension: int = Field(..., ge=1)
    steps: int = Field(..., ge=1)
    seed: int = 0
    # both or neither: a block schedule needs a scale and a density
    m: Optional[int] = Field(None, ge=1)
    density: Optional[Union[str, float]] = None
    include_indices: bool = False

    @model_validator(mode="after")
    def _schedule_pairing(self) -> "CutEdgesRequest":
        if (self.m is None) != (self.density is None):
            raise ValueError("block counting needs both m and density")
        return self


class ScheduleDoc(BaseModel):
    m: int
    density: str
    lam: str
    a: List[int]
    b: List[int]


class BlocksDoc(BaseModel):
    bounds: List[Tuple[int, int]]
    counts: List[int]
    met: List[bool]
    event_a: bool


class CutEdgesResponse(BaseModel):
    schema_id: str = Field(..., alias="schema")
    dimension: int
    n_steps: int
    cut_count: int
    induced_cut_count: int
    cut_indices: Optional[List[int]] = None
    schedule: Optional[ScheduleDoc] = None
    blocks: Optional[BlocksDoc] = None

    model_config = {"populate_by_name": True}


class EstimateCRequest(BaseModel):
    dimension: int = Field(..., ge=1)
    window: int = Field(..., ge=1)
    replicates: int = Field(..., ge=1)
    seed: int = 0
    induced: bool = False
    threads: int = Field(1, ge=1)


class ReportResponse(BaseModel):
    report: dict


class LocalizeRequest(BaseModel):
    trace: Optional[dict] = None
    walk: Optional[dict] = None
    estimator: str
    seed: int = 0
    truth: Optional[List[int]] = None
    max_horizon: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_input(self) -> "LocalizeRequest":
        if (self.trace is None) == (self.walk is None):
            raise ValueError("provide exactly one of trace or walk")
        return self


class LocalizeResponse(BaseModel):
    schema_id: str = Field(..., alias="schema")
    estimator: str
    chosen: List[List[int]]
    success: Optional[bool] = None
    unstable: bool = False
    diametric_pair: Optional[List[List[int]]] = None

    model_config = {"populate_by_name": True}


class ExperimentRequest(BaseModel):
    """One batch experiment; estimator None tallies diameter growth instead."""

    dimension: int = Field(..., ge=1)
    estimator: Optional[str] = None
    replicates: int = Field(..., ge=1)
    seed: int = 0
    steps: Optional[int] = Field(None, ge=0)
    range_target: Optional[int] = Field(None, ge=1)
    trace: Literal["edge", "vertex", "range"] = "edge"
    budget: Optional[int] = Field(None, ge=1)
    max_horizon: Optional[int] = Field(None, ge=1)
    threads: int = Field(1, ge=1)


class ExactRequest(BaseModel):
    quantity: Literal[
        "return-probability",
        "lclt-bound",
        "tail-sum",
        "localisation-bounds",
        "transience",
    ]
    dimension: int = Field(..., ge=1)
    n: Optional[int] = Field(None, ge=0)
    k: Optional[int] = Field(None, ge=1)
    cutoff: Optional[int] = Field(None, ge=1)
    mode: Literal["exact", "float"] = "exact"


class ExactResponse(BaseModel):
    schema_id: str = Field(..., alias="schema")
    quantity: str
    dimension: int
    params: dict
    value: dict

    model_config = {"populate_by_name": True}


class AmnesiaRequest(BaseModel):
    dimension: int = Field(..., ge=1)
    walks: int = Field(..., ge=1)
    steps: int = Field(..., ge=1)
    t1: int = Field(..., ge=0)
    t2: int = Field(..., ge=0)
    replicates: int = Field(..., ge=1)
    seed: int = 0
    threads: int = Field(1, ge=1)
    starts: Optional[List[List[int]]] = None


class ReportsRequest(BaseModel):
    reports: List[dict] = Field(..., min_length=1)


class ReportsResponse(BaseModel):
    schema_id: str = Field(..., alias="schema")
    count: int
    digest: str
    merged: dict

    model_config = {"populate_by_name": True}


class HealthResponse(BaseModel):
    status: str
    schema_id: str = Field(..., alias="schema")
    version: str

    model_config = {"populate_by_name": True}
