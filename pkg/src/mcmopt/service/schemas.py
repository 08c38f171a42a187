"""Request and response bodies of the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Metric = Literal["adders", "adders-ad", "adders_ad", "bits", "tmcm", "truncated"]


class SolveRequest(BaseModel):
    constants: list[int] = Field(min_length=1)
    metric: Metric = "adders"
    wordlength_in: Optional[int] = Field(default=None, ge=1)
    error: Optional[str] = None
    adder_bound: Optional[int] = Field(default=None, ge=0)
    ad_bound: Optional[int] = Field(default=None, ge=0)
    solver: Optional[str] = None
    timeout: float = Field(default=1800.0, gt=0)
    warm_start: Literal["auto", "off"] = "auto"
    symmetry_breaking: bool = True
    adder_slack: int = Field(default=0, ge=0)
    native_indicators: bool = False


class EmitRequest(SolveRequest):
    pass


class GraphRequest(BaseModel):
    graph: str = Field(description="exchange string")
    error: Optional[list[int]] = Field(default=None, description="budget per output, in output order")


class OracleRequest(BaseModel):
    constants: list[int] = Field(min_length=1)
    max_adders: Optional[int] = Field(default=None, ge=0)
    wordlength: Optional[int] = Field(default=None, ge=1)
    negative_shifts: bool = True


class OutputLineModel(BaseModel):
    target: int
    node: int
    budget: Optional[int]
    eps_inf: int
    eps_sup: int
    observed_min: Optional[int]
    observed_max: Optional[int]
    ok: bool


class ReportResponse(BaseModel):
    targets: list[int]
    flavor: str
    status: str
    adders: int
    adder_depth: int
    onebit_analytic: int
    onebit_structural: int
    objective: Optional[int]
    outputs: list[OutputLineModel]
    exhaustive: bool
    failures: list[str]
    notes: list[str]
    exchange: str
    wall_time: float
    verified: bool
    dot: Optional[str] = None
    text: str = ""


class NodeCost(BaseModel):
    node: int
    fundamental: int
    msb: int
    sum_msb: int
    adder_depth: int
    gain: int
    carry: int
    onebit_analytic: int
    onebit_structural: int
    eps_inf: int
    eps_sup: int


class CostResponse(BaseModel):
    nodes: list[NodeCost]
    total_analytic: int
    total_structural: int


class EmitResponse(BaseModel):
    lp: str
    start: Optional[str]
    stats: dict[str, int]


class OracleResponse(BaseModel):
    optimum_adders: int
    explored_states: int
    exchange: str


class ErrorResponse(BaseModel):
    stage: str
    detail: str
