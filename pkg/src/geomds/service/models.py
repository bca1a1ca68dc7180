"""Request/response schemas for the pipeline service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Backend = Literal["dijkstra", "plane", "sphere"]
Method = Literal["fmds", "nmds", "cur"]


class SampleRequest(BaseModel):
    input: str
    format: Optional[str] = None
    backend: Backend = "dijkstra"
    n: int = Field(100, ge=1)
    first: int = Field(0, ge=0)
    knn: int = Field(12, ge=1)
    radius: Optional[float] = Field(None, gt=0)
    out: str


class SampleResponse(BaseModel):
    p: int
    n: int
    first: int
    indices: list[int]
    files: dict[str, str]


class DecomposeRequest(BaseModel):
    input: str
    format: Optional[str] = None
    backend: Backend = "dijkstra"
    method: Method = "nmds"
    n: int = Field(100, ge=1)
    n1: Optional[int] = Field(None, ge=1)
    mu: float = Field(1e4, ge=1.0, le=1e12)
    sphere: bool = False
    radius: Optional[float] = Field(None, gt=0)
    first: int = Field(0, ge=0)
    knn: int = Field(12, ge=1)
    out: str


class DecomposeResponse(BaseModel):
    header: dict
    files: dict[str, str]


class EmbedRequest(BaseModel):
    out: str
    dim: int = Field(2, ge=1)
    sphere: bool = False
    k: int = Field(2, ge=0)
    radius: Optional[float] = Field(None, gt=0)
    normalize: bool = False


class EmbedResponse(BaseModel):
    spherical: bool
    dim: int
    eigenvalues: list[float]
    clamped_count: int
    files: dict[str, str]


class QueryRequest(BaseModel):
    out: str
    pairs_file: Optional[str] = None
    pairs: Optional[list[tuple[int, int]]] = None


class QueryResponse(BaseModel):
    count: int
    pairs_per_second: float
    distances: Optional[list[float]] = None
    files: dict[str, str] = {}


class EvalRequest(BaseModel):
    input: str
    format: Optional[str] = None
    backend: Backend = "dijkstra"
    knn: int = Field(12, ge=1)
    radius: Optional[float] = Field(None, gt=0)
    out: str
    metrics: Optional[list[str]] = None
    seed: int = 0
    dim: int = Field(2, ge=1)
    pair_count: int = Field(1000, ge=1)
    anchor_count: int = Field(100, ge=1)


class EvalResponse(BaseModel):
    records: list[dict]
    files: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str
