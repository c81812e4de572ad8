"""Request and response models for the analysis service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel

from ..regions import DEFAULT_BUDGET, DEFAULT_TOL


class LayerPayload(BaseModel):
    weights: list[list[float]]
    bias: list[float]


class NetworkPayload(BaseModel):
    layers: list[LayerPayload]


class BoxPayload(BaseModel):
    lo: list[float]
    hi: list[float]


class AnalyzeRequest(BaseModel):
    network: NetworkPayload
    x: list[float]


class AtomPayload(BaseModel):
    out_index: int
    in_index: int
    coefficient: float
    is_zero: bool


class SynthesisPayload(BaseModel):
    support: list[int]
    values: list[float]


class AnalyzeResponse(BaseModel):
    configuration: str
    output: list[float]
    linear: list[list[float]]
    bias: list[float]
    atom_count: int
    nonzero_atom_count: int
    path_count_per_atom: int
    atoms: list[AtomPayload]
    synthesis: SynthesisPayload
    piece_residual: float
    synthesis_residual: float


class EnumerateRequest(BaseModel):
    network: NetworkPayload
    box: BoxPayload | None = None
    tol: float = DEFAULT_TOL
    budget: int = DEFAULT_BUDGET


class RegionRowPayload(BaseModel):
    configuration: str
    verdict: str
    atoms: int
    lipschitz_bound: float | None


class EnumerateResponse(BaseModel):
    box: BoxPayload
    layer_counts: list[int]
    explored: int
    rows: list[RegionRowPayload]


class Tile2dRequest(BaseModel):
    network: NetworkPayload
    box: BoxPayload | None = None
    tol: float = DEFAULT_TOL
    budget: int = DEFAULT_BUDGET


class TilingRegionPayload(BaseModel):
    configuration: str
    polygon: list[list[float]]
    area: float
    linear: list[list[float]]
    bias: list[float]
    atom_count: int
    nonzero_atom_count: int
    lipschitz_bound: float | None


class TilingDocumentPayload(BaseModel):
    box: BoxPayload
    box_area: float
    region_area_sum: float
    regions: list[TilingRegionPayload]


class Tile2dResponse(BaseModel):
    document: TilingDocumentPayload
    svg: str


class BoundsRequest(BaseModel):
    network: NetworkPayload
    config: str | None = None
    beta: float | None = None
    box: BoxPayload | None = None
    tol: float = DEFAULT_TOL
    budget: int = DEFAULT_BUDGET


class BoundReportPayload(BaseModel):
    kind: str
    configuration: str | None = None
    value: float | None = None
    ingredients: dict[str, Any] = {}
    normalization_ok: bool | None = None
    note: str | None = None


class BoundsResponse(BaseModel):
    reports: list[BoundReportPayload]


class HealthResponse(BaseModel):
    status: str
