"""Request and response models of the HTTP service."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..bandwidth import BandwidthGrid, BandwidthScore
from ..geometry import Cylinder, Euclidean, Manifold, Sphere


class ManifoldModel(BaseModel):
    kind: Literal["euclidean", "sphere", "cylinder"]
    dim: int | None = None
    height_min: float | None = None
    height_max: float | None = None

    @model_validator(mode="after")
    def _check_params(self):
        if self.kind == "euclidean" and (self.dim is None or self.dim < 1):
            raise ValueError("euclidean manifolds need a positive dim")
        if self.kind == "cylinder" and (self.height_min is None or self.height_max is None):
            raise ValueError("cylinder manifolds need height_min and height_max")
        return self

    def to_manifold(self) -> Manifold:
        if self.kind == "euclidean":
            return Euclidean(self.dim)
        if self.kind == "sphere":
            return Sphere()
        return Cylinder(self.height_min, self.height_max)


class GridModel(BaseModel):
    """Equispaced candidate bandwidths; values at or above the injectivity
    radius are clipped away."""

    lo: float = Field(gt=0)
    hi: float
    count: int = Field(default=30, ge=1)

    @model_validator(mode="after")
    def _check_bounds(self):
        if not self.hi > self.lo:
            raise ValueError("grid needs hi > lo")
        return self

    def to_grid(self, manifold: Manifold) -> BandwidthGrid:
        values = np.linspace(self.lo, self.hi, self.count)
        values = values[values < manifold.injectivity_radius]
        if values.size == 0:
            raise ValueError(
                "no grid value below the injectivity radius "
                f"{manifold.injectivity_radius}"
            )
        return BandwidthGrid(values)


class ScoreModel(BaseModel):
    bandwidth: float
    score: float | None
    feasible: bool

    @classmethod
    def from_score(cls, entry: BandwidthScore) -> "ScoreModel":
        return cls(
            bandwidth=entry.bandwidth,
            score=entry.score if entry.feasible else None,
            feasible=entry.feasible,
        )


class SelectionModel(BaseModel):
    best_bandwidth: float
    scores: list[ScoreModel]


class WaldModel(BaseModel):
    beta0: list[float]
    statistic: float
    dof: int
    p_value: float


class FitRequest(BaseModel):
    manifold: ManifoldModel
    csv_text: str
    p: int | None = Field(default=None, ge=1)
    bandwidth: float | None = Field(default=None, gt=0)
    grid: GridModel | None = None
    beta0: list[float] | None = None
    query_csv_text: str | None = None


class GridPointModel(BaseModel):
    point: list[float]
    g_hat: float


class FitResponse(BaseModel):
    schema_version: int = Field(default=1, serialization_alias="schema")
    n: int
    p: int
    bandwidth: float
    beta_hat: list[float]
    std_errors: list[float]
    sigma2_eps_hat: float
    sigma_hat: list[list[float]]
    wald: WaldModel | None = None
    selection: SelectionModel | None = None
    g_grid: list[GridPointModel] | None = None


class SelectRequest(BaseModel):
    manifold: ManifoldModel
    csv_text: str
    p: int | None = Field(default=None, ge=1)
    grid: GridModel | None = None


class SelectResponse(BaseModel):
    schema_version: int = Field(default=1, serialization_alias="schema")
    best_bandwidth: float
    scores: list[ScoreModel]


class SimulateRequest(BaseModel):
    design: Literal["sphere", "cylinder"]
    reps: int = Field(ge=2)
    n: int = Field(default=200, ge=10)
    seed: int = 0
    beta_true: float = 5.0
    noise_sd: float = Field(default=1.0, gt=0)
    grid: GridModel | None = None
    threads: int = Field(default=1, ge=1)


class SimulateResponse(BaseModel):
    schema_version: int = Field(default=1, serialization_alias="schema")
    design: str
    n: int
    beta_true: float
    noise_sd: float
    seed: int
    reps: int
    failures: int
    mean_beta: float
    sd_beta: float
    mse_beta: float
    mean_mse_g: float
    csv: str


class PredictRequest(BaseModel):
    manifold: ManifoldModel
    csv_text: str
    query_csv_text: str
    p: int | None = Field(default=None, ge=1)
    bandwidth: float | None = Field(default=None, gt=0)
    grid: GridModel | None = None


class PredictResponse(BaseModel):
    schema_version: int = Field(default=1, serialization_alias="schema")
    bandwidth: float
    beta_hat: list[float]
    predictions: list[float]
    g_hat: list[float]


class CompareRequest(BaseModel):
    manifold: ManifoldModel
    csv_text: str
    p: int | None = Field(default=None, ge=2)
    grid: GridModel | None = None


class CurveModel(BaseModel):
    scores: list[ScoreModel]
    best: ScoreModel | None
    all_infeasible: bool


class CompareResponse(BaseModel):
    schema_version: int = Field(default=1, serialization_alias="schema")
    partially_linear: CurveModel
    nonparametric: CurveModel


class ErrorModel(BaseModel):
    type: str
    message: str
