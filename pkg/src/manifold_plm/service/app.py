"""HTTP service exposing the estimator, selection, simulation and comparison."""

from __future__ import annotations

import re

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from scipy.stats import chi2

from .. import __version__
from ..bandwidth import (
    default_grid,
    evaluate_ep_curve,
    evaluate_sv_curve,
    best_feasible,
    select_cv,
)
from ..data_io import parse_csv_text, parse_points_csv_text, parse_prediction_csv_text
from ..exceptions import ManifoldPlmError, NoFeasibleBandwidthError
from ..geometry import Cylinder, Manifold, Sphere
from ..plm import (
    Dataset,
    beta_standard_errors,
    estimate_g_many,
    fit_beta,
    predict_many,
    wald_test,
)
from ..simulation import SimDesign, default_simulation_grid, monte_carlo, summary_csv
from ..smoothing import SmootherConfig
from .schemas import (
    CompareRequest,
    CompareResponse,
    CurveModel,
    FitRequest,
    FitResponse,
    GridPointModel,
    PredictRequest,
    PredictResponse,
    ScoreModel,
    SelectionModel,
    SelectRequest,
    SelectResponse,
    SimulateRequest,
    SimulateResponse,
    WaldModel,
)


def _error_slug(exc: Exception) -> str:
    name = type(exc).__name__.removesuffix("Error")
    return re.sub(r"(?<!^)(?=[A-Z])", "-", name).lower()


def _resolve_bandwidth(
    data: Dataset, bandwidth: float | None, grid_model
) -> tuple[float, SelectionModel | None]:
    """Either take the explicit bandwidth or select one by cross-validation."""
    if bandwidth is not None:
        return bandwidth, None
    grid = grid_model.to_grid(data.manifold) if grid_model else default_grid(data)
    selection = select_cv(data, grid)
    model = SelectionModel(
        best_bandwidth=selection.best_bandwidth,
        scores=[ScoreModel.from_score(s) for s in selection.scores],
    )
    return selection.best_bandwidth, model


def create_app() -> FastAPI:
    app = FastAPI(title="manifold-plm", version=__version__)

    @app.exception_handler(ManifoldPlmError)
    async def _domain_error(_: Request, exc: ManifoldPlmError):
        return JSONResponse(
            status_code=400,
            content={"error": {"type": _error_slug(exc), "message": str(exc)}},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"error": {"type": "invalid-value", "message": str(exc)}},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/fit", response_model=FitResponse, response_model_exclude_none=True)
    def fit(request: FitRequest) -> FitResponse:
        manifold = request.manifold.to_manifold()
        data = parse_csv_text(request.csv_text, manifold, request.p)
        bandwidth, selection = _resolve_bandwidth(data, request.bandwidth, request.grid)
        config = SmootherConfig(manifold, bandwidth)
        fit_result = fit_beta(data, config)

        wald = None
        if request.beta0 is not None:
            statistic, dof = wald_test(fit_result, request.beta0, data.n)
            wald = WaldModel(
                beta0=list(request.beta0),
                statistic=statistic,
                dof=dof,
                p_value=float(chi2.sf(statistic, dof)),
            )

        g_grid = None
        if request.query_csv_text is not None:
            queries = parse_points_csv_text(request.query_csv_text, manifold)
            g_values = estimate_g_many(fit_result, data, config, queries)
            g_grid = [
                GridPointModel(point=point.tolist(), g_hat=float(g))
                for point, g in zip(queries, g_values)
            ]

        return FitResponse(
            n=data.n,
            p=data.p,
            bandwidth=bandwidth,
            beta_hat=fit_result.beta_hat.tolist(),
            std_errors=beta_standard_errors(fit_result, data.n).tolist(),
            sigma2_eps_hat=fit_result.sigma2_eps_hat,
            sigma_hat=fit_result.sigma_hat.tolist(),
            wald=wald,
            selection=selection,
            g_grid=g_grid,
        )

    @app.post("/select", response_model=SelectResponse)
    def select(request: SelectRequest) -> SelectResponse:
        manifold = request.manifold.to_manifold()
        data = parse_csv_text(request.csv_text, manifold, request.p)
        grid = request.grid.to_grid(manifold) if request.grid else default_grid(data)
        selection = select_cv(data, grid)
        return SelectResponse(
            best_bandwidth=selection.best_bandwidth,
            scores=[ScoreModel.from_score(s) for s in selection.scores],
        )

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        design = SimDesign(
            kind=request.design,
            n=request.n,
            beta_true=request.beta_true,
            noise_sd=request.noise_sd,
            seed=request.seed,
        )
        if request.grid is not None:
            grid = request.grid.to_grid(_design_manifold(design))
        else:
            grid = default_simulation_grid(design)
        summary = monte_carlo(design, request.reps, grid, threads=request.threads)
        return SimulateResponse(
            design=design.kind,
            n=design.n,
            beta_true=design.beta_true,
            noise_sd=design.noise_sd,
            seed=design.seed,
            reps=summary.reps,
            failures=summary.failures,
            mean_beta=summary.mean_beta,
            sd_beta=summary.sd_beta,
            mse_beta=summary.mse_beta,
            mean_mse_g=summary.mean_mse_g,
            csv=summary_csv(design, summary),
        )

    @app.post("/predict", response_model=PredictResponse)
    def predict(request: PredictRequest) -> PredictResponse:
        manifold = request.manifold.to_manifold()
        data = parse_csv_text(request.csv_text, manifold, request.p)
        bandwidth, _ = _resolve_bandwidth(data, request.bandwidth, request.grid)
        config = SmootherConfig(manifold, bandwidth)
        fit_result = fit_beta(data, config)
        x_new, queries = parse_prediction_csv_text(request.query_csv_text, manifold, data.p)
        predictions = predict_many(fit_result, data, config, x_new, queries)
        g_values = estimate_g_many(fit_result, data, config, queries)
        return PredictResponse(
            bandwidth=bandwidth,
            beta_hat=fit_result.beta_hat.tolist(),
            predictions=predictions.tolist(),
            g_hat=g_values.tolist(),
        )

    @app.post("/compare", response_model=CompareResponse)
    def compare(request: CompareRequest) -> CompareResponse:
        manifold = request.manifold.to_manifold()
        data = parse_csv_text(request.csv_text, manifold, request.p)
        if data.p < 2:
            raise ValueError("comparison needs at least 2 linear covariates")
        train, validate = _split_odd_even(data)
        grid = request.grid.to_grid(manifold) if request.grid else default_grid(data)
        sv_scores = evaluate_sv_curve(train, validate, grid)
        ep_scores = evaluate_ep_curve(
            train.y, train.x[:, :2], validate.y, validate.x[:, :2], grid
        )
        sv_curve = _curve_model(sv_scores)
        ep_curve = _curve_model(ep_scores)
        if sv_curve.all_infeasible and ep_curve.all_infeasible:
            raise NoFeasibleBandwidthError("both models are infeasible on the whole grid")
        return CompareResponse(partially_linear=sv_curve, nonparametric=ep_curve)

    return app


def _design_manifold(design: SimDesign) -> Manifold:
    return Sphere() if design.kind == "sphere" else Cylinder(-2.0, 2.0)


def _split_odd_even(data: Dataset) -> tuple[Dataset, Dataset]:
    """First, third, ... rows train the smoother; second, fourth, ... validate."""
    train_idx = np.arange(0, data.n, 2)
    validate_idx = np.arange(1, data.n, 2)
    train = Dataset(data.y[train_idx], data.x[train_idx], data.points[train_idx], data.manifold)
    validate = Dataset(
        data.y[validate_idx], data.x[validate_idx], data.points[validate_idx], data.manifold
    )
    return train, validate


def _curve_model(scores) -> CurveModel:
    best = best_feasible(scores)
    return CurveModel(
        scores=[ScoreModel.from_score(s) for s in scores],
        best=ScoreModel.from_score(best) if best else None,
        all_infeasible=best is None,
    )


app = create_app()
