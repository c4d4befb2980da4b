"""HTTP facade over the toolkit.

Every endpoint is a thin adapter: pydantic shapes in, core call, JSON out.
Domain errors surface as a stable envelope {"error": {"code", "message"}}
so clients can branch on the code without parsing prose.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import APIRouter, FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analytics import (
    ExactValue,
    lclt_bound,
    localisation_lower_bounds,
    return_probability,
    strong_transience_verdict,
    tail_sum,
)
from ..couplings import amnesia_experiment
from ..cutedges import build_schedule, estimate_c, finite_cut_edges, segment_cut_counts
from ..errors import BudgetExceededError, ConfigError, DivergentTailError, FormatError
from ..estimators import localize
from ..harness import ExperimentConfig, run_diameter_growth, run_experiment
from ..lattice import generate_walk, rng_stream
from ..reporting import SCHEMA, merge_reports, report_from_json_dict
from ..trace import (
    build_trace,
    build_vertex_trace,
    trace_from_json_dict,
    trace_to_json_dict,
    walk_from_json_dict,
    walk_to_json_dict,
    walk_until_range,
)
from .models import (
    AmnesiaRequest,
    BlocksDoc,
    CutEdgesRequest,
    CutEdgesResponse,
    EstimateCRequest,
    ExactRequest,
    ExactResponse,
    ExperimentRequest,
    HealthResponse,
    LocalizeRequest,
    LocalizeResponse,
    ReportResponse,
    ReportsRequest,
    ReportsResponse,
    ScheduleDoc,
    WalkRequest,
    WalkResponse,
)

router = APIRouter()

_ERROR_CODES = {
    ConfigError: ("config-error", 422),
    FormatError: ("format-error", 422),
    DivergentTailError: ("divergent-tail", 422),
    BudgetExceededError: ("budget-exceeded", 400),
}


def _fraction_doc(fr: Fraction) -> dict:
    return {
        "decimal": f"{float(fr):.12g}",
        "numerator": str(fr.numerator),
        "denominator": str(fr.denominator),
    }


def _exact_value_doc(value: ExactValue) -> dict:
    doc = {"method": value.provenance}
    if value.rational is not None:
        doc["rational"] = _fraction_doc(value.rational)
    else:
        doc["lower"] = _fraction_doc(value.lower)
        doc["upper"] = _fraction_doc(value.upper)
    return doc


def _request_walk(req: WalkRequest):
    if req.trace == "range":
        return walk_until_range(
            req.dimension, req.range_target, req.seed, budget=req.budget
        )
    return generate_walk(req.dimension, req.steps, req.seed)


@router.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", schema_id=SCHEMA, version=__version__)


@router.post("/walk", response_model=WalkResponse, response_model_exclude_none=True)
def walk_endpoint(req: WalkRequest) -> WalkResponse:
    walk = _request_walk(req)
    builder = build_vertex_trace if req.trace == "vertex" else build_trace
    graph = builder(walk)
    return WalkResponse(
        schema_id=SCHEMA,
        trace=trace_to_json_dict(graph),
        walk=walk_to_json_dict(walk) if req.include_walk else None,
        n_steps=walk.n,
        n_vertices=graph.n_vertices,
        n_edges=graph.n_edges,
    )


@router.post("/cutedges", response_model=CutEdgesResponse, response_model_exclude_none=True)
def cutedges_endpoint(req: CutEdgesRequest) -> CutEdgesResponse:
    walk = generate_walk(req.dimension, req.steps, req.seed)
    rec = finite_cut_edges(walk)
    schedule_doc = None
    blocks_doc = None
    if req.m is not None:
        density = req.density
        if isinstance(density, str):
            try:
                density = Fraction(density)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"unreadable density {req.density!r}: {exc}") from None
        schedule = build_schedule(req.m, density, horizon=req.steps)
        counts = segment_cut_counts(rec, schedule)
        schedule_doc = ScheduleDoc(
            m=schedule.m,
            density=str(schedule.density),
            lam=str(schedule.lam),
            a=list(schedule.a),
            b=list(schedule.b),
        )
        blocks_doc = BlocksDoc(
            bounds=list(counts.bounds),
            counts=list(counts.counts),
            met=list(counts.met),
            event_a=counts.event_a,
        )
    return CutEdgesResponse(
        schema_id=SCHEMA,
        dimension=req.dimension,
        n_steps=rec.n_steps,
        cut_count=int(rec.is_cut.sum()),
        induced_cut_count=int(rec.is_induced_cut.sum()),
        cut_indices=rec.cut_indices().tolist() if req.include_indices else None,
        schedule=schedule_doc,
        blocks=blocks_doc,
    )


@router.post("/estimate-c", response_model=ReportResponse)
def estimate_c_endpoint(req: EstimateCRequest) -> ReportResponse:
    report = estimate_c(
        req.dimension,
        req.window,
        req.replicates,
        req.seed,
        induced=req.induced,
        threads=req.threads,
    )
    return ReportResponse(report=report.to_json_dict())


@router.post("/localize", response_model=LocalizeResponse, response_model_exclude_none=True)
def localize_endpoint(req: LocalizeRequest) -> LocalizeResponse:
    if req.trace is not None:
        subject = trace_from_json_dict(req.trace)
    else:
        subject = walk_from_json_dict(req.walk)
    truth = None if req.truth is None else tuple(req.truth)
    outcome = localize(
        subject,
        req.estimator,
        rng_stream(req.seed),
        truth=truth,
        max_horizon=req.max_horizon,
    )
    pair = outcome.diametric_pair
    return LocalizeResponse(
        schema_id=SCHEMA,
        estimator=outcome.estimator,
        chosen=[list(p) for p in outcome.chosen_points],
        success=outcome.success,
        unstable=outcome.unstable,
        diametric_pair=None if pair is None else [list(p) for p in pair],
    )


@router.post("/experiment", response_model=ReportResponse)
def experiment_endpoint(req: ExperimentRequest) -> ReportResponse:
    cfg = ExperimentConfig(
        dimension=req.dimension,
        estimator=req.estimator,
        replicates=req.replicates,
        seed=req.seed,
        steps=req.steps,
        range_target=req.range_target,
        trace=req.trace,
        budget=req.budget,
        max_horizon=req.max_horizon,
        threads=req.threads,
    )
    if cfg.estimator is None:
        report = run_diameter_growth(cfg)
    else:
        report = run_experiment(cfg)
    return ReportResponse(report=report.to_json_dict())


@router.post("/exact", response_model=ExactResponse)
def exact_endpoint(req: ExactRequest) -> ExactResponse:
    d = req.dimension
    params: dict = {}
    if req.quantity == "return-probability":
        if req.n is None:
            raise ConfigError("return-probability needs n")
        params["n"] = req.n
        value = _exact_value_doc(return_probability(d, req.n))
    elif req.quantity == "lclt-bound":
        if req.n is None:
            raise ConfigError("lclt-bound needs n")
        params["n"] = req.n
        value = {"value": lclt_bound(d, req.n)}
    elif req.quantity == "tail-sum":
        if req.k is None:
            raise ConfigError("tail-sum needs k")
        cutoff = max(128, d) if req.cutoff is None else req.cutoff
        params.update(k=req.k, cutoff=cutoff, mode=req.mode)
        value = _exact_value_doc(tail_sum(d, req.k, cutoff, mode=req.mode))
    elif req.quantity == "localisation-bounds":
        bounds = localisation_lower_bounds(d, cutoff=req.cutoff)
        params["cutoff"] = bounds.cutoff
        value = bounds.as_dict()
    else:
        verdict = strong_transience_verdict(d, cutoff=req.cutoff)
        if req.cutoff is not None:
            params["cutoff"] = req.cutoff
        value = {
            "verdict": verdict.verdict,
            "certified_bound": (
                None
                if verdict.certified_bound is None
                else _exact_value_doc(verdict.certified_bound)
            ),
        }
    return ExactResponse(
        schema_id=SCHEMA, quantity=req.quantity, dimension=d, params=params, value=value
    )


@router.post("/amnesia", response_model=ReportResponse)
def amnesia_endpoint(req: AmnesiaRequest) -> ReportResponse:
    starts = None
    if req.starts is not None:
        starts = tuple(tuple(int(x) for x in p) for p in req.starts)
    report = amnesia_experiment(
        req.dimension,
        req.walks,
        req.steps,
        req.t1,
        req.t2,
        req.replicates,
        req.seed,
        threads=req.threads,
        starts=starts,
    )
    return ReportResponse(report=report.to_json_dict())


@router.post("/report/validate", response_model=ReportsResponse)
def report_validate_endpoint(req: ReportsRequest) -> ReportsResponse:
    reports = [report_from_json_dict(doc) for doc in req.reports]
    merged = reports[0] if len(reports) == 1 else merge_reports(reports)
    return ReportsResponse(
        schema_id=SCHEMA,
        count=len(reports),
        digest=merged.digest,
        merged=merged.to_json_dict(),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="walklocus", version=__version__)

    for exc_type, (code, status) in _ERROR_CODES.items():
        def handler(request: Request, exc: Exception, _code=code, _status=status):
            return JSONResponse(
                status_code=_status,
                content={"error": {"code": _code, "message": str(exc)}},
            )

        app.add_exception_handler(exc_type, handler)

    app.include_router(router, prefix="/v1")
    return app
