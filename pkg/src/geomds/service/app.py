"""HTTP service around the pipeline.

The factorize-once / query-many workflow maps naturally onto a service:
one client preprocesses a manifold into factor files, any number of
clients then ask for embeddings or distance queries against them. Errors
carry the library's exit code in the payload so thin clients can map
them back to process exit codes.
"""

from __future__ import annotations

import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..decompose import query_pairs
from ..errors import (
    EXIT_BAD_INPUT,
    EXIT_DEGENERATE,
    EXIT_IO,
    EXIT_SOLVER,
    GeomdsError,
    InvalidConfig,
)
from ..pipeline import (
    DEFAULT_METRICS,
    RunConfig,
    load_factors,
    run_decompose,
    run_embed,
    run_eval,
    run_query,
    run_sample,
)
from .models import (
    DecomposeRequest,
    DecomposeResponse,
    EmbedRequest,
    EmbedResponse,
    EvalRequest,
    EvalResponse,
    HealthResponse,
    QueryRequest,
    QueryResponse,
    SampleRequest,
    SampleResponse,
)

_STATUS_BY_EXIT = {
    EXIT_IO: 404,
    EXIT_BAD_INPUT: 400,
    EXIT_DEGENERATE: 422,
    EXIT_SOLVER: 500,
}

app = FastAPI(
    title="geomds",
    version=__version__,
    description=(
        "Low-rank geodesic distance factorization and fast classical scaling."
    ),
)


@app.exception_handler(GeomdsError)
async def geomds_error_handler(request: Request, exc: GeomdsError):
    return JSONResponse(
        status_code=_STATUS_BY_EXIT.get(exc.exit_code, 400),
        content={
            "detail": str(exc),
            "code": type(exc).__name__,
            "exit_code": exc.exit_code,
        },
    )


@app.get("/health", response_model=HealthResponse)
def health():
    return HealthResponse(status="ok", version=__version__)


@app.post("/v1/sample", response_model=SampleResponse)
def sample(req: SampleRequest):
    config = RunConfig(
        input=req.input,
        format=req.format,
        backend=req.backend,
        n=req.n,
        first=req.first,
        knn=req.knn,
        radius=req.radius,
        out=req.out,
    )
    summary = run_sample(config)
    return SampleResponse(
        p=summary["p"],
        n=summary["n"],
        first=summary["first"],
        indices=summary["indices"],
        files=summary["files"],
    )


@app.post("/v1/decompose", response_model=DecomposeResponse)
def decompose(req: DecomposeRequest):
    config = RunConfig(
        input=req.input,
        format=req.format,
        backend=req.backend,
        method=req.method,
        n=req.n,
        n1=req.n1,
        mu=req.mu,
        sphere=req.sphere,
        radius=req.radius,
        first=req.first,
        knn=req.knn,
        out=req.out,
    )
    summary = run_decompose(config)
    return DecomposeResponse(header=summary["header"], files=summary["files"])


@app.post("/v1/embed", response_model=EmbedResponse)
def embed(req: EmbedRequest):
    config = RunConfig(
        out=req.out,
        dim=req.dim,
        sphere=req.sphere,
        k=req.k,
        radius=req.radius,
        normalize=req.normalize,
    )
    summary = run_embed(config)
    return EmbedResponse(
        spherical=summary["spherical"],
        dim=summary["dim"],
        eigenvalues=summary["eigenvalues"],
        clamped_count=summary["clamped_count"],
        files=summary["files"],
    )


@app.post("/v1/query", response_model=QueryResponse)
def query(req: QueryRequest):
    if req.pairs is not None:
        # inline pairs: answer directly without touching the filesystem
        fac = load_factors(req.out)
        pairs = np.asarray(req.pairs, dtype=np.int64).reshape(-1, 2)
        start = time.perf_counter()
        values = query_pairs(fac, pairs)
        elapsed = time.perf_counter() - start
        rate = len(values) / elapsed if elapsed > 0 else float("inf")
        return QueryResponse(
            count=len(values),
            pairs_per_second=rate,
            distances=[float(v) for v in values],
        )
    if req.pairs_file is None:
        raise InvalidConfig("either pairs or pairs_file is required")
    config = RunConfig(out=req.out, pairs=req.pairs_file)
    summary = run_query(config)
    return QueryResponse(
        count=summary["count"],
        pairs_per_second=summary["pairs_per_second"],
        files=summary["files"],
    )


@app.post("/v1/eval", response_model=EvalResponse)
def evaluate(req: EvalRequest):
    config = RunConfig(
        input=req.input,
        format=req.format,
        backend=req.backend,
        knn=req.knn,
        radius=req.radius,
        out=req.out,
        metrics=tuple(req.metrics) if req.metrics is not None else DEFAULT_METRICS,
        seed=req.seed,
        dim=req.dim,
        pair_count=req.pair_count,
        anchor_count=req.anchor_count,
    )
    summary = run_eval(config)
    return EvalResponse(records=summary["records"], files=summary["files"])
