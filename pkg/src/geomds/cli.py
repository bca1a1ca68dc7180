"""Command-line front end.

The CLI is a thin client of the HTTP service: by default it mounts the
service in-process (single process, no sockets, deterministic outputs);
``--server`` points it at a running instance instead. Exit codes: 0 ok,
2 I/O, 3 bad input data, 4 numerical degeneracy, 5 solver failure.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from .errors import EXIT_BAD_INPUT, EXIT_IO


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(server: str | None, path: str, payload: dict) -> dict:
    payload = {k: v for k, v in payload.items() if v is not None}
    try:
        with _client(server) as client:
            resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_IO)
    try:
        body = resp.json()
    except ValueError:
        body = {"detail": resp.text}
    if resp.status_code != 200:
        detail = body.get("detail", "request failed")
        click.echo(f"error: {detail}", err=True)
        sys.exit(int(body.get("exit_code", EXIT_BAD_INPUT)))
    click.echo(json.dumps(body, indent=2, sort_keys=True))
    return body


server_option = click.option("--server", default=None, help="Remote service URL (default: in-process).")
input_options = [
    click.option("--input", "input_", required=True, help="Mesh (OFF/OBJ) or point-cloud CSV."),
    click.option("--format", "format_", default=None, type=click.Choice(["off", "obj", "csv"]), help="Input format (default: file suffix)."),
    click.option("--backend", default="dijkstra", type=click.Choice(["dijkstra", "plane", "sphere"]), help="Geodesic backend."),
    click.option("--knn", default=12, show_default=True, help="Neighbors for point-cloud graphs."),
    click.option("--radius", default=None, type=float, help="Sphere radius (analytic backend / sphere embedding)."),
]


def _add(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f

    return wrap


@click.group()
def main():
    """Low-rank geodesic factorization and fast classical scaling."""


@main.command()
@_add(input_options)
@click.option("--n", required=True, type=int, help="Number of landmarks.")
@click.option("--first", default=0, show_default=True, help="Initial landmark vertex.")
@click.option("--out", required=True, help="Output directory.")
@server_option
def sample(input_, format_, backend, knn, radius, n, first, out, server):
    """Pick landmarks by farthest point sampling and store their columns."""
    _post(server, "/v1/sample", {
        "input": input_, "format": format_, "backend": backend, "knn": knn,
        "radius": radius, "n": n, "first": first, "out": out,
    })


@main.command()
@_add(input_options)
@click.option("--method", default="nmds", type=click.Choice(["fmds", "nmds", "cur"]), show_default=True)
@click.option("--n", required=True, type=int, help="Number of landmarks.")
@click.option("--n1", default=None, type=int, help="Retained eigencount (default: ceil(n/2)).")
@click.option("--mu", default=1e4, show_default=True, help="Constraint penalty (smoothness method).")
@click.option("--sphere", is_flag=True, help="Build cosine-metric factors for sphere embedding.")
@click.option("--first", default=0, show_default=True, help="Initial landmark vertex.")
@click.option("--out", required=True, help="Output directory (sample files reused if present).")
@server_option
def decompose(input_, format_, backend, knn, radius, method, n, n1, mu, sphere, first, out, server):
    """Factorize the pairwise matrix from the sampled columns."""
    _post(server, "/v1/decompose", {
        "input": input_, "format": format_, "backend": backend, "knn": knn,
        "radius": radius, "method": method, "n": n, "n1": n1, "mu": mu,
        "sphere": sphere, "first": first, "out": out,
    })


@main.command()
@click.option("--out", required=True, help="Directory holding the factor files.")
@click.option("--dim", default=2, show_default=True, help="Flat embedding dimension.")
@click.option("--sphere", is_flag=True, help="Spherical embedding (cosine factors).")
@click.option("--k", default=2, show_default=True, help="Sphere dimension (coordinates in R^(k+1)).")
@click.option("--radius", default=None, type=float, help="Sphere radius (default: from the factor header).")
@click.option("--normalize", is_flag=True, help="Project rows exactly onto the sphere.")
@server_option
def embed(out, dim, sphere, k, radius, normalize, server):
    """Solve classical scaling from the factors."""
    _post(server, "/v1/embed", {
        "out": out, "dim": dim, "sphere": sphere, "k": k,
        "radius": radius, "normalize": normalize,
    })


@main.command()
@click.option("--out", required=True, help="Directory holding the factor files.")
@click.option("--pairs", required=True, help="CSV of i,j rows to query.")
@server_option
def query(out, pairs, server):
    """Approximate geodesic distances for a pairs file."""
    _post(server, "/v1/query", {"out": out, "pairs_file": pairs})


@main.command("eval")
@_add(input_options)
@click.option("--out", required=True, help="Directory holding the factor files.")
@click.option("--metrics", default=None, help="Comma-separated metric names.")
@click.option("--seed", default=0, show_default=True)
@click.option("--dim", default=2, show_default=True, help="Embedding dimension for stress.")
@click.option("--pair-count", default=1000, show_default=True)
@click.option("--anchors", "anchor_count", default=100, show_default=True)
@server_option
def evaluate(input_, format_, backend, knn, radius, out, metrics, seed, dim, pair_count, anchor_count, server):
    """Measure reconstruction and embedding quality against true geodesics."""
    _post(server, "/v1/eval", {
        "input": input_, "format": format_, "backend": backend, "knn": knn,
        "radius": radius, "out": out,
        "metrics": metrics.split(",") if metrics else None,
        "seed": seed, "dim": dim, "pair_count": pair_count,
        "anchor_count": anchor_count,
    })


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8747, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
