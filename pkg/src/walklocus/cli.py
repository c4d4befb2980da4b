"""Command-line client for the toolkit.

Every subcommand builds a request and sends it through the HTTP service
in-process (no socket), so the CLI, a remote client, and the test suite all
exercise the same validation and serialization path. Exit codes: 0 success,
2 config or input error, 3 budget or instability failures past the
threshold.
"""

from __future__ import annotations

import asyncio
import csv
import io
import json
import os
import sys
from typing import Optional

import click
import httpx

from .service import create_app


class _ConfigExit(click.ClickException):
    exit_code = 2


class _FailureExit(click.ClickException):
    exit_code = 3


def _post(path: str, payload: dict) -> dict:
    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://walklocus"
        ) as client:
            return await client.post(f"/v1{path}", json=payload)

    resp = asyncio.run(go())
    if resp.status_code >= 400:
        body = resp.json()
        if "error" in body:
            code = body["error"]["code"]
            message = body["error"]["message"]
            if code == "budget-exceeded":
                raise _FailureExit(message)
            raise _ConfigExit(message)
        # pydantic shape errors arrive as FastAPI's detail list
        raise _ConfigExit(json.dumps(body.get("detail", body)))
    return resp.json()


def _flatten(doc: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def _csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


_REPORT_COLUMNS = [
    "kind", "replicates", "successes", "failures", "misses",
    "estimate", "wilson_low", "wilson_high",
]


def _report_csv(report: dict) -> str:
    return _csv_text(_REPORT_COLUMNS, [[report[c] for c in _REPORT_COLUMNS]])


def _emit(ctx: click.Context, text: str) -> None:
    out = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        click.echo(f"wrote {out}", err=True)


def _emit_json(ctx: click.Context, body: dict) -> None:
    _emit(ctx, json.dumps(body, indent=2))


def _emit_report(ctx: click.Context, body: dict) -> None:
    """Write the report, then apply the failure threshold to the exit code."""
    report = body["report"]
    if ctx.obj["format"] == "csv":
        _emit(ctx, _report_csv(report))
    else:
        _emit_json(ctx, body)
    replicates = report["replicates"]
    if replicates:
        rate = report["failures"] / replicates
        if rate > ctx.obj["failure_threshold"]:
            raise _FailureExit(
                f"{report['failures']}/{replicates} replicates failed "
                f"(rate {rate:.4g} > threshold {ctx.obj['failure_threshold']:.4g})"
            )


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; every replicate derives its own stream from it.")
@click.option("--threads", type=int, default=1, show_default=True,
              envvar="WALKLOCUS_THREADS",
              help="Worker threads for replicate batches (env WALKLOCUS_THREADS).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True, help="Output format; csv is gnuplot-ready.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write output here instead of stdout.")
@click.option("--failure-threshold", type=float, default=0.0, show_default=True,
              help="Exit 3 when the failed-replicate rate exceeds this.")
@click.pass_context
def main(ctx: click.Context, seed: int, threads: int, fmt: str,
         out: Optional[str], failure_threshold: float) -> None:
    """Source localisation for simple random walks on the integer lattice."""
    ctx.obj = {
        "seed": seed,
        "threads": threads,
        "format": fmt,
        "out": out,
        "failure_threshold": failure_threshold,
    }


@main.command()
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--steps", "-n", type=int, default=None)
@click.option("--range-target", type=int, default=None)
@click.option("--trace", type=click.Choice(["edge", "vertex", "range"]), default="edge",
              show_default=True)
@click.option("--budget", type=int, default=None,
              help="Step cap for range walks.")
@click.option("--include-walk", is_flag=True,
              help="Also emit the step sequence (needed later for gamma).")
@click.pass_context
def walk(ctx, dimension, steps, range_target, trace, budget, include_walk):
    """Generate one walk and emit its trace document."""
    body = _post("/walk", {
        "dimension": dimension, "steps": steps, "range_target": range_target,
        "trace": trace, "seed": ctx.obj["seed"], "budget": budget,
        "include_walk": include_walk,
    })
    if ctx.obj["format"] == "csv":
        coords = body["trace"]["vertices"]
        first = body["trace"]["first_visit"]
        header = ["index"] + [f"x{i}" for i in range(dimension)] + ["first_visit"]
        rows = [[i, *pt, fv] for i, (pt, fv) in enumerate(zip(coords, first))]
        _emit(ctx, _csv_text(header, rows))
    else:
        _emit_json(ctx, body)


@main.command()
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--steps", "-n", type=int, required=True)
@click.option("--scale", "-m", type=int, default=None,
              help="First block length of the cut-edge schedule.")
@click.option("--density", type=str, default=None,
              help='Reference cut density, exact: "3/5" or "0.6".')
@click.option("--include-indices", is_flag=True)
@click.pass_context
def cutedges(ctx, dimension, steps, scale, density, include_indices):
    """Count two-sided cut edges of one walk, optionally per block."""
    body = _post("/cutedges", {
        "dimension": dimension, "steps": steps, "seed": ctx.obj["seed"],
        "m": scale, "density": density, "include_indices": include_indices,
    })
    if ctx.obj["format"] == "csv":
        if body.get("blocks") is not None:
            blocks = body["blocks"]
            header = ["block", "lo", "hi", "count", "met", "event_a"]
            rows = [
                [i, lo, hi, c, int(met), int(blocks["event_a"])]
                for i, ((lo, hi), c, met) in enumerate(
                    zip(blocks["bounds"], blocks["counts"], blocks["met"])
                )
            ]
        elif body.get("cut_indices") is not None:
            header = ["cut_edge_index"]
            rows = [[i] for i in body["cut_indices"]]
        else:
            header = ["n_steps", "cut_count", "induced_cut_count"]
            rows = [[body["n_steps"], body["cut_count"], body["induced_cut_count"]]]
        _emit(ctx, _csv_text(header, rows))
    else:
        _emit_json(ctx, body)


@main.command("estimate-c")
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--window", "-T", type=int, required=True,
              help="Steps before and after the probed edge.")
@click.option("--replicates", "-r", type=int, required=True)
@click.option("--induced", is_flag=True,
              help="Also require the endpoints to split in the induced trace.")
@click.pass_context
def estimate_c_cmd(ctx, dimension, window, replicates, induced):
    """Monte Carlo estimate of the cut-edge density c(d)."""
    body = _post("/estimate-c", {
        "dimension": dimension, "window": window, "replicates": replicates,
        "seed": ctx.obj["seed"], "induced": induced, "threads": ctx.obj["threads"],
    })
    _emit_report(ctx, body)


@main.command()
@click.option("--input", "-i", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Trace or walk JSON document (see `walk`).")
@click.option("--estimator", "-e", type=str, required=True,
              help='One of "psi", "lambda:K", "gamma".')
@click.option("--truth", type=str, default=None,
              help='True source as "x,y,...", enables the success field.')
@click.option("--max-horizon", type=int, default=None,
              help="Stabilisation cap for gamma.")
@click.pass_context
def localize(ctx, input_path, estimator, truth, max_horizon):
    """Run one estimator on a stored trace or walk document."""
    with open(input_path) as fh:
        doc = json.load(fh)
    # `walk` emits {"trace": ..., "walk": ...} envelopes; accept those too
    if "trace" in doc or "walk" in doc:
        walk_doc, trace_doc = doc.get("walk"), doc.get("trace")
    elif doc.get("kind") == "walk":
        walk_doc, trace_doc = doc, None
    else:
        walk_doc, trace_doc = None, doc
    truth_point = None
    if truth is not None:
        try:
            truth_point = [int(part) for part in truth.split(",")]
        except ValueError:
            raise _ConfigExit(f'truth must look like "0,0,0", got {truth!r}')
    name = estimator.split(":", 1)[0]
    payload = {
        "estimator": estimator, "seed": ctx.obj["seed"],
        "truth": truth_point, "max_horizon": max_horizon,
    }
    # gamma needs the generating walk; the others run on the bare trace
    if name == "gamma":
        if walk_doc is None:
            raise _ConfigExit(
                "gamma needs a walk document; regenerate with `walk --include-walk`"
            )
        payload["walk"] = walk_doc
    elif trace_doc is not None:
        payload["trace"] = trace_doc
    else:
        payload["walk"] = walk_doc
    body = _post("/localize", payload)
    if ctx.obj["format"] == "csv":
        dim = len(body["chosen"][0]) if body["chosen"] else 0
        header = [f"x{i}" for i in range(dim)]
        _emit(ctx, _csv_text(header, [list(pt) for pt in body["chosen"]]))
    else:
        _emit_json(ctx, body)
    if body.get("unstable") and ctx.obj["failure_threshold"] < 1.0:
        raise _FailureExit("gamma never stabilised on this input")


@main.command()
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--estimator", "-e", type=str, default=None,
              help="Estimator spec; omit to tally diameter growth instead.")
@click.option("--replicates", "-r", type=int, required=True)
@click.option("--steps", "-n", type=int, default=None)
@click.option("--range-target", type=int, default=None)
@click.option("--trace", type=click.Choice(["edge", "vertex", "range"]), default="edge",
              show_default=True)
@click.option("--budget", type=int, default=None)
@click.option("--max-horizon", type=int, default=None)
@click.pass_context
def experiment(ctx, dimension, estimator, replicates, steps, range_target,
               trace, budget, max_horizon):
    """Run replicated localisation (or growth) trials and report the rate."""
    body = _post("/experiment", {
        "dimension": dimension, "estimator": estimator, "replicates": replicates,
        "seed": ctx.obj["seed"], "steps": steps, "range_target": range_target,
        "trace": trace, "budget": budget, "max_horizon": max_horizon,
        "threads": ctx.obj["threads"],
    })
    _emit_report(ctx, body)


@main.command()
@click.option("--quantity", "-q", required=True,
              type=click.Choice(["return-probability", "lclt-bound", "tail-sum",
                                 "localisation-bounds", "transience"]))
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--n", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--cutoff", type=int, default=None)
@click.option("--mode", type=click.Choice(["exact", "float"]), default="exact",
              show_default=True)
@click.pass_context
def exact(ctx, quantity, dimension, n, k, cutoff, mode):
    """Exact rationals and certified enclosures (no sampling)."""
    body = _post("/exact", {
        "quantity": quantity, "dimension": dimension,
        "n": n, "k": k, "cutoff": cutoff, "mode": mode,
    })
    if ctx.obj["format"] == "csv":
        flat = _flatten({"quantity": body["quantity"],
                         "dimension": body["dimension"], **body["value"]})
        _emit(ctx, _csv_text(list(flat), [list(flat.values())]))
    else:
        _emit_json(ctx, body)


@main.command()
@click.option("--dimension", "-d", type=int, required=True)
@click.option("--walks", "-k", type=int, required=True,
              help="Number of coupled walks.")
@click.option("--steps", "-n", type=int, required=True)
@click.option("--t1", type=int, required=True, help="Coupling budget.")
@click.option("--t2", type=int, required=True, help="Covering budget.")
@click.option("--replicates", "-r", type=int, required=True)
@click.option("--start", "starts", type=str, multiple=True,
              help='Follower start "x,y,..."; repeat per walk.')
@click.pass_context
def amnesia(ctx, dimension, walks, steps, t1, t2, replicates, starts):
    """Coupled-walk experiment: how often k traces become identical."""
    start_points = None
    if starts:
        try:
            start_points = [[int(x) for x in s.split(",")] for s in starts]
        except ValueError:
            raise _ConfigExit(f"starts must look like \"0,0\", got {list(starts)!r}")
    body = _post("/amnesia", {
        "dimension": dimension, "walks": walks, "steps": steps,
        "t1": t1, "t2": t2, "replicates": replicates,
        "seed": ctx.obj["seed"], "threads": ctx.obj["threads"],
        "starts": start_points,
    })
    _emit_report(ctx, body)


@main.command()
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def report(ctx, files):
    """Validate report documents and merge shards into one tally."""
    docs = []
    for path in files:
        with open(path) as fh:
            loaded = json.load(fh)
        # accept both bare reports and {"report": ...} envelopes
        docs.append(loaded.get("report", loaded) if isinstance(loaded, dict) else loaded)
    body = _post("/report/validate", {"reports": docs})
    merged = body["merged"]
    if ctx.obj["format"] == "csv":
        _emit(ctx, _report_csv(merged))
    else:
        _emit_json(ctx, body)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service on a real socket."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
