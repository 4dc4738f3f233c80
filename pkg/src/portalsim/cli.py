"""Command line front end.

Commands talk to the HTTP service: an in-process instance by default,
or a running server when --server is given. Exit codes: 0 on success,
2 on bad arguments, 3 on runtime failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import List, Optional

import click
import httpx

from .sweep import CSV_COLUMNS
from .viewsync import Variant

VARIANT_NAMES = [v.value for v in Variant]
RUNTIME_FAILURE = 3


def _make_client(server: Optional[str]):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # fastapi.testclient warns about its starlette shim on import;
        # keep CLI stderr clean.
        warnings.simplefilter("ignore", UserWarning)
        from fastapi.testclient import TestClient

    from .api import create_app

    return TestClient(create_app())


def _post(client, path: str, payload: dict) -> dict:
    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(RUNTIME_FAILURE)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        click.echo(f"error: {detail}", err=True)
        raise SystemExit(RUNTIME_FAILURE)
    return response.json()


def _parse_seeds(text: str) -> List[int]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse seeds {text!r}; use N..M or N,M,...")
    if not seeds:
        raise click.BadParameter("no seeds given")
    return seeds


def _parse_variants(text: str) -> List[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise click.BadParameter("no variants given")
    for name in names:
        if name not in VARIANT_NAMES:
            raise click.BadParameter(
                f"unknown variant {name!r}; choose from {', '.join(VARIANT_NAMES)}"
            )
    return names


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process when omitted.")
@click.pass_context
def cli(ctx: click.Context, server: Optional[str]) -> None:
    """Two-user shared-view collaboration simulator."""
    ctx.obj = server


@cli.command()
@click.option("--variant", type=click.Choice(VARIANT_NAMES), default="teamportal-plus", show_default=True)
@click.option("--task", type=click.Choice(["simple", "complex"]), default="complex", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--duration-s", type=float, default=600.0, show_default=True)
@click.option("--tick-hz", type=int, default=50, show_default=True)
@click.option("--latency-ms", type=float, default=50.0, show_default=True)
@click.option("--jitter-ms", type=float, default=5.0, show_default=True)
@click.option("--policy", type=click.Choice(["divide", "window"]), default=None,
              help="Agent strategy for both players; defaults by variant.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True,
              help="Where to write the NDJSON session log.")
@click.pass_obj
def run(server, variant, task, seed, duration_s, tick_hz, latency_ms, jitter_ms, policy, out):
    """Run one scripted session and write its event log."""
    payload = {
        "variant": variant,
        "task": task,
        "seed": seed,
        "duration_s": duration_s,
        "tick_hz": tick_hz,
        "latency_ms": latency_ms,
        "jitter_ms": jitter_ms,
        "policy": policy,
    }
    with _make_client(server) as client:
        body = _post(client, "/sessions/run", payload)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(body["log_ndjson"])
    result = {"reason": body["reason"], **body["metrics"]}
    click.echo(json.dumps(result, indent=2, sort_keys=True))


@cli.command()
@click.option("--log", "log_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.pass_obj
def metrics(server, log_path, fmt):
    """Compute behavioral metrics from a session log."""
    with open(log_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    with _make_client(server) as client:
        body = _post(client, "/metrics", {"log_ndjson": text})
    if fmt == "json":
        click.echo(json.dumps(body, indent=2, sort_keys=True))
        return
    header_line = text.splitlines()[0] if text else "{}"
    try:
        config = json.loads(header_line).get("config", {})
    except ValueError:
        config = {}
    accuracy = body["accuracy"]
    row = {
        "seed": config.get("seed", ""),
        "variant": config.get("variant", ""),
        "task": config.get("task", ""),
        "policy": config.get("policy1", ""),
        "matched": body["matched"],
        "placed": body["placed"],
        "accuracy": "" if accuracy is None else f"{accuracy:.6f}",
        "dist_p1_m": f"{body['accumulated_distance']['1']:.6f}",
        "dist_p2_m": f"{body['accumulated_distance']['2']:.6f}",
        "teleports_p1": body["teleport_count"]["1"],
        "teleports_p2": body["teleport_count"]["2"],
        "use_time": body["use_time"],
        "ticks": body["ticks"],
    }
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    click.echo(buf.getvalue(), nl=False)


@cli.command()
@click.option("--variants", required=True, help="Comma separated variant names.")
@click.option("--task", type=click.Choice(["simple", "complex"]), default="complex", show_default=True)
@click.option("--seeds", required=True, help="Seed range N..M or comma separated list.")
@click.option("--duration-s", type=float, default=600.0, show_default=True)
@click.option("--tick-hz", type=int, default=50, show_default=True)
@click.option("--latency-ms", type=float, default=50.0, show_default=True)
@click.option("--jitter-ms", type=float, default=5.0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True,
              help="Where to write the results CSV.")
@click.pass_obj
def sweep(server, variants, task, seeds, duration_s, tick_hz, latency_ms, jitter_ms, workers, out):
    """Run a grid of sessions and write one CSV row per session."""
    payload = {
        "variants": _parse_variants(variants),
        "seeds": _parse_seeds(seeds),
        "task": task,
        "duration_s": duration_s,
        "tick_hz": tick_hz,
        "latency_ms": latency_ms,
        "jitter_ms": jitter_ms,
        "workers": workers,
    }
    with _make_client(server) as client:
        body = _post(client, "/sweeps/run", payload)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(body["csv"])
    summary = body["summary"]
    cols = ["sessions", "matched_mean", "placed_mean", "distance_mean", "teleports_mean", "use_time_mean"]
    click.echo("variant".ljust(18) + "".join(c.rjust(16) for c in cols))
    for name in payload["variants"]:
        stats = summary.get(name)
        if stats is None:
            continue
        cells = "".join(f"{stats[c]:16.2f}" for c in cols)
        click.echo(name.ljust(18) + cells)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    try:
        import uvicorn
    except ImportError:
        click.echo("error: uvicorn is not installed; pip install portalsim[serve]", err=True)
        raise SystemExit(RUNTIME_FAILURE)
    from .api import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
