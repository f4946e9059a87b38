"""Command-line client of the compute service.

Every subcommand builds one request, posts it (in process by default, to a
running service with --server), writes the returned artifact files into the
output directory, and prints the JSON summary.  Exit codes: 0 on pass, 2
when a verification-style command reports failure, 1 on input errors.  All
state travels in the request, so reruns reproduce outputs byte for byte.
"""

from __future__ import annotations

import asyncio
import json
import pathlib
import sys

import click
import httpx

from . import __version__

CONFIG_SCHEMA = 1


def _post(server, path, payload):
    if server:
        resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=600.0)
        return resp.status_code, resp.json()

    from .service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://jetspectra.local") as client:
            return await client.post(path, json=payload)

    resp = asyncio.run(go())
    return resp.status_code, resp.json()


def _finish(ctx, path, payload):
    status, body = _post(ctx.obj["server"], path, payload)
    if status != 200:
        click.echo(json.dumps({"error": body, "status": status}, indent=2))
        sys.exit(1)
    files = body.pop("files", {}) or {}
    written = []
    out_dir = pathlib.Path(ctx.obj["out_dir"])
    if files:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in sorted(files):
            target = out_dir / name
            with open(target, "w", newline="", encoding="utf-8") as fh:
                fh.write(files[name])
            written.append(str(target))
    body["written_files"] = written
    click.echo(json.dumps(body, indent=2))
    sys.exit(0 if body.get("passed", True) else 2)


def _family_payload(g, fiber_dim, q_signs, bound_radius, family_json):
    if family_json is not None:
        doc = json.loads(pathlib.Path(family_json).read_text(encoding="utf-8"))
        return {"g": doc["g"], "k": int(doc.get("K", 0)),
                "q_signs": list(doc.get("Qsigns", [])),
                "bound_radius": doc.get("bound_radius")}
    if g is None:
        raise click.UsageError("provide --g or --family-json")
    signs = [int(s) for s in q_signs.split(",") if s.strip()] if q_signs else []
    return {"g": g, "k": fiber_dim, "q_signs": signs, "bound_radius": bound_radius}


def family_options(fn):
    fn = click.option("--family-json", type=click.Path(exists=True),
                      help="JSON file {K, Qsigns, g}")(fn)
    fn = click.option("--bound-radius", type=float, default=None,
                      help="fiber truncation radius override")(fn)
    fn = click.option("--q-signs", default="", help="comma list of +-1, one per w")(fn)
    fn = click.option("--K", "fiber_dim", type=int, default=0, help="fiber dimension")(fn)
    fn = click.option("--g", default=None, help="family expression in q, w1..wK (and t)")(fn)
    return fn


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None,
              help="base URL of a running service; defaults to in-process execution")
@click.option("--out-dir", default="out", show_default=True,
              help="directory for emitted CSV/SVG/JSON files")
@click.option("--threads", type=int, default=1, show_default=True,
              help="worker cap for grid sweeps; results are thread-count independent")
@click.pass_context
def main(ctx, server, out_dir, threads):
    """Spectral invariants of Legendrian loops over the circle."""
    ctx.obj = {"server": server, "out_dir": out_dir, "threads": threads}


@main.command()
@family_options
@click.option("--n-q", type=int, default=256, show_default=True)
@click.option("--n-w", type=int, default=65, show_default=True)
@click.option("--region-f", default=None, help="restrict to {f >= 0} for this f(q)")
@click.pass_context
def spectrum(ctx, g, fiber_dim, q_signs, bound_radius, family_json, n_q, n_w, region_f):
    """Min-max spectral values of a generating family."""
    payload = {
        "family": _family_payload(g, fiber_dim, q_signs, bound_radius, family_json),
        "grid": {"n_q": n_q, "n_w": n_w},
        "region_f": region_f,
    }
    _finish(ctx, "/spectrum", payload)


@main.command()
@family_options
@click.option("--t0", type=float, default=0.0, show_default=True)
@click.option("--t1", type=float, default=1.0, show_default=True)
@click.option("--n-t", type=int, default=64, show_default=True)
@click.option("--n-q", type=int, default=256, show_default=True)
@click.option("--n-w", type=int, default=65, show_default=True)
@click.option("--region-f", default=None)
@click.pass_context
def cerf(ctx, g, fiber_dim, q_signs, bound_radius, family_json, t0, t1, n_t, n_q, n_w,
         region_f):
    """Critical-value diagram, min-max trajectory, and slope check of a path."""
    payload = {
        "family": _family_payload(g, fiber_dim, q_signs, bound_radius, family_json),
        "t0": t0, "t1": t1, "n_t": n_t,
        "grid": {"n_q": n_q, "n_w": n_w},
        "region_f": region_f,
        "threads": ctx.obj["threads"],
    }
    _finish(ctx, "/cerf", payload)


@main.command()
@family_options
@click.option("--t0", type=float, default=0.0, show_default=True)
@click.option("--t1", type=float, default=1.0, show_default=True)
@click.option("--n-t", type=int, default=64, show_default=True)
@click.option("--n-q", type=int, default=256, show_default=True)
@click.option("--loop-check", is_flag=True,
              help="cross-validate with the loop-level velocity test (K = 0 only)")
@click.pass_context
def positivity(ctx, g, fiber_dim, q_signs, bound_radius, family_json, t0, t1, n_t, n_q,
               loop_check):
    """Vertical-speed positivity certificate for a family path."""
    payload = {
        "family": _family_payload(g, fiber_dim, q_signs, bound_radius, family_json),
        "t0": t0, "t1": t1, "n_t": n_t, "n_q": n_q, "loop_check": loop_check,
    }
    _finish(ctx, "/positivity", payload)


@main.command()
@click.option("--eps", type=float, required=True, help="flow drop rate; min p stays above 2*eps")
@click.option("--margin", type=float, default=None, help="momentum margin above 2*eps (default eps)")
@click.option("--n-samples", type=int, default=1024, show_default=True)
@click.option("--n-flow", type=int, default=64, show_default=True)
@click.option("--n-raise", type=int, default=16, show_default=True)
@click.option("--frames", "frame_count", type=int, default=12, show_default=True,
              help="number of front SVG frames to emit")
@click.pass_context
def loop(ctx, eps, margin, n_samples, n_flow, n_raise, frame_count):
    """Build and verify the closed positive loop of embedded Legendrians."""
    payload = {"eps": eps, "margin": margin, "n_samples": n_samples,
               "n_flow": n_flow, "n_raise": n_raise, "frame_count": frame_count}
    _finish(ctx, "/loop", payload)


@main.command(name="lambda-scan")
@family_options
@click.option("--f", "region_f", required=True, help="region function f(q)")
@click.option("--lambda-max", type=float, required=True)
@click.option("--n-lambda", type=int, default=512, show_default=True)
@click.option("--n-q", type=int, default=256, show_default=True)
@click.option("--n-w", type=int, default=65, show_default=True)
@click.pass_context
def lambda_scan_cmd(ctx, g, fiber_dim, q_signs, bound_radius, family_json, region_f,
                    lambda_max, n_lambda, n_q, n_w):
    """Scan the boundary-relative values of F - lambda*f and certify crossings."""
    payload = {
        "family": _family_payload(g, fiber_dim, q_signs, bound_radius, family_json),
        "f": region_f, "lambda_max": lambda_max, "n_lambda": n_lambda,
        "grid": {"n_q": n_q, "n_w": n_w},
        "threads": ctx.obj["threads"],
    }
    _finish(ctx, "/lambda-scan", payload)


@main.command(name="lambda-k")
@click.option("--c", type=float, default=None,
              help="shorthand: use the constant-height loop at this value")
@click.option("--g", default=None, help="loop as the jet graph of this function of q")
@click.option("--k", type=int, required=True)
@click.option("--n-samples", type=int, default=2048, show_default=True)
@click.pass_context
def lambda_k(ctx, c, g, k, n_samples):
    """Count intersections of a jet graph with the k-th harmonic pencil."""
    if (c is None) == (g is None):
        raise click.UsageError("provide exactly one of --c or --g")
    payload = {"g": g if g is not None else repr(float(c)), "k": k,
               "n_samples": n_samples}
    _finish(ctx, "/lambda-k", payload)


@main.command()
@click.option("--mode", type=click.Choice(["fwd", "inv", "fiber"]), required=True)
@click.option("--point", default=None, help="q,p,u for mode fwd")
@click.option("--element", default=None, help="x1,x2,theta for mode inv")
@click.option("--x", default=None, help="x1,x2 for mode fiber")
@click.option("--n", type=int, default=256, show_default=True)
@click.pass_context
def hodograph(ctx, mode, point, element, x, n):
    """Map between jet points and plane contact elements; emit fiber curves."""
    def triple(text):
        return [float(v) for v in text.split(",")] if text else None

    payload = {"mode": mode, "point": triple(point), "element": triple(element),
               "x": triple(x), "n": n}
    _finish(ctx, "/hodograph", payload)


@main.command()
@family_options
@click.option("--n-q", type=int, default=512, show_default=True)
@click.pass_context
def front(ctx, g, fiber_dim, q_signs, bound_radius, family_json, n_q):
    """Front projection (SVG + CSV) of the loops induced by a family."""
    payload = {
        "family": _family_payload(g, fiber_dim, q_signs, bound_radius, family_json),
        "n_q": n_q,
    }
    _finish(ctx, "/front", payload)


@main.command()
@click.option("--x-fiber", default="0,0", show_default=True)
@click.option("--direction", default="1,0", show_default=True)
@click.option("--deformation-g", default="t", show_default=True,
              help="positive deformation expression in q and t")
@click.option("--t1", type=float, default=1.0, show_default=True)
@click.option("--n-t", type=int, default=33, show_default=True)
@click.option("--n-q", type=int, default=256, show_default=True)
@click.option("--n-lambda", type=int, default=512, show_default=True)
@click.option("--lambda-max", type=float, default=None)
@click.pass_context
def thm5(ctx, x_fiber, direction, deformation_g, t1, n_t, n_q, n_lambda, lambda_max):
    """Two-sided pencil intersection count for a positively deformed fiber."""
    payload = {
        "x_fiber": [float(v) for v in x_fiber.split(",")],
        "direction": [float(v) for v in direction.split(",")],
        "deformation_g": deformation_g, "t1": t1, "n_t": n_t, "n_q": n_q,
        "n_lambda": n_lambda, "lambda_max": lambda_max,
    }
    _finish(ctx, "/thm5", payload)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="JSON run configuration with schema: 1")
@click.pass_context
def run(ctx, config_path):
    """Execute a saved run configuration."""
    doc = json.loads(pathlib.Path(config_path).read_text(encoding="utf-8"))
    if doc.get("schema") != CONFIG_SCHEMA:
        click.echo(json.dumps({"error": f"unsupported config schema {doc.get('schema')!r}; "
                                        f"expected {CONFIG_SCHEMA}"}))
        sys.exit(1)
    command = doc.get("command")
    endpoints = {"spectrum": "/spectrum", "cerf": "/cerf", "positivity": "/positivity",
                 "loop": "/loop", "lambda-scan": "/lambda-scan", "lambda-k": "/lambda-k",
                 "hodograph": "/hodograph", "front": "/front", "thm5": "/thm5"}
    if command not in endpoints:
        click.echo(json.dumps({"error": f"unknown command {command!r}"}))
        sys.exit(1)
    if "out_dir" in doc:
        ctx.obj["out_dir"] = doc["out_dir"]
    _finish(ctx, endpoints[command], doc.get("params", {}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8371, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
