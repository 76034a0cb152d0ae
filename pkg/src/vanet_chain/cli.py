"""Command-line client.

Every verb talks to the HTTP interface. By default the FastAPI app is
mounted in process (no socket, no server to start); --server points the
same calls at a running instance instead.

Exit codes: 0 success, 2 configuration or input error, 3 a simulated
experiment missed its agreement gate under --assert.
"""

from __future__ import annotations

import asyncio
import json
import os
import sys

import click
import httpx

from . import __version__
from .output import write_scenario_outputs
from .scenarios import BUILTIN_SCENARIOS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPARISON = 3


class ServiceError(Exception):
    """Non-2xx answer from the service, reduced to its detail string."""


def _detail(response: httpx.Response) -> str:
    try:
        body = response.json()
    except ValueError:
        return response.text.strip() or f"HTTP {response.status_code}"
    if isinstance(body, dict) and "detail" in body:
        detail = body["detail"]
        return detail if isinstance(detail, str) else json.dumps(detail, indent=2)
    return json.dumps(body)


def _call(server: str | None, method: str, path: str, body: dict | None = None) -> object:
    """One request, in process by default, against --server otherwise."""
    if server is None:
        from .service.app import app

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport, base_url="http://vanet-chain",
                                         timeout=None) as client:
                return await client.request(method, path, json=body)

        response = asyncio.run(go())
    else:
        with httpx.Client(base_url=server, timeout=None) as client:
            response = client.request(method, path, json=body)
    if response.status_code >= 400:
        raise ServiceError(_detail(response))
    return response.json()


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


_server_option = click.option("--server", default=None, metavar="URL",
                              help="base URL of a running service (default: in process)")


@click.group(help="Connectivity statistics for a chain of vehicles over fading links.")
@click.version_option(__version__, prog_name="vanet-chain")
def main() -> None:
    pass


@main.command("list-scenarios", help="List the built-in scenarios.")
@click.option("--json", "as_json", is_flag=True, help="emit the catalog as JSON")
@_server_option
def list_scenarios(as_json: bool, server: str | None) -> None:
    try:
        catalog = _call(server, "GET", "/scenarios")
    except (ServiceError, httpx.HTTPError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(catalog, indent=2))
        return
    width = max(len(item["name"]) for item in catalog)
    for item in catalog:
        click.echo(f"{item['name']:<{width}}  {item['description']}")


@main.command(help="Derive chain parameters from road units.")
@click.option("--speed", required=True, type=float, help="vehicle speed in km/h")
@click.option("--carrier", default=3.9, show_default=True, type=float,
              help="carrier frequency in GHz")
@click.option("--symbol-rate", default=1e5, show_default=True, type=float,
              help="symbols per second")
@click.option("--threshold-ratio", default=0.1, show_default=True, type=float,
              help="power threshold over mean received power")
@click.option("--dt", default=None, type=float,
              help="timestep in seconds [default: 1/(10 f_D)]")
@click.option("--json", "as_json", is_flag=True,
              help="emit JSON reusable as a direct scenario calibration")
@_server_option
def calibrate(speed: float, carrier: float, symbol_rate: float, threshold_ratio: float,
              dt: float | None, as_json: bool, server: str | None) -> None:
    body = {"speed_kmh": speed, "carrier_ghz": carrier, "symbol_rate": symbol_rate,
            "threshold_ratio": threshold_ratio, "dt_s": dt}
    try:
        data = _call(server, "POST", "/calibrate", body)
    except (ServiceError, httpx.HTTPError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(data, indent=2, sort_keys=True))
        return
    click.echo(f"doppler shift     {data['f_d_hz']:.6g} Hz")
    click.echo(f"max timestep      {data['dt_max_s']:.6g} s")
    click.echo(f"default timestep  {data['dt_default_s']:.6g} s")
    click.echo(f"chosen timestep   {data['dt_s']:.6g} s")
    click.echo(f"p (drop rate)     {data['p']:.6g}")
    click.echo(f"q (recovery rate) {data['q']:.6g}")
    click.echo(f"p_good            {data['p_good']:.6g}")


def _run_body(scenario: str) -> dict:
    if scenario in BUILTIN_SCENARIOS:
        return {"builtin": scenario}
    if os.path.exists(scenario):
        try:
            with open(scenario) as fh:
                return {"scenario": json.load(fh)}
        except (OSError, json.JSONDecodeError) as exc:
            _fail(f"cannot read scenario file {scenario!r}: {exc}")
    _fail(f"{scenario!r} is neither a built-in scenario nor a readable file "
          f"(built-ins: {', '.join(BUILTIN_SCENARIOS)})")


@main.command(help="Run a scenario (built-in name or JSON file) and write its outputs.")
@click.argument("scenario")
@click.option("--output", default="out", show_default=True,
              type=click.Path(file_okay=False), help="directory for the output files")
@click.option("--seed", default=None, type=click.IntRange(min=0, max=2 ** 64 - 1),
              help="override every experiment's seed")
@click.option("--trials", default=None, type=click.IntRange(min=1),
              help="override every experiment's trial count")
@click.option("--threads", default=1, show_default=True, type=click.IntRange(min=1),
              help="worker threads for the simulation")
@click.option("--assert", "assert_mode", is_flag=True,
              help="exit 3 if any simulated experiment misses its agreement gate")
@click.option("--json", "as_json", is_flag=True, help="print the full result payload as JSON")
@_server_option
def run(scenario: str, output: str, seed: int | None, trials: int | None, threads: int,
        assert_mode: bool, as_json: bool, server: str | None) -> None:
    body = _run_body(scenario)
    body.update({"seed": seed, "trials": trials, "threads": threads})
    try:
        payload = _call(server, "POST", "/run", body)
    except (ServiceError, httpx.HTTPError) as exc:
        _fail(str(exc))
    paths = write_scenario_outputs(payload, output)
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for exp in payload["experiments"]:
            line = f"{exp['name']}: {exp['kind']}, {len(exp['analytic'])} analytic bins"
            report = exp.get("report")
            if report is not None:
                line += (f", ci violations {report['floor_ci_violations']}/{report['floor_bins']}"
                         f", max|err| {report['max_abs_error']:.3g}"
                         f", {'ok' if exp['passed'] else 'MISSED GATE'}")
            click.echo(line)
        click.echo(f"wrote {len(paths)} files to {output}")
    if assert_mode and not payload["passed"]:
        failed = [e["name"] for e in payload["experiments"] if not e["passed"]]
        click.echo(f"assertion failed: {', '.join(failed)}", err=True)
        sys.exit(EXIT_COMPARISON)


@main.command(help="Start the HTTP service.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
