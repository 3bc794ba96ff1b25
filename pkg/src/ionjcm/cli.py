"""Command-line front end: one subcommand per run mode, plus `serve`.

The CLI is a thin client of the run engine.  By default it executes in
process; with --server URL it POSTs the same request to a running service and
writes the returned series, byte-identical to a local run.  Flags override
config-file keys, which override the mode's defaults.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx

from . import __version__, emit, runs
from .core import InvariantError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_IO = 4

_FLAG_KEYS = {
    "eta": "eta",
    "omega_hz": "omega_hz",
    "g": "g",
    "cutoff": "cutoff",
    "t_start_us": "t_start_us",
    "t_end_us": "t_end_us",
    "samples": "samples",
    "out": "out",
    "format": "format",
    "n0_mean": "n0_mean",
    "phi": "phi",
    "a": "a",
    "b": "b",
    "c": "c",
    "phi1": "phi1",
    "phi2": "phi2",
    "dist_kind": "dist_kind",
    "dist_mean": "dist_mean",
    "family": "family",
    "refine_rounds": "refine_rounds",
    "n0_max": "n0_max",
    "seed": "seed",
    "trials": "trials",
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--eta", type=float, help="Lamb-Dicke parameter (default 0.1)")
    p.add_argument("--omega-hz", type=float, dest="omega_hz",
                   help="Rabi frequency in Hz (default 5e5, i.e. Omega = 2*pi*500 kHz)")
    p.add_argument("--g", type=float, help="quadrature structure constant (default 1)")
    p.add_argument("--cutoff", type=int, help="Fock cutoff (default: chosen per mode)")
    p.add_argument("--out", help="output data file (default <mode>.<format>)")
    p.add_argument("--format", choices=("csv", "json"), help="data file format (default csv)")
    p.add_argument("--server", help="base URL of a running ionjcm service; run remotely")


def _add_timed(p: argparse.ArgumentParser):
    p.add_argument("--t-start-us", type=float, dest="t_start_us", help="first sample time (us)")
    p.add_argument("--t-end-us", type=float, dest="t_end_us", help="last sample time (us, default 600)")
    p.add_argument("--samples", type=int, help="number of time samples (default 4000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionjcm",
        description="Two-trapped-ion red-sideband dynamics: figure presets, custom runs, scans.",
    )
    parser.add_argument("--version", action="version", version=f"ionjcm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for n in range(1, 9):
        p = sub.add_parser(f"figure{n}", help=f"emit the figure-{n} data series")
        _add_common(p)
        _add_timed(p)

    p = sub.add_parser("custom-evolve", help="evolve a custom initial condition")
    _add_common(p)
    _add_timed(p)
    p.add_argument("--n0-mean", type=float, dest="n0_mean", help="coherent-state mean phonon number")
    p.add_argument("--phi", type=float, help="coherent-state phase (rad)")
    p.add_argument("--a", type=float, help="superposition amplitude on |+1>")
    p.add_argument("--b", type=float, help="superposition amplitude on |0>")
    p.add_argument("--c", type=float, help="superposition amplitude on |-1>")
    p.add_argument("--phi1", type=float, help="phase on |0> (rad)")
    p.add_argument("--phi2", type=float, help="phase on |-1> (rad)")
    p.add_argument("--dist-kind", dest="dist_kind",
                   choices=("poisson", "number", "thermal", "squeezed_vacuum"),
                   help="diagonal phonon distribution (ions start in the ground state)")
    p.add_argument("--dist-mean", type=float, dest="dist_mean", help="distribution mean phonon number")

    p = sub.add_parser("custom-scan", help="grid-then-refine search for maximum momentum squeezing")
    _add_common(p)
    _add_timed(p)
    p.add_argument("--family", choices=("case1", "case2"), help="initial-condition family")
    p.add_argument("--refine-rounds", type=int, dest="refine_rounds",
                   help="local refinement rounds (default 3)")
    p.add_argument("--n0-max", type=float, dest="n0_max",
                   help="largest initial mean scanned in case 1 (default 2.5)")

    p = sub.add_parser("verify-oracle", help="compare every closed form against brute force")
    _add_common(p)
    p.add_argument("--seed", type=int, help="RNG seed for the sample battery")
    p.add_argument("--trials", type=int, help="number of random (init, t) samples (default 200)")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    out = {}
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    return out


def _make_client(base_url: str) -> httpx.Client:
    return httpx.Client(base_url=base_url, timeout=600.0)


def _run_remote(server: str, config: runs.RunConfig) -> runs.RunResult:
    payload = {k: v for k, v in runs._config_mapping(config).items()
               if k not in ("out", "format")}
    with _make_client(server) as client:
        resp = client.post("/run", json=payload)
    if resp.status_code == 400:
        raise runs.ConfigError(resp.json().get("detail", "config rejected by server"))
    if resp.status_code == 500:
        detail = resp.json().get("detail", {})
        module = detail.get("module", "unknown") if isinstance(detail, dict) else "unknown"
        raise InvariantError(module, str(detail))
    resp.raise_for_status()
    body = resp.json()
    return runs.RunResult(mode=body["mode"], columns=body["columns"],
                          rows=body["rows"], manifest=body["manifest"])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        mapping: dict = {}
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as err:
                print(f"error: cannot read config file: {err}", file=sys.stderr)
                return EXIT_IO
            mapping = runs._parse_mapping(text)
        mapping.setdefault("mode", args.command)
        if mapping["mode"] != args.command:
            raise runs.ConfigError(
                f"config file mode {mapping['mode']!r} conflicts with subcommand {args.command!r}"
            )
        config = runs.build_config(mapping, overrides=_overrides(args))

        if getattr(args, "server", None):
            result = _run_remote(args.server, config)
        else:
            result = runs.execute(config)

        out = config.output_path()
        try:
            data_path, man_path = emit.write_run(
                out, result.columns, result.rows, result.manifest, fmt=config.format
            )
        except OSError as err:
            print(f"error: cannot write output: {err}", file=sys.stderr)
            return EXIT_IO

        print(f"[ionjcm] {config.mode}: {len(result.rows)} rows -> {data_path}")
        print(f"[ionjcm] manifest -> {man_path}")
        if result.manifest.get("scan"):
            s = result.manifest["scan"]
            loc = " ".join(f"{k}={v:.6g}" for k, v in s["location"].items())
            print(f"[ionjcm] optimum var_p = {s['optimum_value']:.6f} g^2 at {loc}")
        if result.manifest.get("checks"):
            c = result.manifest["checks"]
            print(f"[ionjcm] max deviation {c['max_deviation']:.3e} "
                  f"(tolerance {c['tolerance']:.1e}): "
                  f"{'ok' if c['passed'] else 'FAILED'}")
        return EXIT_OK

    except runs.ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as err:
        print(f"numerical invariant violated: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    except httpx.HTTPError as err:
        print(f"server error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
