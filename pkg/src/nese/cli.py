"""Command-line entry point.

    nese run <cfg>              execute one configuration
    nese sweep <cfg>            run every (box_size, precision) combination
    nese gen <scene> <out>      synthesize a scene with ground truth
    nese tables                 print the calibration tables
    nese serve                  start the HTTP service

With --server URL the run/sweep/gen/tables commands become thin clients
of a running service; by default they execute in-process. Exit codes:
0 success, 2 usage/config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import runner
from .config import load_run_config
from .errors import NeseError, ValidationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _client(server: str):
    import httpx

    return httpx.Client(base_url=server, timeout=600.0)


def _cmd_run(args) -> int:
    if args.server:
        with _client(args.server) as client:
            resp = client.post("/run", json={"config_path": args.config})
            resp.raise_for_status()
            print(json.dumps(resp.json()["summary"], indent=2, sort_keys=True))
            return EXIT_OK
    cfg = load_run_config(args.config)
    summary = runner.run_simulation(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.server:
        with _client(args.server) as client:
            resp = client.post("/sweep", json={"config_path": args.config})
            resp.raise_for_status()
            print(json.dumps(resp.json()["rows"], indent=2, sort_keys=True))
            return EXIT_OK
    cfg = load_run_config(args.config)
    rows = runner.run_sweep(cfg)
    print(json.dumps(rows, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.server:
        with _client(args.server) as client:
            resp = client.post("/gen", json={"scene_path": args.scene,
                                             "out_dir": args.out, "seed": args.seed})
            resp.raise_for_status()
            print(json.dumps(resp.json(), indent=2, sort_keys=True))
            return EXIT_OK
    info = runner.generate_scene(args.scene, args.out, args.seed)
    print(json.dumps(info, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_tables(args) -> int:
    if args.server:
        with _client(args.server) as client:
            resp = client.get("/tables")
            resp.raise_for_status()
            sys.stdout.write(resp.json()["text"])
            return EXIT_OK
    sys.stdout.write(runner.render_tables())
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nese", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--server", default=None, metavar="URL",
                        help="execute against a running nese service instead of in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configuration")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the configuration sweep")
    p_sweep.add_argument("config")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_gen = sub.add_parser("gen", help="generate a synthetic scene")
    p_gen.add_argument("scene")
    p_gen.add_argument("out")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(func=_cmd_gen)

    p_tables = sub.add_parser("tables", help="print the calibration tables")
    p_tables.set_defaults(func=_cmd_tables)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"nese: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NeseError as exc:
        print(f"nese: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"nese: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
