"""Command line interface.

Each subcommand builds the same request models the HTTP service accepts and
either calls the handlers in process (the default) or posts them to a
running service when --server is given; outputs are byte-identical either
way.  Exit codes: 0 success, 1 internal or transport error, 2 invalid
input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import BudgetExceededError, ValidationError
from .netio import canonical_json, network_payload, load_network, regions_to_csv
from .regions import DEFAULT_BUDGET, DEFAULT_TOL
from .service import handlers, schemas

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3


class _RemoteError(Exception):
    """A --server request failed; carries the exit code to use."""

    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise ValidationError(
            f"expected a comma-separated list of numbers, got {text!r}"
        ) from None


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    url = server.rstrip("/") + path
    try:
        resp = httpx.post(url, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise _RemoteError(EXIT_INTERNAL, f"request to {url} failed: {exc}") from None
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        code = detail.get("code")
        message = detail.get("message", resp.text)
        if code == "budget":
            raise _RemoteError(EXIT_BUDGET, message)
        raise _RemoteError(EXIT_INVALID, message)
    if 400 <= resp.status_code < 500:
        raise _RemoteError(EXIT_INVALID, f"{url} rejected the request: {detail or resp.text}")
    raise _RemoteError(EXIT_INTERNAL, f"{url} returned status {resp.status_code}")


def _network_model(path: str) -> schemas.NetworkPayload:
    net = load_network(path)
    return schemas.NetworkPayload(**network_payload(net))


def _box_model(args, network: schemas.NetworkPayload) -> schemas.BoxPayload | None:
    if args.box is None:
        return None
    lo, hi = args.box
    dim = len(network.layers[0].weights[0])
    return schemas.BoxPayload(lo=[lo] * dim, hi=[hi] * dim)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_analyze(args) -> int:
    network = _network_model(args.network)
    req = schemas.AnalyzeRequest(network=network, x=_parse_vector(args.x))
    if args.server:
        data = _post(args.server, "/analyze", req.model_dump())
    else:
        data = handlers.analyze(req).model_dump()
    _emit(canonical_json(data), args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    network = _network_model(args.network)
    req = schemas.EnumerateRequest(
        network=network, box=_box_model(args, network), tol=args.tol, budget=args.budget
    )
    if args.server:
        data = _post(args.server, "/enumerate", req.model_dump())
    else:
        data = handlers.enumerate_handler(req).model_dump()
    csv_text = regions_to_csv(
        (row["configuration"], row["verdict"], row["atoms"], row["lipschitz_bound"])
        for row in data["rows"]
    )
    _emit(csv_text, args.out)
    return EXIT_OK


def cmd_tile2d(args) -> int:
    network = _network_model(args.network)
    req = schemas.Tile2dRequest(
        network=network, box=_box_model(args, network), tol=args.tol, budget=args.budget
    )
    if args.server:
        data = _post(args.server, "/tile2d", req.model_dump())
    else:
        data = handlers.tile2d(req).model_dump()
    Path(args.out_svg).write_text(data["svg"])
    Path(args.out_doc).write_text(canonical_json(data["document"]))
    count = len(data["document"]["regions"])
    sys.stdout.write(f"wrote {args.out_doc} and {args.out_svg} ({count} regions)\n")
    return EXIT_OK


def cmd_bounds(args) -> int:
    network = _network_model(args.network)
    req = schemas.BoundsRequest(
        network=network,
        config=args.config,
        beta=args.beta,
        box=_box_model(args, network),
        tol=args.tol,
        budget=args.budget,
    )
    if args.server:
        data = _post(args.server, "/bounds", req.model_dump())
    else:
        data = handlers.bounds(req).model_dump()
    _emit(canonical_json(data), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def _add_common(sub, box_help: str = "uniform box bounds applied to every input coordinate"):
    sub.add_argument("--network", required=True, help="path to the network JSON file")
    sub.add_argument("--server", help="base URL of a running service (default: run in process)")
    sub.add_argument("--box", nargs=2, type=float, metavar=("LO", "HI"), help=box_help)
    sub.add_argument("--tol", type=float, default=DEFAULT_TOL, help="feasibility tolerance")
    sub.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration node budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reluscope",
        description="Piecewise-affine analysis of feedforward ReLU networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="affine piece, atoms and synthesis at one input")
    p.add_argument("--network", required=True, help="path to the network JSON file")
    p.add_argument("--server", help="base URL of a running service (default: run in process)")
    p.add_argument("--x", required=True, help="input vector, comma separated (use --x=-1,2 for negatives)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("enumerate", help="enumerate all regions over a box as CSV")
    _add_common(p)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("tile2d", help="tiling document and SVG for a 2-input network")
    _add_common(p)
    p.add_argument("--out-svg", default="tiling.svg", help="SVG output path")
    p.add_argument("--out-doc", default="tiling.json", help="JSON document output path")
    p.set_defaults(func=cmd_tile2d)

    p = sub.add_parser("bounds", help="Lipschitz and gradient-stability bound reports")
    _add_common(p)
    p.add_argument("--config", help="restrict to one configuration, e.g. 0110|101")
    p.add_argument("--beta", type=float, help="input perturbation size; adds gradient reports")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except BudgetExceededError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except _RemoteError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
