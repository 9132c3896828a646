"""Command-line client for the estimation service.

Every command builds a request for the HTTP service and writes the response
to files. By default requests are dispatched to an in-process instance of
the service (no server needed); ``--server URL`` switches to a remote one.
All commands are deterministic given their flags and never modify input
files.

CSV layout for ``--input``: header row, then columns ``y, x1..xp`` followed
by the manifold coordinates (d for euclidean:d, 3 embedded coordinates for
the sphere, angle in radians then height for a cylinder). The number of
linear covariates is inferred from the header unless ``--p`` is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import httpx

from .exceptions import ManifoldPlmError


def _make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def parse_manifold(text: str) -> dict:
    """Parse ``euclidean:d | sphere | cylinder:min:max`` into a request field."""
    parts = text.split(":")
    kind = parts[0]
    if kind == "sphere" and len(parts) == 1:
        return {"kind": "sphere"}
    if kind == "euclidean" and len(parts) == 2:
        return {"kind": "euclidean", "dim": int(parts[1])}
    if kind == "cylinder" and len(parts) == 3:
        return {"kind": "cylinder", "height_min": float(parts[1]), "height_max": float(parts[2])}
    raise argparse.ArgumentTypeError(
        f"cannot parse manifold {text!r}; expected euclidean:d, sphere or cylinder:min:max"
    )


def parse_grid(text: str) -> dict:
    """Parse ``lo:hi:count`` into a grid request field."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}; expected lo:hi:count")
    return {"lo": float(parts[0]), "hi": float(parts[1]), "count": int(parts[2])}


def parse_beta0(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _fail(message: str, payload: dict | None = None) -> int:
    body = {"error": payload or {"type": "client", "message": message}}
    print(json.dumps(body, indent=2), file=sys.stderr)
    return 1


def _post(client: httpx.Client, path: str, payload: dict) -> tuple[dict | None, int]:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json()
        except ValueError:
            detail = {"type": "http", "message": response.text}
        error = detail.get("error", detail) if isinstance(detail, dict) else detail
        return None, _fail(f"service returned {response.status_code}", error)
    return response.json(), 0


def _write_json(obj: dict, path: str) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def _score_cell(entry: dict) -> str:
    return repr(entry["score"]) if entry["feasible"] else ""


def _curve_csv(scores: list[dict]) -> str:
    lines = ["bandwidth,score,feasible"]
    for entry in scores:
        lines.append(f"{entry['bandwidth']!r},{_score_cell(entry)},{str(entry['feasible']).lower()}")
    return "\n".join(lines) + "\n"


def _read_text(path: str) -> str:
    return Path(path).read_text()


def cmd_fit(args) -> int:
    payload = {
        "manifold": args.manifold,
        "csv_text": _read_text(args.input),
        "p": args.p,
        "bandwidth": args.bandwidth,
        "grid": args.grid,
        "beta0": args.beta0,
    }
    if args.query:
        payload["query_csv_text"] = _read_text(args.query)
    with _make_client(args.server) as client:
        report, code = _post(client, "/fit", payload)
    if code:
        return code
    g_grid = report.pop("g_grid", None)
    _write_json(report, args.output)
    if g_grid is not None:
        if not args.g_output:
            return _fail("--query requires --g-output for the fitted-g CSV")
        lines = ["point,g_hat"]
        for entry in g_grid:
            point = " ".join(repr(v) for v in entry["point"])
            lines.append(f"{point},{entry['g_hat']!r}")
        Path(args.g_output).write_text("\n".join(lines) + "\n")
    return 0


def cmd_select(args) -> int:
    payload = {
        "manifold": args.manifold,
        "csv_text": _read_text(args.input),
        "p": args.p,
        "grid": args.grid,
    }
    with _make_client(args.server) as client:
        report, code = _post(client, "/select", payload)
    if code:
        return code
    _write_json(report, args.output)
    if args.curve_output:
        Path(args.curve_output).write_text(_curve_csv(report["scores"]))
    return 0


def cmd_simulate(args) -> int:
    payload = {
        "design": args.design,
        "reps": args.reps,
        "n": args.n,
        "seed": args.seed,
        "beta_true": args.beta_true,
        "noise_sd": args.noise_sd,
        "grid": args.grid,
        "threads": args.threads,
    }
    with _make_client(args.server) as client:
        report, code = _post(client, "/simulate", payload)
    if code:
        return code
    table_row = report.pop("csv")
    _write_json(report, args.output)
    csv_path = args.csv_output or str(Path(args.output).with_suffix(".csv"))
    Path(csv_path).write_text(table_row)
    return 0


def cmd_predict(args) -> int:
    payload = {
        "manifold": args.manifold,
        "csv_text": _read_text(args.input),
        "query_csv_text": _read_text(args.query),
        "p": args.p,
        "bandwidth": args.bandwidth,
        "grid": args.grid,
    }
    with _make_client(args.server) as client:
        report, code = _post(client, "/predict", payload)
    if code:
        return code
    lines = ["prediction,g_hat"]
    for pred, g in zip(report["predictions"], report["g_hat"]):
        lines.append(f"{pred!r},{g!r}")
    Path(args.output).write_text("\n".join(lines) + "\n")
    return 0


def cmd_compare(args) -> int:
    payload = {
        "manifold": args.manifold,
        "csv_text": _read_text(args.input),
        "p": args.p,
        "grid": args.grid,
    }
    with _make_client(args.server) as client:
        report, code = _post(client, "/compare", payload)
    if code:
        return code
    plm_curve = report["partially_linear"]["scores"]
    np_curve = report["nonparametric"]["scores"]
    lines = ["bandwidth,sv_score,sv_feasible,ep_score,ep_feasible"]
    for sv, ep in zip(plm_curve, np_curve):
        lines.append(
            f"{sv['bandwidth']!r},{_score_cell(sv)},{str(sv['feasible']).lower()},"
            f"{_score_cell(ep)},{str(ep['feasible']).lower()}"
        )
    Path(args.output).write_text("\n".join(lines) + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("manifold_plm.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manifold-plm",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, manifold=True):
        p.add_argument("--server", help="URL of a running service; default is in-process")
        if manifold:
            p.add_argument(
                "--manifold",
                type=parse_manifold,
                required=True,
                help="euclidean:d | sphere | cylinder:min:max",
            )

    fit = sub.add_parser("fit", help="fit the partially linear model to a CSV dataset")
    add_common(fit)
    fit.add_argument("--input", required=True, help="dataset CSV (y, x1..xp, coordinates)")
    fit.add_argument("--output", required=True, help="JSON report path")
    fit.add_argument("--p", type=int, help="number of linear covariates (default: from header)")
    fit.add_argument("--bandwidth", type=float, help="fixed bandwidth; skips selection")
    fit.add_argument("--grid", type=parse_grid, help="lo:hi:count selection grid")
    fit.add_argument("--beta0", type=parse_beta0, help="null coefficients for a Wald test, comma separated")
    fit.add_argument("--query", help="coordinates-only CSV of points to evaluate g at")
    fit.add_argument("--g-output", help="CSV path for the fitted g values at --query points")
    fit.set_defaults(func=cmd_fit)

    select = sub.add_parser("select", help="cross-validated bandwidth selection")
    add_common(select)
    select.add_argument("--input", required=True)
    select.add_argument("--output", required=True, help="JSON selection report path")
    select.add_argument("--p", type=int)
    select.add_argument("--grid", type=parse_grid)
    select.add_argument("--curve-output", help="optional CSV path for the score curve")
    select.set_defaults(func=cmd_select)

    simulate = sub.add_parser("simulate", help="Monte Carlo study of a synthetic design")
    add_common(simulate, manifold=False)
    simulate.add_argument("--design", choices=["sphere", "cylinder"], required=True)
    simulate.add_argument("--reps", type=int, required=True)
    simulate.add_argument("--n", type=int, default=200)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--beta-true", type=float, default=5.0)
    simulate.add_argument("--noise-sd", type=float, default=1.0)
    simulate.add_argument("--grid", type=parse_grid)
    simulate.add_argument("--threads", type=int, default=1, help="worker processes for replications")
    simulate.add_argument("--output", required=True, help="JSON summary path")
    simulate.add_argument("--csv-output", help="table-row CSV path (default: output with .csv)")
    simulate.set_defaults(func=cmd_simulate)

    predict = sub.add_parser("predict", help="predict responses at new covariate/point pairs")
    add_common(predict)
    predict.add_argument("--input", required=True, help="training dataset CSV")
    predict.add_argument("--query", required=True, help="CSV of x1..xp plus coordinates")
    predict.add_argument("--output", required=True, help="predictions CSV path")
    predict.add_argument("--p", type=int)
    predict.add_argument("--bandwidth", type=float)
    predict.add_argument("--grid", type=parse_grid)
    predict.set_defaults(func=cmd_predict)

    compare = sub.add_parser(
        "compare", help="split-sample score curves: partially linear vs fully nonparametric"
    )
    add_common(compare)
    compare.add_argument("--input", required=True)
    compare.add_argument("--output", required=True, help="curves CSV path")
    compare.add_argument("--p", type=int)
    compare.add_argument("--grid", type=parse_grid)
    compare.set_defaults(func=cmd_compare)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ManifoldPlmError as err:
        return _fail(str(err))
    except OSError as err:
        return _fail(f"file error: {err}")


if __name__ == "__main__":
    sys.exit(main())
