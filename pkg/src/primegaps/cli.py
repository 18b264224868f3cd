"""Unified command-line front end.

One binary, subcommand style; every randomized command is reproducible
from (command line + seed) alone, defaulting to seed 0.  Validation
errors exit with code 2 and a one-line machine-parseable reason.
"""

import argparse
import concurrent.futures
import csv
import io
import json
import sys

from . import construction, covering, stats
from . import primes as primes_mod


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------- commands


def cmd_gaps(args: dict) -> dict:
    limit = int(args["limit"])
    if limit < 3:
        raise ValidationError("limit must be >= 3")
    if args.get("merits"):
        rows = primes_mod.merit_report(limit)
    else:
        rows = [
            {"start": r.start, "gap": r.gap} for r in primes_mod.gap_records(limit)
        ]
        if not args.get("records"):
            rows = rows[-1:]
    return {"command": "gaps", "limit": limit, "records": rows}


def cmd_jacobsthal(args: dict) -> dict:
    if args.get("n") is not None:
        n = int(args["n"])
        label = {"n": n}
    elif args.get("primorial") is not None:
        x = int(args["primorial"])
        n = primes_mod.primorial(x)
        label = {"primorial_of": x}
    else:
        raise ValidationError("need --n or --primorial")
    return {"command": "jacobsthal", **label, "j": covering.jacobsthal(n)}


def cmd_ycover(args: dict) -> dict:
    x = int(args["x"])
    mode = args.get("mode", "exact")
    if mode == "exact":
        budget = int(args.get("budget") or covering.DEFAULT_NODE_BUDGET)
        try:
            y, witness = covering.exact_Y(x, budget)
            optimal = True
        except covering.BudgetExceeded as exc:
            y, witness, optimal = exc.best_y, exc.witness, False
    elif mode == "greedy":
        y, witness = covering.greedy_Y(x)
        optimal = False
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return {
        "command": "ycover",
        "x": x,
        "mode": mode,
        "y": y,
        "optimal": optimal,
        "witness": witness.to_json(),
    }


def cmd_assemble(args: dict) -> dict:
    assignment = covering.load_assignment(args["input"])
    y = int(args["y"])
    cert = covering.crt_assemble(assignment, y)
    payload = cert.to_json()
    if args.get("out"):
        with open(args["out"], "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
    return {"command": "assemble", "certificate": payload}


def cmd_check(args: dict) -> dict:
    cert = covering.load_certificate(args["cert"])
    ok = covering.check_certificate(cert)
    return {"command": "check", "valid": ok, "m": str(cert.m), "y": cert.y}


def cmd_construct(args: dict) -> dict:
    params = construction.ConstructionParams.create(
        r=int(args["r"]),
        x=int(args["x"]),
        y=int(args["y"]) if args.get("y") is not None else None,
        z=int(args["z"]) if args.get("z") is not None else None,
        epsilon=float(args.get("epsilon") or 0.1),
        seed=int(args.get("seed") or 0),
    )
    assignment, report = construction.run_construction(params)
    payload = {"command": "construct", "seed": params.seed, "report": report.to_json()}
    if args.get("report"):
        with open(args["report"], "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, indent=1, sort_keys=True)
    if args.get("emit"):
        with open(args["emit"], "w", encoding="utf-8") as fh:
            json.dump(assignment.to_json(), fh, indent=1)
    return payload


def cmd_stats_alpha(args: dict) -> dict:
    approx = stats.singular_series(int(args["r"]), int(args["cutoff"]))
    return {
        "command": "stats.alpha",
        "r": approx.r,
        "cutoff": approx.cutoff,
        "value": approx.value,
        "tail_bound": approx.tail_bound,
        "low_precision": approx.low_precision,
    }


def cmd_stats_beta(args: dict) -> dict:
    kind, r, p = args["kind"], int(args["r"]), int(args["p"])
    system = stats.make_form_system(kind, r, m=int(args.get("m") or 0), i=int(args.get("i") or 0))
    beta = stats.local_factor(system, p)
    squared = kind in ("progression_pair_d3", "shifted_d3")
    closed = stats.beta_closed_form(r, p, squared)
    return {
        "command": "stats.beta",
        "kind": kind,
        "r": r,
        "p": p,
        "beta": str(beta),
        "beta_float": float(beta),
        "closed_form": str(closed),
        "matches_closed_form": beta == closed,
    }


def cmd_stats_degrees(args: dict) -> dict:
    r, x, y = int(args["r"]), int(args["x"]), int(args["y"])
    params = construction.ConstructionParams(r=r, x=x, y=y, z=2)
    params.validate()
    graph = construction.build_relation(params)
    side = args["side"].upper()
    ds = stats.degree_stats(params, graph, side, int(args.get("i") or 0))
    return {
        "command": "stats.degrees",
        "r": r,
        "x": x,
        "y": y,
        "side": side,
        "i": ds.i,
        "vertices": int(len(ds.counts)),
        "predicted": ds.predicted,
        "quantiles": ds.quantiles,
        "max_ratio": ds.max_ratio,
    }


def cmd_stats_montecarlo(args: dict) -> dict:
    params = construction.ConstructionParams(
        r=int(args.get("r") or 2),
        x=int(args.get("x") or 1000),
        y=int(args.get("y") or 10000),
        z=int(args.get("z") or 100),
        seed=int(args.get("seed") or 0),
    )
    params.validate()
    out = stats.montecarlo_stage2(params, args["target"], int(args["trials"]))
    return {"command": "stats.montecarlo", "seed": params.seed, **out}


def cmd_stats_smooth(args: dict) -> dict:
    y, z = int(args["y"]), int(args["z"])
    count, prediction = stats.smooth_count(y, z)
    return {
        "command": "stats.smooth",
        "y": y,
        "z": z,
        "count": count,
        "de_bruijn_prediction": prediction,
    }


_BATCHABLE = {
    "gaps": cmd_gaps,
    "jacobsthal": cmd_jacobsthal,
    "ycover": cmd_ycover,
    "construct": cmd_construct,
    "stats.alpha": cmd_stats_alpha,
    "stats.beta": cmd_stats_beta,
    "stats.montecarlo": cmd_stats_montecarlo,
    "stats.smooth": cmd_stats_smooth,
}


def _run_one(run: dict) -> dict:
    run = dict(run)
    name = run.pop("command", None)
    fn = _BATCHABLE.get(name)
    if fn is None:
        return {"command": name, "status": "error", "reason": f"unknown command {name!r}"}
    try:
        return {"command": name, "status": "ok", "payload": fn(run)}
    except Exception as exc:  # partial failure must not abort the batch
        return {"command": name, "status": "error", "reason": str(exc)}


def cmd_batch(args: dict) -> dict:
    with open(args["config"], encoding="utf-8") as fh:
        config = json.load(fh)
    runs = config.get("runs", [])
    if not isinstance(runs, list):
        raise ValidationError("config 'runs' must be a list")
    jobs = int(args.get("jobs") or 1)
    if jobs > 1 and runs:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, runs))
    else:
        results = [_run_one(r) for r in runs]
    report = {
        "command": "batch",
        "runs": results,
        "summary": {
            "total": len(results),
            "ok": sum(1 for r in results if r["status"] == "ok"),
        },
    }
    if args.get("out"):
        with open(args["out"], "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
    return report


# ---------------------------------------------------------------- output


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=1, sort_keys=True)
    rows = payload.get("records") or payload.get("runs")
    if rows is None:
        rows = [
            {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        ]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in rows[0]})
        return buf.getvalue().rstrip("\n")
    # table
    cols = list(rows[0])
    widths = [
        max(len(str(c)), max(len(str(r.get(c))) for r in rows)) for c in cols
    ]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(cols, widths))]
    for r in rows:
        lines.append("  ".join(str(r.get(c)).ljust(w) for c, w in zip(cols, widths)))
    return "\n".join(lines)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="primegaps")
    sub = top.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=["json", "csv", "table"], default="json")

    p = sub.add_parser("gaps", help="prime-gap records below a limit")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--records", action="store_true")
    p.add_argument("--merits", action="store_true")
    add_format(p)

    p = sub.add_parser("jacobsthal", help="Jacobsthal function j(n)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--primorial", type=int, metavar="X")
    add_format(p)

    p = sub.add_parser("ycover", help="largest coverable interval Y(x)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--budget", type=int)
    add_format(p)

    p = sub.add_parser("assemble", help="CRT-assemble a composite-run certificate")
    p.add_argument("--input", required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--out")
    add_format(p)

    p = sub.add_parser("check", help="verify a composite-run certificate")
    p.add_argument("--cert", required=True)
    add_format(p)

    p = sub.add_parser("construct", help="run the four-stage sieve")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int)
    p.add_argument("--z", type=int)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.add_argument("--emit")
    add_format(p)

    ps = sub.add_parser("stats", help="arithmetic statistics")
    ssub = ps.add_subparsers(dest="stats_command", required=True)

    p = ssub.add_parser("alpha")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    add_format(p)

    p = ssub.add_parser("beta")
    p.add_argument(
        "--kind",
        required=True,
        choices=["progression_pair_d3", "progression_d2", "shifted_d3", "shifted_d2"],
    )
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--i", type=int, default=0)
    add_format(p)

    p = ssub.add_parser("degrees")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--side", choices=["p", "q"], required=True)
    p.add_argument("--i", type=int, default=0)
    add_format(p)

    p = ssub.add_parser("montecarlo")
    p.add_argument(
        "--target",
        required=True,
        choices=["survivor_count", "pair_survival", "ap_survival"],
    )
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--x", type=int, default=1000)
    p.add_argument("--y", type=int, default=10000)
    p.add_argument("--z", type=int, default=100)
    add_format(p)

    p = ssub.add_parser("smooth")
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--z", type=int, required=True)
    add_format(p)

    p = sub.add_parser("batch", help="run a batch of commands from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    add_format(p)

    return top


_TOP_LEVEL = {
    "gaps": cmd_gaps,
    "jacobsthal": cmd_jacobsthal,
    "ycover": cmd_ycover,
    "assemble": cmd_assemble,
    "check": cmd_check,
    "construct": cmd_construct,
    "batch": cmd_batch,
}

_STATS = {
    "alpha": cmd_stats_alpha,
    "beta": cmd_stats_beta,
    "degrees": cmd_stats_degrees,
    "montecarlo": cmd_stats_montecarlo,
    "smooth": cmd_stats_smooth,
}


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    args = vars(ns)
    command = args.pop("command")
    fmt = args.pop("format", "json")
    if command == "stats":
        fn = _STATS[args.pop("stats_command")]
    else:
        fn = _TOP_LEVEL[command]
    try:
        payload = fn(args)
    except (ValidationError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(render(payload, fmt))
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
