"""Command-line front end.

Every command writes one report. JSON reports carry ``version``,
``command``, ``config``, ``result``, ``provenance`` and ``duration_ms``; CSV
reports have a header row and one row per parameter point.

Exit status: 0 on success, 1 when a verification or statistical test fails,
2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import __version__, bounds, experiments, oracle
from .cube import CubeSpec
from .errors import ValidationError
from .hitting import sample_trace
from .rng import MASK64, derive_stream
from .sampler import split_probabilities

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

STOCHASTIC = {"hitting", "connectivity", "census", "process", "tworound"}

# Largest d each command accepts.
DIM_CAPS = {
    "hitting": 22,
    "connectivity": 22,
    "census": 22,
    "process": 22,
    "tworound": 3,
    "verify": oracle.MAX_SUBSET_DIM,
    "bounds": 30,
}


@dataclass
class RunConfig:
    command: str
    dim: list[int]
    p: list[float]
    epsilon: float | None
    trials: int
    seed: int | None
    workers: int | None
    format: str
    out: str | None
    exact: bool
    threshold: float
    index: int
    tolerance: float
    reproducible: bool


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 as well; keep the usage on stderr
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 < value <= MASK64:
        raise argparse.ArgumentTypeError("seed must be a nonzero 64-bit unsigned integer (0 is rejected)")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubeperc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, stochastic=True, grid=False, eps=False, trials=1000):
        nargs = "+" if grid else None
        p.add_argument("--dim", type=int, nargs=nargs, required=True)
        if stochastic:
            p.add_argument("--seed", type=_seed, required=True)
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--trials", type=int, default=trials)
        if eps:
            p.add_argument("--epsilon", type=float, required=True)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (default: standard output)")
        p.add_argument(
            "--reproducible",
            action="store_true",
            help="null out duration_ms and config.workers so reruns compare byte for byte",
        )

    p = sub.add_parser("hitting", help="estimate P[tau_D = tau_C]")
    common(p)

    p = sub.add_parser("connectivity", help="estimate P[Q^d_p connected], or compute it exactly for d <= 3")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--reproducible", action="store_true")

    p = sub.add_parser("census", help="rate at which the giant/isolated structure verdict holds")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--threshold", type=float, default=0.99)
    common(p)

    p = sub.add_parser("process", help="dump one process trace")
    p.add_argument("--index", type=int, default=0)
    common(p)

    p = sub.add_parser("verify", help="exhaustive isoperimetric sweeps")
    common(p, stochastic=False)

    p = sub.add_parser("bounds", help="tabulate the union-bound expressions over a (d, p) grid")
    p.add_argument("--p", type=float, nargs="+", required=True)
    common(p, stochastic=False, grid=True, eps=True)

    p = sub.add_parser("tworound", help="two-round exposure distribution tests")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--tolerance", type=float, default=0.005)
    common(p, eps=True, trials=100000)
    return parser


def _config(args) -> RunConfig:
    dims = args.dim if isinstance(args.dim, list) else [args.dim]
    ps = getattr(args, "p", None)
    ps = [] if ps is None else (ps if isinstance(ps, list) else [ps])
    return RunConfig(
        command=args.command,
        dim=dims,
        p=ps,
        epsilon=getattr(args, "epsilon", None),
        trials=getattr(args, "trials", 0) if args.command in STOCHASTIC else 0,
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None),
        format=args.format,
        out=args.out,
        exact=getattr(args, "exact", False),
        threshold=getattr(args, "threshold", 0.99),
        index=getattr(args, "index", 0),
        tolerance=getattr(args, "tolerance", 0.005),
        reproducible=args.reproducible,
    )


def _validate(cfg: RunConfig) -> None:
    cap = DIM_CAPS[cfg.command]
    for d in cfg.dim:
        CubeSpec(d)
        if d > cap:
            raise ValidationError(f"{cfg.command} supports d <= {cap}, got {d}")
    for p in cfg.p:
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"p must lie in [0, 1], got {p}")
    if cfg.command == "connectivity":
        if cfg.exact and cfg.dim[0] > oracle.MAX_EDGE_SUBSET_DIM:
            raise ValidationError(f"--exact needs d <= {oracle.MAX_EDGE_SUBSET_DIM}")
        if not cfg.exact and cfg.seed is None:
            raise ValidationError("--seed is required unless --exact is given")
    if cfg.command in STOCHASTIC and not (cfg.command == "connectivity" and cfg.exact):
        if cfg.trials < 1:
            raise ValidationError("--trials must be at least 1")
        if cfg.workers is None or cfg.workers < 1:
            raise ValidationError("--workers must be at least 1")
    if cfg.command == "census" and not 0.0 < cfg.threshold <= 1.0:
        raise ValidationError("--threshold must lie in (0, 1]")
    if cfg.command == "tworound":
        split_probabilities(cfg.p[0], cfg.epsilon)
        if cfg.tolerance <= 0:
            raise ValidationError("--tolerance must be positive")
    if cfg.command == "bounds" and not 0.0 < cfg.epsilon < 1.0:
        raise ValidationError("--epsilon must lie in (0, 1)")


def _run(cfg: RunConfig) -> tuple[object, list[dict], bool, str | None]:
    """Returns (json result, csv rows, verification passed, stream label)."""
    d = cfg.dim[0]
    spec = CubeSpec(d)
    seed, workers, trials = cfg.seed, cfg.workers, cfg.trials

    if cfg.command == "hitting":
        est = experiments.estimate_hitting(spec, trials, seed, workers)
        return est.to_dict(), [{"d": d, **est.to_dict()}], True, est.label

    if cfg.command == "connectivity":
        p = cfg.p[0]
        if cfg.exact:
            counts = oracle.connected_spanning_counts(d)
            exact = oracle.exact_connectivity_probability(d, Fraction(p))
            result = {"d": d, "p": p, "probability": float(exact), "fraction": str(exact), "counts": counts}
            return result, [{"d": d, "p": p, "probability": float(exact)}], True, None
        est = experiments.estimate_connectivity(spec, p, trials, seed, workers)
        return est.to_dict(), [{"d": d, "p": p, **est.to_dict()}], True, est.label

    if cfg.command == "census":
        p = cfg.p[0]
        summary = experiments.census_experiment(spec, p, cfg.threshold, trials, seed, workers)
        row = {"d": d, "p": p, "threshold": cfg.threshold, **summary.verdict.to_dict(),
               "mean_giant_fraction": summary.mean_giant_fraction}
        return summary.to_dict(), [row], True, summary.verdict.label

    if cfg.command == "process":
        label = experiments.label_for("process", spec)
        trace = sample_trace(spec, derive_stream(seed, label, cfg.index))
        result = trace.to_dict()
        return result, [{k: v for k, v in result.items() if k != "provenance"}], True, label

    if cfg.command == "verify":
        reports = oracle.verify_all(d)
        result = {r.name: r.to_dict() for r in reports}
        rows = [{"d": d, "sweep": r.name, "subsets_checked": r.subsets_checked,
                 "tight_witnesses": r.tight_witnesses, "violations": len(r.violations)} for r in reports]
        return result, rows, all(r.holds for r in reports), None

    if cfg.command == "bounds":
        reports = [bounds.bounds_report(dd, p, cfg.epsilon) for dd in cfg.dim for p in cfg.p]
        rows = [{k: v for k, v in r.to_dict().items() if k != "log"} for r in reports]
        return {"points": [r.to_dict() for r in reports]}, rows, True, None

    if cfg.command == "tworound":
        rep = experiments.tworound_experiment(
            spec, cfg.p[0], cfg.epsilon, trials, seed, workers, tolerance=cfg.tolerance
        )
        row = {k: v for k, v in rep.to_dict().items() if k not in ("edge_frequencies", "provenance")}
        return rep.to_dict(), [row], rep.passed, rep.label

    raise ValidationError(f"unknown command {cfg.command}")


def _finite(value):
    """JSON has no infinities; spell them out as strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def render_json(cfg: RunConfig, result, label: str | None, duration_ms: float) -> str:
    config = asdict(cfg)
    if cfg.reproducible:
        config["workers"] = None
        duration_ms = None
    report = {
        "version": __version__,
        "command": cfg.command,
        "config": config,
        "result": result,
        "provenance": {"seed": cfg.seed, "label": label},
        "duration_ms": duration_ms,
    }
    return json.dumps(_finite(report), indent=2, sort_keys=False, allow_nan=False) + "\n"


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    header = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _finite(v) for k, v in row.items()})
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"cubeperc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    cfg = _config(args)
    try:
        _validate(cfg)
        start = time.perf_counter()
        result, rows, passed, label = _run(cfg)
        elapsed = round((time.perf_counter() - start) * 1000.0, 3)
    except ValidationError as exc:
        print(f"cubeperc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render_json(cfg, result, label, elapsed) if cfg.format == "json" else render_csv(rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
