"""Command-line entry point.

Exit codes: 0 success, 1 I/O error, 2 parse error, 3 invalid arguments or
configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .anonymity import anonymizability, count_k_anonymous, temporal_spatial_ratio
from .generalization import aggregate
from .ingest import ParseError, ProjectionSpec, filter_daily_activity, ingest_csv, parse_timestamp
from .model import DistanceParams, validate_dataset
from .stats import (
    SMALL_SAMPLE,
    Ecdf,
    UndefinedStatistic,
    cdf_table,
    ecdf_inverse,
    gini,
    tail_weight,
)
from .synth import PopulationSpec, generate

EXIT_IO, EXIT_PARSE, EXIT_CONFIG = 1, 2, 3
CDF_MAX_POINTS = 1000
QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _level(text: str) -> tuple[int, int]:
    try:
        cell, bin_ = text.lower().split("x")
        return int(cell), int(bin_)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level {text!r}, expected CELLxBIN e.g. 1000x60") from None


def _add_params(p: argparse.ArgumentParser):
    d = DistanceParams()
    p.add_argument("--ws", type=float, default=d.w_s, help="spatial weight")
    p.add_argument("--wt", type=float, default=d.w_t, help="temporal weight")
    p.add_argument("--delta-max-s", type=float, default=d.delta_max_s, help="spatial saturation, meters")
    p.add_argument("--delta-max-t", type=float, default=d.delta_max_t, help="temporal saturation, minutes")


def _params(args) -> DistanceParams:
    return DistanceParams(args.ws, args.wt, args.delta_max_s, args.delta_max_t)


def _load(path):
    d = io.read_dataset(path)
    problems = validate_dataset(d)
    if problems:
        v = problems[0]
        raise ConfigError(f"invalid dataset ({len(problems)} violations), first: {v.rule} {v.pseudo_id or ''}".rstrip())
    return d


def _cdf_rows(values):
    values = [v for v in values if not math.isnan(v)]
    if not values:
        return []
    return cdf_table(values, min(len(values), CDF_MAX_POINTS))


def _write_cdf(path, values):
    io.write_table(path, ("value", "cumulative_probability"), _cdf_rows(values))


def _delta_summary(deltas) -> dict:
    e = Ecdf(deltas)
    v = e.sorted_values
    return {
        "n_users": int(e.n),
        "median": ecdf_inverse(e, 0.5),
        "mean": math.fsum(v.tolist()) / e.n,
        "quantiles": {f"{q:g}": ecdf_inverse(e, q) for q in QUANTILES},
        "fraction_at_zero": float(np.mean(v == 0.0)),
        "fraction_at_one": float(np.mean(v >= 1.0)),
    }


def cmd_ingest(args) -> int:
    spec = None
    if (args.center_lat is None) != (args.center_lon is None):
        raise ConfigError("--center-lat and --center-lon must be given together")
    if args.center_lat is not None:
        spec = ProjectionSpec(args.center_lat, args.center_lon)
    epoch = None
    if args.epoch is not None:
        try:
            epoch = parse_timestamp(args.epoch)
        except ValueError:
            raise ConfigError(f"invalid --epoch {args.epoch!r}, expected YYYY-MM-DDTHH:MM") from None
    d = ingest_csv(args.input, spec, epoch, args.epoch_minutes)
    if args.filter_days is not None:
        before = len(d)
        d = filter_daily_activity(d, args.filter_days)
        print(f"daily activity filter ({args.filter_days} days): kept {len(d)} of {before} users")
    io.write_dataset(d, args.output)
    t = np.concatenate([u.t for u in d.users]) if len(d) else np.zeros(1, dtype=np.int64)
    xs = np.concatenate([u.x for u in d.users]) if len(d) else np.zeros(1)
    ys = np.concatenate([u.y for u in d.users]) if len(d) else np.zeros(1)
    print(f"user_count: {len(d)}")
    print(f"sample_count: {d.n_samples}")
    print(f"epoch: {d.epoch.strftime('%Y-%m-%dT%H:%M')}")
    print(f"time_span_min: {int(t.min())} {int(t.max())}")
    print(f"bbox_m: {io.fmt(xs.min())} {io.fmt(ys.min())} {io.fmt(xs.max())} {io.fmt(ys.max())}")
    return 0


def cmd_analyze(args) -> int:
    ks = sorted(set(args.k or [2]))
    if ks[0] < 2:
        raise ConfigError("k must be >= 2")
    p = _params(args)
    d = _load(args.input)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    reports = {k: anonymizability(d, k, p, args.method) for k in ks}
    ids = sorted(reports[ks[0]].per_user)
    header = ["pseudo_id"] + [f"delta_k{k}" for k in ks] + [f"neighbors_k{k}" for k in ks]
    rows = []
    for a in ids:
        rows.append(
            [a]
            + [reports[k].per_user[a].delta_k for k in ks]
            + [";".join(reports[k].per_user[a].neighbor_ids) for k in ks]
        )
    io.write_table(out / "deltas.csv", header, rows)
    summary = {"params": p.as_dict(), "n_users": len(d), "method": args.method, "k": {}}
    for k in ks:
        deltas = [reports[k].per_user[a].delta_k for a in ids]
        _write_cdf(out / f"cdf_k{k}.csv", deltas)
        count, frac = count_k_anonymous(d, k)
        summary["k"][str(k)] = {**_delta_summary(deltas), "count_k_anonymous": count, "fraction_k_anonymous": frac}
    io.write_json(out / "summary.json", summary)
    for k in ks:
        s = summary["k"][str(k)]
        print(f"k={k}: median {io.fmt(s['median'])}, fraction_at_zero {io.fmt(s['fraction_at_zero'])}")
    return 0


def cmd_sweep(args) -> int:
    if not args.level:
        raise ConfigError("at least one --level is required")
    if args.k < 2:
        raise ConfigError("k must be >= 2")
    p = _params(args)
    d = _load(args.input)
    for c, b in args.level:
        try:
            aggregate(d.replace(users=[]), c, b)
        except ValueError as exc:
            raise ConfigError(f"invalid level {c}x{b}: {exc}") from None
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, (c, b) in enumerate(args.level):
        g = aggregate(d, c, b)
        rep = anonymizability(g, args.k, p, args.method)
        deltas = [rep.per_user[a].delta_k for a in sorted(rep.per_user)]
        _write_cdf(out / f"cdf_level{i:02d}_{c}x{b}.csv", deltas)
        count, frac = count_k_anonymous(g, args.k)
        med = ecdf_inverse(Ecdf(deltas), 0.5)
        rows.append([f"{c}x{b}", c, b, count, frac, med])
        print(f"level {c}x{b}: fraction_k_anonymous {io.fmt(frac)}, median_delta {io.fmt(med)}")
    io.write_table(
        out / "sweep_summary.csv",
        ("level", "cell_side_m", "bin_width_min", "count_k_anonymous", "fraction_k_anonymous", "median_delta"),
        rows,
    )
    return 0


def _stat(fn, values, flags, name):
    try:
        return fn(values)
    except UndefinedStatistic:
        flags.append(f"{name}:undefined")
        return math.nan


def decompose_rows(report) -> list[dict]:
    """Per-user dispersion statistics of the matched spatial/temporal terms."""
    out = []
    for a in sorted(report.per_user):
        rec = report.per_user[a]
        sp, tp = rec.spatial_components, rec.temporal_components
        total = sp + tp
        flags = []
        row = {"pseudo_id": a, "delta_k": rec.delta_k, "temporal_spatial_ratio": temporal_spatial_ratio(report, a)}
        for name, vals in (("spatial", sp), ("temporal", tp), ("total", total)):
            row[f"gini_{name}"] = _stat(gini, vals, flags, f"gini_{name}")
        for name, vals in (("spatial", sp), ("temporal", tp), ("total", total)):
            row[f"tail_weight_{name}"] = _stat(lambda v: tail_weight(Ecdf(v)), vals, flags, f"tail_weight_{name}")
        if len(sp) < SMALL_SAMPLE:
            flags.append("small_sample")
        row["n_components"] = int(len(sp))
        row["flags"] = ";".join(flags)
        out.append(row)
    return out


DECOMPOSE_COLUMNS = (
    "pseudo_id", "delta_k", "temporal_spatial_ratio",
    "gini_spatial", "gini_temporal", "gini_total",
    "tail_weight_spatial", "tail_weight_temporal", "tail_weight_total",
    "n_components", "flags",
)


def _nanmedian(values):
    v = [x for x in values if not math.isnan(x)]
    return ecdf_inverse(Ecdf(v), 0.5) if v else math.nan


def cmd_decompose(args) -> int:
    if args.k < 2:
        raise ConfigError("k must be >= 2")
    p = _params(args)
    d = _load(args.input)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    report = anonymizability(d, args.k, p, args.method)
    rows = decompose_rows(report)
    io.write_table(out / "per_user.csv", DECOMPOSE_COLUMNS, [[r[c] for c in DECOMPOSE_COLUMNS] for r in rows])
    summary = {"params": p.as_dict(), "k": args.k, "n_users": len(rows), "statistics": {}}
    for col in DECOMPOSE_COLUMNS[2:9]:
        vals = [r[col] for r in rows]
        _write_cdf(out / f"cdf_{col}.csv", vals)
        summary["statistics"][col] = {
            "median": _nanmedian(vals),
            "n_defined": sum(1 for v in vals if not math.isnan(v)),
        }
    ratios = [r["temporal_spatial_ratio"] for r in rows]
    # ratio >= 4 <=> temporal terms are >= 80% of the total
    summary["fraction_ratio_at_least_4"] = sum(1 for v in ratios if v >= 4) / len(ratios)
    io.write_json(out / "summary.json", summary)
    st = summary["statistics"]
    print(f"median temporal_spatial_ratio: {io.fmt(st['temporal_spatial_ratio']['median'])}")
    print(f"median tail_weight spatial/temporal: {io.fmt(st['tail_weight_spatial']['median'])} / "
          f"{io.fmt(st['tail_weight_temporal']['median'])}")
    return 0


GENERATE_FLAGS = {
    "users": "n_users",
    "days": "days",
    "seed": "seed",
    "tail_fraction": "tail_fraction",
    "jitter": "temporal_jitter_min",
    "extent": "region_extent_m",
    "anchors": "anchors_per_user",
    "events_per_day": "events_per_day",
    "tail_shape": "temporal_tail_shape",
    "tail_scale": "tail_scale_min",
    "anchor_pool": "anchor_pool",
    "routines": "routines",
}


def cmd_generate(args) -> int:
    kw = {field: getattr(args, flag) for flag, field in GENERATE_FLAGS.items() if getattr(args, flag) is not None}
    spec = PopulationSpec(**kw)
    d = generate(spec)
    io.write_raw_csv(d, args.output)
    print(json.dumps({"epoch": d.epoch.strftime("%Y-%m-%dT%H:%M"), **d.meta["generator"]}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anonymizability", description="Anonymizability analysis of mobile traffic fingerprints")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse a raw CSV into a canonical dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--epoch", help="dataset epoch YYYY-MM-DDTHH:MM (default: midnight of first record)")
    p.add_argument("--epoch-minutes", action="store_true", help="timestamps are integer minutes since epoch")
    p.add_argument("--center-lat", type=float)
    p.add_argument("--center-lon", type=float)
    p.add_argument("--filter-days", type=int, help="keep users active on each of the first N days")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="anonymizability measure for one or more k")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--k", type=int, action="append", help="repeatable; default 2")
    p.add_argument("--method", choices=("pruned", "exhaustive"), default="pruned")
    _add_params(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="anonymizability across aggregation levels")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--level", type=_level, action="append", help="CELLxBIN, meters x minutes; repeatable")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--method", choices=("pruned", "exhaustive"), default="pruned")
    _add_params(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decompose", help="spatial/temporal decomposition and dispersion")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--method", choices=("pruned", "exhaustive"), default="pruned")
    _add_params(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("generate", help="write a synthetic population as input CSV")
    p.add_argument("--output", required=True)
    p.add_argument("--users", type=int)
    p.add_argument("--days", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--jitter", type=float, help="per-event time jitter scale, minutes")
    p.add_argument("--extent", type=float, help="region side, meters")
    p.add_argument("--anchors", type=int, help="anchors per user")
    p.add_argument("--events-per-day", type=float)
    p.add_argument("--tail-shape", type=float)
    p.add_argument("--tail-scale", type=float, help="heavy-tail offset scale, minutes")
    p.add_argument("--anchor-pool", type=int, help="number of shared places")
    p.add_argument("--routines", type=int, help="number of weekly routine templates")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
