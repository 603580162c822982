"""Command-line front end.

Subcommands: ``median`` (rank/median queries, optionally through the tiled
simulator), ``cluster`` (k-means / k-medians with model export), ``stats``
(the summary-statistics table), ``sweep`` (cluster-count sweep), and
``cost-report`` (in-situ vs streaming bit-movement).

Every run emits a manifest (subcommand, resolved flags, seed, input digest,
version, timestamp) to ``--manifest`` or stderr; outputs themselves carry no
timestamp, so identical invocations produce byte-identical results.  All
diagnostics go to stderr; exit status is nonzero on any error.

The default tile geometry can be set with the ``BITMEDIAN_TILE`` environment
variable as "rows_per_array,group_size,tree_fanin".
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

from . import __version__, bitplane, clustering, ingest
from .errors import BitMedianError, MissingError, RangeError
from .fixedpoint import FixedPointCodec, codec_for_values, decode, encode
from .pimsim import (
    TileConfig,
    partition,
    simulated_median,
    simulated_rank_select,
    streaming_baseline_cost,
)

ENV_TILE = "BITMEDIAN_TILE"

COST_REPORT_FIELDS = (
    "N",
    "W",
    "tiles",
    "counting_steps",
    "merge_ops",
    "bits_moved",
    "host_bits_moved",
    "ratio",
)

COST_FORMULA_LINES = (
    "# bits_moved = sum over columns of [edges(T,F) * 2 * ceil(log2(N+1)) + T]",
    "#   T = tiles holding selected rows, F = tree fan-in,",
    "#   edges(T,F) = T + ceil(T/F) + ceil(T/F^2) + ... (partials entering each tree level)",
    "# counting_steps = sum over columns and tiles of ceil(rows_selected_in_tile / G)",
    "# host_bits_moved = N * W per selection (streaming baseline)",
    "# ratio = bits_moved / host_bits_moved",
)


@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    seed: int | None
    input_sha256: str
    version: str
    timestamp: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _emit_manifest(args, parser_dest_names) -> RunManifest:
    flags = {
        name: getattr(args, name)
        for name in parser_dest_names
        if name not in ("func", "manifest")
    }
    for key, val in list(flags.items()):
        if isinstance(val, TileConfig):
            flags[key] = asdict(val)
    manifest = RunManifest(
        subcommand=args.subcommand,
        flags=flags,
        seed=getattr(args, "seed", None),
        input_sha256=_digest(args.input),
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    text = manifest.to_json()
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=sys.stderr)
    return manifest


def _tile_config(args) -> TileConfig:
    base = TileConfig()
    env = os.environ.get(ENV_TILE)
    if env:
        try:
            r, g, f = (int(x) for x in env.split(","))
        except ValueError:
            raise RangeError(
                f"{ENV_TILE} must be 'rows,group,fanin', got {env!r}"
            ) from None
        base = TileConfig(r, g, f)
    rows = args.rows_per_array or base.rows_per_array
    group = args.group_size or min(base.group_size, rows)
    return TileConfig(
        rows_per_array=rows,
        group_size=group,
        tree_fanin=args.tree_fanin or base.tree_fanin,
        count_width=args.count_width,
    )


def _codec_for(args, values) -> FixedPointCodec:
    bias = args.bias
    if bias is None and min(values) < 0:
        bias = 1 << (args.width - 1)
    if args.frac_bits is not None:
        return FixedPointCodec(width=args.width, frac_bits=args.frac_bits, bias=bias or 0)
    return codec_for_values(values, width=args.width, bias=bias)


def _select_column(ds, column) -> int:
    if column is None:
        if ds.d != 1:
            raise RangeError(
                f"input has {ds.d} columns; pick one with --column"
            )
        return 0
    if column in ds.column_names:
        return ds.column_names.index(column)
    try:
        j = int(column)
    except ValueError:
        raise RangeError(f"no column named {column!r}") from None
    if not 0 <= j < ds.d:
        raise RangeError(f"column index {j} out of range 0..{ds.d - 1}")
    return j


def _column_values(ds, j) -> list[float]:
    vals = ds.column(j)
    for i, v in enumerate(vals):
        if v is None:
            raise MissingError(f"missing value in column {ds.column_names[j]}, row {i}")
    return vals


def _participating_tiles(plan, mask) -> int:
    count = 0
    for start, stop in plan.spans:
        span_mask = ((1 << (stop - start)) - 1) << start
        if mask & span_mask:
            count += 1
    return count


# ---------------------------------------------------------------- median


def cmd_median(args) -> int:
    ds = ingest.parse(args.input, delimiter=args.delimiter)
    j = _select_column(ds, args.column)
    values = _column_values(ds, j)
    codec = _codec_for(args, values)
    words = [encode(v, codec) for v in values]
    m = bitplane.build_bitplanes(words, codec.width)
    rank = args.rank if args.rank is not None else bitplane.median_rank(len(words))
    if args.simulate:
        plan = partition(m, _tile_config(args))
        word, ledger = simulated_rank_select(plan, rank)
        streaming_baseline_cost(len(words), codec.width, ledger)
        print(f"{decode(word, codec):.12g}")
        report = {
            "N": len(words),
            "W": codec.width,
            "tiles": plan.n_tiles,
            **ledger.as_dict(),
        }
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        word = bitplane.rank_select(m, rank)
        print(f"{decode(word, codec):.12g}")
    return 0


# ---------------------------------------------------------------- cluster


def _split_indices(n, percentage, seed, preserve_order):
    order = list(range(n))
    if not preserve_order:
        random.Random(seed).shuffle(order)
    cut = int(n * percentage / 100)
    return order[:cut], order[cut:]


def cmd_cluster(args) -> int:
    if args.split_percentage is not None and not 0 < args.split_percentage < 100:
        raise RangeError(
            f"--split-percentage must be strictly between 0 and 100, got {args.split_percentage}"
        )
    ds = ingest.parse(args.input, delimiter=args.delimiter)
    flat = [v for row in ds.rows for v in row if v is not None]
    codec = _codec_for(args, flat)
    ds = ingest.encode_dataset(ds, codec)

    if args.split_percentage is not None:
        train_idx, hold_idx = _split_indices(
            ds.n, args.split_percentage, args.seed, args.preserve_order
        )
    else:
        train_idx, hold_idx = list(range(ds.n)), []
    train = [ds.encoded[i] for i in train_idx]

    engine = "simulated" if args.engine == "sim" else "reference"
    cfg = clustering.ClusterConfig(
        k=args.k,
        seed=args.seed,
        max_iters=args.max_iters,
        centroid_mode=args.mode,
        convergence_epsilon=args.epsilon,
        engine=engine,
        width=codec.width,
        tile=_tile_config(args) if engine == "simulated" else None,
    )
    model = clustering.run(train, cfg)
    metric = cfg.resolved_metric
    scale = (1 << codec.frac_bits) ** (2 if metric == "sqeuclidean" else 1)

    train_obj = clustering.objective(train, model)
    holdout = None
    if hold_idx:
        hold = [ds.encoded[i] for i in hold_idx]
        hold_labels = clustering.assign(hold, model.centroids, metric)
        hold_obj = sum(
            clustering.distance(row, model.centroids[lab], metric)
            for row, lab in zip(hold, hold_labels)
        )
        holdout = {
            "n": len(hold),
            "objective_word": hold_obj,
            "objective": hold_obj / scale,
        }

    os.makedirs(args.out_dir, exist_ok=True)
    model_doc = {
        "version": __version__,
        "config": {
            "k": cfg.k,
            "seed": cfg.seed,
            "max_iters": cfg.max_iters,
            "centroid_mode": cfg.centroid_mode,
            "metric": metric,
            "convergence_epsilon": cfg.convergence_epsilon,
            "engine": cfg.engine,
            "tile": asdict(cfg.tile) if cfg.tile else None,
            "split_percentage": args.split_percentage,
            "preserve_order": args.preserve_order,
        },
        "codec": {
            "width": codec.width,
            "frac_bits": codec.frac_bits,
            "bias": codec.bias,
        },
        "n_train": len(train),
        "train_indices": train_idx,
        "centroids": [
            [decode(w, codec) for w in cent] for cent in model.centroids
        ],
        "centroid_words": [list(c) for c in model.centroids],
        "assignments": list(model.assignments),
        "iterations_run": model.iterations_run,
        "converged": model.converged,
        "objective_word": train_obj,
        "objective": train_obj / scale,
        "trace": [
            {"objective_word": t.objective, "objective": t.objective / scale, "moved": t.moved}
            for t in model.trace
        ],
        "ledger": model.ledger.as_dict() if model.ledger else None,
        "holdout": holdout,
    }
    model_path = os.path.join(args.out_dir, "model.json")
    with open(model_path, "w", encoding="utf-8") as fh:
        json.dump(model_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")

    # Assignments of every input row against the final centroids.
    labels_all = clustering.assign(ds.encoded, model.centroids, metric)
    csv_path = os.path.join(args.out_dir, "assignments.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "label", "distance"])
        for i, (row, lab) in enumerate(zip(ds.encoded, labels_all)):
            d = clustering.distance(row, model.centroids[lab], metric)
            w.writerow([i, lab, repr(d / scale)])

    print(f"model: {model_path}")
    print(f"assignments: {csv_path}")
    print(
        f"iterations={model.iterations_run} converged={model.converged} "
        f"objective={train_obj / scale:.12g}"
    )
    if holdout:
        print(f"holdout_objective={holdout['objective']:.12g}")
    return 0


# ---------------------------------------------------------------- stats


def cmd_stats(args) -> int:
    ds = ingest.parse(args.input, delimiter=args.delimiter)
    stats = ingest.summary_stats(ds)
    if args.format == "csv":
        sys.stdout.write(ingest.stats_to_csv(stats))
    else:
        sys.stdout.write(ingest.format_stats_text(stats))
    return 0


# ---------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    ds = ingest.parse(args.input, delimiter=args.delimiter)
    flat = [v for row in ds.rows for v in row if v is not None]
    codec = _codec_for(args, flat)
    ds = ingest.encode_dataset(ds, codec)
    cfg = clustering.ClusterConfig(
        k=2,  # swept below
        seed=args.seed,
        max_iters=args.max_iters,
        centroid_mode=args.mode,
        width=codec.width,
    )
    result = clustering.sweep_k(ds.encoded, cfg, args.k_min, args.k_max, args.quality)
    out = io.StringIO()
    if result.k_opt is not None:
        out.write(f"# k_opt = {result.k_opt}\n")
    else:
        out.write("# k_opt = none (objective mode: read the elbow from the table)\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["k", "objective_word", "silhouette", "iterations", "converged"])
    for row in result.rows:
        w.writerow(
            [
                row.k,
                row.objective,
                "" if row.silhouette is None else repr(row.silhouette),
                row.iterations,
                row.converged,
            ]
        )
    text = out.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- cost-report


def _report_selection(plan, mask, width) -> dict:
    word, ledger = simulated_median(plan, mask)
    n_sel = (plan.matrix.full_mask if mask is None else mask).bit_count()
    streaming_baseline_cost(n_sel, width, ledger)
    return {
        "N": n_sel,
        "W": width,
        "tiles": plan.n_tiles
        if mask is None
        else _participating_tiles(plan, mask),
        "counting_steps": ledger.counting_steps,
        "merge_ops": ledger.merge_ops,
        "bits_moved": ledger.bits_moved,
        "host_bits_moved": ledger.host_bits_moved,
        "ratio": ledger.ratio(),
    }


def cmd_cost_report(args) -> int:
    ds = ingest.parse(args.input, delimiter=args.delimiter)
    sizes = (
        [int(s) for s in args.subsample.split(",")] if args.subsample else [ds.n]
    )
    for size in sizes:
        if not 1 <= size <= ds.n:
            raise RangeError(f"--subsample size {size} out of range 1..{ds.n}")
    tile = _tile_config(args)
    columns = (
        range(ds.d) if args.column is None else [_select_column(ds, args.column)]
    )

    rows = []
    for size in sizes:
        sub = ingest.Dataset(
            column_names=ds.column_names,
            rows=ds.rows[:size],
            source=ds.source,
        )
        flat = [v for row in sub.rows for v in row if v is not None]
        codec = _codec_for(args, flat)
        sub = ingest.encode_dataset(sub, codec)
        if args.k is None:
            for j in columns:
                words = [row[j] for row in sub.encoded]
                plan = partition(
                    bitplane.build_bitplanes(words, codec.width), tile
                )
                rows.append(_report_selection(plan, None, codec.width))
        else:
            # The selections one k-medians centroid update would perform:
            # one per (cluster, dimension) under the membership masks.
            cents = clustering.init_centroids(sub.encoded, args.k, args.seed)
            labels = clustering.assign(sub.encoded, cents, "manhattan")
            masks = [0] * args.k
            for i, lab in enumerate(labels):
                masks[lab] |= 1 << i
            plans = [
                partition(
                    bitplane.build_bitplanes([r[j] for r in sub.encoded], codec.width),
                    tile,
                )
                for j in columns
            ]
            for mask in masks:
                if mask == 0:
                    continue
                for plan in plans:
                    rows.append(_report_selection(plan, mask, codec.width))

    if args.format == "json":
        doc = {
            "formulas": [line.lstrip("# ") for line in COST_FORMULA_LINES],
            "selections": rows,
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        out = io.StringIO()
        for line in COST_FORMULA_LINES:
            out.write(line + "\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(COST_REPORT_FIELDS)
        for r in rows:
            w.writerow(
                [r[f] if f != "ratio" else repr(r[f]) for f in COST_REPORT_FIELDS]
            )
        text = out.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- parser


def _add_encoding_flags(p):
    p.add_argument("--width", type=int, default=64, help="word width in bits (default 64)")
    p.add_argument(
        "--frac-bits",
        type=int,
        default=None,
        help="fractional bits (default: finest that fits the data)",
    )
    p.add_argument(
        "--bias",
        type=int,
        default=None,
        help="encoding bias (default: 0, or 2^(width-1) for signed data)",
    )


def _add_tile_flags(p):
    p.add_argument("--rows-per-array", type=int, default=None)
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--tree-fanin", type=int, default=None)
    p.add_argument(
        "--count-width",
        type=int,
        default=None,
        help="bits per partial-count component (default: ceil(log2(N+1)))",
    )


def _add_common(p):
    p.add_argument("input", help="input data file")
    p.add_argument("--delimiter", default=";", help="field delimiter (default ';')")
    p.add_argument(
        "--manifest",
        default=None,
        help="write the run manifest JSON here (default: stderr)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitmedian",
        description="Bit-serial median selection, tiled in-storage cost model, "
        "and k-means/k-medians clustering.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("median", help="median or rank-order query over one column")
    _add_common(p)
    p.add_argument("--column", default=None, help="column name or 0-based index")
    p.add_argument("--rank", type=int, default=None, help="1-based rank from the smallest")
    p.add_argument("--simulate", action="store_true", help="run through the tiled simulator")
    _add_encoding_flags(p)
    _add_tile_flags(p)
    p.set_defaults(func=cmd_median)

    p = sub.add_parser("cluster", help="k-means / k-medians clustering")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--mode", choices=("mean", "median"), default="median")
    p.add_argument("--engine", choices=("ref", "sim"), default="ref")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument(
        "--split-percentage",
        type=float,
        default=None,
        help="fit on this percentage, report the holdout objective on the rest",
    )
    p.add_argument(
        "--preserve-order",
        action="store_true",
        help="split without the seeded shuffle",
    )
    p.add_argument("--out-dir", default=".")
    _add_encoding_flags(p)
    _add_tile_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("stats", help="summary statistics table")
    _add_common(p)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="cluster-count sweep")
    _add_common(p)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--quality", choices=("silhouette", "objective"), default="silhouette")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--mode", choices=("mean", "median"), default="median")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--output", default=None, help="write the CSV here (default stdout)")
    _add_encoding_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "cost-report", help="in-situ vs streaming bit movement per selection"
    )
    _add_common(p)
    p.add_argument("--column", default=None, help="restrict to one column")
    p.add_argument("--k", type=int, default=None, help="report one centroid update's selections")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument(
        "--subsample",
        default=None,
        help="comma-separated list of row counts to sweep (default: all rows)",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="write the report here (default stdout)")
    _add_encoding_flags(p)
    _add_tile_flags(p)
    p.set_defaults(func=cmd_cost_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "out_dir", None) and args.manifest is None:
            os.makedirs(args.out_dir, exist_ok=True)
            args.manifest = os.path.join(args.out_dir, "manifest.json")
        dest_names = sorted(vars(args))
        _emit_manifest(args, dest_names)
        return args.func(args)
    except (BitMedianError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
