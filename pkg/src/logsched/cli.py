"""Command line front end: configure a sweep, simulate, write result files.

Usage sketch::

    logsched --servers 100 --requests 2000 --runs 100 \\
        --algorithms rr,mlml,trh,nltr:1,nltr:2 --output-dir results

Per algorithm the tool writes ``<label>_avg_loads.<fmt>`` (final load
per server, averaged over runs) and ``<label>_histogram.<fmt>`` (max
request count per final-load bucket), plus one combined ``summary.<fmt>``
across algorithms. Defaults can come from a JSON file via ``--config``;
explicit flags override it.

Exit codes: 0 on success, 2 for bad flags or config values, 1 for
runtime failures (unreadable workload file, unwritable output).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

from .prob_model import ProbConfig
from .report import average_loads, emit, load_histogram_many, summarize
from .schedulers import SchedulerKind, ThresholdGate
from .simulator import MaintainerConfig, RunConfig, run, workload_for_seed
from .workload import ClusterConfig, WorkloadConfig, dump_workload, load_workload

__all__ = ["build_parser", "main", "entry"]

# keys accepted in a --config JSON file (kebab-case, matching the flags)
_CONFIG_KEYS = {
    "servers",
    "clients",
    "requests",
    "windows",
    "objects",
    "mix",
    "large-range",
    "medium-range",
    "small-range",
    "max-offset",
    "initial-load-mean",
    "initial-load-std",
    "straggler-fraction",
    "straggler-factor",
    "algorithms",
    "nltr-levels",
    "threshold",
    "load-scale",
    "maintainer",
    "maintainer-budget",
    "charge-migration",
    "runs",
    "base-seed",
    "output-dir",
    "formats",
    "histogram-width",
    "workload-file",
    "dump-workload",
}


def _as_floats(value: object, n: int, what: str) -> Tuple[float, ...]:
    """Accept ``"a,b"`` from the command line or a list from a config file."""
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ValueError(f"{what} must be {n} comma-separated numbers, got {value!r}")
    if len(parts) != n:
        raise ValueError(f"{what} must have {n} values, got {len(parts)}")
    try:
        return tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise ValueError(f"{what} must be numeric, got {value!r}") from None


def _as_names(value: object, what: str) -> List[str]:
    if isinstance(value, str):
        names = [p.strip() for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        names = [str(p) for p in value]
    else:
        raise ValueError(f"{what} must be a comma-separated list, got {value!r}")
    if not names:
        raise ValueError(f"{what} must not be empty")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logsched",
        description="Simulate log-assisted straggler-aware I/O scheduling over an object storage cluster.",
    )
    parser.add_argument("--config", metavar="FILE", help="JSON file of defaults; flags override it")

    g = parser.add_argument_group("cluster")
    g.add_argument("--servers", type=int, default=100, help="storage servers (default 100)")
    g.add_argument("--clients", type=int, default=200, help="clients behind the merged stream (default 200)")
    g.add_argument("--initial-load-mean", type=float, default=200.0, help="mean starting load MB (default 200)")
    g.add_argument("--initial-load-std", type=float, default=10.0, help="starting load stddev MB (default 10)")
    g.add_argument("--straggler-fraction", type=float, default=0.1, help="fraction of servers overloaded (default 0.1)")
    g.add_argument("--straggler-factor", type=float, default=5.0, help="straggler load vs. mean of the rest (default 5)")

    g = parser.add_argument_group("workload")
    g.add_argument("--requests", type=int, default=2000, help="requests per run (default 2000)")
    g.add_argument("--windows", type=int, default=50, help="time windows per run (default 50)")
    g.add_argument("--objects", type=int, default=1000, help="distinct object ids (default 1000)")
    g.add_argument("--mix", default=(1 / 3, 1 / 3, 1 / 3), help="large,medium,small request weights (default: equal)")
    g.add_argument("--large-range", default="10,100", help="large request MB range lo,hi")
    g.add_argument("--medium-range", default="4,10", help="medium request MB range lo,hi")
    g.add_argument("--small-range", default="0.1,4", help="small request MB range lo,hi")
    g.add_argument("--max-offset", type=float, default=1024.0, help="max request offset MB (default 1024)")

    g = parser.add_argument_group("policy")
    g.add_argument(
        "--algorithms",
        default="rr,mlml,trh,nltr:1,nltr:2",
        help="comma list from rr, mlml, trh, nltr[:levels]",
    )
    g.add_argument("--nltr-levels", type=int, default=1, help="levels for a bare 'nltr' entry (default 1)")
    g.add_argument("--threshold", type=float, default=None, help="redirection benefit threshold MB (default: mean request length)")
    g.add_argument("--load-scale", type=float, default=None, help="load decay scale MB (default: mean request length)")

    g = parser.add_argument_group("maintainer")
    g.add_argument("--maintainer", action=argparse.BooleanOptionalAction, default=True, help="migrate redirected extents home during idle windows")
    g.add_argument("--maintainer-budget", type=int, default=64, help="max migrations per idle window (default 64)")
    g.add_argument("--charge-migration", action="store_true", help="bill migrated bytes to the default server's load")

    g = parser.add_argument_group("experiment")
    g.add_argument("--runs", type=int, default=1, help="independent runs per algorithm (default 1)")
    g.add_argument("--base-seed", type=int, default=0, help="seed of run 0; run i uses base+i (default 0)")
    g.add_argument("--output-dir", default="results", help="directory for result files (default ./results)")
    g.add_argument("--formats", default="csv,json", help="comma list from csv, json, svg")
    g.add_argument("--histogram-width", type=float, default=50.0, help="load histogram bucket width MB (default 50)")
    g.add_argument("--workload-file", metavar="FILE", help="replay this dumped workload instead of generating one")
    g.add_argument("--dump-workload", metavar="FILE", help="also write run 0's workload to this file")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    parser = build_parser()
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fp:
                raw = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {known.config}: {exc}", file=sys.stderr)
            return 2
        if not isinstance(raw, dict):
            print("error: config file must be a JSON object", file=sys.stderr)
            return 2
        bad = sorted(set(raw) - _CONFIG_KEYS)
        if bad:
            print(f"error: unknown config keys: {', '.join(bad)}", file=sys.stderr)
            return 2
        parser.set_defaults(**{key.replace("-", "_"): value for key, value in raw.items()})
    args = parser.parse_args(argv)

    try:
        workload_cfg = WorkloadConfig(
            num_requests=int(args.requests),
            num_windows=int(args.windows),
            num_objects=int(args.objects),
            mix=_as_floats(args.mix, 3, "--mix"),
            large_range=_as_floats(args.large_range, 2, "--large-range"),
            medium_range=_as_floats(args.medium_range, 2, "--medium-range"),
            small_range=_as_floats(args.small_range, 2, "--small-range"),
            max_offset=float(args.max_offset),
        )
        workload_cfg.validate()
        cluster_cfg = ClusterConfig(
            num_servers=int(args.servers),
            num_clients=int(args.clients),
            initial_load_mean=float(args.initial_load_mean),
            initial_load_std=float(args.initial_load_std),
            straggler_fraction=float(args.straggler_fraction),
            straggler_factor=float(args.straggler_factor),
        )
        cluster_cfg.validate()
        maintainer = MaintainerConfig(
            enabled=bool(args.maintainer),
            budget=int(args.maintainer_budget),
            charge_migration=bool(args.charge_migration),
        )
        maintainer.validate()
        kinds = [
            SchedulerKind.parse(name, default_levels=int(args.nltr_levels))
            for name in _as_names(args.algorithms, "--algorithms")
        ]
        for kind in kinds:
            kind.validate_for(cluster_cfg.num_servers)
        formats = _as_names(args.formats, "--formats")
        for fmt in formats:
            if fmt not in ("csv", "json", "svg"):
                raise ValueError(f"unknown format {fmt!r}, expected csv, json or svg")
        gate = ThresholdGate(float(args.threshold)) if args.threshold is not None else None
        prob = ProbConfig(float(args.load_scale)) if args.load_scale is not None else None
        if int(args.runs) < 1:
            raise ValueError(f"--runs must be >= 1, got {args.runs}")
        if float(args.histogram_width) <= 0:
            raise ValueError(f"--histogram-width must be > 0, got {args.histogram_width}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    base_seed = int(args.base_seed)
    num_runs = int(args.runs)
    base_cfg = RunConfig(
        cluster=cluster_cfg,
        workload=workload_cfg,
        scheduler=kinds[0],
        gate=gate,
        prob=prob,
        maintainer=maintainer,
        seed=base_seed,
    )

    windows = None
    if args.workload_file:
        try:
            with open(args.workload_file, encoding="utf-8") as fp:
                windows = load_workload(fp)
        except (OSError, ValueError) as exc:
            print(f"error: cannot load workload {args.workload_file}: {exc}", file=sys.stderr)
            return 1

    try:
        if args.dump_workload:
            stream = windows if windows is not None else workload_for_seed(workload_cfg, base_seed)
            with open(args.dump_workload, "w", encoding="utf-8", newline="\n") as fp:
                dump_workload(stream, fp)
        os.makedirs(args.output_dir, exist_ok=True)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    mix = workload_cfg.mix
    echo = {
        "servers": cluster_cfg.num_servers,
        "clients": cluster_cfg.num_clients,
        "requests": workload_cfg.num_requests,
        "windows": workload_cfg.num_windows,
        "objects": workload_cfg.num_objects,
        "mix": f"{mix[0]!r},{mix[1]!r},{mix[2]!r}",
        "large-range": f"{workload_cfg.large_range[0]!r},{workload_cfg.large_range[1]!r}",
        "medium-range": f"{workload_cfg.medium_range[0]!r},{workload_cfg.medium_range[1]!r}",
        "small-range": f"{workload_cfg.small_range[0]!r},{workload_cfg.small_range[1]!r}",
        "max-offset": workload_cfg.max_offset,
        "initial-load-mean": cluster_cfg.initial_load_mean,
        "initial-load-std": cluster_cfg.initial_load_std,
        "straggler-fraction": cluster_cfg.straggler_fraction,
        "straggler-factor": cluster_cfg.straggler_factor,
        "algorithms": ",".join(kind.label for kind in kinds),
        "threshold": base_cfg.effective_gate().threshold,
        "load-scale": base_cfg.effective_prob().load_scale,
        "maintainer": maintainer.enabled,
        "maintainer-budget": maintainer.budget,
        "charge-migration": maintainer.charge_migration,
        "runs": num_runs,
        "base-seed": base_seed,
        "histogram-width": float(args.histogram_width),
        "workload-file": args.workload_file or "",
    }

    try:
        summaries = []
        written = 0
        for kind in kinds:
            results = []
            for i in range(num_runs):
                cfg = replace(base_cfg, scheduler=kind, seed=base_seed + i)
                results.append(run(cfg, workload_windows=windows))
            avg = average_loads(results)
            hist = load_histogram_many(results, float(args.histogram_width))
            summary = summarize(results, kind.label)
            summaries.append(summary)
            for fmt in formats:
                emit(avg, fmt, os.path.join(args.output_dir, f"{kind.file_label}_avg_loads.{fmt}"),
                     config=echo, seed=base_seed)
                emit(hist, fmt, os.path.join(args.output_dir, f"{kind.file_label}_histogram.{fmt}"),
                     config=echo, seed=base_seed)
                written += 2
            print(
                f"{kind.label}: mean load {summary.mean_load:.1f} MB, "
                f"cov {summary.load_cov:.3f}, max {summary.max_load:.1f} MB, "
                f"straggler hits {summary.straggler_hits:.2f}/run"
            )
        for fmt in formats:
            emit(summaries, fmt, os.path.join(args.output_dir, f"summary.{fmt}"),
                 config=echo, seed=base_seed)
            written += 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"wrote {written} files to {args.output_dir}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
