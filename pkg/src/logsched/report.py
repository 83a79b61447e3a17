"""Metrics and deterministic result emitters (csv, json, svg).

Everything here is a pure function of the simulation results, and every
emitter writes byte-identical output for identical inputs: floats go
through repr (shortest exact round trip), JSON keys are sorted, SVG
coordinates use fixed-precision formatting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO, Union

import numpy as np

from .simulator import SimulationResult

__all__ = [
    "HistogramBucket",
    "LoadHistogram",
    "MetricsSummary",
    "average_loads",
    "load_histogram",
    "load_histogram_many",
    "straggler_hits",
    "summarize",
    "emit",
]


@dataclass(frozen=True, slots=True)
class HistogramBucket:
    """One load interval [lo, hi) and the busiest request count inside it."""

    lo: float
    hi: float
    max_requests: int


@dataclass(frozen=True, slots=True)
class LoadHistogram:
    """Final-load histogram: per load interval, the max requests any server in it got.

    The max (not the sum) is what exposes stragglers: a tall bucket at a
    high load means some server both started heavy and kept receiving
    requests.
    """

    bucket_width: float
    buckets: tuple


@dataclass(frozen=True, slots=True)
class MetricsSummary:
    """Aggregate metrics over a batch of runs of one policy.

    All values are means over the runs; ``load_cov`` averages each run's
    coefficient of variation (std over mean) of final server loads.
    """

    label: str
    num_runs: int
    mean_load: float
    load_cov: float
    max_load: float
    straggler_hits: float
    redirect_fraction: float
    migrated_mb: float
    scheduled_mb: float


def average_loads(results: Sequence[SimulationResult]) -> np.ndarray:
    """Element-wise mean of final loads across runs."""
    if not results:
        raise ValueError("need at least one result")
    return np.mean([r.final_loads for r in results], axis=0)


def straggler_hits(result: SimulationResult) -> int:
    """How many decisions placed I/O on a straggler, redirected or not."""
    stragglers = set(result.straggler_ids)
    return sum(1 for d in result.decisions if d.chosen_server in stragglers)


def load_histogram(result: SimulationResult, bucket_width: float = 50.0) -> LoadHistogram:
    """Bucket servers by final load; each bucket keeps the max request count."""
    if bucket_width <= 0:
        raise ValueError(f"bucket_width must be > 0, got {bucket_width}")
    best: Dict[int, int] = {}
    for load, count in zip(result.final_loads, result.request_counts):
        idx = int(math.floor(float(load) / bucket_width))
        c = int(count)
        if c > best.get(idx, -1):
            best[idx] = c
    buckets = tuple(
        HistogramBucket(idx * bucket_width, (idx + 1) * bucket_width, best[idx])
        for idx in sorted(best)
    )
    return LoadHistogram(bucket_width=bucket_width, buckets=buckets)


def load_histogram_many(results: Sequence[SimulationResult], bucket_width: float = 50.0) -> LoadHistogram:
    """Max-merge of the per-run histograms: worst case seen per bucket."""
    if not results:
        raise ValueError("need at least one result")
    best: Dict[int, int] = {}
    for result in results:
        for bucket in load_histogram(result, bucket_width).buckets:
            idx = int(math.floor(bucket.lo / bucket_width + 0.5))
            if bucket.max_requests > best.get(idx, -1):
                best[idx] = bucket.max_requests
    buckets = tuple(
        HistogramBucket(idx * bucket_width, (idx + 1) * bucket_width, best[idx])
        for idx in sorted(best)
    )
    return LoadHistogram(bucket_width=bucket_width, buckets=buckets)


def summarize(results: Sequence[SimulationResult], label: str) -> MetricsSummary:
    """Collapse a batch of runs into one row of metrics."""
    if not results:
        raise ValueError("need at least one result")
    covs = []
    maxes = []
    means = []
    hits = []
    redirect_fracs = []
    for r in results:
        mean = float(np.mean(r.final_loads))
        std = float(np.std(r.final_loads))
        means.append(mean)
        covs.append(std / mean if mean > 0 else 0.0)
        maxes.append(float(np.max(r.final_loads)))
        hits.append(straggler_hits(r))
        n = len(r.decisions)
        redirect_fracs.append(sum(1 for d in r.decisions if d.redirected) / n if n else 0.0)
    return MetricsSummary(
        label=label,
        num_runs=len(results),
        mean_load=float(np.mean(means)),
        load_cov=float(np.mean(covs)),
        max_load=float(np.mean(maxes)),
        straggler_hits=float(np.mean(hits)),
        redirect_fraction=float(np.mean(redirect_fracs)),
        migrated_mb=float(np.mean([r.migrated_mb for r in results])),
        scheduled_mb=float(np.mean([r.scheduled_mb for r in results])),
    )


# ---------------------------------------------------------------- emitters

_Emittable = Union[np.ndarray, LoadHistogram, MetricsSummary, Sequence[MetricsSummary]]


def _config_lines(config: Optional[Dict[str, object]], seed: Optional[int]) -> List[str]:
    lines = []
    if config:
        for key in sorted(config):
            lines.append(f"# {key}={config[key]}")
    if seed is not None:
        lines.append(f"# seed={seed}")
    return lines


def _fnum(x: float) -> str:
    return repr(float(x))


def _loads_csv(loads: np.ndarray, fp: TextIO, header: List[str]) -> None:
    for line in header:
        fp.write(line + "\n")
    fp.write("server,load_mb\n")
    for i, load in enumerate(loads):
        fp.write(f"{i},{_fnum(load)}\n")


def _hist_csv(hist: LoadHistogram, fp: TextIO, header: List[str]) -> None:
    for line in header:
        fp.write(line + "\n")
    fp.write("bucket_lo_mb,bucket_hi_mb,max_requests\n")
    for b in hist.buckets:
        fp.write(f"{_fnum(b.lo)},{_fnum(b.hi)},{b.max_requests}\n")


_SUMMARY_FIELDS = (
    "label",
    "num_runs",
    "mean_load",
    "load_cov",
    "max_load",
    "straggler_hits",
    "redirect_fraction",
    "migrated_mb",
    "scheduled_mb",
)


def _summary_row(s: MetricsSummary) -> List[str]:
    return [
        s.label,
        str(s.num_runs),
        _fnum(s.mean_load),
        _fnum(s.load_cov),
        _fnum(s.max_load),
        _fnum(s.straggler_hits),
        _fnum(s.redirect_fraction),
        _fnum(s.migrated_mb),
        _fnum(s.scheduled_mb),
    ]


def _summary_csv(summaries: Sequence[MetricsSummary], fp: TextIO, header: List[str]) -> None:
    for line in header:
        fp.write(line + "\n")
    fp.write(",".join(_SUMMARY_FIELDS) + "\n")
    for s in summaries:
        fp.write(",".join(_summary_row(s)) + "\n")


def _json_payload(data: _Emittable, config: Optional[Dict[str, object]], seed: Optional[int]) -> Dict[str, object]:
    payload: Dict[str, object] = {}
    if config:
        payload["config"] = {k: config[k] for k in sorted(config)}
    if seed is not None:
        payload["seed"] = int(seed)
    if isinstance(data, np.ndarray):
        payload["kind"] = "avg_loads"
        payload["loads_mb"] = [float(x) for x in data]
    elif isinstance(data, LoadHistogram):
        payload["kind"] = "load_histogram"
        payload["bucket_width_mb"] = float(data.bucket_width)
        payload["buckets"] = [
            {"lo_mb": float(b.lo), "hi_mb": float(b.hi), "max_requests": int(b.max_requests)}
            for b in data.buckets
        ]
    else:
        summaries = [data] if isinstance(data, MetricsSummary) else list(data)
        payload["kind"] = "summary"
        payload["policies"] = [
            {
                "label": s.label,
                "num_runs": int(s.num_runs),
                "mean_load_mb": float(s.mean_load),
                "load_cov": float(s.load_cov),
                "max_load_mb": float(s.max_load),
                "straggler_hits": float(s.straggler_hits),
                "redirect_fraction": float(s.redirect_fraction),
                "migrated_mb": float(s.migrated_mb),
                "scheduled_mb": float(s.scheduled_mb),
            }
            for s in summaries
        ]
    return payload


def _svg_bars(values: List[float], labels: List[str], title: str, fp: TextIO) -> None:
    """Minimal deterministic bar chart, 800x400 viewport."""
    width, height = 800, 400
    left, right, top, bottom = 60, 20, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    top_val = max(values) if values and max(values) > 0 else 1.0
    n = len(values)
    fp.write("<!-- generated by logsched -->\n")
    fp.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
    )
    fp.write(f'<rect width="{width}" height="{height}" fill="white"/>\n')
    fp.write(f'<text x="{width / 2:.2f}" y="24" text-anchor="middle" font-size="16">{title}</text>\n')
    fp.write(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        f'stroke="black"/>\n'
    )
    fp.write(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>\n')
    fp.write(
        f'<text x="16" y="{top:.2f}" font-size="11" text-anchor="start">{_fnum(top_val)}</text>\n'
    )
    if n:
        bar_w = plot_w / n
        label_every = max(1, n // 10)
        for i, (value, label) in enumerate(zip(values, labels)):
            h = plot_h * (value / top_val) if top_val else 0.0
            x = left + i * bar_w
            y = top + plot_h - h
            fp.write(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{max(bar_w - 1, 1):.2f}" '
                f'height="{h:.2f}" fill="#4878a8"/>\n'
            )
            if i % label_every == 0:
                fp.write(
                    f'<text x="{x + bar_w / 2:.2f}" y="{top + plot_h + 16}" text-anchor="middle" '
                    f'font-size="10">{label}</text>\n'
                )
    fp.write("</svg>\n")


def _svg(data: _Emittable, fp: TextIO) -> None:
    if isinstance(data, np.ndarray):
        _svg_bars([float(x) for x in data], [str(i) for i in range(len(data))], "Average load per server (MB)", fp)
    elif isinstance(data, LoadHistogram):
        _svg_bars(
            [float(b.max_requests) for b in data.buckets],
            [_fnum(b.lo) for b in data.buckets],
            "Max requests per final-load bucket",
            fp,
        )
    else:
        summaries = [data] if isinstance(data, MetricsSummary) else list(data)
        _svg_bars(
            [s.mean_load for s in summaries],
            [s.label for s in summaries],
            "Mean final load by policy (MB)",
            fp,
        )


def emit(
    data: _Emittable,
    fmt: str,
    path: str,
    config: Optional[Dict[str, object]] = None,
    seed: Optional[int] = None,
) -> None:
    """Write ``data`` to ``path`` in one of csv, json, svg.

    The data's type picks the layout: a load vector, a histogram, or one
    or more metric summaries. ``config`` and ``seed``, when given, are
    echoed into the output (comment lines in csv, keys in json) so a
    file is traceable to the run that produced it.
    """
    if fmt not in ("csv", "json", "svg"):
        raise ValueError(f"unknown format {fmt!r}, expected csv, json or svg")
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        if fmt == "json":
            json.dump(_json_payload(data, config, seed), fp, indent=2, sort_keys=True)
            fp.write("\n")
        elif fmt == "svg":
            _svg(data, fp)
        else:
            header = _config_lines(config, seed)
            if isinstance(data, np.ndarray):
                _loads_csv(data, fp, header)
            elif isinstance(data, LoadHistogram):
                _hist_csv(data, fp, header)
            else:
                summaries = [data] if isinstance(data, MetricsSummary) else list(data)
                _summary_csv(summaries, fp, header)
