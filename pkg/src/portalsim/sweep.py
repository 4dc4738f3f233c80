"""Batch sessions across variants and seeds, with CSV output.

Rows are ordered by (variant order as given, seed), no matter whether
the batch ran serially or on a process pool, so the same sweep always
produces the same bytes.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

from .agents import run_agents
from .config import DIVIDE, SessionConfig, WINDOW_POLICY
from .metrics import Metrics, compute_metrics
from .viewsync import Variant

CSV_COLUMNS = [
    "seed",
    "variant",
    "task",
    "policy",
    "matched",
    "placed",
    "accuracy",
    "dist_p1_m",
    "dist_p2_m",
    "teleports_p1",
    "teleports_p2",
    "use_time",
    "ticks",
]


def default_policy(variant: Variant) -> str:
    """The strategy pairs settle on: window when there is one."""
    return DIVIDE if variant is Variant.BASELINE else WINDOW_POLICY


def run_one(config: SessionConfig) -> Dict[str, object]:
    log = run_agents(config)
    metrics = compute_metrics(log)
    return metrics_row(config, metrics)


def metrics_row(config: SessionConfig, metrics: Metrics) -> Dict[str, object]:
    return {
        "seed": config.seed,
        "variant": config.variant.value,
        "task": config.task,
        "policy": config.policy1,
        "matched": metrics.matched,
        "placed": metrics.placed,
        "accuracy": "" if metrics.accuracy is None else f"{metrics.accuracy:.6f}",
        "dist_p1_m": f"{metrics.accumulated_distance[1]:.6f}",
        "dist_p2_m": f"{metrics.accumulated_distance[2]:.6f}",
        "teleports_p1": metrics.teleport_count[1],
        "teleports_p2": metrics.teleport_count[2],
        "use_time": metrics.use_time,
        "ticks": metrics.ticks,
    }


def sweep_configs(
    variants: Sequence[Variant],
    seeds: Sequence[int],
    base: SessionConfig,
) -> List[SessionConfig]:
    configs = []
    for variant in variants:
        policy = default_policy(variant)
        for seed in seeds:
            configs.append(
                replace(base, variant=variant, seed=seed, policy1=policy, policy2=policy)
            )
    return configs


def run_sweep(
    configs: Sequence[SessionConfig],
    workers: Optional[int] = None,
) -> List[Dict[str, object]]:
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_one, configs))
    return [run_one(c) for c in configs]


def rows_to_csv(rows: Sequence[Dict[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def summarize(rows: Sequence[Dict[str, object]]) -> Dict[str, Dict[str, float]]:
    """Per-variant means over the sweep, for a quick side-by-side look."""
    groups: Dict[str, List[Dict[str, object]]] = {}
    for row in rows:
        groups.setdefault(str(row["variant"]), []).append(row)
    out = {}
    for variant, group in groups.items():
        n = len(group)
        out[variant] = {
            "sessions": float(n),
            "matched_mean": sum(int(r["matched"]) for r in group) / n,
            "placed_mean": sum(int(r["placed"]) for r in group) / n,
            "distance_mean": sum(
                float(r["dist_p1_m"]) + float(r["dist_p2_m"]) for r in group
            )
            / n,
            "teleports_mean": sum(
                int(r["teleports_p1"]) + int(r["teleports_p2"]) for r in group
            )
            / n,
            "use_time_mean": sum(int(r["use_time"]) for r in group) / n,
        }
    return out
