"""Batch runner: config grids, row formatting, ordering, summaries."""

from portalsim.config import DIVIDE, WINDOW_POLICY, SessionConfig
from portalsim.metrics import Metrics
from portalsim.sweep import (
    CSV_COLUMNS,
    default_policy,
    metrics_row,
    rows_to_csv,
    run_one,
    run_sweep,
    summarize,
    sweep_configs,
)
from portalsim.viewsync import Variant


def _base(**kw):
    defaults = dict(task="simple", duration_s=600.0, latency_ms=50.0, jitter_ms=5.0)
    defaults.update(kw)
    return SessionConfig(**defaults)


class TestGrid:
    def test_default_policies(self):
        assert default_policy(Variant.BASELINE) == DIVIDE
        for v in Variant:
            if v is not Variant.BASELINE:
                assert default_policy(v) == WINDOW_POLICY

    def test_variant_major_order(self):
        configs = sweep_configs([Variant.SNAP, Variant.BASELINE], [5, 6], _base())
        got = [(c.variant, c.seed) for c in configs]
        assert got == [
            (Variant.SNAP, 5),
            (Variant.SNAP, 6),
            (Variant.BASELINE, 5),
            (Variant.BASELINE, 6),
        ]

    def test_policies_applied_to_both_players(self):
        configs = sweep_configs([Variant.BASELINE, Variant.DROP], [1], _base())
        assert (configs[0].policy1, configs[0].policy2) == (DIVIDE, DIVIDE)
        assert (configs[1].policy1, configs[1].policy2) == (WINDOW_POLICY, WINDOW_POLICY)

    def test_base_fields_carried(self):
        configs = sweep_configs([Variant.SHAVIEW], [9], _base(latency_ms=120.0))
        assert configs[0].latency_ms == 120.0
        assert configs[0].task == "simple"


class TestRows:
    def _metrics(self):
        return Metrics(
            matched=5,
            placed=8,
            accuracy=5 / 8,
            accumulated_distance={1: 12.5, 2: 0.125},
            teleport_count={1: 3, 2: 4},
            use_time=2,
            ticks=1000,
        )

    def test_row_formatting(self):
        row = metrics_row(_base(variant=Variant.SNAP, seed=3, policy1=WINDOW_POLICY), self._metrics())
        assert row["seed"] == 3
        assert row["variant"] == "snap"
        assert row["policy"] == WINDOW_POLICY
        assert row["accuracy"] == "0.625000"
        assert row["dist_p1_m"] == "12.500000"
        assert row["dist_p2_m"] == "0.125000"
        assert set(row) == set(CSV_COLUMNS)

    def test_accuracy_blank_when_undefined(self):
        m = Metrics(0, 0, None, {1: 0.0, 2: 0.0}, {1: 0, 2: 0}, 0, 10)
        row = metrics_row(_base(), m)
        assert row["accuracy"] == ""

    def test_csv_shape(self):
        rows = [metrics_row(_base(seed=s), self._metrics()) for s in (1, 2)]
        text = rows_to_csv(rows)
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 3
        assert text.endswith("\n")


class TestExecution:
    def test_serial_and_parallel_agree(self):
        configs = sweep_configs([Variant.BASELINE], [1, 2], _base())
        serial = run_sweep(configs)
        parallel = run_sweep(configs, workers=2)
        assert rows_to_csv(serial) == rows_to_csv(parallel)

    def test_run_one_matches_sweep_row(self):
        config = sweep_configs([Variant.BASELINE], [3], _base())[0]
        assert run_one(config) == run_sweep([config])[0]


class TestSummary:
    def test_per_variant_means(self):
        rows = [
            {"variant": "snap", "matched": 4, "placed": 6, "dist_p1_m": "1.0",
             "dist_p2_m": "2.0", "teleports_p1": 1, "teleports_p2": 2,
             "use_time": 3, "seed": 0, "task": "simple", "policy": "window",
             "accuracy": "", "ticks": 10},
            {"variant": "snap", "matched": 6, "placed": 8, "dist_p1_m": "3.0",
             "dist_p2_m": "4.0", "teleports_p1": 3, "teleports_p2": 4,
             "use_time": 5, "seed": 1, "task": "simple", "policy": "window",
             "accuracy": "", "ticks": 10},
        ]
        s = summarize(rows)
        assert s["snap"]["sessions"] == 2.0
        assert s["snap"]["matched_mean"] == 5.0
        assert s["snap"]["distance_mean"] == 5.0
        assert s["snap"]["teleports_mean"] == 5.0
        assert s["snap"]["use_time_mean"] == 4.0
