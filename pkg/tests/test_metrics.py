"""Metric computation against independent oracles."""

import math

import pytest

from portalsim.errors import MalformedLog
from portalsim.geometry import Vec3
from portalsim.metrics import (
    Metrics,
    MovementTrace,
    accumulated_distance,
    compute_metrics,
    least_squares_slope,
    record_position,
)
from portalsim.rng import Xoshiro256StarStar
from portalsim.sessionlog import SessionLog


def _fsum_distance(samples):
    """Compensated-summation oracle over planar step lengths."""
    steps = []
    for a, b in zip(samples, samples[1:]):
        steps.append(math.hypot(b[0] - a[0], b[1] - a[1]))
    return math.fsum(steps)


class TestMovementTrace:
    def test_first_sample_always_recorded(self):
        trace = MovementTrace()
        record_position(trace, Vec3(1.0, 1.6, 1.0))
        assert len(trace.samples) == 1

    def test_threshold_is_strict(self):
        trace = MovementTrace()
        record_position(trace, Vec3(0.0, 1.6, 0.0))
        record_position(trace, Vec3(0.10, 1.6, 0.0))
        assert len(trace.samples) == 1
        record_position(trace, Vec3(0.10 + 1e-9, 1.6, 0.0))
        assert len(trace.samples) == 2

    def test_vertical_motion_ignored(self):
        trace = MovementTrace()
        record_position(trace, Vec3(0.0, 0.0, 0.0))
        record_position(trace, Vec3(0.0, 5.0, 0.0))
        assert len(trace.samples) == 1

    def test_accumulated_matches_fsum_oracle(self):
        rng = Xoshiro256StarStar(31)
        trace = MovementTrace()
        x = z = 3.0
        for _ in range(1000):
            x = min(5.9, max(0.1, x + rng.uniform(-0.5, 0.5)))
            z = min(5.9, max(0.1, z + rng.uniform(-0.5, 0.5)))
            record_position(trace, Vec3(x, 1.6, z))
        got = accumulated_distance(trace)
        want = _fsum_distance(trace.samples)
        if want > 0:
            assert abs(got - want) / want < 1e-9
        else:
            assert got == 0.0

    def test_empty_and_single(self):
        assert accumulated_distance(MovementTrace()) == 0.0
        single = MovementTrace()
        single.record(1.0, 2.0)
        assert accumulated_distance(single) == 0.0


def _synthetic_log(seed, placements, transfers, teleports, ticks=2000):
    """Log with a known count of each scored event plus noise records."""
    rng = Xoshiro256StarStar(seed)
    log = SessionLog({"variant": "teamportal", "task": "simple", "seed": seed})
    tick = 1
    matched = 0
    for i in range(placements):
        correct = rng.random() < 0.6
        matched += int(correct)
        log.append(
            "placement",
            tick,
            player=1 + (i % 2),
            payload={"object": i, "slot": i, "correct": correct},
        )
        tick += 3
    for i in range(transfers):
        log.append(
            "input",
            tick,
            player=1 + (i % 2),
            action="transfer",
            payload={},
            applied=True,
        )
        # Rejected transfers never count.
        log.append(
            "input",
            tick,
            player=1,
            action="transfer",
            payload={},
            applied=False,
            reason="NotHolding",
        )
        tick += 2
    for i in range(teleports):
        log.append(
            "input",
            tick,
            player=1 + (i % 2),
            action="teleport",
            payload={"x": 1.0, "z": 1.0},
            applied=True,
        )
        tick += 1
    pos = {1: (1.0, 1.0), 2: (5.0, 5.0)}
    for i in range(40):
        for p in (1, 2):
            x, z = pos[p]
            x += rng.uniform(-0.4, 0.4)
            z += rng.uniform(-0.4, 0.4)
            pos[p] = (x, z)
            log.append("move_sample", tick, player=p, payload={"x": x, "z": z})
        tick += 1
    log.append(
        "session_end",
        ticks,
        payload={"reason": "time_limit", "placed": placements, "matched": matched},
    )
    return log, matched


class TestComputeMetrics:
    def test_counts_by_recount(self):
        rng = Xoshiro256StarStar(55)
        for trial in range(20):
            placements = rng.randrange(20)
            transfers = rng.randrange(10)
            teleports = rng.randrange(15)
            log, matched = _synthetic_log(trial, placements, transfers, teleports)
            m = compute_metrics(log)
            assert m.placed == placements
            assert m.matched == matched
            assert m.use_time == transfers
            assert m.teleport_count[1] + m.teleport_count[2] == teleports
            assert m.ticks == 2000

    def test_accuracy_definition(self):
        log, matched = _synthetic_log(7, 12, 0, 0)
        m = compute_metrics(log)
        assert m.accuracy == pytest.approx(matched / 12)

    def test_accuracy_none_when_nothing_placed(self):
        log, _ = _synthetic_log(8, 0, 3, 3)
        m = compute_metrics(log)
        assert m.accuracy is None

    def test_distance_from_move_samples(self):
        log, _ = _synthetic_log(9, 0, 0, 0)
        m = compute_metrics(log)
        samples = {1: [], 2: []}
        for r in log.of_kind("move_sample"):
            samples[r["player"]].append((r["payload"]["x"], r["payload"]["z"]))
        for p in (1, 2):
            want = _fsum_distance(samples[p])
            assert abs(m.accumulated_distance[p] - want) / want < 1e-9

    def test_rigid_translation_invariance(self):
        base, _ = _synthetic_log(10, 0, 0, 0)
        m1 = compute_metrics(base)
        shifted = SessionLog({"variant": "teamportal", "task": "simple", "seed": 10})
        for r in base.records[1:]:
            r2 = dict(r)
            if r2["kind"] == "move_sample":
                pay = dict(r2["payload"])
                pay["x"] += 17.0
                pay["z"] -= 4.0
                r2["payload"] = pay
            shifted.records.append(r2)
        m2 = compute_metrics(shifted)
        assert m2.accumulated_distance[1] == pytest.approx(
            m1.accumulated_distance[1], rel=1e-12
        )

    def test_to_dict_keys(self):
        log, _ = _synthetic_log(11, 3, 1, 2)
        d = compute_metrics(log).to_dict()
        assert set(d) == {
            "matched",
            "placed",
            "accuracy",
            "accumulated_distance",
            "teleport_count",
            "use_time",
            "ticks",
        }
        assert set(d["accumulated_distance"]) == {"1", "2"}

    def test_rejects_unknown_player(self):
        log = SessionLog({"seed": 0})
        log.append("move_sample", 1, player=3, payload={"x": 0.0, "z": 0.0})
        log.append("session_end", 2, payload={"reason": "time_limit", "placed": 0, "matched": 0})
        with pytest.raises(MalformedLog):
            compute_metrics(log)


class TestSlope:
    def test_known_line(self):
        pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]
        assert least_squares_slope(pts) == pytest.approx(2.0)

    def test_flat(self):
        pts = [(0.0, 4.0), (1.0, 4.0), (2.0, 4.0)]
        assert least_squares_slope(pts) == pytest.approx(0.0)

    def test_degenerate(self):
        assert least_squares_slope([]) is None
        assert least_squares_slope([(1.0, 1.0)]) is None
        assert least_squares_slope([(2.0, 1.0), (2.0, 9.0)]) is None
