"""Config derivations: seed substreams, tick math, serialization."""

import dataclasses

import pytest

from portalsim.config import SessionConfig
from portalsim.viewsync import Variant


class TestSeedDerivation:
    def test_substreams_differ_from_each_other(self):
        cfg = SessionConfig(seed=42)
        seeds = {cfg.world_seed, cfg.net_seed, cfg.agent_seed(1), cfg.agent_seed(2)}
        assert len(seeds) == 4
        assert 42 not in seeds

    def test_substreams_are_stable(self):
        a = SessionConfig(seed=42)
        b = SessionConfig(seed=42, variant=Variant.SNAP, latency_ms=300.0)
        assert a.world_seed == b.world_seed
        assert a.agent_seed(2) == b.agent_seed(2)

    def test_different_seeds_diverge(self):
        assert SessionConfig(seed=1).world_seed != SessionConfig(seed=2).world_seed


class TestTickMath:
    def test_duration_ticks(self):
        assert SessionConfig(duration_s=600.0, tick_hz=50).duration_ticks == 30000
        assert SessionConfig(duration_s=1.0, tick_hz=50).duration_ticks == 50

    def test_dt_ms(self):
        assert SessionConfig(tick_hz=50).dt_ms == 20.0
        assert SessionConfig(tick_hz=100).dt_ms == 10.0

    def test_fractional_duration_rounds(self):
        assert SessionConfig(duration_s=0.55, tick_hz=50).duration_ticks == 28


class TestPolicies:
    def test_policy_for_each_player(self):
        cfg = SessionConfig(policy1="divide", policy2="window")
        assert cfg.policy_for(1) == "divide"
        assert cfg.policy_for(2) == "window"


class TestSerialization:
    def test_to_dict_replayable(self):
        cfg = SessionConfig(variant=Variant.DROP, seed=9, task="complex")
        d = cfg.to_dict()
        assert d["variant"] == "drop"
        assert d["seed"] == 9
        assert d["world_seed"] == cfg.world_seed
        assert d["net_seed"] == cfg.net_seed
        assert d["agent"]["reaction_ticks"] == cfg.agent.reaction_ticks

    def test_frozen(self):
        cfg = SessionConfig()
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.seed = 5
