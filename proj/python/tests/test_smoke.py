import json
import math

import numpy as np
import pytest

import nitrogym as ng


def test_action_set():
    assert ng.ACTION_AMOUNTS == (0.0, 40.0, 80.0, 120.0, 160.0)
    assert ng.discretize_action(95.0) == 80.0
    assert ng.discretize_action(100.0) == 80.0
    assert ng.discretize_action(200.0) == 160.0


def test_epsilon_schedule():
    assert ng.epsilon_schedule(0, 0.992) == 1.0
    assert math.isclose(ng.epsilon_schedule(100, 0.994), 0.994**100, rel_tol=1e-12)


def test_reward_breakdown():
    b = ng.daily_reward(n_applied=40.0, tleachd=2.0, cumsumfert=260.0, is_harvest=False, yield_=0.0)
    assert b["fert_term"] == pytest.approx(4.0)
    assert b["leach_term"] == pytest.approx(0.2)
    assert b["overage_term"] == pytest.approx(20.0)
    assert b["total"] == pytest.approx(-24.2)


def test_episode_runs_to_completion():
    env = ng.NitrogenEnv(ng.ScenarioConfig("iowa"))
    state = env.reset(0)
    assert state.dap == 0
    total, days = 0.0, 0
    done = False
    while not done:
        amount = 160.0 if state.vstage >= 5 and state.cumsumfert == 0 else 0.0
        state, reward, done, info = env.step(amount)
        total += reward
        days += 1
    assert 100 <= days <= 200
    assert state.cumsumfert == 160.0
    assert env.done
    with pytest.raises(ng.EpisodeFinishedError):
        env.step(0.0)
    baseline = ng.evaluate_baseline(160.0, ng.ScenarioConfig("iowa"))
    assert total == pytest.approx(baseline["cumulative_reward"], rel=1e-12)


def test_observations():
    env = ng.NitrogenEnv()
    s = env.reset(0)
    full = ng.observe(s)
    part = ng.observe(s, "partial")
    assert isinstance(full, np.ndarray)
    assert part.shape == (10,)
    assert ng.observation_names("partial")[:3] == ["cumsumfert", "dap", "dtt"]
    assert len(full) == len(ng.observe(s, ng.observation_names("full")))
    with pytest.raises(ng.ConfigError):
        ng.observe(s, "vstage,bogus")
    d = s.to_dict()
    assert d["dap"] == 0 and len(d["sw"]) == 3


def test_observation_env():
    env = ng.ObservationEnv(mask="partial")
    obs = env.reset(1)
    assert obs.shape == (10,)
    obs, reward, done, info = env.step(2)
    assert info["requested"] == 80.0


def test_config_and_errors(tmp_path):
    cfg = ng.config_from_ini("[scenario]\nlocation = florida\n", ["agent.episodes=3"])
    assert cfg.scenario.location == "florida"
    assert cfg.episodes == 3
    assert len(cfg.hash()) == 16
    with pytest.raises(ng.ConfigError):
        ng.config_from_ini("[agent]\nnope = 1\n")
    with pytest.raises(ValueError):
        cfg.set("agent.gamma", "2")
        cfg.validate()


def test_short_training_run(tmp_path):
    cfg = ng.ExperimentConfig()
    for key, value in [("agent.episodes", "3"), ("agent.hidden", "8"), ("agent.warmup", "32"),
                       ("agent.batch_size", "8"), ("run.trials", "1"), ("run.baseline_grid", "0,240")]:
        cfg.set(key, value)
    cfg.output_dir = str(tmp_path / "run")
    seen = []
    report = ng.run_training(cfg, progress=lambda seed, ep, r: seen.append(ep))
    assert seen == [0, 1, 2]
    assert [row["method"] for row in report["tables"]] == ["Baseline (0)", "Baseline (240)", "DQN"]
    assert report["trials"][0]["rewards"].shape == (3,)
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["config_hash"] == cfg.hash()
    ckpt = ng.load_checkpoint(tmp_path / "run" / "trial_1" / "checkpoint.json")
    assert ckpt.kind == "dqn"
    assert ckpt.evaluate(ng.ScenarioConfig("iowa"))["cumulative_reward"] == pytest.approx(
        report["trials"][0]["final"]["cumulative_reward"], rel=1e-12)
    obs = ng.observe(ng.NitrogenEnv().reset(0), "full", normalized=True)
    assert ckpt.greedy_amount(list(obs)) in ng.ACTION_AMOUNTS
