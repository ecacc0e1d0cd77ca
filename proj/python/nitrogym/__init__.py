"""Daily nitrogen-management crop environment with DQN and SAC agents.

The heavy lifting lives in the compiled ``_core`` module; this package adds a
small gym-style wrapper on top.
"""

from ._core import (
    ACTION_AMOUNTS,
    Checkpoint,
    ConfigError,
    DomainError,
    EpisodeFinishedError,
    ExperimentConfig,
    IoError,
    MaskError,
    NitrogenEnv,
    NumericError,
    ScenarioConfig,
    ShapeError,
    StateVector,
    config_from_ini,
    daily_reward,
    discretize_action,
    epsilon_schedule,
    evaluate_baseline,
    load_checkpoint,
    load_config,
    observation_names,
    observe,
    run_training,
)

__all__ = [
    "ACTION_AMOUNTS",
    "Checkpoint",
    "ConfigError",
    "DomainError",
    "EpisodeFinishedError",
    "ExperimentConfig",
    "IoError",
    "MaskError",
    "NitrogenEnv",
    "NumericError",
    "ObservationEnv",
    "ScenarioConfig",
    "ShapeError",
    "StateVector",
    "config_from_ini",
    "daily_reward",
    "discretize_action",
    "epsilon_schedule",
    "evaluate_baseline",
    "load_checkpoint",
    "load_config",
    "observation_names",
    "observe",
    "run_training",
]


class ObservationEnv:
    """NitrogenEnv that returns normalized observation arrays.

    Actions are indices into ACTION_AMOUNTS, matching the discrete agents.
    """

    def __init__(self, scenario=None, mask="full"):
        self.env = NitrogenEnv(scenario if scenario is not None else ScenarioConfig("iowa"))
        self.mask = mask
        self.n_actions = len(ACTION_AMOUNTS)

    def reset(self, seed=0):
        return observe(self.env.reset(seed), self.mask, normalized=True)

    def step(self, action):
        state, reward, done, info = self.env.step(ACTION_AMOUNTS[action])
        return observe(state, self.mask, normalized=True), reward, done, info
