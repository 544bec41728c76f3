"""Experiment configuration: defaults, file round-trip, validation.

Configs are flat JSON documents. Loading resolves every default
explicitly; unknown keys are rejected so typos cannot silently fall back
to defaults.
"""

import dataclasses
import json
from dataclasses import dataclass

from neuropop import rewards
from neuropop.errors import ConfigurationError


@dataclass
class ExperimentConfig:
    # topology
    num_layers: int = 1
    layer_width: int = 10
    hidden_dim: int = 16
    # learner
    step_size: float = 0.01
    discount: float = 0.99
    # reward scheme and weights
    scheme: str = rewards.ALL  # task | all | bio-then-all
    switch_episode: int = 1000
    # Biological shaping works best as a gentle nudge next to the unit
    # task reward, with activity weaker than sparsity so layers cannot
    # settle on all-fire; see README for the calibration sweep.
    w_task: float = 1.0
    w_activity: float = 0.02
    w_sparsity: float = 0.1
    w_prediction: float = 0.1
    w_trace: float = 0.1
    sparsity_lo: float = 0.1
    sparsity_hi: float = 0.4
    penalize_silent_underactivity: bool = True
    trace_decay: float = 0.9
    trace_lo: float = 0.1
    trace_hi: float = 0.9
    task_reward_mode: str = "per-step"  # or "episode-return"
    # experiment protocol
    max_episodes: int = 20000
    solve_threshold: float = 300.0
    window: int = 100
    num_runs: int = 10
    base_seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        positive = ["num_layers", "layer_width", "hidden_dim", "max_episodes",
                    "window", "num_runs"]
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.scheme not in rewards.SCHEME_VARIANTS:
            raise ConfigurationError(
                f"scheme must be one of {rewards.SCHEME_VARIANTS}, got {self.scheme!r}")
        if self.task_reward_mode not in ("per-step", "episode-return"):
            raise ConfigurationError(
                f"task_reward_mode must be 'per-step' or 'episode-return', "
                f"got {self.task_reward_mode!r}")
        if not 0.0 <= self.sparsity_lo <= self.sparsity_hi <= 1.0:
            raise ConfigurationError("need 0 <= sparsity_lo <= sparsity_hi <= 1")
        if not 0.0 < self.trace_lo < self.trace_hi < 1.0:
            raise ConfigurationError("need 0 < trace_lo < trace_hi < 1")
        if not 0.0 < self.trace_decay < 1.0:
            raise ConfigurationError("trace_decay must be in (0, 1)")
        if not 0.0 <= self.discount <= 1.0:
            raise ConfigurationError("discount must be in [0, 1]")
        if self.switch_episode < 0:
            raise ConfigurationError("switch_episode must be >= 0")
        if self.solve_threshold > 500:
            raise ConfigurationError("solve_threshold exceeds the max return (500)")

    def reward_scheme(self):
        return rewards.RewardScheme(self.scheme, self.switch_episode)

    def reward_weights(self):
        return rewards.RewardWeights(
            task=self.w_task, activity=self.w_activity, sparsity=self.w_sparsity,
            prediction=self.w_prediction, trace=self.w_trace)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))
