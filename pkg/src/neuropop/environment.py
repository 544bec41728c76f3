"""Episodic cart-pole environment.

Self-contained implementation of the classic cart-pole balancing task:
explicit Euler integration, binary push-left/push-right actions, +1 reward
per step, failure when the cart leaves the track or the pole falls past
12 degrees, hard cap at 500 steps per episode.
"""

from dataclasses import dataclass

import numpy as np

from neuropop.backend import kernels

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
HALF_LENGTH = 0.5  # half the pole's length, meters
FORCE_MAG = 10.0
DT = 0.02

X_THRESHOLD = 2.4
THETA_THRESHOLD = 12.0 * 2.0 * np.pi / 360.0  # 0.2094395...
MAX_STEPS = 500

# Normalization scales: failure bounds for the bounded coordinates,
# a fixed 3.0 for the unbounded velocities.
OBS_SCALES = np.array([X_THRESHOLD, 3.0, THETA_THRESHOLD, 3.0])
OBS_DIM = 4


@dataclass
class EnvState:
    """Raw physical state of the cart-pole system."""
    cart_position: float
    cart_velocity: float
    pole_angle: float
    pole_angular_velocity: float

    def as_array(self):
        return np.array([self.cart_position, self.cart_velocity,
                         self.pole_angle, self.pole_angular_velocity])


@dataclass
class StepOutcome:
    observation: np.ndarray
    reward: float
    terminal: bool
    step_index: int


class EpisodeTerminatedError(RuntimeError):
    """Raised when step() is called on an environment already terminal."""


def normalize(state):
    """Scale a raw state array into the O(1) observation vector."""
    return np.asarray(state, dtype=float) / OBS_SCALES


class CartPoleEnv:
    """Cart-pole with a gym-like reset/step interface.

    Actions: 0 pushes left (-10 N), 1 pushes right (+10 N).
    Reward is 1.0 for every step taken, including the terminating one.
    """

    observation_dim = OBS_DIM

    def __init__(self, rng):
        self.rng = rng
        self.state = None
        self.steps = 0
        self.terminal = True

    def reset(self):
        """Start a new episode; returns the normalized initial observation."""
        self.state = self.rng.uniform(-0.05, 0.05, size=4)
        self.steps = 0
        self.terminal = False
        return normalize(self.state)

    def step(self, action):
        """Advance one step. `action` must be 0 or 1."""
        if self.terminal:
            raise EpisodeTerminatedError(
                "step() called on a terminal environment; call reset() first")
        if action not in (0, 1):
            raise ValueError(f"action must be 0 or 1, got {action!r}")
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        x, x_dot, theta, theta_dot = self.state
        x, x_dot, theta, theta_dot = kernels.cartpole_step(
            x, x_dot, theta, theta_dot, force,
            GRAVITY, CART_MASS, POLE_MASS, HALF_LENGTH, DT)
        self.state = np.array([x, x_dot, theta, theta_dot])
        self.steps += 1
        failed = abs(x) > X_THRESHOLD or abs(theta) > THETA_THRESHOLD
        self.terminal = failed or self.steps >= MAX_STEPS
        return StepOutcome(observation=normalize(self.state), reward=1.0,
                           terminal=self.terminal, step_index=self.steps)
