"""A single neuron as a reinforcement-learning agent.

Each neuron owns a tiny two-layer network (tanh hidden layer, sigmoid
output) defining its probability of firing, samples fire/silent actions
from it, and improves it with a score-function (REINFORCE-style) update
at the end of each episode.
"""

from dataclasses import dataclass, field

import numpy as np

from neuropop.backend import kernels
from neuropop.errors import ConfigurationError, DivergenceError

DEFAULT_HIDDEN_DIM = 16
STD_FLOOR = 1e-8


@dataclass
class ActionSample:
    action: int               # 1 = fire, 0 = silent
    log_prob: float           # ln P(sampled action)
    firing_probability: float


@dataclass
class NeuronTrajectory:
    """Per-episode experience buffer: parallel lists of equal length."""
    inputs: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    rewards: list = field(default_factory=list)

    def append(self, input_vector, sample, total_reward):
        self.inputs.append(np.asarray(input_vector, dtype=float))
        self.samples.append(sample)
        self.rewards.append(float(total_reward))

    def __len__(self):
        return len(self.inputs)

    def clear(self):
        self.inputs.clear()
        self.samples.clear()
        self.rewards.clear()


def init_parameters(W_in, b_in, w_out, b_out, rng):
    """Fill parameter arrays in place: uniform(+-1/sqrt(fan_in)), zero biases."""
    in_bound = 1.0 / np.sqrt(W_in.shape[-1])
    out_bound = 1.0 / np.sqrt(w_out.shape[-1])
    W_in[...] = rng.uniform(-in_bound, in_bound, size=W_in.shape)
    b_in[...] = 0.0
    w_out[...] = rng.uniform(-out_bound, out_bound, size=w_out.shape)
    b_out[...] = 0.0


def discounted_returns(rewards, gamma):
    """G_t = r_t + gamma * G_{t+1} along axis 0; same shape as input."""
    rewards = np.asarray(rewards, dtype=float)
    if rewards.shape[0] == 0:
        raise ValueError("discounted_returns: empty reward sequence")
    out = np.empty_like(rewards)
    out[-1] = rewards[-1]
    for t in range(rewards.shape[0] - 2, -1, -1):
        out[t] = rewards[t] + gamma * out[t + 1]
    return out


def normalize_returns(returns):
    """Center and scale per neuron (axis 0); skip scaling when std ~ 0."""
    mean = returns.mean(axis=0)
    std = returns.std(axis=0)
    centered = returns - mean
    if centered.ndim == 1:
        return centered / std if std >= STD_FLOOR else centered
    scale = np.where(std < STD_FLOOR, 1.0, std)
    return centered / scale


class NeuronPolicy:
    """Stochastic fire/silent policy with its own parameters.

    Parameter arrays are stored in stacked form (leading axis of size 1)
    so single-neuron calls and layer-level calls share the same kernels;
    they may be views into a layer's contiguous stack.
    """

    def __init__(self, input_dim, hidden_dim, W_in, b_in, w_out, b_out):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self._W_in = W_in    # (1, H, D)
        self._b_in = b_in    # (1, H)
        self._w_out = w_out  # (1, H)
        self._b_out = b_out  # (1,)
        self.trajectory = NeuronTrajectory()

    @classmethod
    def create(cls, input_dim, hidden_dim, rng):
        W_in = np.empty((1, hidden_dim, input_dim))
        b_in = np.empty((1, hidden_dim))
        w_out = np.empty((1, hidden_dim))
        b_out = np.empty(1)
        init_parameters(W_in, b_in, w_out, b_out, rng)
        return cls(input_dim, hidden_dim, W_in, b_in, w_out, b_out)

    # Convenience views without the stacking axis.
    @property
    def weights_in(self):
        return self._W_in[0]

    @property
    def bias_in(self):
        return self._b_in[0]

    @property
    def weights_out(self):
        return self._w_out[0]

    @property
    def bias_out(self):
        return float(self._b_out[0])

    @bias_out.setter
    def bias_out(self, value):
        self._b_out[0] = value

    def parameters(self):
        return [self._W_in, self._b_in, self._w_out, self._b_out]

    def firing_probability(self, input_vector):
        """P(fire) for an input, without sampling."""
        x = self._check_input(input_vector)
        h = np.tanh(self.weights_in @ x + self.bias_in)
        logit = self.weights_out @ h + self.bias_out
        return float(1.0 / (1.0 + np.exp(-logit)))

    def _check_input(self, input_vector):
        x = np.ascontiguousarray(input_vector, dtype=float)
        if x.shape != (self.input_dim,):
            raise ConfigurationError(
                f"input of shape {x.shape}, expected ({self.input_dim},)")
        return x

    def act(self, input_vector, rng):
        """Sample fire/silent from this neuron's policy and RNG stream."""
        x = self._check_input(input_vector)
        uniforms = np.array([rng.random()])
        actions = np.empty(1, dtype=np.uint8)
        probs = np.empty(1)
        log_probs = np.empty(1)
        kernels.layer_forward(self._W_in, self._b_in, self._w_out, self._b_out,
                              x, uniforms, actions, probs, log_probs)
        return ActionSample(action=int(actions[0]),
                            log_prob=float(log_probs[0]),
                            firing_probability=float(probs[0]))

    def score_gradient(self, X, actions, coeff):
        """Gradient of sum_t coeff[t] * log pi(actions[t] | X[t])."""
        X = np.ascontiguousarray(X, dtype=float)
        A = np.ascontiguousarray(actions, dtype=np.uint8).reshape(-1, 1)
        C = np.ascontiguousarray(coeff, dtype=float).reshape(-1, 1)
        gW_in = np.empty_like(self._W_in)
        gb_in = np.empty_like(self._b_in)
        gw_out = np.empty_like(self._w_out)
        gb_out = np.empty_like(self._b_out)
        kernels.layer_score_grad(self._W_in, self._b_in, self._w_out,
                                 self._b_out, X, A, C,
                                 gW_in, gb_in, gw_out, gb_out)
        return [gW_in, gb_in, gw_out, gb_out]

    def update(self, trajectory=None, gamma=0.99, step_size=0.01):
        """One REINFORCE step on the buffered episode; clears the buffer."""
        traj = self.trajectory if trajectory is None else trajectory
        if len(traj) == 0:
            raise ValueError("update: empty trajectory")
        X = np.stack(traj.inputs)
        actions = np.array([s.action for s in traj.samples], dtype=np.uint8)
        returns = discounted_returns(traj.rewards, gamma)
        coeff = normalize_returns(returns)
        grads = self.score_gradient(X, actions, coeff)
        for param, grad in zip(self.parameters(), grads):
            if not np.all(np.isfinite(grad)):
                raise DivergenceError("non-finite policy gradient")
            param += step_size * grad
        traj.clear()
