"""Layered populations of neuron agents.

Activity is binary and strictly feed-forward: the first population sees
the normalized task observation, every later population sees the previous
population's firing pattern, and a single output neuron appended after the
last population drives the environment (fire = push right).
"""

import numpy as np

from neuropop.backend import kernels
from neuropop.errors import ConfigurationError, DivergenceError
from neuropop.neuron import (NeuronPolicy, init_parameters, discounted_returns,
                             normalize_returns)


class Layer:
    """A population of neurons sharing the same input vector.

    Parameters are stored as contiguous stacks (leading axis = neuron)
    so the whole population steps through one kernel call; each
    NeuronPolicy holds views into the stacks.
    """

    def __init__(self, width, input_dim, hidden_dim, rngs):
        if width < 1 or input_dim < 1 or hidden_dim < 1:
            raise ConfigurationError("layer sizes must be >= 1")
        self.width = width
        self.input_dim = input_dim
        self.W_in = np.empty((width, hidden_dim, input_dim))
        self.b_in = np.empty((width, hidden_dim))
        self.w_out = np.empty((width, hidden_dim))
        self.b_out = np.empty(width)
        self.rngs = rngs
        self.neurons = []
        for i in range(width):
            init_parameters(self.W_in[i], self.b_in[i], self.w_out[i],
                            self.b_out[i:i + 1], rngs[i])
            self.neurons.append(NeuronPolicy(
                input_dim, hidden_dim,
                self.W_in[i:i + 1], self.b_in[i:i + 1],
                self.w_out[i:i + 1], self.b_out[i:i + 1]))
        self._grads = [np.empty_like(self.W_in), np.empty_like(self.b_in),
                       np.empty_like(self.w_out), np.empty_like(self.b_out)]

    def forward(self, x):
        """Sample every neuron's action; returns (actions, probs, log_probs)."""
        if x.shape != (self.input_dim,):
            raise ConfigurationError(
                f"layer input of shape {x.shape}, expected ({self.input_dim},)")
        uniforms = np.array([rng.random() for rng in self.rngs])
        actions = np.empty(self.width, dtype=np.uint8)
        probs = np.empty(self.width)
        log_probs = np.empty(self.width)
        kernels.layer_forward(self.W_in, self.b_in, self.w_out, self.b_out,
                              x, uniforms, actions, probs, log_probs)
        return actions, probs, log_probs

    def apply_update(self, X, actions, coeff, step_size):
        """One gradient-ascent step for every neuron in the layer."""
        gW_in, gb_in, gw_out, gb_out = self._grads
        kernels.layer_score_grad(self.W_in, self.b_in, self.w_out, self.b_out,
                                 X, actions, coeff,
                                 gW_in, gb_in, gw_out, gb_out)
        for param, grad in [(self.W_in, gW_in), (self.b_in, gb_in),
                            (self.w_out, gw_out), (self.b_out, gb_out)]:
            if not np.all(np.isfinite(grad)):
                raise DivergenceError("non-finite policy gradient in layer update")
            param += step_size * grad


class ActivationFrame:
    """Firing pattern of the whole network at one time step.

    `layer_actions[-1]` is the single-entry output layer; its action is
    the environment action.
    """

    __slots__ = ("step_index", "layer_actions", "layer_probs", "layer_log_probs")

    def __init__(self, step_index, layer_actions, layer_probs, layer_log_probs):
        self.step_index = step_index
        self.layer_actions = layer_actions
        self.layer_probs = layer_probs
        self.layer_log_probs = layer_log_probs

    @property
    def env_action(self):
        return int(self.layer_actions[-1][0])


def env_action_of(frame):
    """Environment action encoded by a frame: 1 = push right, 0 = push left."""
    return frame.env_action


class EpisodeHistory:
    """Frames plus per-step observations and task rewards for one episode."""

    def __init__(self):
        self.frames = []
        self.observations = []
        self.task_rewards = []

    def __len__(self):
        return len(self.frames)

    def record_reward(self, reward):
        self.task_rewards.append(float(reward))


class Network:
    """num_layers populations of layer_width neurons plus one output neuron."""

    def __init__(self, num_layers, layer_width, hidden_dim, obs_dim, seed_source):
        if num_layers < 1 or layer_width < 1:
            raise ConfigurationError("num_layers and layer_width must be >= 1")
        self.num_layers = num_layers
        self.layer_width = layer_width
        self.obs_dim = obs_dim
        widths = [layer_width] * num_layers + [1]
        input_dims = [obs_dim] + [layer_width] * num_layers
        if isinstance(seed_source, np.random.SeedSequence):
            seed_seq = seed_source
        else:
            seed_seq = np.random.SeedSequence(seed_source)
        total = sum(widths)
        streams = [np.random.Generator(np.random.PCG64(child))
                   for child in seed_seq.spawn(total)]
        self.layers = []
        offset = 0
        for width, input_dim in zip(widths, input_dims):
            self.layers.append(Layer(width, input_dim, hidden_dim,
                                     streams[offset:offset + width]))
            offset += width
        self.num_neurons = total
        self.history = EpisodeHistory()

    @classmethod
    def build(cls, config, seed_source):
        return cls(config.num_layers, config.layer_width, config.hidden_dim,
                   obs_dim=4, seed_source=seed_source)

    @property
    def output_neuron(self):
        return self.layers[-1].neurons[0]

    def layer_slices(self):
        """Global neuron-index slice for each layer (output layer last)."""
        slices, start = [], 0
        for layer in self.layers:
            slices.append(slice(start, start + layer.width))
            start += layer.width
        return slices

    def begin_episode(self):
        self.history = EpisodeHistory()
        return self.history

    def forward(self, observation):
        """Propagate one observation through all populations; sample actions."""
        x = np.ascontiguousarray(observation, dtype=float)
        if x.shape != (self.obs_dim,):
            raise ConfigurationError(
                f"observation of shape {x.shape}, expected ({self.obs_dim},)")
        layer_actions, layer_probs, layer_log_probs = [], [], []
        inp = x
        for layer in self.layers:
            actions, probs, log_probs = layer.forward(inp)
            layer_actions.append(actions)
            layer_probs.append(probs)
            layer_log_probs.append(log_probs)
            inp = actions.astype(float)
        frame = ActivationFrame(len(self.history), layer_actions,
                                layer_probs, layer_log_probs)
        self.history.frames.append(frame)
        self.history.observations.append(x)
        return frame

    def update_all(self, totals, gamma, step_size):
        """End-of-episode REINFORCE update for every neuron.

        `totals` is a (T, num_neurons) matrix of per-step per-neuron
        rewards, in global neuron order (layer-major, output last).
        """
        history = self.history
        T = len(history)
        if T == 0:
            raise ValueError("update_all: empty episode")
        if totals.shape != (T, self.num_neurons):
            raise ConfigurationError(
                f"totals of shape {totals.shape}, expected ({T}, {self.num_neurons})")
        returns = discounted_returns(totals, gamma)
        coeff = normalize_returns(returns)
        layer_inputs = [np.stack(history.observations)]
        for k in range(len(self.layers) - 1):
            acts = np.stack([f.layer_actions[k] for f in history.frames])
            layer_inputs.append(np.ascontiguousarray(acts, dtype=float))
        for k, (layer, sl, X) in enumerate(
                zip(self.layers, self.layer_slices(), layer_inputs)):
            A = np.ascontiguousarray(
                np.stack([f.layer_actions[k] for f in history.frames]))
            layer.apply_update(X, A, np.ascontiguousarray(coeff[:, sl]),
                               step_size)
