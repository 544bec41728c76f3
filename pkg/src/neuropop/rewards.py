"""Per-neuron reward signals and their assembly into per-step totals.

Five components: a globally broadcast task reward plus four local
("biological") signals - activity, layer sparsity, next-step prediction of
postsynaptic firing, and a long-horizon activity trace. A reward scheme
decides which components a neuron's total contains at a given episode.
"""

from dataclasses import dataclass, field

import numpy as np

from neuropop.errors import ConfigurationError

TASK = "task"
ALL = "all"
BIO_THEN_ALL = "bio-then-all"
SCHEME_VARIANTS = (TASK, ALL, BIO_THEN_ALL)

DEFAULT_SPARSITY_BAND = (0.1, 0.4)
DEFAULT_TRACE_DECAY = 0.9
DEFAULT_TRACE_THRESHOLDS = (0.1, 0.9)
TRACE_INIT = 0.5


@dataclass
class RewardWeights:
    task: float = 1.0
    activity: float = 1.0
    sparsity: float = 1.0
    prediction: float = 1.0
    trace: float = 1.0


@dataclass
class RewardScheme:
    variant: str = ALL
    switch_episode: int = 1000  # used by BIO_THEN_ALL

    def __post_init__(self):
        if self.variant not in SCHEME_VARIANTS:
            raise ConfigurationError(
                f"unknown reward scheme {self.variant!r}; expected one of {SCHEME_VARIANTS}")
        if self.switch_episode < 0:
            raise ConfigurationError("switch_episode must be >= 0")

    def task_active(self, episode_index):
        if self.variant == BIO_THEN_ALL:
            return episode_index >= self.switch_episode
        return True

    def bio_active(self, episode_index):
        return self.variant != TASK


@dataclass
class ActivityTraceState:
    """Exponential moving average of each neuron's firing, kept per run."""
    traces: np.ndarray
    decay: float = DEFAULT_TRACE_DECAY

    @classmethod
    def initial(cls, num_neurons, decay=DEFAULT_TRACE_DECAY):
        return cls(traces=np.full(num_neurons, TRACE_INIT), decay=decay)


@dataclass
class RewardLedger:
    """(T, num_neurons) matrices, one per component, plus the scheme total."""
    task: np.ndarray
    activity: np.ndarray
    sparsity: np.ndarray
    prediction: np.ndarray
    trace: np.ndarray
    total: np.ndarray

    COMPONENTS = ("task", "activity", "sparsity", "prediction", "trace")

    def components(self):
        return {name: getattr(self, name) for name in self.COMPONENTS}


def task_reward(env_reward, num_neurons):
    """Broadcast the environment reward to every neuron."""
    return np.full(num_neurons, float(env_reward))


def activity_reward(action):
    """+1 for firing, -1 for staying silent."""
    return 1.0 if action else -1.0


def sparsity_reward(layer_actions, band=DEFAULT_SPARSITY_BAND,
                    penalize_silent_underactivity=True):
    """Reward each neuron of one layer for keeping the firing fraction in band.

    In band: firing neurons +1, silent 0. Over-active: firing -1, silent 0.
    Under-active: firing +1; silent -1 (they are the violators), unless
    `penalize_silent_underactivity` is off.
    """
    a = np.asarray(layer_actions)
    if a.size == 0:
        raise ConfigurationError("sparsity_reward: empty layer")
    lo, hi = band
    f = a.mean()
    out = np.zeros(a.size)
    if f > hi:
        out[a == 1] = -1.0
    else:
        out[a == 1] = 1.0
        if f < lo and penalize_silent_underactivity:
            out[a == 0] = -1.0
    return out


def prediction_reward(history, layer_slices, neuron_id, t):
    """Match score between a neuron's action now and its postsynaptic
    contacts' actions at the next step, in [-1, +1].

    Zero at the final step and for the output neuron (no contacts).
    """
    T = len(history)
    if not 0 <= t < T:
        raise ValueError(f"step {t} out of range for episode of length {T}")
    layer_idx = next(k for k, sl in enumerate(layer_slices)
                     if sl.start <= neuron_id < sl.stop)
    if layer_idx == len(layer_slices) - 1 or t == T - 1:
        return 0.0
    a = history.frames[t].layer_actions[layer_idx][neuron_id - layer_slices[layer_idx].start]
    post = history.frames[t + 1].layer_actions[layer_idx + 1]
    return float(np.mean(2.0 * (post == a) - 1.0))


def trace_update(state, neuron_id, action):
    """trace <- decay * trace + (1 - decay) * action; returns the new trace."""
    new = state.decay * state.traces[neuron_id] + (1.0 - state.decay) * action
    state.traces[neuron_id] = new
    return new


def trace_reward(trace, thresholds=DEFAULT_TRACE_THRESHOLDS):
    """-1 when chronically silent or chronically active, else 0."""
    lo, hi = thresholds
    return -1.0 if (trace < lo or trace > hi) else 0.0


def assemble(scheme, weights, episode_index, components):
    """Weighted per-neuron total for one step under the active scheme.

    `components` maps component name -> per-neuron array (or scalar).
    """
    if scheme.variant not in SCHEME_VARIANTS:
        raise ConfigurationError(f"unknown reward scheme {scheme.variant!r}")
    total = np.zeros_like(np.asarray(components["task"], dtype=float))
    if scheme.task_active(episode_index):
        total = total + weights.task * np.asarray(components["task"])
    if scheme.bio_active(episode_index):
        total = total + (weights.activity * np.asarray(components["activity"])
                         + weights.sparsity * np.asarray(components["sparsity"])
                         + weights.prediction * np.asarray(components["prediction"])
                         + weights.trace * np.asarray(components["trace"]))
    return total


def compute_ledger(history, layer_slices, scheme, weights, episode_index,
                   trace_state, sparsity_band=DEFAULT_SPARSITY_BAND,
                   trace_thresholds=DEFAULT_TRACE_THRESHOLDS,
                   penalize_silent_underactivity=True, task_rewards=None):
    """Compute every component for every neuron and step of one episode.

    Mutates `trace_state` (traces persist across episodes within a run).
    `task_rewards` overrides the per-step task sequence taken from the
    history (used for the episode-return broadcast variant).
    """
    T = len(history)
    if task_rewards is None:
        task_rewards = history.task_rewards
    num_neurons = layer_slices[-1].stop
    ledger = RewardLedger(*(np.zeros((T, num_neurons)) for _ in range(6)))
    num_layers = len(layer_slices)
    lo, hi = trace_thresholds
    for t in range(T):
        frame = history.frames[t]
        actions = np.concatenate(frame.layer_actions).astype(float)
        ledger.task[t] = task_rewards[t]
        ledger.activity[t] = 2.0 * actions - 1.0
        for k, sl in enumerate(layer_slices):
            layer_a = frame.layer_actions[k]
            if k < num_layers - 1:  # output neuron carries no sparsity signal
                ledger.sparsity[t, sl] = sparsity_reward(
                    layer_a, sparsity_band, penalize_silent_underactivity)
            if k < num_layers - 1 and t < T - 1:
                post = history.frames[t + 1].layer_actions[k + 1]
                n_post = post.size
                # mean of (2 * match - 1): integer numerator, one division
                fire_value = (2.0 * int(post.sum()) - n_post) / n_post
                ledger.prediction[t, sl] = np.where(layer_a == 1,
                                                    fire_value, -fire_value)
        trace_state.traces = (trace_state.decay * trace_state.traces
                              + (1.0 - trace_state.decay) * actions)
        ledger.trace[t] = np.where(
            (trace_state.traces < lo) | (trace_state.traces > hi), -1.0, 0.0)
        ledger.total[t] = assemble(scheme, weights, episode_index, {
            "task": ledger.task[t], "activity": ledger.activity[t],
            "sparsity": ledger.sparsity[t], "prediction": ledger.prediction[t],
            "trace": ledger.trace[t]})
    return ledger


def dump_ledger(stream, ledger, run, episode):
    """Debug dump: one line per (run, episode, step, neuron)."""
    T, N = ledger.total.shape
    stream.write("run,episode,step,neuron,task,activity,sparsity,"
                 "prediction,trace,total\n")
    for t in range(T):
        for n in range(N):
            stream.write(f"{run},{episode},{t},{n},"
                         f"{ledger.task[t, n]!r},{ledger.activity[t, n]!r},"
                         f"{ledger.sparsity[t, n]!r},{ledger.prediction[t, n]!r},"
                         f"{ledger.trace[t, n]!r},{ledger.total[t, n]!r}\n")
