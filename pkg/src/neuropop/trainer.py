"""Training loop and multi-seed experiment orchestration.

A run trains one network on one seeded environment until the rolling
window mean of task returns crosses the solve threshold or the episode
budget runs out. An experiment repeats that over independent seeds and
aggregates with unsolved runs censored at the full budget.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from neuropop import rewards
from neuropop.environment import CartPoleEnv
from neuropop.errors import DivergenceError
from neuropop.network import Network

NOT_SOLVED = None


@dataclass
class RunResult:
    run_seed: int
    episodes_to_solve: int | None
    returns: list[float]
    wall_time: float
    diverged: bool = False

    @property
    def solved(self):
        return self.episodes_to_solve is not None


@dataclass
class ExperimentSummary:
    config: "ExperimentConfig"
    results: list[RunResult] = field(default_factory=list)

    @property
    def solved_count(self):
        return sum(r.solved for r in self.results)

    @property
    def mean_episodes_to_solve(self):
        """Unsolved runs count as the full budget (censoring convention)."""
        budget = self.config.max_episodes
        values = [r.episodes_to_solve if r.solved else budget
                  for r in self.results]
        return float(np.mean(values))


def rolling_mean(returns, window):
    """Mean of the trailing `window` entries (requires at least that many)."""
    if len(returns) < window:
        return None
    return float(np.mean(returns[-window:]))


def first_solve_episode(returns, window, threshold):
    """First 1-based episode count at which the trailing-window mean
    reaches the threshold, or None."""
    returns = np.asarray(returns, dtype=float)
    if len(returns) < window:
        return None
    csum = np.concatenate([[0.0], np.cumsum(returns)])
    means = (csum[window:] - csum[:-window]) / window
    hits = np.nonzero(means >= threshold)[0]
    if hits.size == 0:
        return None
    return int(hits[0]) + window


def run_episode(network, env, config, episode_index, trace_state):
    """One rollout plus the end-of-episode learning step for every neuron.

    Returns (history, ledger, task_return).
    """
    history = network.begin_episode()
    obs = env.reset()
    while True:
        frame = network.forward(obs)
        outcome = env.step(frame.env_action)
        history.record_reward(outcome.reward)
        obs = outcome.observation
        if outcome.terminal:
            break
    task_return = float(sum(history.task_rewards))
    if config.task_reward_mode == "episode-return":
        task_seq = np.zeros(len(history))
        task_seq[-1] = task_return
    else:
        task_seq = None
    ledger = rewards.compute_ledger(
        history, network.layer_slices(), config.reward_scheme(),
        config.reward_weights(), episode_index, trace_state,
        sparsity_band=(config.sparsity_lo, config.sparsity_hi),
        trace_thresholds=(config.trace_lo, config.trace_hi),
        penalize_silent_underactivity=config.penalize_silent_underactivity,
        task_rewards=task_seq)
    network.update_all(ledger.total, config.discount, config.step_size)
    return history, ledger, task_return


def train_run(config, run_seed):
    """Train one network from scratch; stop at solve or budget exhaustion."""
    start = time.perf_counter()
    root = np.random.SeedSequence(run_seed)
    env_seq, net_seq = root.spawn(2)
    env = CartPoleEnv(np.random.Generator(np.random.PCG64(env_seq)))
    network = Network.build(config, net_seq)
    trace_state = rewards.ActivityTraceState.initial(
        network.num_neurons, decay=config.trace_decay)
    returns = []
    episodes_to_solve = NOT_SOLVED
    diverged = False
    for episode in range(config.max_episodes):
        try:
            _, _, task_return = run_episode(network, env, config, episode,
                                            trace_state)
        except DivergenceError:
            diverged = True
            break
        returns.append(task_return)
        mean = rolling_mean(returns, config.window)
        if mean is not None and mean >= config.solve_threshold:
            episodes_to_solve = episode + 1
            break
    return RunResult(run_seed=run_seed, episodes_to_solve=episodes_to_solve,
                     returns=returns, wall_time=time.perf_counter() - start,
                     diverged=diverged)


def run_experiment(config, progress=None):
    """num_runs independent train_runs with seeds base_seed .. base_seed+n-1."""
    summary = ExperimentSummary(config=config)
    for i in range(config.num_runs):
        result = train_run(config, config.base_seed + i)
        summary.results.append(result)
        if progress is not None:
            progress(result)
    return summary
