"""Multi-agent networks of neuron-level reinforcement learners.

Every neuron is an independent agent with a stochastic fire/silent policy
trained by the score-function policy gradient; layered populations of them
learn to balance a built-in cart-pole from combinable global (task) and
local (activity, sparsity, prediction, trace) reward signals.

Hot kernels live in the compiled `neuropop._core` extension with a
pure-numpy fallback; see `neuropop.backend`.
"""

from neuropop.backend import BACKEND_NAME
from neuropop.config import ExperimentConfig
from neuropop.environment import CartPoleEnv
from neuropop.network import Network
from neuropop.neuron import NeuronPolicy
from neuropop.trainer import run_experiment, train_run

__all__ = ["BACKEND_NAME", "ExperimentConfig", "CartPoleEnv", "Network",
           "NeuronPolicy", "run_experiment", "train_run"]

__version__ = "0.1.0"
