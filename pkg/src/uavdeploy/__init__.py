"""Real-time UAV base-station placement: channel/throughput model, MDP wrapper,
actor-critic agent and baseline solvers."""

from .baselines import Problem, fixed_placement, grid_oracle, simulated_annealing, smooth_opt
from .channel import ChannelParams
from .network_eval import QoSParams, throughput, throughput_no_interference
from .scenario import AreaConfig, Snapshot, UserDistribution

__version__ = "0.1.0"
