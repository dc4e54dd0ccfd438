"""Simulation of a shared pool of operating ideas, its coupling to scientific
understanding, and the mapping of pool growth onto domain improvement rates."""
from .coupled import ReplicateSummary, RunSeries, SimConfig, detect_stagnation, fit_run, replicate, run
from .domain import DomainParams, domain_rate, ioi_sc_analytic, mcnerney_simulate
from .idea_pool import IdeaPool, combination_limit, new_pool, theoretical_rate
from .trend_fit import FitResult, WrightFit, fit_exponential, fit_wright, predict

__version__ = "0.1.0"
