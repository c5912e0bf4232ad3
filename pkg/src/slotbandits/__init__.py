"""Stochastic multi-armed bandits with non-equivalent multiple plays."""

from .model import (FACTORIZED, PER_SLOT, Observation, ObservationSampler,
                    OptimalStructure, ProblemInstance, ValidationError,
                    enumerate_lists, expected_list_reward, factorized,
                    optimal_structure, per_slot, sample_observation)
from .divergence import RegretTable, bernoulli_kl, list_divergence, regret_table, slot_divergence
from .bounds import (BoundLP, IllPosedInstanceError, LowerBoundResult, LPSolution,
                     SlotClosingReport, build_lp, closed_form_bound,
                     compute_lower_bounds, factorized_asymptote, lp_lower_bound,
                     per_slot_bound, play_count_bound, solve_lp, verify_slot_closing)
from .policies import (Algorithm1Policy, OraclePolicy, PerSlotPolicy, PolicyDecision,
                       ProtocolError, RankedUCBPolicy, UniformPolicy, default_delta,
                       klucb_index, make_policy)
from .harness import (ReplicatedResult, RunConfig, RunResult, default_checkpoints,
                      run_episode, run_replicated, slope_estimate)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
