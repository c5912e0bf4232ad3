"""Episode runner, replication manager, and regret accounting.

Pseudo-regret is charged per step from the brute-forced regret table (the
expected regret of the chosen list), so curves are directly comparable to the
log t lower bounds without Monte Carlo noise from the reward draws themselves.
Checkpoint regret is evaluated from the play counters, which makes the
bookkeeping identity Reg_t = sum_pi N_t(pi) Reg(pi) hold exactly.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .divergence import regret_table
from .model import ObservationSampler, ValidationError
from .policies import make_policy


def default_checkpoints(horizon, per_decade=5, start=1000):
    """Log-spaced checkpoints from `start` (clipped to the horizon) up to it."""
    if horizon <= start:
        return tuple(sorted({max(horizon // 2, 1), horizon}))
    decades = math.log10(horizon / start)
    num = max(int(round(decades * per_decade)) + 1, 2)
    pts = np.logspace(math.log10(start), math.log10(horizon), num=num)
    pts = sorted({int(round(t)) for t in pts} | {horizon})
    return tuple(min(t, horizon) for t in pts)


@dataclass(frozen=True)
class RunConfig:
    instance: object
    policy: str
    horizon: int
    policy_params: dict = field(default_factory=dict)
    checkpoints: Optional[tuple] = None
    replications: int = 1
    master_seed: int = 0

    def resolved_checkpoints(self):
        cps = self.checkpoints or default_checkpoints(self.horizon)
        cps = tuple(sorted(set(int(t) for t in cps)))
        if not cps or cps[0] < 1 or cps[-1] > self.horizon:
            raise ValidationError("checkpoints must lie in [1, horizon], got %r" % (cps,))
        return cps


@dataclass
class RunResult:
    checkpoints: tuple
    regret: np.ndarray               # cumulative pseudo-regret at each checkpoint
    regret_over_logt: np.ndarray
    list_counts: dict                # N_T(pi), post-initialization plays
    init_list_counts: dict           # plays charged during the initialization phase
    slot_arm_counts: np.ndarray      # N_T(k, j), all steps
    obs_counts: np.ndarray           # N*_T(j), observed per-arm values
    init_steps: int
    checkpoint_list_counts: list     # per checkpoint: {pi: total plays so far}


def _checkpoint_regret(counts, reg_of):
    # deterministic summation order => reproducible and re-derivable exactly
    return sum(counts[pi] * reg_of[pi] for pi in sorted(counts))


def run_episode(config, replication=0):
    """One seeded episode: decide, sample, update, account."""
    instance = config.instance
    policy = make_policy(config.policy, instance, config.policy_params)
    ss = np.random.SeedSequence((config.master_seed, replication))
    env_ss, pol_ss = ss.spawn(2)
    env_rng = np.random.Generator(np.random.PCG64(env_ss))
    policy.reset(np.random.Generator(np.random.PCG64(pol_ss)))
    sampler = ObservationSampler(instance, env_rng)
    table = regret_table(instance)
    reg_of = table.per_list

    checkpoints = config.resolved_checkpoints()
    n, m = instance.num_arms, instance.num_slots
    list_counts = {}
    init_list_counts = {}
    slot_arm = [[0] * n for _ in range(m)]
    obs_counts = [0] * n
    init_steps = 0
    regret = []
    regret_over_logt = []
    cp_counts = []
    next_cp = 0

    decide = policy.decide
    update = policy.update
    draw = sampler.draw
    for t in range(1, config.horizon + 1):
        decision = decide(t)
        lst = decision.arm_list
        obs = draw(lst)
        update(decision, obs)
        if decision.initializing:
            init_list_counts[lst] = init_list_counts.get(lst, 0) + 1
            init_steps += 1
        else:
            list_counts[lst] = list_counts.get(lst, 0) + 1
        exam = obs.exam
        for k in range(m):
            j = lst[k]
            slot_arm[k][j] += 1
            if exam[k]:
                obs_counts[j] += 1
        if t == checkpoints[next_cp]:
            combined = dict(list_counts)
            for pi, c in init_list_counts.items():
                combined[pi] = combined.get(pi, 0) + c
            r = _checkpoint_regret(combined, reg_of)
            regret.append(r)
            regret_over_logt.append(r / math.log(t) if t > 1 else 0.0)
            cp_counts.append(combined)
            next_cp += 1
            if next_cp == len(checkpoints):
                break

    return RunResult(
        checkpoints=checkpoints,
        regret=np.array(regret),
        regret_over_logt=np.array(regret_over_logt),
        list_counts=list_counts,
        init_list_counts=init_list_counts,
        slot_arm_counts=np.array(slot_arm, dtype=np.int64),
        obs_counts=np.array(obs_counts, dtype=np.int64),
        init_steps=init_steps,
        checkpoint_list_counts=cp_counts,
    )


@dataclass
class ReplicatedResult:
    checkpoints: tuple
    regret_mean: np.ndarray
    regret_stderr: np.ndarray
    regret_over_logt_mean: np.ndarray
    regret_over_logt_stderr: np.ndarray
    slot_arm_counts_mean: np.ndarray
    obs_counts_mean: np.ndarray
    replications: int
    runs: list                       # per-replication RunResult, ordered by index


def _stderr(a):
    if a.shape[0] < 2:
        return np.zeros(a.shape[1])
    return a.std(axis=0, ddof=1) / math.sqrt(a.shape[0])


def run_replicated(config, workers=1):
    """Independent replications (seeded from (master_seed, index)) and their
    per-checkpoint mean/stderr.  Aggregation depends only on replication
    index, never on execution order."""
    reps = config.replications
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run_episode, [config] * reps, range(reps)))
    else:
        runs = [run_episode(config, r) for r in range(reps)]
    reg = np.stack([r.regret for r in runs])
    rol = np.stack([r.regret_over_logt for r in runs])
    return ReplicatedResult(
        checkpoints=runs[0].checkpoints,
        regret_mean=reg.mean(axis=0),
        regret_stderr=_stderr(reg),
        regret_over_logt_mean=rol.mean(axis=0),
        regret_over_logt_stderr=_stderr(rol),
        slot_arm_counts_mean=np.stack([r.slot_arm_counts for r in runs]).mean(axis=0),
        obs_counts_mean=np.stack([r.obs_counts for r in runs]).mean(axis=0),
        replications=reps,
        runs=runs,
    )


def slope_estimate(checkpoints, regret, horizon=None):
    """Least-squares slope of cumulative regret against log t over the final decade."""
    checkpoints = np.asarray(checkpoints, dtype=float)
    regret = np.asarray(regret, dtype=float)
    horizon = horizon or checkpoints[-1]
    mask = checkpoints >= horizon / 10.0
    x = np.log(checkpoints[mask])
    y = regret[mask]
    if len(x) < 2 or np.ptp(y) == 0.0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])
