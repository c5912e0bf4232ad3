"""Bandit policies.

* Algorithm1Policy: the asymptotically optimal policy for factorized
  (examination-probability) instances; pools observations across slots and
  explores at most one candidate arm per step, in the last slot.
* PerSlotPolicy: the per-(slot, arm) variant for instances without
  cross-position structure; explores one (slot, arm) pair per step and
  re-optimizes the remaining slots around a pinned candidate.
* RankedUCBPolicy: the rank-by-index baseline (every slot explores).
* OraclePolicy / UniformPolicy: control baselines.

The KL-UCB index is the largest mean consistent with the observations at a
log t + 3 log log t information budget, found by bisection.
"""

import itertools
import math
from typing import NamedTuple, Optional

import numpy as np

from .assignment import max_weight_assignment
from .model import FACTORIZED, PER_SLOT, ValidationError

INDEX_TOL = 1e-9
_CLAMP = 1e-9


class ProtocolError(RuntimeError):
    """decide/update called outside the allowed phase or order."""


class ShapeMismatchError(RuntimeError):
    """Policy and instance kinds are incompatible."""


def _kl_clamped(p, q):
    p = min(max(p, _CLAMP), 1.0 - _CLAMP)
    q = min(max(q, _CLAMP), 1.0 - _CLAMP)
    if p == q:
        return 0.0
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


def _klucb_scalar(mean_hat, count, budget):
    """Largest q in [mean_hat, 1) with count * kl(mean_hat, q) <= budget."""
    p = min(max(mean_hat, _CLAMP), 1.0 - _CLAMP)
    lo = p
    hi = 1.0 - _CLAMP
    if count * _kl_clamped(p, hi) <= budget:
        return hi
    while hi - lo > INDEX_TOL:
        mid = 0.5 * (lo + hi)
        if count * _kl_clamped(p, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def _klucb_vector(means, counts, budget, out):
    for i in range(out.shape[0]):
        out[i] = _klucb_scalar(means[i], counts[i], budget)


def _index_below(mean_hat, count, budget, target):
    """Whether the KL-UCB index is strictly below `target`.

    Equivalent to klucb_index(...) < target without running the bisection:
    the index falls short of the target iff the target costs more than the
    budget.  Used on the policies' hot paths.
    """
    p = min(max(mean_hat, _CLAMP), 1.0 - _CLAMP)
    if target > 1.0 - _CLAMP:
        return True          # the index is capped below 1
    if target <= p:
        return False
    return count * _kl_clamped(p, target) > budget


try:  # pragma: no cover - exercised implicitly when numba is installed
    from numba import njit

    _kl_clamped = njit(cache=True)(_kl_clamped)
    _klucb_scalar = njit(cache=True)(_klucb_scalar)
    _klucb_vector = njit(cache=True)(_klucb_vector)
    _index_below = njit(cache=True)(_index_below)
except ImportError:  # pragma: no cover
    pass


def index_budget(t):
    """log t + 3 log log t, with log log clamped at small t."""
    logt = math.log(max(t, 2))
    return logt + 3.0 * math.log(max(logt, 1.0))


def klucb_index(mean_hat, count, t):
    """KL-UCB confidence index for an empirical mean with `count` observations at step t."""
    if count < 1:
        raise ValidationError("klucb_index needs count >= 1")
    if not 0.0 <= mean_hat <= 1.0:
        raise ValidationError("mean_hat must lie in [0, 1], got %r" % (mean_hat,))
    q = _klucb_scalar(mean_hat, count, index_budget(t))
    return max(q, mean_hat)


class PolicyDecision(NamedTuple):
    arm_list: tuple
    exploring: bool = False
    explored: Optional[object] = None  # arm, or (slot, arm) for the per-slot variant
    initializing: bool = False


class Policy:
    """Single-owner state machine: reset once, then decide/update alternate."""

    requires_kind = None  # None means any instance kind

    def reset(self, rng):
        self.rng = rng

    def decide(self, t):
        raise NotImplementedError

    def update(self, decision, obs):
        pass

    def get_params(self):
        return {}


class Algorithm1Policy(Policy):
    """Asymptotically optimal policy for factorized instances.

    Keeps one pooled mean per arm over all slots where the value was observed.
    Each step nominates candidate arm t mod N; arms with enough observations
    form the greedy top-m list, and the candidate displaces the last slot only
    when its confidence index beats that slot's empirical mean.
    """

    requires_kind = FACTORIZED

    def __init__(self, num_arms, num_slots, delta):
        if delta <= 0:
            raise ValidationError("delta must be positive, got %r" % (delta,))
        self.num_arms = num_arms
        self.num_slots = num_slots
        self.delta = delta
        self.obs_count = [0] * num_arms
        self.obs_sum = [0.0] * num_arms

    def get_params(self):
        return {"delta": self.delta}

    @property
    def init_done(self):
        # each arm owes num_slots observations of its value before indices are trusted
        return min(self.obs_count) >= self.num_slots

    def _init_decision(self):
        order = sorted(range(self.num_arms), key=lambda j: (self.obs_count[j], j))
        return PolicyDecision(arm_list=tuple(order[:self.num_slots]), initializing=True)

    def decide(self, t):
        if not self.init_done:
            return self._init_decision()
        return self.decide_after_init(t)

    def decide_after_init(self, t):
        if not self.init_done:
            raise ProtocolError("initial observations are not complete")
        n, m = self.num_arms, self.num_slots
        counts = self.obs_count
        sums = self.obs_sum
        j_star = t % n
        threshold = self.delta * t
        grown = [j for j in range(n) if counts[j] > threshold]
        if len(grown) < m:
            pool = [j for j in range(n) if j not in grown]
            pad = self.rng.choice(len(pool), size=m - len(grown), replace=False)
            grown += [pool[i] for i in sorted(pad)]
        grown.sort(key=lambda j: (-sums[j] / counts[j], j))
        top = tuple(grown[:m])
        if j_star in top:
            return PolicyDecision(arm_list=top)
        last_mean = sums[top[-1]] / counts[top[-1]]
        if _index_below(sums[j_star] / counts[j_star], counts[j_star],
                        index_budget(t), last_mean):
            return PolicyDecision(arm_list=top)
        return PolicyDecision(arm_list=top[:-1] + (j_star,), exploring=True, explored=j_star)

    def update(self, decision, obs):
        for k, e in enumerate(obs.exam):
            if e:
                j = decision.arm_list[k]
                self.obs_count[j] += 1
                self.obs_sum[j] += obs.values[k]


class PerSlotPolicy(Policy):
    """Per-(slot, arm) exploration for instances without cross-position structure.

    Cycles a candidate (slot, arm) pair over steps.  Plays the greedy
    maximum-weight assignment of arms to slots under the empirical means
    unless pinning the candidate at its slot could beat the greedy value with
    the candidate's mean replaced by its confidence index (optimism at the
    assignment level, so displacing an arm that is merely cheap to displace
    at one slot but pays for it elsewhere does not trigger exploration).
    When exploring, the remaining slots are re-optimized over the other arms.
    """

    def __init__(self, num_arms, num_slots):
        self.num_arms = num_arms
        self.num_slots = num_slots
        self.counts = [[0] * num_arms for _ in range(num_slots)]
        self.sums = [[0.0] * num_arms for _ in range(num_slots)]
        self._init_round = 0
        self._assignments = tuple(itertools.permutations(range(num_arms), num_slots))

    @property
    def init_done(self):
        return all(c > 0 for row in self.counts for c in row)

    def _init_decision(self):
        # rotate arms through slots so every (slot, arm) pair gets observed
        i = self._init_round
        self._init_round += 1
        lst = tuple((i + k) % self.num_arms for k in range(self.num_slots))
        return PolicyDecision(arm_list=lst, initializing=True)

    def decide(self, t):
        if not self.init_done:
            return self._init_decision()
        return self.decide_after_init(t)

    def decide_after_init(self, t):
        if not self.init_done:
            raise ProtocolError("initial observations are not complete")
        n, m = self.num_arms, self.num_slots
        pair = t % (m * n)
        k_star, j_star = pair // n, pair % n
        means = [[s / c for s, c in zip(srow, crow)]
                 for srow, crow in zip(self.sums, self.counts)]
        best = -math.inf
        greedy = None
        for assign in self._assignments:
            val = 0.0
            for k in range(m):
                val += means[k][assign[k]]
            if val > best:
                best = val
                greedy = assign
        if greedy[k_star] == j_star:
            return PolicyDecision(arm_list=greedy)
        others = [j for j in range(n) if j != j_star]
        slots = [k for k in range(m) if k != k_star]
        rest, rest_val = max_weight_assignment(means, others, slots)
        # explore only if the pinned list could beat the greedy one when the
        # candidate's mean is replaced by its confidence index
        if _index_below(means[k_star][j_star], self.counts[k_star][j_star],
                        index_budget(t), best - rest_val):
            return PolicyDecision(arm_list=greedy)
        lst = [0] * m
        lst[k_star] = j_star
        for k, j in zip(slots, rest):
            lst[k] = j
        return PolicyDecision(arm_list=tuple(lst), exploring=True,
                              explored=(k_star, j_star))

    def update(self, decision, obs):
        for k, e in enumerate(obs.exam):
            if e:
                j = decision.arm_list[k]
                self.counts[k][j] += 1
                self.sums[k][j] += obs.values[k]


class RankedUCBPolicy(Policy):
    """Baseline: rank all arms by their confidence index, top m fill the slots.

    Position-naive on purpose: every play counts as one observation of the
    realized slot value (zero when the slot went unexamined), so the scores
    absorb the position bias instead of correcting for it.  This is the
    rank-by-score recipe the structure-aware policies are compared against.
    """

    requires_kind = FACTORIZED

    def __init__(self, num_arms, num_slots):
        self.num_arms = num_arms
        self.num_slots = num_slots
        self.obs_count = [0] * num_arms
        self.obs_sum = [0.0] * num_arms

    @property
    def init_done(self):
        return min(self.obs_count) >= 1

    def decide(self, t):
        if not self.init_done:
            order = sorted(range(self.num_arms), key=lambda j: (self.obs_count[j], j))
            return PolicyDecision(arm_list=tuple(order[:self.num_slots]), initializing=True)
        counts = np.array(self.obs_count, dtype=np.float64)
        means = np.array(self.obs_sum, dtype=np.float64) / counts
        out = np.empty(self.num_arms)
        _klucb_vector(means, counts, index_budget(t), out)
        indices = out.tolist()
        order = sorted(range(self.num_arms), key=lambda j: (-indices[j], j))
        return PolicyDecision(arm_list=tuple(order[:self.num_slots]))

    def update(self, decision, obs):
        for k, v in enumerate(obs.values):
            j = decision.arm_list[k]
            self.obs_count[j] += 1
            self.obs_sum[j] += v


class OraclePolicy(Policy):
    """Always plays a fixed optimal list."""

    def __init__(self, optimal_list):
        self.optimal_list = tuple(optimal_list)

    def decide(self, t):
        return PolicyDecision(arm_list=self.optimal_list)


class UniformPolicy(Policy):
    """Plays a uniformly random ordered list of distinct arms."""

    def __init__(self, num_arms, num_slots):
        self.num_arms = num_arms
        self.num_slots = num_slots

    def decide(self, t):
        perm = self.rng.permutation(self.num_arms)
        return PolicyDecision(arm_list=tuple(int(j) for j in perm[:self.num_slots]))


POLICY_NAMES = ("algorithm1", "perslot", "ranked_ucb", "oracle", "uniform")


def default_delta(instance):
    """Midpoint-ish default inside the required open interval (0, p_m / 2N^2)."""
    p_m = instance.exam_probs[instance.num_slots - 1]
    return p_m / (4.0 * instance.num_arms ** 2)


def make_policy(name, instance, params=None):
    """Construct a policy by name for the given instance, validating parameters."""
    from .model import optimal_structure  # local import to avoid cycle at module load

    params = dict(params or {})
    n, m = instance.num_arms, instance.num_slots
    if name == "algorithm1":
        if instance.kind != FACTORIZED:
            raise ShapeMismatchError("algorithm1 requires a FACTORIZED instance")
        delta = params.pop("delta", None)
        if delta is None:
            delta = default_delta(instance)
        upper = instance.exam_probs[m - 1] / (2.0 * n ** 2)
        if not 0.0 < delta < upper:
            raise ValidationError("delta must lie in (0, %g), got %r" % (upper, delta))
        policy = Algorithm1Policy(n, m, delta)
    elif name == "perslot":
        policy = PerSlotPolicy(n, m)
    elif name == "ranked_ucb":
        if instance.kind != FACTORIZED:
            raise ShapeMismatchError("ranked_ucb requires a FACTORIZED instance")
        policy = RankedUCBPolicy(n, m)
    elif name == "oracle":
        policy = OraclePolicy(min(optimal_structure(instance).optimal_lists))
    elif name == "uniform":
        policy = UniformPolicy(n, m)
    else:
        raise ValidationError("unknown policy %r; expected one of %s" % (name, list(POLICY_NAMES)))
    if params:
        raise ValidationError("unknown parameters for policy %r: %s" % (name, sorted(params)))
    return policy
