"""Bandit environments with slot-dependent rewards.

An instance is either FACTORIZED (an examination probability per slot times a
Bernoulli mean per arm, the position-based click model) or PER_SLOT (an
independent Bernoulli mean for every arm/slot pair).  Arms and slots are
0-based everywhere.
"""

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

FACTORIZED = "factorized"
PER_SLOT = "per_slot"

# Tolerance for deciding optimality ties between analytically equal sums.
EPS_TIE = 1e-12


class ValidationError(ValueError):
    """Raised when an instance, list, or configuration violates its contract."""


ArmList = tuple  # ordered tuple of distinct arm indices, one per slot


class Observation(NamedTuple):
    """One step of feedback: per-slot examination bits, values, list reward."""

    exam: tuple
    values: tuple
    reward: float


@dataclass(frozen=True)
class ProblemInstance:
    kind: str
    num_arms: int
    num_slots: int
    exam_probs: Optional[tuple] = None   # factorized only, strictly decreasing
    arm_means: Optional[tuple] = None    # factorized only
    slot_means: Optional[tuple] = None   # per-slot only, N rows of m entries

    def mean_matrix(self):
        """E F(k, arm j) as an (m x N) array: expected value of slot k showing arm j."""
        if self.kind == FACTORIZED:
            p = np.asarray(self.exam_probs)
            mu = np.asarray(self.arm_means)
            return np.outer(p, mu)
        theta = np.asarray(self.slot_means)  # N x m
        return theta.T


def factorized(exam_probs, arm_means, validate=True):
    """Build a FACTORIZED instance (examination probabilities x arm means)."""
    exam_probs = tuple(float(p) for p in exam_probs)
    arm_means = tuple(float(u) for u in arm_means)
    m, n = len(exam_probs), len(arm_means)
    if validate:
        if n < 2:
            raise ValidationError("need at least 2 arms, got %d" % n)
        if not 1 <= m <= n:
            raise ValidationError("need 1 <= num_slots <= num_arms, got m=%d, N=%d" % (m, n))
        for p in exam_probs:
            if not 0.0 < p <= 1.0:
                raise ValidationError("exam_probs must lie in (0, 1], got %r" % (p,))
        for a, b in zip(exam_probs, exam_probs[1:]):
            if not a > b:
                raise ValidationError(
                    "exam_probs must strictly decrease (slot order would be ambiguous), got %r" % (exam_probs,))
        for u in arm_means:
            if not 0.0 < u < 1.0:
                raise ValidationError("arm_means must lie strictly in (0, 1), got %r" % (u,))
    return ProblemInstance(kind=FACTORIZED, num_arms=n, num_slots=m,
                           exam_probs=exam_probs, arm_means=arm_means)


def per_slot(slot_means, validate=True):
    """Build a PER_SLOT instance from an N x m matrix of arm/slot means."""
    theta = tuple(tuple(float(v) for v in row) for row in slot_means)
    n = len(theta)
    m = len(theta[0]) if n else 0
    if validate:
        if n < 2:
            raise ValidationError("need at least 2 arms, got %d" % n)
        if not 1 <= m <= n:
            raise ValidationError("need 1 <= num_slots <= num_arms, got m=%d, N=%d" % (m, n))
        for row in theta:
            if len(row) != m:
                raise ValidationError("slot_means rows must all have %d entries" % m)
            for v in row:
                if not 0.0 < v < 1.0:
                    raise ValidationError("slot_means must lie strictly in (0, 1), got %r" % (v,))
    return ProblemInstance(kind=PER_SLOT, num_arms=n, num_slots=m, slot_means=theta)


def validate_list(instance, arm_list):
    arm_list = tuple(arm_list)
    if len(arm_list) != instance.num_slots:
        raise ValidationError("list %r has %d entries, expected %d"
                              % (arm_list, len(arm_list), instance.num_slots))
    if len(set(arm_list)) != len(arm_list):
        raise ValidationError("list %r repeats an arm" % (arm_list,))
    for j in arm_list:
        if not 0 <= j < instance.num_arms:
            raise ValidationError("arm index %r out of range [0, %d)" % (j, instance.num_arms))
    return arm_list


def enumerate_lists(instance):
    """All ordered lists of num_slots distinct arms, in lexicographic order."""
    return list(itertools.permutations(range(instance.num_arms), instance.num_slots))


def expected_list_reward(instance, arm_list):
    """Expected one-step reward of a list: sum of per-slot expected values."""
    arm_list = validate_list(instance, arm_list)
    if instance.kind == FACTORIZED:
        return sum(p * instance.arm_means[j] for p, j in zip(instance.exam_probs, arm_list))
    return sum(instance.slot_means[j][k] for k, j in enumerate(arm_list))


@dataclass(frozen=True)
class OptimalStructure:
    optimal_value: float
    optimal_lists: frozenset
    relevant_arms: frozenset    # arms appearing in at least one optimal list
    irrelevant_arms: frozenset
    slot_winners: tuple         # per slot, frozenset of arms placed there by some optimal list


def optimal_structure(instance):
    """Exhaustive maximization of expected reward over all lists."""
    lists = enumerate_lists(instance)
    values = [expected_list_reward(instance, pi) for pi in lists]
    best = max(values)
    optimal = [pi for pi, v in zip(lists, values) if v >= best - EPS_TIE]
    relevant = frozenset(j for pi in optimal for j in pi)
    winners = tuple(frozenset(pi[k] for pi in optimal) for k in range(instance.num_slots))
    return OptimalStructure(
        optimal_value=best,
        optimal_lists=frozenset(optimal),
        relevant_arms=relevant,
        irrelevant_arms=frozenset(range(instance.num_arms)) - relevant,
        slot_winners=winners,
    )


def sample_observation(instance, arm_list, rng):
    """Draw one Observation for the played list.

    Consumes the random stream in slot order: FACTORIZED draws an examination
    uniform then a satisfaction uniform for every slot (even unexamined ones,
    so consumption is fixed per step); PER_SLOT draws one uniform per slot.
    """
    arm_list = validate_list(instance, arm_list)
    if instance.kind == FACTORIZED:
        exam = []
        values = []
        for k, j in enumerate(arm_list):
            e = 1 if rng.random() < instance.exam_probs[k] else 0
            v = 1 if rng.random() < instance.arm_means[j] else 0
            exam.append(e)
            values.append(e * v)
        return Observation(tuple(exam), tuple(values), float(sum(values)))
    values = []
    for k, j in enumerate(arm_list):
        values.append(1 if rng.random() < instance.slot_means[j][k] else 0)
    return Observation((1,) * instance.num_slots, tuple(values), float(sum(values)))


class ObservationSampler:
    """Buffered drop-in for repeated sample_observation calls on one instance.

    Pre-draws uniforms in blocks from the same generator, producing a stream
    identical to calling sample_observation with the same rng (Generator.random(n)
    matches n scalar draws).
    """

    def __init__(self, instance, rng, steps_per_block=4096):
        self.instance = instance
        self.rng = rng
        self._factorized = instance.kind == FACTORIZED
        self._per_step = (2 if self._factorized else 1) * instance.num_slots
        # Whole steps per block so no buffered uniform is ever discarded.
        self.block = self._per_step * steps_per_block
        self._buf = rng.random(self.block).tolist()
        self._pos = 0
        if self._factorized:
            self._p = tuple(instance.exam_probs)
            self._mu = tuple(instance.arm_means)
        else:
            self._theta = tuple(tuple(row) for row in instance.slot_means)
        self._ones = (1,) * instance.num_slots

    def draw(self, arm_list):
        buf = self._buf
        pos = self._pos
        if pos + self._per_step > self.block:
            buf = self._buf = self.rng.random(self.block).tolist()
            pos = 0
        values = []
        total = 0
        if self._factorized:
            p = self._p
            mu = self._mu
            exam = []
            for k, j in enumerate(arm_list):
                e = 1 if buf[pos] < p[k] else 0
                v = e if buf[pos + 1] < mu[j] else 0
                pos += 2
                exam.append(e)
                values.append(v)
                total += v
            self._pos = pos
            return Observation(tuple(exam), tuple(values), float(total))
        theta = self._theta
        for k, j in enumerate(arm_list):
            v = 1 if buf[pos] < theta[j][k] else 0
            pos += 1
            values.append(v)
            total += v
        self._pos = pos
        return Observation(self._ones, tuple(values), float(total))
