"""KL divergences and regret tables.

All logarithms are natural: the log t normalizations in the simulation use the
same base, so the asymptotic constants are directly comparable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import (FACTORIZED, EPS_TIE, ValidationError, enumerate_lists,
                    expected_list_reward, optimal_structure, validate_list)


def bernoulli_kl(p, q):
    """KL divergence between Bernoulli(p) and Bernoulli(q), natural log.

    Both arguments must lie strictly in (0, 1) so the divergence is finite.
    Returns exactly 0 when p == q.
    """
    if not 0.0 < p < 1.0:
        raise ValidationError("bernoulli_kl: p must lie in (0, 1), got %r" % (p,))
    if not 0.0 < q < 1.0:
        raise ValidationError("bernoulli_kl: q must lie in (0, 1), got %r" % (q,))
    if p == q:
        return 0.0
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


def slot_divergence(instance, k, a, b):
    """KL divergence between the slot-k reward distributions of arms a and b."""
    if not 0 <= k < instance.num_slots:
        raise ValidationError("slot index %r out of range" % (k,))
    if a == b:
        return 0.0
    if instance.kind == FACTORIZED:
        return instance.exam_probs[k] * bernoulli_kl(instance.arm_means[a], instance.arm_means[b])
    return bernoulli_kl(instance.slot_means[a][k], instance.slot_means[b][k])


def list_divergence(instance, arm_list, k, a):
    """KL between the reward distribution of arm_list and the same list with
    arm a substituted into slot k.  The product form over slots collapses the
    list-level divergence to the single affected slot."""
    arm_list = validate_list(instance, arm_list)
    return slot_divergence(instance, k, arm_list[k], a)


@dataclass(frozen=True)
class RegretTable:
    """Per-list regrets and the per-(slot, arm) minimum regrets."""

    optimal_value: float
    per_list: dict          # ArmList -> Reg(pi)
    per_slot_arm: np.ndarray  # (m x N), Reg(k, j) = min regret among lists placing j at k

    def regret(self, arm_list):
        return self.per_list[tuple(arm_list)]

    def is_optimal(self, arm_list):
        return self.per_list[tuple(arm_list)] <= EPS_TIE


def regret_table(instance):
    """Brute-force per-list regrets and slot-arm minima over all lists."""
    struct = optimal_structure(instance)
    best = struct.optimal_value
    per_list = {}
    per_slot_arm = np.full((instance.num_slots, instance.num_arms), np.inf)
    for pi in enumerate_lists(instance):
        reg = best - expected_list_reward(instance, pi)
        reg = max(reg, 0.0)
        per_list[pi] = reg
        for k, j in enumerate(pi):
            if reg < per_slot_arm[k, j]:
                per_slot_arm[k, j] = reg
    return RegretTable(optimal_value=best, per_list=per_list, per_slot_arm=per_slot_arm)
