"""Exhaustive maximum-weight assignment of arms to slots.

Problem sizes here are tiny (m <= 4 slots for the closing verifier, a handful
of arms for the per-slot policy), so enumeration over ordered selections is
both the implementation and its own ground truth.  Lexicographic iteration
with a strict comparison makes ties resolve to the smallest arm indices.
"""

import itertools


def max_weight_assignment(weights, arms, slots):
    """Best assignment of distinct arms (from `arms`) to the given slots.

    weights[k][j] is the value of placing arm j in slot k.  Returns
    (assignment, value) where assignment is a tuple of arms aligned with
    `slots`.  An empty slot set yields ((), 0.0).
    """
    arms = tuple(arms)
    slots = tuple(slots)
    if len(arms) < len(slots):
        raise ValueError("need at least as many arms as slots")
    best_val = -float("inf")
    best = None
    for combo in itertools.permutations(arms, len(slots)):
        val = 0.0
        for k, j in zip(slots, combo):
            val += weights[k][j]
        if val > best_val:
            best_val = val
            best = combo
    if best is None:  # zero slots
        return (), 0.0
    return best, best_val
