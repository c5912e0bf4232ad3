"""Asymptotic regret lower bounds.

Four routes to the log-t regret coefficient:

* an LP over per-list play rates y_pi (one discrimination constraint per
  relevant/irrelevant arm pair), solved with the in-package simplex so the
  KKT multipliers come out as duals;
* the closed-form max-min bound over slot-arm regrets and divergences, which
  re-represents the LP optimum under the reward-decomposition assumption;
* a strictly higher per-slot bound (and per-slot play-count bounds) for
  instances whose arm/slot means are free of cross-position correlation;
* the factorized asymptotic constant, in the two variants that differ by a
  factor of one over the last slot's examination probability (the simulation
  harness arbitrates between them).

Also includes the exhaustive verifier for the one-slot-per-step scheduling
claim used in the closed-form bound's derivation.
"""

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import simplex
from .assignment import max_weight_assignment
from .divergence import bernoulli_kl, regret_table, slot_divergence
from .model import (FACTORIZED, PER_SLOT, ValidationError, enumerate_lists,
                    optimal_structure)

CS_TOL = 1e-8      # complementary slackness tolerance
FEAS_TOL = 1e-9    # primal/dual feasibility tolerance


class IllPosedInstanceError(ValidationError):
    """An irrelevant arm is indistinguishable from a relevant arm."""


@dataclass(frozen=True)
class BoundLP:
    lists: tuple                 # column order
    rows: tuple                  # (relevant arm i, irrelevant arm j) per row
    coefficients: np.ndarray     # rows x columns, >= 1 constraints
    objective: np.ndarray        # Reg(pi) per column


@dataclass(frozen=True)
class LPSolution:
    status: str
    objective: float
    y: dict                      # ArmList -> play rate
    duals: dict                  # (i, j) -> multiplier


def build_lp(instance, table=None, structure=None):
    """Constraint system over play rates: for every relevant i and irrelevant j,
    the divergence accumulated by lists containing j must reach 1."""
    structure = structure or optimal_structure(instance)
    table = table or regret_table(instance)
    lists = tuple(enumerate_lists(instance))
    relevant = sorted(structure.relevant_arms)
    irrelevant = sorted(structure.irrelevant_arms)
    rows = tuple((i, j) for j in irrelevant for i in relevant)
    coeffs = np.zeros((len(rows), len(lists)))
    for r, (i, j) in enumerate(rows):
        for col, pi in enumerate(lists):
            if j in pi:
                coeffs[r, col] = slot_divergence(instance, pi.index(j), j, i)
        if rows and not coeffs[r].max() > 0.0:
            raise IllPosedInstanceError(
                "arm %d is indistinguishable from relevant arm %d in every slot" % (j, i))
    objective = np.array([table.per_list[pi] for pi in lists])
    return BoundLP(lists=lists, rows=rows, coefficients=coeffs, objective=objective)


def solve_lp(lp):
    """Minimize total regret rate subject to the discrimination constraints."""
    if len(lp.rows) == 0:
        return LPSolution(status=simplex.OPTIMAL, objective=0.0,
                          y={pi: 0.0 for pi in lp.lists}, duals={})
    res = simplex.solve(lp.objective, lp.coefficients, np.ones(len(lp.rows)))
    if res.status != simplex.OPTIMAL:
        raise RuntimeError("bound LP reported %s; it is feasible and bounded by construction"
                           % res.status)
    y = {pi: float(v) for pi, v in zip(lp.lists, res.x)}
    duals = {row: float(d) for row, d in zip(lp.rows, res.duals)}
    return LPSolution(status=res.status, objective=res.objective, y=y, duals=duals)


def lp_lower_bound(instance):
    """LP optimum; 0 without solving when every arm is relevant."""
    structure = optimal_structure(instance)
    if not structure.irrelevant_arms:
        return 0.0, None
    sol = solve_lp(build_lp(instance, structure=structure))
    return sol.objective, sol


def _discrimination_cost(instance, table, j, i):
    """min over slots of Reg(k, j) / I_k(j, i); inf when no slot distinguishes."""
    best = np.inf
    for k in range(instance.num_slots):
        div = slot_divergence(instance, k, j, i)
        if div > 0.0:
            best = min(best, table.per_slot_arm[k, j] / div)
    return best


def closed_form_bound(instance, table=None, structure=None):
    """Sum over irrelevant arms of the worst-case (over relevant arms) cheapest
    (over slots) regret per unit of discrimination."""
    structure = structure or optimal_structure(instance)
    table = table or regret_table(instance)
    total = 0.0
    for j in sorted(structure.irrelevant_arms):
        worst = 0.0
        for i in sorted(structure.relevant_arms):
            cost = _discrimination_cost(instance, table, j, i)
            if not np.isfinite(cost):
                raise IllPosedInstanceError(
                    "arm %d is indistinguishable from relevant arm %d in every slot" % (j, i))
            worst = max(worst, cost)
        total += worst
    return total


def per_slot_bound(instance, table=None, structure=None):
    """Higher bound for PER_SLOT instances: every (irrelevant arm, slot) pair
    must be explored separately, paying the slot's own regret."""
    if instance.kind != PER_SLOT:
        raise ValidationError("per_slot_bound requires a PER_SLOT instance")
    structure = structure or optimal_structure(instance)
    table = table or regret_table(instance)
    total = 0.0
    for j in sorted(structure.irrelevant_arms):
        for k in range(instance.num_slots):
            worst = 0.0
            for i in sorted(structure.slot_winners[k]):
                div = slot_divergence(instance, k, j, i)
                if not div > 0.0:
                    raise IllPosedInstanceError(
                        "arm %d matches slot-%d winner %d exactly" % (j, k, i))
                worst = max(worst, table.per_slot_arm[k, j] / div)
            total += worst
    return total


def play_count_bound(instance, k, j, structure=None):
    """Lower bound on plays of irrelevant arm j in slot k, per unit log t.
    The binding constraint is the hardest-to-distinguish slot winner."""
    if instance.kind != PER_SLOT:
        raise ValidationError("play_count_bound requires a PER_SLOT instance")
    structure = structure or optimal_structure(instance)
    if j not in structure.irrelevant_arms:
        raise ValidationError("arm %d is relevant; the play-count bound applies to irrelevant arms" % j)
    best = 0.0
    for i in sorted(structure.slot_winners[k]):
        div = slot_divergence(instance, k, j, i)
        if not div > 0.0:
            raise IllPosedInstanceError("arm %d matches slot-%d winner %d exactly" % (j, k, i))
        best = max(best, 1.0 / div)
    return best


def factorized_asymptote(instance, structure=None):
    """The two candidate asymptotic constants for FACTORIZED instances.

    Both sum, over irrelevant arms, the mean gap to the m-th best arm divided
    by their KL divergence; the `with_exam_factor` variant additionally divides
    by the last slot's examination probability.  They disagree whenever that
    probability is below 1; simulation slopes decide which one the optimal
    policy actually attains.
    """
    if instance.kind != FACTORIZED:
        raise ValidationError("factorized_asymptote requires a FACTORIZED instance")
    structure = structure or optimal_structure(instance)
    if not structure.irrelevant_arms:
        return 0.0, 0.0
    m = instance.num_slots
    mu = instance.arm_means
    mu_m = sorted(mu, reverse=True)[m - 1]  # mean of the weakest arm in the optimal list
    p_m = instance.exam_probs[m - 1]
    plain = 0.0
    for j in sorted(structure.irrelevant_arms):
        div = bernoulli_kl(mu[j], mu_m)
        if not div > 0.0:
            raise IllPosedInstanceError("irrelevant arm %d has the m-th best mean" % j)
        plain += (mu_m - mu[j]) / div
    return plain / p_m, plain


@dataclass(frozen=True)
class LowerBoundResult:
    lp_bound: float
    closed_form: float
    per_slot: Optional[float] = None
    asymptote_with_exam_factor: Optional[float] = None
    asymptote_plain: Optional[float] = None
    play_count_bounds: dict = field(default_factory=dict)  # (k, j) -> rate, PER_SLOT only


def compute_lower_bounds(instance):
    """All applicable bounds for one instance."""
    structure = optimal_structure(instance)
    table = regret_table(instance)
    lp_value, _ = lp_lower_bound(instance)
    closed = closed_form_bound(instance, table=table, structure=structure)
    if instance.kind == FACTORIZED:
        scaled, plain = factorized_asymptote(instance, structure=structure)
        return LowerBoundResult(lp_bound=lp_value, closed_form=closed,
                                asymptote_with_exam_factor=scaled, asymptote_plain=plain)
    slot = per_slot_bound(instance, table=table, structure=structure)
    counts = {}
    for j in sorted(structure.irrelevant_arms):
        for k in range(instance.num_slots):
            counts[(k, j)] = play_count_bound(instance, k, j, structure=structure)
    return LowerBoundResult(lp_bound=lp_value, closed_form=closed, per_slot=slot,
                            play_count_bounds=counts)


# --- one-slot-per-step scheduling verifier ---------------------------------

@dataclass(frozen=True)
class SlotClosingReport:
    best_value: float
    one_per_step_value: float
    equal: bool
    schedules: int


def _ordered_partitions(items):
    """All sequences of disjoint non-empty groups covering `items`."""
    items = tuple(items)
    if not items:
        yield ()
        return
    for r in range(1, len(items) + 1):
        for head in itertools.combinations(items, r):
            group = frozenset(head)
            remaining = tuple(x for x in items if x not in group)
            for tail in _ordered_partitions(remaining):
                yield (group,) + tail


def verify_slot_closing(rewards, slots_to_close):
    """Check that closing one slot per step is reward-optimal.

    rewards is an m x m matrix (slot, object).  Every schedule is an ordered
    partition of slots_to_close; at each step the partition's current group is
    closed and the objects are assigned to the open slots for the maximum
    one-step reward.  Reports the best schedule value against the value of
    closing the slots one at a time.
    """
    rewards = np.asarray(rewards, dtype=float)
    m = rewards.shape[0]
    if rewards.shape != (m, m):
        raise ValidationError("rewards must be a square slot-by-object matrix")
    close = tuple(sorted(set(slots_to_close)))
    if len(close) > m:
        raise ValidationError("cannot close %d slots of %d" % (len(close), m))
    for k in close:
        if not 0 <= k < m:
            raise ValidationError("slot index %r out of range" % (k,))

    all_slots = frozenset(range(m))
    objects = tuple(range(m))
    step_value = {}  # closed group -> best one-step reward over the open slots
    for r in range(len(close) + 1):
        for group in itertools.combinations(close, r):
            group = frozenset(group)
            open_slots = tuple(sorted(all_slots - group))
            _, val = max_weight_assignment(rewards, objects, open_slots)
            step_value[group] = val

    best = -np.inf
    count = 0
    for schedule in _ordered_partitions(close):
        count += 1
        best = max(best, sum(step_value[g] for g in schedule))
    one_per_step = sum(step_value[frozenset((k,))] for k in close)
    if not close:
        best = one_per_step = 0.0
    return SlotClosingReport(best_value=float(best),
                             one_per_step_value=float(one_per_step),
                             equal=bool(abs(best - one_per_step) <= 1e-9),
                             schedules=count)
