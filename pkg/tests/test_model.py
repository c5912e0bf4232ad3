import math

import numpy as np
import pytest

import slotbandits as sb
from slotbandits.model import ObservationSampler

from conftest import random_factorized, random_per_slot


def test_enumerate_lists_counts(pbm_3x2):
    lists = sb.enumerate_lists(pbm_3x2)
    assert lists == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


def test_enumerate_lists_two_arms():
    inst = sb.factorized((1.0, 0.5), (0.6, 0.4))
    assert sb.enumerate_lists(inst) == [(0, 1), (1, 0)]


def test_enumerate_lists_5_choose_3():
    inst = sb.factorized((1.0, 0.7, 0.4), (0.9, 0.8, 0.7, 0.6, 0.5))
    lists = sb.enumerate_lists(inst)
    assert len(lists) == 60
    assert len(set(lists)) == 60
    assert lists == sorted(lists)


def test_expected_list_reward(pbm_3x2):
    assert sb.expected_list_reward(pbm_3x2, (0, 1)) == pytest.approx(1.3, abs=1e-12)
    assert sb.expected_list_reward(pbm_3x2, (2, 1)) == pytest.approx(1.0, abs=1e-12)


def test_expected_list_reward_single_slot():
    inst = sb.factorized((0.7,), (0.9, 0.3))
    assert sb.expected_list_reward(inst, (1,)) == pytest.approx(0.7 * 0.3)


def test_expected_list_reward_rejects_duplicates(pbm_3x2):
    with pytest.raises(sb.ValidationError):
        sb.expected_list_reward(pbm_3x2, (1, 1))


def test_validation_rejects_tied_exam_probs():
    with pytest.raises(sb.ValidationError):
        sb.factorized((0.5, 0.5), (0.9, 0.8))


def test_validation_rejects_boundary_means():
    with pytest.raises(sb.ValidationError):
        sb.factorized((1.0, 0.5), (1.0, 0.8, 0.6))
    with pytest.raises(sb.ValidationError):
        sb.per_slot([[0.9, 0.0], [0.7, 0.6]])


def test_validation_allows_equal_arm_means():
    inst = sb.factorized((1.0, 0.5), (0.9, 0.7, 0.7))
    assert inst.num_arms == 3


def test_optimal_structure_pbm(pbm_3x2):
    st = sb.optimal_structure(pbm_3x2)
    assert st.optimal_value == pytest.approx(1.3, abs=1e-12)
    assert st.optimal_lists == frozenset({(0, 1)})
    assert st.relevant_arms == frozenset({0, 1})
    assert st.irrelevant_arms == frozenset({2})
    assert st.slot_winners == (frozenset({0}), frozenset({1}))


def test_optimal_structure_per_slot(pos_2x2):
    st = sb.optimal_structure(pos_2x2)
    assert st.optimal_lists == frozenset({(0, 1)})
    assert st.optimal_value == pytest.approx(1.5)
    assert st.irrelevant_arms == frozenset({2})


def test_optimal_structure_all_equal_means():
    inst = sb.factorized((1.0, 0.5), (0.7, 0.7, 0.7))
    st = sb.optimal_structure(inst)
    assert len(st.optimal_lists) == 6
    assert st.irrelevant_arms == frozenset()


def test_optimal_lists_all_achieve_optimum():
    rng = np.random.default_rng(7)
    for _ in range(20):
        inst = random_factorized(rng) if rng.random() < 0.5 else random_per_slot(rng)
        st = sb.optimal_structure(inst)
        for pi in st.optimal_lists:
            assert sb.expected_list_reward(inst, pi) == pytest.approx(st.optimal_value, abs=1e-9)
        for pi in sb.enumerate_lists(inst):
            assert sb.expected_list_reward(inst, pi) <= st.optimal_value + 1e-12
            assert 0.0 <= sb.expected_list_reward(inst, pi) <= inst.num_slots


def test_sample_degenerate_always_full_reward():
    inst = sb.factorized((1.0, 0.999999999), (1 - 1e-12, 1 - 1e-12), validate=False)
    rng = np.random.default_rng(0)
    for _ in range(100):
        obs = sb.sample_observation(inst, (0, 1), rng)
        assert obs.reward == 2.0


def test_sample_observation_contracts(pbm_3x2, pos_2x2):
    rng = np.random.default_rng(3)
    for _ in range(2000):
        obs = sb.sample_observation(pbm_3x2, (0, 2), rng)
        assert obs.reward == sum(obs.values)
        for e, f in zip(obs.exam, obs.values):
            assert f <= e
            assert f in (0, 1) and e in (0, 1)
    for _ in range(200):
        obs = sb.sample_observation(pos_2x2, (1, 2), rng)
        assert obs.exam == (1, 1)
        assert obs.reward == sum(obs.values)


def test_sample_observation_deterministic(pbm_3x2):
    a = [sb.sample_observation(pbm_3x2, (0, 1), np.random.default_rng(42)) for _ in range(1)]
    b = [sb.sample_observation(pbm_3x2, (0, 1), np.random.default_rng(42)) for _ in range(1)]
    assert a == b


def test_sample_observation_monte_carlo_mean(pbm_3x2):
    rng = np.random.default_rng(11)
    n = 10 ** 6
    # vectorized replica of the sampling rule, same expectations
    lst = (0, 1)
    total = 0.0
    sq = 0.0
    sampler = ObservationSampler(pbm_3x2, rng)
    for _ in range(n):
        r = sampler.draw(lst).reward
        total += r
        sq += r * r
    mean = total / n
    stderr = math.sqrt((sq / n - mean ** 2) / n)
    expected = sb.expected_list_reward(pbm_3x2, lst)
    assert abs(mean - expected) <= 3 * stderr


def test_buffered_sampler_matches_direct_draws(pbm_3x2, pos_2x2):
    for inst in (pbm_3x2, pos_2x2):
        direct_rng = np.random.default_rng(5)
        buf_rng = np.random.default_rng(5)
        sampler = ObservationSampler(inst, buf_rng, steps_per_block=7)
        lists = sb.enumerate_lists(inst)
        for i in range(500):
            lst = lists[i % len(lists)]
            assert sampler.draw(lst) == sb.sample_observation(inst, lst, direct_rng)


def test_mean_matrix(pbm_3x2, pos_2x2):
    mm = pbm_3x2.mean_matrix()
    assert mm[0, 0] == pytest.approx(0.9)
    assert mm[1, 2] == pytest.approx(0.3)
    assert pos_2x2.mean_matrix()[1, 0] == pytest.approx(0.5)
