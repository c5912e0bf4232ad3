import math

import numpy as np
import pytest

import slotbandits as sb
from slotbandits.harness import default_checkpoints


def test_default_checkpoints():
    cps = default_checkpoints(10 ** 6)
    assert cps[0] == 1000 and cps[-1] == 10 ** 6
    assert list(cps) == sorted(set(cps))
    assert sum(1 for t in cps if t >= 10 ** 5) >= 3  # final decade has enough points
    short = default_checkpoints(500)
    assert short[-1] == 500


def test_checkpoint_validation(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="oracle", horizon=100,
                          checkpoints=(50, 200))
    with pytest.raises(sb.ValidationError):
        config.resolved_checkpoints()


def test_oracle_zero_regret(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="oracle", horizon=2000,
                          checkpoints=(1000, 2000), master_seed=1)
    res = sb.run_episode(config)
    assert (res.regret == 0.0).all()
    assert res.list_counts == {(0, 1): 2000}
    assert res.init_steps == 0


def test_uniform_linear_regret(pbm_3x2):
    table = sb.regret_table(pbm_3x2)
    mean_reg = sum(table.per_list.values()) / 6
    assert mean_reg == pytest.approx(0.15, abs=1e-12)
    config = sb.RunConfig(instance=pbm_3x2, policy="uniform", horizon=30000,
                          checkpoints=(10000, 30000), master_seed=3)
    res = sb.run_episode(config)
    for t, reg in zip(res.checkpoints, res.regret):
        assert reg / t == pytest.approx(mean_reg, rel=0.05)


def test_run_episode_deterministic(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="algorithm1", horizon=5000,
                          checkpoints=(1000, 5000), master_seed=7)
    a = sb.run_episode(config, replication=2)
    b = sb.run_episode(config, replication=2)
    assert (a.regret == b.regret).all()
    assert a.list_counts == b.list_counts
    assert (a.slot_arm_counts == b.slot_arm_counts).all()
    c = sb.run_episode(config, replication=3)
    assert a.list_counts != c.list_counts  # different replication, different stream


def test_counter_identities(pbm_3x2, pos_2x2):
    for inst, policy in ((pbm_3x2, "algorithm1"), (pbm_3x2, "ranked_ucb"),
                         (pos_2x2, "perslot"), (pbm_3x2, "uniform")):
        config = sb.RunConfig(instance=inst, policy=policy, horizon=4000,
                              checkpoints=(500, 2000, 4000), master_seed=11)
        res = sb.run_episode(config)
        assert sum(res.list_counts.values()) == config.horizon - res.init_steps
        assert sum(res.init_list_counts.values()) == res.init_steps
        # slot-arm counts decompose the play counts
        total = {}
        for pi, c in list(res.list_counts.items()) + list(res.init_list_counts.items()):
            for k, j in enumerate(pi):
                total[(k, j)] = total.get((k, j), 0) + c
        for (k, j), c in total.items():
            assert res.slot_arm_counts[k, j] == c
        assert res.slot_arm_counts.sum() == config.horizon * inst.num_slots
        # regret is non-decreasing and exactly reproducible from the counters
        assert (np.diff(res.regret) >= 0).all()
        table = sb.regret_table(inst)
        for i, counts in enumerate(res.checkpoint_list_counts):
            expect = sum(counts[pi] * table.per_list[pi] for pi in sorted(counts))
            assert res.regret[i] == expect
            assert res.regret_over_logt[i] == res.regret[i] / math.log(res.checkpoints[i])


def test_run_replicated_aggregation(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="uniform", horizon=2000,
                          checkpoints=(1000, 2000), replications=5, master_seed=5)
    agg = sb.run_replicated(config)
    reg = np.stack([r.regret for r in agg.runs])
    assert agg.regret_mean == pytest.approx(reg.mean(axis=0))
    assert agg.regret_stderr == pytest.approx(reg.std(axis=0, ddof=1) / math.sqrt(5))
    assert agg.replications == 5
    # aggregation is a deterministic function of the replication set
    again = sb.run_replicated(config)
    assert (again.regret_mean == agg.regret_mean).all()


def test_run_replicated_oracle_mean_zero(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="oracle", horizon=1500,
                          checkpoints=(1500,), replications=3, master_seed=0)
    agg = sb.run_replicated(config)
    assert (agg.regret_mean == 0.0).all()
    assert (agg.regret_stderr == 0.0).all()


def test_identical_replications_zero_stderr(pbm_3x2):
    config = sb.RunConfig(instance=pbm_3x2, policy="algorithm1", horizon=3000,
                          checkpoints=(3000,), replications=1, master_seed=9)
    a = sb.run_episode(config, replication=0)
    b = sb.run_episode(config, replication=0)
    reg = np.stack([a.regret, b.regret])
    assert reg.std(axis=0, ddof=1).max() == 0.0


def test_slope_estimate_exact_log_curve():
    cps = tuple(int(t) for t in np.logspace(3, 6, 16))
    curve = 5.0 * np.log(cps)
    assert sb.slope_estimate(cps, curve, 10 ** 6) == pytest.approx(5.0, abs=1e-9)


def test_slope_estimate_constant_curve():
    cps = (1000, 2000, 5000, 10000)
    assert sb.slope_estimate(cps, np.zeros(4), 10000) == 0.0


def test_algorithm1_on_small_horizon_beats_uniform(pbm_3x2):
    base = dict(instance=pbm_3x2, horizon=20000, checkpoints=(20000,), master_seed=13,
                replications=3)
    algo = sb.run_replicated(sb.RunConfig(policy="algorithm1", **base))
    unif = sb.run_replicated(sb.RunConfig(policy="uniform", **base))
    assert algo.regret_mean[-1] < unif.regret_mean[-1] / 5
