import itertools
import math

import numpy as np
import pytest

from matchsim.domain import TaskSpec, generate_instance, substream
from matchsim.errors import ConfigError, ContractViolation
from matchsim.feedback import NoiseModel, expected_reward, qualifies
from matchsim.policies import (
    BefParams,
    BefPolicy,
    EpsilonGreedyParams,
    EpsilonGreedyPolicy,
    HmePolicy,
    OraclePolicy,
    PolicySpec,
    RandomPolicy,
    UcbPolicy,
    make_policy,
)
from matchsim.simulator import run_simulation

NOISE = NoiseModel(0.15)


def make_tasks(reqs_list):
    return [TaskSpec(id=i, requirements=tuple(r)) for i, r in enumerate(reqs_list)]


def test_policy_spec_validation():
    with pytest.raises(ConfigError):
        PolicySpec(kind="nope")
    with pytest.raises(ConfigError):
        PolicySpec(kind="hme", estimator="bad")
    with pytest.raises(ConfigError):
        PolicySpec(kind="hme", update_mode="bad")
    with pytest.raises(ConfigError):
        EpsilonGreedyParams(epsilon0=1.5)
    with pytest.raises(ConfigError):
        BefParams(cost=0.0)


def test_epsilon_sequence_decays_per_block():
    params = EpsilonGreedyParams(epsilon0=0.5, drop=0.8)
    policy = EpsilonGreedyPolicy(NOISE, params)
    policy.begin_run(3, 1, 30)
    rng = substream(0, 50)
    tasks = make_tasks([(0.2,), (0.4,), (0.6,)])
    seen = []
    for k in range(10):
        seen.append(policy.epsilon)
        policy.choose_block(tasks, rng)
    for k, eps in enumerate(seen):
        assert eps == pytest.approx(0.5 * 0.8**k)
    assert seen == sorted(seen, reverse=True)


def test_egreedy_zero_epsilon_equals_hme():
    inst = generate_instance(6, 60, 3, rng_seed=2)
    spec_eg = PolicySpec("egreedy", egreedy=EpsilonGreedyParams(epsilon0=0.0, drop=0.9))
    eg = make_policy(spec_eg, NOISE, rule="ordered")
    hme = make_policy(PolicySpec("hme"), NOISE, rule="ordered")
    tr_eg = run_simulation(inst, eg, NOISE, "block", substream(3, 1), "ordered")
    tr_hme = run_simulation(inst, hme, NOISE, "block", substream(3, 1), "ordered")
    assert [a.pairs for a in tr_eg.actions] == [a.pairs for a in tr_hme.actions]
    assert tr_eg.rewards == tr_hme.rewards


def test_ucb_index_formula():
    policy = UcbPolicy()
    policy.begin_run(2, 1, 100)
    policy.n = 100
    policy.pulls[0] = 10
    policy.reward_sums[0] = 5
    expected = 0.5 + math.sqrt(2 * math.log(100) / 10)
    assert policy.index(0) == pytest.approx(expected)
    assert policy.index(0) == pytest.approx(1.4597, abs=1e-4)
    assert policy.index(1) == math.inf  # untried


def test_ucb_prefers_untried_then_best():
    policy = UcbPolicy()
    policy.begin_run(3, 1, 10)
    tasks = make_tasks([(0.2,)])
    rng = substream(0, 51)
    # All untried: lowest id wins.
    assert policy.choose_block(tasks, rng).pairs[0][0] == 0
    policy.observe(0, tasks[0], 1)
    # Remaining untried workers outrank the tried one; lowest id first.
    assert policy.choose_block(tasks, rng).pairs[0][0] == 1


def test_all_policies_emit_valid_blocks():
    inst = generate_instance(8, 64, 3, rng_seed=9)
    for kind in ("oracle", "hme", "egreedy", "ucb", "bef", "random"):
        policy = make_policy(PolicySpec(kind), NOISE, rule="ordered")
        trace = run_simulation(inst, policy, NOISE, "block", substream(4, 2), "ordered")
        for action in trace.actions:
            action.validate("block")
            assert len(action.pairs) == 8


def test_bef_phase_boundary():
    # Budget 40, explore fraction 0.25: exactly the first 10 assignments are
    # round-robin; from then on the policy is density-greedy.
    params = BefParams(explore_fraction=0.25, budget=40.0, cost=1.0)
    policy = BefPolicy(params)
    policy.begin_run(4, 1, 40)
    tasks = make_tasks([(0.2,), (0.4,), (0.6,), (0.8,)])
    rng = substream(0, 52)
    workers_seen = []
    for _ in range(3):
        action = policy.choose_block(tasks, rng)
        for worker_id, task_id in action.pairs:
            policy.observe(worker_id, next(t for t in tasks if t.id == task_id), 1)
            workers_seen.append(worker_id)
    # First ten assignments cycle the pool round-robin.
    assert workers_seen[:10] == [0, 1, 2, 3, 0, 1, 2, 3, 0, 1]
    assert policy.spent == pytest.approx(12.0)


def test_bef_budget_decrements_by_cost():
    params = BefParams(explore_fraction=0.1, budget=20.0, cost=2.5)
    policy = BefPolicy(params)
    policy.begin_run(2, 1, 8)
    t = TaskSpec(id=0, requirements=(0.2,))
    before = policy.remaining_budget
    policy.observe(0, t, 1)
    assert before - policy.remaining_budget == pytest.approx(2.5)


def test_bef_default_budget_is_run_length():
    policy = BefPolicy(BefParams())
    policy.begin_run(5, 2, 123)
    assert policy.budget == pytest.approx(123.0)


def test_observe_counters():
    policy = HmePolicy(NOISE)
    policy.begin_run(3, 2, 10)
    t = TaskSpec(id=0, requirements=(0.6, 0.2))
    policy.observe(1, t, 1)
    policy.observe(1, t, 0)
    assert policy.n == 2
    assert policy.pulls == [0, 2, 0]
    assert policy.reward_sums == [0, 1, 0]
    assert policy.reward_sums[1] / policy.pulls[1] == 0.5


def test_observe_routes_to_estimator():
    policy = HmePolicy(NOISE, update_mode="overwrite")
    policy.begin_run(1, 3, 10)
    policy.observe(0, TaskSpec(id=0, requirements=(0.6, 0.2, 0.4)), 1)
    assert policy._intervals[0].lower == (0.6, 0.2, 0.4)


def test_observe_unknown_worker():
    policy = RandomPolicy()
    policy.begin_run(2, 1, 4)
    with pytest.raises(ContractViolation):
        policy.observe(5, TaskSpec(id=0, requirements=(0.2,)), 1)


def test_empty_block_rejected():
    policy = RandomPolicy()
    policy.begin_run(2, 1, 4)
    with pytest.raises(ContractViolation):
        policy.choose_block([], substream(0, 53))


def test_oracle_block_is_reward_optimal():
    # Brute-force every permutation of small instances: no assignment has a
    # higher expected reward under the true skills.
    rng = substream(0, 54)
    for rule in ("componentwise", "ordered"):
        for trial in range(20):
            inst = generate_instance(4, 4, 2, rng_seed=int(rng.integers(1 << 30)))
            oracle = OraclePolicy(NOISE, rule=rule)
            oracle.begin_run(4, 2, 4)
            oracle.set_true_skills([w.true_skills for w in inst.workers])
            action = oracle.choose_block(list(inst.tasks), rng)
            value = sum(
                expected_reward(qualifies(inst.workers[w].true_skills, inst.tasks[t], rule), NOISE)
                for w, t in action.pairs
            )
            best = max(
                sum(
                    expected_reward(
                        qualifies(inst.workers[w].true_skills, inst.tasks[t], rule), NOISE
                    )
                    for w, t in zip(perm, range(4))
                )
                for perm in itertools.permutations(range(4))
            )
            assert value == pytest.approx(best)


def test_partial_block_padding():
    # Fewer tasks than workers: dummy columns absorb the leftover workers.
    inst = generate_instance(5, 5, 2, rng_seed=77)
    oracle = OraclePolicy(NOISE)
    oracle.begin_run(5, 2, 5)
    oracle.set_true_skills([w.true_skills for w in inst.workers])
    block = list(inst.tasks[:3])
    action = oracle.choose_block(block, substream(0, 55))
    action.validate("block")
    assert len(action.pairs) == 3
    assert {t for _, t in action.pairs} == {0, 1, 2}
