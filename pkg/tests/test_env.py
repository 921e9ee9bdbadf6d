import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fjspsim.dispatch import ActionOutOfRange
from fjspsim.env import EpisodeFinished, FJSPEnv, rollout
from fjspsim.instance import load_instance, parse_instance

from conftest import random_instance

log = logging.getLogger(__name__)


def test_reset_encodings(two_job, one_job):
    assert FJSPEnv(two_job).reset().tolist() == [1, 1, 0, 0]
    assert FJSPEnv(one_job).reset().tolist() == [1, 0]


def test_one_job_step(one_job):
    env = FJSPEnv(one_job)
    env.reset()
    state, reward, done = env.step(5)
    assert (reward, done, state.tolist()) == (-7, True, [0, 1])
    with pytest.raises(EpisodeFinished):
        env.step(0)


def test_two_jobs_one_machine():
    env = FJSPEnv(parse_instance("2 1\n1 1 1 3\n1 1 1 5\n"))
    env.reset()
    _, r1, d1 = env.step(0)
    _, r2, d2 = env.step(0)
    assert (d1, d2) == (False, True)
    assert r1 + r2 == -8 and env.sim.makespan() == 8


def test_action_out_of_range(two_job):
    env = FJSPEnv(two_job)
    env.reset()
    with pytest.raises(ActionOutOfRange):
        env.step(12)


def test_reset_restarts(two_job):
    env = FJSPEnv(two_job)
    first = env.reset()
    env.step(0)
    assert env.reset().tolist() == first.tolist()
    assert env.episode_reward == 0 and env.sim.T == 0


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000), st.lists(st.integers(0, 11), min_size=1, max_size=8))
def test_episode_properties(seed, actions):
    inst = random_instance(seed, n_jobs=(1, 6), n_machines=(1, 4), n_ops=(1, 5))
    env = FJSPEnv(inst, check=True)
    state = env.reset()
    seen = {}
    steps, total, done = 0, 0, False
    while not done:
        assert state.shape == (2 * inst.num_jobs,)
        assert np.all((0 <= state) & (state <= 1))
        key = state.tobytes()
        progress = int(env.sim.n_done_ops)
        assert seen.get(key, progress) == progress, "same encoding at different progress"
        seen[key] = progress
        state, r, done = env.step(actions[steps % len(actions)])
        total += r
        steps += 1
    assert steps == inst.total_ops
    assert total == -inst.num_machines * env.sim.makespan()
    expected_tail = [c / inst.max_ops for c in inst.op_counts]
    assert np.allclose(state[inst.num_jobs:], expected_tail)
    assert not state[:inst.num_jobs].any()


def test_same_progress_collisions_are_logged(caplog):
    collisions = 0
    for seed in range(30):
        inst = random_instance(seed, n_jobs=(3, 6), n_machines=(2, 4), n_ops=(2, 5))
        env = FJSPEnv(inst)
        state, seen, done = env.reset(), set(), False
        while not done:
            if state.tobytes() in seen:
                collisions += 1
            seen.add(state.tobytes())
            state, _, done = env.step(seed % 12)
    with caplog.at_level(logging.INFO):
        log.info("state encodings repeated at equal progress: %d", collisions)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 11))
def test_step_is_deterministic(seed, action):
    inst = random_instance(seed, n_jobs=(2, 5), n_machines=(1, 4), n_ops=(1, 4))
    a, ra = rollout(inst, action)
    b, rb = rollout(inst, action)
    assert a.entries == b.entries and ra == rb


def test_callable_policy_matches_constant(two_job):
    assert rollout(two_job, 3) == rollout(two_job, lambda s: 3)


def test_mk01_reset_all_assignable(mk01_path):
    state = FJSPEnv(load_instance(mk01_path)).reset()
    n = len(state) // 2
    assert state[:n].tolist() == [1.0] * n
