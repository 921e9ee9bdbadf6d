import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fjspsim.dispatch import dispatch
from fjspsim.instance import load_instance, parse_instance
from fjspsim.simulator import (
    JobNotAssignable,
    MachineBusy,
    MachineNotEligible,
    MakespanBeforeCompletion,
    Simulator,
)
from fjspsim.validate import validate_schedule

from conftest import mk01_like, random_instance
from oracle import nondelay_sequences, replay_length


def run_episode(sim, actions):
    """Drive ``sim`` to completion; returns rewards, clocks and release count."""
    rewards, clocks, releases, advances = [], [sim.T], 0, 0
    k = 0
    while not sim.is_done():
        sim.assign(*dispatch(actions[k % len(actions)], sim))
        k += 1
        while not sim.has_assignable() and not sim.is_done():
            sim.advance_time()
            advances += 1
            releases += len(sim.release_machines())
            clocks.append(sim.T)
        rewards.append(sim.collect_reward())
    return rewards, clocks, releases, advances


# -- assign ---------------------------------------------------------------

def test_assign_two_job_negates_waiting_entry(two_job):
    sim = Simulator(two_job, check=True)
    sim.assign(0, 0)
    assert sim.next_time[0] == 3
    assert sim.table.cell(0, 0) == ([-1], [3])
    assert sim.table.cell(1, 0) == ([-1], [5])
    assert sim.assignable == [False, False]


def test_assign_one_job_area(one_job):
    sim = Simulator(one_job, check=True)
    sim.assign(0, 0)
    assert sim.area == -7


def test_assign_errors(two_job):
    sim = Simulator(two_job)
    with pytest.raises(MachineNotEligible):
        sim.assign(1, 1)
    sim.assign(0, 0)
    with pytest.raises(JobNotAssignable):
        sim.assign(0, 1)
    with pytest.raises(JobNotAssignable):
        sim.assign(1, 0)
    with pytest.raises(JobNotAssignable):
        sim.assign(5, 0)


def test_assign_busy_machine():
    # job1 stays assignable through m2 while m1 is busy
    inst = parse_instance("2 2\n1 1 1 3\n1 2 1 4 2 6\n")
    sim = Simulator(inst)
    sim.assign(0, 0)
    with pytest.raises(MachineBusy):
        sim.assign(1, 0)


# -- advance / release ------------------------------------------------------

def test_advance_min_then_next_with_vacancy():
    # next times {3, 5}: the clock goes 0 -> 3 -> 5 and idle m1 accrues 2
    inst = parse_instance("2 2\n2 1 1 3 1 2 1\n1 1 2 5\n")
    sim = Simulator(inst, check=True)
    sim.assign(0, 0)
    sim.assign(1, 1)
    assert sim.advance_time() == 3
    assert sim.T == 3 and sim.area == -8
    assert sim.release_machines() == [(0, 0)]
    assert not sim.has_assignable()
    assert sim.advance_time() == 2
    assert sim.T == 5 and sim.area == -8 - 2
    assert sim.next_time == [5, 5]


def test_release_one_job(one_job):
    sim = Simulator(one_job, check=True)
    sim.assign(0, 0)
    sim.advance_time()
    assert sim.T == 7
    assert sim.release_machines() == [(0, 0)]
    assert sim.completed == [1] and sim.is_done()
    assert sim.makespan() == 7


def test_release_flips_waiting_entry_positive(two_job):
    sim = Simulator(two_job, check=True)
    sim.assign(0, 0)
    sim.advance_time()
    sim.release_machines()
    assert sim.table.cell(1, 0) == ([1], [5])
    assert sim.assignable == [False, True]


def test_release_no_op_when_nothing_matures(two_job):
    sim = Simulator(two_job)
    assert sim.release_machines() == []


def test_makespan_before_completion(two_job):
    sim = Simulator(two_job)
    assert not sim.is_done()
    with pytest.raises(MakespanBeforeCompletion):
        sim.makespan()


# -- rewards ------------------------------------------------------------------

def test_reward_single_op(one_job):
    sim = Simulator(one_job)
    rewards, *_ = run_episode(sim, [0])
    assert rewards == [-7] and sim.makespan() == 7


def test_reward_chain_one_machine(one_machine_two_ops):
    sim = Simulator(one_machine_two_ops)
    rewards, *_ = run_episode(sim, [0])
    assert sum(rewards) == -8 and sim.makespan() == 8


def test_back_to_back_rewards_are_durations_and_last_takes_vacancy():
    inst = parse_instance("2 2\n1 1 1 3\n1 1 2 5\n")
    sim = Simulator(inst)
    rewards, *_ = run_episode(sim, [0])
    # SPT takes job0 (3) then job1 (5); trailing vacancy 2 on m1 goes last
    assert rewards == [-3, -5 - 2]
    assert sum(rewards) == -2 * 5


# -- properties on random instances -----------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.lists(st.integers(0, 11), min_size=1, max_size=6))
def test_episode_invariants(seed, actions):
    inst = random_instance(seed, n_jobs=(1, 6), n_machines=(1, 4), n_ops=(1, 5))
    sim = Simulator(inst, check=True)
    rewards, clocks, releases, advances = run_episode(sim, actions)
    span = sim.makespan()
    assert sum(rewards) == -inst.num_machines * span
    assert validate_schedule(sim.schedule(), inst).ok
    assert clocks == sorted(clocks)
    assert releases == inst.total_ops == len(sim.entries)
    assert len(rewards) <= inst.total_ops
    assert advances <= inst.total_ops * inst.num_machines
    busy = sum(e.end - e.start for e in sim.entries)
    vacancy = -sum(rewards) - busy
    assert vacancy >= 0 and busy + vacancy == inst.num_machines * span


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_decision_tree_matches_oracle(seed):
    inst = random_instance(seed, n_jobs=(1, 3), n_machines=(1, 3), n_ops=(1, 2))
    found = {}

    def walk(sim, seq):
        if sim.is_done():
            found[tuple(seq)] = sim.makespan()
            return
        for j in sim.assignable_jobs():
            for m, _ in sim.idle_candidates(j):
                child = copy.deepcopy(sim)
                child.assign(j, m)
                child.settle()
                walk(child, seq + [(j, m)])

    walk(Simulator(inst, check=True), [])
    assert found == dict(nondelay_sequences(inst))
    assert all(span == replay_length(inst, seq) for seq, span in found.items())


@pytest.mark.parametrize("seed", range(5))
def test_mk01_like_identities(seed):
    inst = mk01_like(seed)
    for a in range(12):
        sim = Simulator(inst)
        rewards, _, releases, _ = run_episode(sim, [a])
        assert sum(rewards) == -6 * sim.makespan()
        assert releases == inst.total_ops


def test_mk01_vacancy_and_releases(mk01_path):
    inst = load_instance(mk01_path)
    for a in range(12):
        sim = Simulator(inst)
        rewards, _, releases, _ = run_episode(sim, [a])
        busy = sum(e.end - e.start for e in sim.entries)
        assert -sum(rewards) - busy == inst.num_machines * sim.makespan() - busy
        assert releases == inst.total_ops


def test_mk01_spt_spt_near_reference(mk01_path):
    sim = Simulator(load_instance(mk01_path))
    run_episode(sim, [0])
    assert abs(sim.makespan() - 55) <= 0.05 * 55
