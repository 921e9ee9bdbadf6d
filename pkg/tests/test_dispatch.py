import copy
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fjspsim.dispatch import (
    JOB_RULES,
    MACHINE_RULES,
    ActionOutOfRange,
    JobRule,
    MachineRule,
    NoAssignableJob,
    decode_action,
    dispatch,
    encode_action,
    job_priority,
    select_job,
    select_machine,
)
from fjspsim.instance import RawInstance, load_instance, parse_instance
from fjspsim.simulator import Simulator

from conftest import random_instance
from oracle import expected_job, rule_values


@pytest.mark.parametrize("code, expected", [
    (0, (JobRule.SPT, MachineRule.SPT)),
    (11, (JobRule.FIFO, MachineRule.LPT)),
    (7, (JobRule.MOR, MachineRule.LPT)),
])
def test_decode_examples(code, expected):
    assert decode_action(code) == expected


def test_decode_encode_identity():
    for code in range(12):
        assert encode_action(*decode_action(code)) == code
    assert [r.value for r in JOB_RULES] == ["spt", "mwkr", "fdd_mwkr", "mor", "lrm", "fifo"]
    assert [r.value for r in MACHINE_RULES] == ["spt", "lpt"]


@pytest.mark.parametrize("code", [-1, 12, 100])
def test_decode_out_of_range(code):
    with pytest.raises(ActionOutOfRange):
        decode_action(code)


def test_spt_picks_shorter_next_op():
    sim = Simulator(parse_instance("2 2\n1 1 1 5\n1 1 2 3\n"))
    assert select_job(JobRule.SPT, sim) == 1


def test_mor_picks_more_remaining_ops():
    sim = Simulator(parse_instance("2 1\n2 1 1 1 1 1 1\n4 1 1 1 1 1 1 1 1 1 1 1 1\n"))
    assert select_job(JobRule.MOR, sim) == 1


def test_select_job_none_assignable(one_job):
    sim = Simulator(one_job)
    sim.assign(0, 0)
    with pytest.raises(NoAssignableJob):
        select_job(JobRule.SPT, sim)


def test_machine_rules(two_job):
    sim = Simulator(two_job)
    assert select_machine(MachineRule.SPT, sim, 0) == 0
    assert select_machine(MachineRule.LPT, sim, 0) == 1
    assert select_machine(MachineRule.SPT, sim, 1) == select_machine(MachineRule.LPT, sim, 1) == 0


def test_machine_rules_skip_busy():
    inst = parse_instance("2 2\n1 1 1 2\n1 2 1 3 2 4\n")
    sim = Simulator(inst)
    sim.assign(0, 0)
    assert select_machine(MachineRule.SPT, sim, 1) == 1
    assert select_machine(MachineRule.LPT, sim, 1) == 1


def test_machine_tie_goes_to_lowest_index():
    sim = Simulator(parse_instance("1 3\n1 3 3 4 1 4 2 4\n"))
    assert select_machine(MachineRule.SPT, sim, 0) == 0
    assert select_machine(MachineRule.LPT, sim, 0) == 0


def test_job_tie_goes_to_lowest_index():
    sim = Simulator(parse_instance("3 3\n1 1 1 4\n1 1 2 4\n1 1 3 4\n"))
    for rule in JOB_RULES:
        assert select_job(rule, sim) == 0


def test_fdd_first_op_priority_zero(two_job):
    sim = Simulator(two_job)
    assert job_priority(JobRule.FDD_MWKR, sim, 0) == 0
    assert job_priority(JobRule.FDD_MWKR, sim, 1) == 0


def test_mean_duration_used_for_multi_machine_op(two_job):
    sim = Simulator(two_job)
    assert job_priority(JobRule.SPT, sim, 0) == Fraction(7, 2)
    assert job_priority(JobRule.MWKR, sim, 0) == Fraction(7, 2)
    assert job_priority(JobRule.LRM, sim, 0) == 0


def _scaled(inst, k):
    jobs = [[[(m, d * k) for m, d in op] for op in job] for job in inst.jobs]
    return RawInstance.from_lists(inst.num_machines, jobs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 7), st.integers(0, 11))
def test_scaling_durations_keeps_choices(seed, k, code):
    inst = random_instance(seed, n_jobs=(2, 6), n_machines=(1, 4), n_ops=(1, 4))
    a, b = Simulator(inst), Simulator(_scaled(inst, k))
    while not a.is_done():
        pick = dispatch(code, a)
        assert dispatch(code, b) == pick
        for s in (a, b):
            s.assign(*pick)
            s.settle()


def _walk_decision_points(sim, visit):
    if sim.is_done():
        return
    visit(sim)
    for j in sim.assignable_jobs():
        for m, _ in sim.idle_candidates(j):
            child = copy.deepcopy(sim)
            child.assign(j, m)
            child.settle()
            _walk_decision_points(child, visit)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_exhaustive_rule_agreement(seed):
    inst = random_instance(seed, n_jobs=(1, 3), n_machines=(1, 3), n_ops=(1, 3), max_alts=2)
    checked = [0]

    def visit(sim):
        values = rule_values(inst, sim.entries, sim.T)
        assert sorted(values) == sim.assignable_jobs()
        for rule in JOB_RULES:
            for j in values:
                assert job_priority(rule, sim, j) == values[j][rule.value]
            assert select_job(rule, sim) == expected_job(values, rule.value)
        checked[0] += 1

    _walk_decision_points(Simulator(inst), visit)
    assert checked[0] >= 1


def test_mk01_initial_mwkr(mk01_path):
    inst = load_instance(mk01_path)
    sim = Simulator(inst)
    values = rule_values(inst, [], 0)
    for j in range(inst.num_jobs):
        assert job_priority(JobRule.MWKR, sim, j) == values[j]["mwkr"]
    assert select_job(JobRule.MWKR, sim) == expected_job(values, "mwkr")
