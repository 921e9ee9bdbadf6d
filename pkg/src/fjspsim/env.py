"""Episodic environment: dispatching-rule actions over the simulator."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .dispatch import NUM_ACTIONS, dispatch
from .instance import RawInstance
from .schedule import Schedule
from .simulator import Simulator


class EpisodeFinished(RuntimeError):
    pass


class FJSPEnv:
    """``reset() -> state``, ``step(action) -> (state, reward, done)``.

    The state is ``2 * num_jobs`` floats: assignable flags, then completed
    operation counts divided by the longest job's operation count.
    """

    num_actions = NUM_ACTIONS

    def __init__(self, inst: RawInstance, check: bool = False):
        self.inst = inst
        self.sim = Simulator(inst, check=check)
        self.state_dim = 2 * inst.num_jobs
        self.max_ops = inst.max_ops
        self.episode_reward = 0
        self.steps = 0

    def encode(self) -> np.ndarray:
        sim = self.sim
        x = np.empty(self.state_dim)
        x[:sim.n] = sim.assignable
        x[sim.n:] = sim.completed
        x[sim.n:] /= self.max_ops
        return x

    def reset(self) -> np.ndarray:
        self.sim.reset()
        self.episode_reward = 0
        self.steps = 0
        return self.encode()

    @property
    def done(self) -> bool:
        return self.sim.is_done()

    def step(self, action: int) -> tuple[np.ndarray, int, bool]:
        sim = self.sim
        if sim.is_done():
            raise EpisodeFinished("step() after the last operation finished")
        job, machine = dispatch(action, sim)
        sim.assign(job, machine)
        sim.settle()
        reward = sim.collect_reward()
        self.episode_reward += reward
        self.steps += 1
        done = sim.is_done()
        if done and self.episode_reward != -sim.M * sim.makespan():
            raise AssertionError(
                f"reward sum {self.episode_reward} != -{sim.M} * {sim.makespan()}")
        return self.encode(), reward, done

    def schedule(self) -> Schedule:
        return self.sim.schedule()


def rollout(inst: RawInstance, policy: int | Callable[[np.ndarray], int],
            check: bool = False) -> tuple[Schedule, list[int]]:
    """Run one episode; ``policy`` is a constant action or a state -> action map."""
    env = FJSPEnv(inst, check=check)
    state = env.reset()
    choose = (lambda _s: policy) if isinstance(policy, (int, np.integer)) else policy
    rewards = []
    done = False
    while not done:
        state, r, done = env.step(int(choose(state)))
        rewards.append(r)
    return env.schedule(), rewards
