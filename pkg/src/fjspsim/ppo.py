"""Actor-critic PPO with prioritized experience replay.

Each training iteration:

1. roll out ``trajectories_per_iter`` episodes with the current (frozen)
   policy, storing (state, action, reward, action probability);
2. compute discounted returns per episode;
3. for ``epochs`` passes, shuffle the memory into batches of ``batch_size``
   and take one clipped-surrogate actor step and one critic step per batch,
   refreshing each sample's priority to ``|advantage| + 1e-6``; after the
   pass, replay ``per_rounds`` batches drawn in proportion to
   ``priority ** alpha`` with importance weights ``(N P(i)) ** -beta``
   normalised by their maximum;
4. evaluate the greedy (argmax) policy and stop on convergence or time out.

Advantages are ``return - V(state)`` standardised within each batch.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dispatch import NUM_ACTIONS
from .env import FJSPEnv
from .instance import RawInstance
from .nn import MLP, Adam, softmax
from .schedule import Schedule

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "fjspsim-checkpoint"
CHECKPOINT_VERSION = 1
LOG_COLUMNS = ("iteration", "mean_makespan", "best_makespan", "wall_seconds",
               "actor_loss", "critic_loss", "greedy_makespan")


class EmptyMemory(ValueError):
    pass


class NonFiniteLoss(FloatingPointError):
    pass


@dataclass
class TrainConfig:
    max_episodes: int = 8000
    trajectories_per_iter: int = 9
    epochs: int = 10
    batch_size: int | None = None  # None: 2 x total operation count
    clip_eps: float = 0.2
    gamma: float = 0.999
    lr_actor: float = 1e-3
    lr_critic: float = 3e-3
    per_alpha: float = 0.6
    per_beta_start: float = 0.4
    per_beta_end: float = 1.0
    per_rounds: int = 1
    convergence_window: int = 30
    convergence_steps: int = 2000
    time_limit: float = 3600.0
    dump_dir: str | None = None

    def __post_init__(self):
        for name in ("max_episodes", "trajectories_per_iter", "epochs", "clip_eps",
                     "gamma", "lr_actor", "lr_critic", "per_alpha", "convergence_window",
                     "time_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.4 <= self.per_beta_start <= self.per_beta_end <= 1.0:
            raise ValueError("PER beta must anneal within [0.4, 1]")

    def beta(self, iteration: int) -> float:
        frac = min(1.0, iteration / max(1, self.max_episodes))
        return self.per_beta_start + frac * (self.per_beta_end - self.per_beta_start)


class Agent:
    """Policy and value nets sized for an instance with ``n_jobs`` jobs."""

    def __init__(self, state_dim: int, rng: np.random.Generator, config: TrainConfig | None = None):
        config = config or TrainConfig()
        self.state_dim = state_dim
        self.actor = MLP(state_dim, state_dim, NUM_ACTIONS, rng)
        self.critic = MLP(state_dim, state_dim, 1, rng)
        self.actor_opt = Adam(self.actor.params, config.lr_actor)
        self.critic_opt = Adam(self.critic.params, config.lr_critic)

    def policy(self, state: np.ndarray) -> np.ndarray:
        return forward_policy(self.actor, state)

    def value(self, states: np.ndarray) -> np.ndarray:
        return self.critic(states)[..., 0]


def forward_policy(net: MLP, state: np.ndarray) -> np.ndarray:
    return softmax(net(state))


def discounted_returns(rewards, gamma: float) -> np.ndarray:
    out = np.empty(len(rewards))
    g = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        g = rewards[t] + gamma * g
        out[t] = g
    return out


def standardize(a: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    if a.size < 2:
        return a - a.mean()
    return (a - a.mean()) / (a.std() + eps)


def actor_loss_and_grad(net: MLP, states, actions, old_probs, adv, weights, clip_eps):
    """Negative clipped surrogate (to minimise) and its parameter gradients."""
    logits, cache = net.forward(states)
    probs = softmax(logits)
    idx = np.arange(len(actions))
    ratio = probs[idx, actions] / old_probs
    clipped = np.clip(ratio, 1 - clip_eps, 1 + clip_eps)
    surr1, surr2 = ratio * adv, clipped * adv
    B = len(actions)
    loss = -np.sum(weights * np.minimum(surr1, surr2)) / B
    # the min takes the unclipped branch (and its gradient) when surr1 <= surr2
    dratio = np.where(surr1 <= surr2, -weights * adv / B, 0.0)
    dlogits = -probs * (dratio * ratio)[:, None]
    dlogits[idx, actions] += dratio * ratio
    return loss, net.backward(dlogits, cache)


def critic_loss_and_grad(net: MLP, states, returns, weights):
    out, cache = net.forward(states)
    err = returns - out[:, 0]
    B = len(returns)
    loss = np.sum(weights * err * err) / B
    dout = (-2.0 * weights * err / B)[:, None]
    return loss, net.backward(dout, cache)


class Memory:
    """One iteration's transitions plus their replay priorities."""

    def __init__(self):
        self.states, self.actions, self.rewards, self.probs, self.returns = [], [], [], [], []

    def add_trajectory(self, states, actions, rewards, probs, gamma):
        self.states += states
        self.actions += actions
        self.rewards += rewards
        self.probs += probs
        self.returns.append(discounted_returns(rewards, gamma))

    def freeze(self):
        if not self.actions:
            raise EmptyMemory("no transitions collected")
        self.S = np.asarray(self.states)
        self.A = np.asarray(self.actions, dtype=np.int64)
        self.P = np.asarray(self.probs)
        self.G = np.concatenate(self.returns)
        self.priority = np.ones(len(self.A))
        return self

    def __len__(self):
        return len(self.actions)


def per_sample(priority: np.ndarray, size: int, alpha: float, beta: float,
               rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Indices drawn proportional to ``priority ** alpha`` and their IS weights."""
    scaled = priority ** alpha
    P = scaled / scaled.sum()
    N = len(priority)
    cdf = np.cumsum(P)
    idx = np.minimum(np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right"), N - 1)
    w_all = (N * P) ** -beta
    return idx, w_all[idx] / w_all.max()


def _update_batch(agent: Agent, mem: Memory, idx, weights, cfg: TrainConfig):
    S, G = mem.S[idx], mem.G[idx]
    adv = standardize(G - agent.value(S))
    a_loss, a_grad = actor_loss_and_grad(agent.actor, S, mem.A[idx], mem.P[idx], adv,
                                         weights, cfg.clip_eps)
    c_loss, c_grad = critic_loss_and_grad(agent.critic, S, G, weights)
    if not (np.isfinite(a_loss) and np.isfinite(c_loss)):
        raise NonFiniteLoss(f"actor loss {a_loss}, critic loss {c_loss}")
    agent.actor_opt.step(a_grad)
    agent.critic_opt.step(c_grad)
    return a_loss, c_loss, adv


def ppo_update(mem: Memory, agent: Agent, cfg: TrainConfig, rng: np.random.Generator,
               iteration: int = 0, batch_size: int | None = None) -> dict[str, float]:
    if not len(mem):
        raise EmptyMemory("ppo_update needs at least one trajectory")
    if not hasattr(mem, "S"):
        mem.freeze()
    N = len(mem)
    b = batch_size or cfg.batch_size or N
    beta = cfg.beta(iteration)
    a_losses, c_losses = [], []
    ones = np.ones(min(b, N))
    for _ in range(cfg.epochs):
        order = rng.permutation(N)
        for start in range(0, N, b):
            idx = order[start:start + b]
            a, c, adv = _update_batch(agent, mem, idx, ones[:len(idx)], cfg)
            mem.priority[idx] = np.abs(adv) + 1e-6
            a_losses.append(a)
            c_losses.append(c)
        for _ in range(cfg.per_rounds):
            idx, w = per_sample(mem.priority, b, cfg.per_alpha, beta, rng)
            a, c, _ = _update_batch(agent, mem, idx, w, cfg)
            a_losses.append(a)
            c_losses.append(c)
    return {"actor_loss": float(np.mean(a_losses)), "critic_loss": float(np.mean(c_losses))}


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(probs) - 1)


def collect_trajectory(env: FJSPEnv, agent: Agent, rng: np.random.Generator):
    state = env.reset()
    states, actions, rewards, probs = [], [], [], []
    done = False
    while not done:
        p = agent.policy(state)
        a = sample_action(p, rng)
        states.append(state)
        actions.append(a)
        probs.append(p[a])
        state, r, done = env.step(a)
        rewards.append(r)
    if sum(rewards) != -env.inst.num_machines * env.sim.makespan():
        raise AssertionError("reward-makespan identity violated")
    return states, actions, rewards, probs


def greedy_rollout(agent: Agent | MLP, inst: RawInstance) -> Schedule:
    """Argmax-probability policy; ties go to the lowest action index."""
    actor = agent.actor if isinstance(agent, Agent) else agent
    env = FJSPEnv(inst)
    state = env.reset()
    done = False
    while not done:
        state, _, done = env.step(int(np.argmax(actor(state))))
    return env.schedule()


@dataclass
class TrainResult:
    agent: Agent
    best_schedule: Schedule
    log: list[dict] = field(default_factory=list)
    stop_reason: str = ""
    final_greedy_makespan: int = 0

    def log_csv(self, timings: bool = True) -> str:
        cols = LOG_COLUMNS if timings else tuple(c for c in LOG_COLUMNS if c != "wall_seconds")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.log:
            w.writerow([_fmt(row[c]) for c in cols])
        return buf.getvalue()


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def train(inst: RawInstance, cfg: TrainConfig | None = None, seed: int = 0) -> TrainResult:
    """Train a policy on one instance.

    Returns the nets with the best greedy makespan seen (checked once per
    iteration), the best schedule seen by any rollout, and one log row per
    iteration.
    """
    cfg = cfg or TrainConfig()
    rng = np.random.default_rng(seed)
    env = FJSPEnv(inst)
    agent = Agent(env.state_dim, rng, cfg)
    batch = cfg.batch_size or 2 * inst.total_ops
    t0 = time.perf_counter()

    best_sched = greedy_rollout(agent, inst)
    best_greedy = best_sched.makespan
    best_params = (agent.actor.copy(), agent.critic.copy())
    rows: list[dict] = []
    greedy_hist: list[int] = []
    reason = "max_episodes"

    for it in range(1, cfg.max_episodes + 1):
        mem = Memory()
        spans = []
        for _ in range(cfg.trajectories_per_iter):
            s, a, r, p = collect_trajectory(env, agent, rng)
            mem.add_trajectory(s, a, r, p, cfg.gamma)
            spans.append(env.sim.makespan())
            if spans[-1] < best_sched.makespan:
                best_sched = env.schedule()
        mem.freeze()
        try:
            stats = ppo_update(mem, agent, cfg, rng, it, batch)
        except NonFiniteLoss:
            _dump(agent, cfg, it)
            raise

        greedy = greedy_rollout(agent, inst)
        g = greedy.makespan
        if g < best_sched.makespan:
            best_sched = greedy
        if g < best_greedy:
            best_greedy = g
            best_params = (agent.actor.copy(), agent.critic.copy())
        greedy_hist.append(g)
        elapsed = time.perf_counter() - t0
        rows.append({
            "iteration": it,
            "mean_makespan": float(np.mean(spans)),
            "best_makespan": best_sched.makespan,
            "wall_seconds": round(elapsed, 3),
            "actor_loss": stats["actor_loss"],
            "critic_loss": stats["critic_loss"],
            "greedy_makespan": g,
        })
        if it % 50 == 0:
            log.info("iter %d greedy %d best %d (%.1fs)", it, g, best_sched.makespan, elapsed)
        win = cfg.convergence_window
        if it >= cfg.convergence_steps and len(set(greedy_hist[-win:])) == 1 and len(greedy_hist) >= win:
            reason = "converged"
            break
        if elapsed >= cfg.time_limit:
            reason = "time_limit"
            break

    # optimizers hold the same dicts, so in-place update keeps them attached
    agent.actor.params.update(best_params[0].params)
    agent.critic.params.update(best_params[1].params)
    return TrainResult(agent, best_sched, rows, reason, best_greedy)


def _dump(agent: Agent, cfg: TrainConfig, it: int):
    path = Path(cfg.dump_dir or ".") / f"nonfinite_iter{it}.ckpt"
    try:
        save_checkpoint(agent, path)
        log.error("non-finite loss at iteration %d; parameters dumped to %s", it, path)
    except OSError:
        log.exception("could not dump parameters")


def save_checkpoint(agent: Agent, path: str | Path, meta: dict | None = None):
    """Text checkpoint: one JSON header line with shapes, then one value per line."""
    params = [(f"actor.{k}", agent.actor.params[k]) for k in MLP.names]
    params += [(f"critic.{k}", agent.critic.params[k]) for k in MLP.names]
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "state_dim": agent.state_dim,
        "params": [[name, list(a.shape)] for name, a in params],
        "meta": meta or {},
    }
    lines = [json.dumps(header, sort_keys=True)]
    for _, a in params:
        lines += [repr(float(x)) for x in a.ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_checkpoint(path: str | Path) -> Agent:
    lines = Path(path).read_text().splitlines()
    header = json.loads(lines[0])
    if header.get("format") != CHECKPOINT_FORMAT or header.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint {header.get('format')!r} "
                         f"v{header.get('version')!r}")
    agent = Agent(header["state_dim"], np.random.default_rng(0))
    values = np.array([float(x) for x in lines[1:]])
    i = 0
    for name, shape in header["params"]:
        net, key = name.split(".")
        size = int(np.prod(shape))
        getattr(agent, net).params[key][...] = values[i:i + size].reshape(shape)
        i += size
    if i != len(values):
        raise ValueError(f"checkpoint has {len(values) - i} extra values")
    return agent


def config_dict(cfg: TrainConfig) -> dict:
    return asdict(cfg)
