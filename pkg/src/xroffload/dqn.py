"""Self-contained deep Q-learning: one hidden layer, replay, target network.

The network and the optimisation are written directly on numpy so training is
deterministic per seed and free of framework dependencies; at 3 inputs and a
single rectified hidden layer the maths is a handful of matrix products.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .env import EnvState
from .traffic import TrafficParams


class DivergenceError(RuntimeError):
    """Raised when the TD loss stops being finite during training."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    gamma: float = 0.9
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 5000
    replay_capacity: int = 10_000
    batch_size: int = 64
    target_sync_period: int = 250
    episodes: int = 200
    hidden_dim: int = 64
    update_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError("gamma must lie in [0, 1]")
        if not (0.0 < self.epsilon_start <= 1.0) or self.epsilon_end < 0:
            raise ValueError("epsilon schedule out of range")
        if self.replay_capacity < self.batch_size:
            raise ValueError("replay capacity must hold at least one batch")


class QNetwork:
    """Affine -> rectifier -> affine map from a 3-vector to one value per action."""

    def __init__(self, w1, b1, w2, b2):
        self.w1 = np.asarray(w1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.w2 = np.asarray(w2, dtype=float)
        self.b2 = np.asarray(b2, dtype=float)

    @classmethod
    def init(cls, input_dim: int, hidden_dim: int, output_dim: int,
             rng: np.random.Generator) -> "QNetwork":
        w1 = rng.normal(0.0, np.sqrt(2.0 / input_dim), size=(input_dim, hidden_dim))
        w2 = rng.normal(0.0, np.sqrt(2.0 / hidden_dim), size=(hidden_dim, output_dim))
        return cls(w1, np.zeros(hidden_dim), w2, np.zeros(output_dim))

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def output_dim(self) -> int:
        return self.w2.shape[1]

    def copy(self) -> "QNetwork":
        return QNetwork(self.w1.copy(), self.b1.copy(),
                        self.w2.copy(), self.b2.copy())

    def parameters(self):
        return [self.w1, self.b1, self.w2, self.b2]

    def forward(self, state) -> np.ndarray:
        """Q-values for one state (1-D) or a batch of states (2-D)."""
        x = np.asarray(state, dtype=float)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        hidden = np.maximum(x @ self.w1 + self.b1, 0.0)
        q = hidden @ self.w2 + self.b2
        return q[0] if squeeze else q


def forward(net: QNetwork, state) -> np.ndarray:
    return net.forward(state)


def normalize_state(raw: EnvState, traffic: TrafficParams,
                    gain_reference: float, scale_db: float = 20.0) -> np.ndarray:
    """Scale the observation to O(1): sizes by their means, gain in dB units."""
    if gain_reference <= 0:
        raise ValueError("gain_reference must be positive")
    h_db = 10.0 * np.log10(raw.h / gain_reference)
    return np.array([raw.d_ul / traffic.ul_mean_bits,
                     raw.d_dl / traffic.dl_mean_bits,
                     h_db / scale_db])


def select_action(net: QNetwork, state, epsilon: float,
                  rng: np.random.Generator) -> int:
    """Epsilon-greedy over the network's outputs; ties go to the lowest index."""
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(net.output_dim))
    return int(np.argmax(net.forward(state)))


class ReplayBuffer:
    """Fixed-capacity ring buffer of transitions stored as flat arrays."""

    def __init__(self, capacity: int, state_dim: int = 3):
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=int)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.terminals = np.zeros(capacity, dtype=bool)
        self.size = 0
        self._head = 0

    def push(self, state, action: int, reward: float, next_state, terminal: bool):
        i = self._head
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = 0.0 if next_state is None else next_state
        self.terminals[i] = terminal
        self._head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(self.size, size=batch_size)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.next_states[idx], self.terminals[idx])


def td_loss_and_grads(net: QNetwork, target_net: QNetwork, batch, gamma: float):
    """Mean squared TD error and its analytic gradients w.r.t. net parameters."""
    states, actions, rewards, next_states, terminals = batch
    n = states.shape[0]
    if n == 0:
        raise ValueError("batch must be non-empty")

    if gamma > 0.0:
        next_q = target_net.forward(next_states)
        bootstrap = np.where(terminals, 0.0, np.max(next_q, axis=1))
        targets = rewards + gamma * bootstrap
    else:
        targets = rewards

    z1 = states @ net.w1 + net.b1
    hidden = np.maximum(z1, 0.0)
    q = hidden @ net.w2 + net.b2
    picked = q[np.arange(n), actions]
    err = picked - targets
    loss = float(np.mean(err ** 2))

    g_q = np.zeros_like(q)
    g_q[np.arange(n), actions] = 2.0 * err / n
    g_w2 = hidden.T @ g_q
    g_b2 = g_q.sum(axis=0)
    g_hidden = g_q @ net.w2.T
    g_z1 = g_hidden * (z1 > 0.0)
    g_w1 = states.T @ g_z1
    g_b1 = g_z1.sum(axis=0)
    return loss, [g_w1, g_b1, g_w2, g_b2]


class Adam:
    """Adam state for one network's parameter list."""

    def __init__(self, net: QNetwork, lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in net.parameters()]
        self.v = [np.zeros_like(p) for p in net.parameters()]

    def step(self, net: QNetwork, grads):
        self.t += 1
        for p, g, m, v in zip(net.parameters(), grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g ** 2
            m_hat = m / (1.0 - self.beta1 ** self.t)
            v_hat = v / (1.0 - self.beta2 ** self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def train_step(net: QNetwork, target_net: QNetwork, batch, cfg: TrainConfig,
               optimizer: Adam) -> float:
    """One gradient step on the TD loss; aborts on non-finite loss."""
    loss, grads = td_loss_and_grads(net, target_net, batch, cfg.gamma)
    if not np.isfinite(loss):
        raise DivergenceError(
            f"non-finite TD loss {loss!r} at update {optimizer.t + 1} "
            f"(|w1|={np.abs(net.w1).max():.3g}, |w2|={np.abs(net.w2).max():.3g})")
    optimizer.step(net, grads)
    return loss


def epsilon_at(step: int, cfg: TrainConfig) -> float:
    """Linear exploration decay from start to end over the decay horizon."""
    if cfg.epsilon_decay_steps <= 0 or step >= cfg.epsilon_decay_steps:
        return cfg.epsilon_end
    frac = step / cfg.epsilon_decay_steps
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)


def train(env_factory, actions, normalize, cfg: TrainConfig):
    """Train an agent against episodes from ``env_factory``.

    env_factory(episode_index) must return a fresh environment; ``actions``
    is the ordered action list shared by all episodes; ``normalize`` maps an
    EnvState to the network input vector.  Returns the trained network and
    the per-episode mean reward curve.  Deterministic per cfg.seed.
    """
    rng = np.random.default_rng(cfg.seed)
    net = QNetwork.init(3, cfg.hidden_dim, len(actions), rng)
    target_net = net.copy()
    buffer = ReplayBuffer(cfg.replay_capacity)
    optimizer = Adam(net, cfg.learning_rate)

    curve = []
    step_count = 0
    for episode in range(cfg.episodes):
        env = env_factory(episode)
        state = env.reset()
        vec = normalize(state)
        rewards = []
        done = False
        while not done:
            eps = epsilon_at(step_count, cfg)
            action_index = select_action(net, vec, eps, rng)
            next_state, r, _, done = env.step(actions[action_index])
            next_vec = None if next_state is None else normalize(next_state)
            buffer.push(vec, action_index, r, next_vec, done)
            rewards.append(r)
            step_count += 1
            if step_count % cfg.update_every == 0 and buffer.size >= cfg.batch_size:
                batch = buffer.sample(cfg.batch_size, rng)
                train_step(net, target_net, batch, cfg, optimizer)
            if step_count % cfg.target_sync_period == 0:
                target_net = net.copy()
            if not done:
                vec = next_vec
        curve.append(float(np.mean(rewards)))
    return net, curve


def save_checkpoint(net: QNetwork, cfg: TrainConfig, path, extra=None) -> None:
    """Dump dimensions, parameters, and config as exact-decimal JSON."""
    payload = {
        "input_dim": net.input_dim,
        "hidden_dim": net.w1.shape[1],
        "output_dim": net.output_dim,
        "w1": net.w1.tolist(),
        "b1": net.b1.tolist(),
        "w2": net.w2.tolist(),
        "b2": net.b2.tolist(),
        "train_config": asdict(cfg),
    }
    if extra:
        payload["extra"] = extra
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_checkpoint(path):
    """Restore (network, TrainConfig, extra) from :func:`save_checkpoint`."""
    with open(path) as fh:
        payload = json.load(fh)
    net = QNetwork(payload["w1"], payload["b1"], payload["w2"], payload["b2"])
    cfg = TrainConfig(**payload["train_config"])
    return net, cfg, payload.get("extra")
