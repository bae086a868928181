"""Per-sentence compression-ratio selection with a double deep Q-network.

The policy maps a 768-dim state (mean of the previous/current/next sentence
embeddings) to Q-values over 8 discrete removal ratios (0.1 .. 0.8).  The
value network is a 9-layer fully-connected net implemented directly in numpy
with hand-derived backprop, so its gradients can be verified against finite
differences.  Training uses prioritized experience replay, epsilon-greedy
exploration with per-episode decay, Adam, and a target network synced by
exact copy every ``target_sync_every`` gradient steps.

Reward per compression decision:

    R = alpha * (lambda - rho) + beta * (ROUGE1_f1 - tau) + gamma * (BLEU - tau)

with rho the kept-word fraction and the compressed sentence scored against
its own original.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .errors import (
    DimensionError,
    EmptyBuffer,
    EmptySentence,
    ParseError,
    RangeError,
    ShapeMismatch,
    VersionMismatch,
)
from .metrics import bleu, rouge_n
from .segmentation import Document, Sentence
from .token_sampler import compress_sentence, plan_to_sentence

STATE_DIM = 768
N_ACTIONS = 8
DEFAULT_WIDTHS = (768, 512, 384, 256, 192, 128, 96, 64, 32, 8)

MODEL_MAGIC = b"PISQ"
MODEL_VERSION = 1


@dataclass
class TrainConfig:
    """Training hyperparameters; defaults are the reference schedule."""

    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    epsilon_start: float = 1.0
    epsilon_min: float = 0.01
    epsilon_decay: float = 0.995
    gamma_disc: float = 0.99
    batch_size: int = 32
    target_sync_every: int = 100
    episodes: int = 20
    lambda_comp: float = 0.7
    tau_quality: float = 0.17
    alpha_reward: float = 1.0
    beta_reward: float = 1.0
    gamma_reward: float = 1.0
    buffer_capacity: int = 20000
    priority_exponent: float = 0.6
    importance_exponent: float = 0.4
    priority_floor: float = 1e-3

    @classmethod
    def from_json(cls, path: str) -> "TrainConfig":
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ParseError(f"unknown training-config field '{sorted(unknown)[0]}'")
        return cls(**raw)


class QNetwork:
    """Fully-connected value network: relu hidden layers, linear output."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        self.weights = weights
        self.biases = biases

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple([self.weights[0].shape[1]] + [w.shape[0] for w in self.weights])

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        widths: Sequence[int] = DEFAULT_WIDTHS,
    ) -> "QNetwork":
        """He-normal weights, zero biases."""
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            scale = math.sqrt(2.0 / fan_in)
            weights.append(rng.normal(0.0, scale, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out, dtype=np.float64))
        return cls(weights, biases)

    def copy(self) -> "QNetwork":
        return QNetwork(
            [w.copy() for w in self.weights], [b.copy() for b in self.biases]
        )

    def copy_from(self, other: "QNetwork") -> None:
        for w, ow in zip(self.weights, other.weights):
            w[...] = ow
        for b, ob in zip(self.biases, other.biases):
            b[...] = ob

    def forward(self, state: np.ndarray) -> np.ndarray:
        """Q-values; accepts a single state (d,) or a batch (B, d)."""
        single = state.ndim == 1
        activation = np.atleast_2d(np.asarray(state, dtype=np.float64))
        if activation.shape[1] != self.weights[0].shape[1]:
            raise DimensionError(
                f"state dim {activation.shape[1]} != network input {self.weights[0].shape[1]}"
            )
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            activation = activation @ w.T + b
            if i != last:
                np.maximum(activation, 0.0, out=activation)
        return activation[0] if single else activation

    def _forward_cached(
        self, states: np.ndarray
    ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Pre-activations and activations per layer, for backprop."""
        activations = [states]
        pre_activations = []
        last = len(self.weights) - 1
        h = states
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            pre_activations.append(z)
            h = z if i == last else np.maximum(z, 0.0)
            activations.append(h)
        return pre_activations, activations


def build_state(
    prev: np.ndarray | None,
    cur: np.ndarray,
    next_: np.ndarray | None,
) -> np.ndarray:
    """(prev + cur + next) / 3 with absent neighbors as zero vectors."""
    cur = np.asarray(cur, dtype=np.float64)
    if cur.shape != (STATE_DIM,):
        raise DimensionError(f"current embedding must be ({STATE_DIM},), got {cur.shape}")
    total = cur.copy()
    for neighbor in (prev, next_):
        if neighbor is None:
            continue
        neighbor = np.asarray(neighbor, dtype=np.float64)
        if neighbor.shape != (STATE_DIM,):
            raise DimensionError(
                f"neighbor embedding must be ({STATE_DIM},), got {neighbor.shape}"
            )
        total += neighbor
    return total / 3.0


def action_to_ratio(action: int) -> float:
    """Removal fraction for an action index: 0 -> 0.1 ... 7 -> 0.8."""
    if not 0 <= action <= N_ACTIONS - 1:
        raise RangeError(f"action must be in [0, {N_ACTIONS - 1}], got {action}")
    return (action + 1) / 10.0


def select_action(qvals: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy over 8 Q-values; greedy ties break to the lowest index."""
    if rng.random() < epsilon:
        return int(rng.integers(0, N_ACTIONS))
    return int(np.argmax(qvals))


def decay_epsilon(
    epsilon: float, decay: float = 0.995, floor: float = 0.01
) -> float:
    return max(floor, epsilon * decay)


def reward(original: Sentence, compressed: Sentence, cfg: TrainConfig) -> float:
    """Composite compression / content / fluency reward for one decision."""
    original_words = original.word_texts(fold_case=True)
    if not original_words:
        raise EmptySentence("reward needs an original sentence with word tokens")
    compressed_words = compressed.word_texts(fold_case=True)
    rho = len(compressed_words) / len(original_words)
    rouge1 = rouge_n(compressed_words, original_words, 1).f1
    fluency = bleu(compressed_words, original_words)
    return (
        cfg.alpha_reward * (cfg.lambda_comp - rho)
        + cfg.beta_reward * (rouge1 - cfg.tau_quality)
        + cfg.gamma_reward * (fluency - cfg.tau_quality)
    )


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray | None
    done: bool
    priority: float = 1.0


class ReplayBuffer:
    """FIFO ring buffer with proportional prioritized sampling."""

    def __init__(
        self,
        capacity: int = 20000,
        priority_exponent: float = 0.6,
        importance_exponent: float = 0.4,
    ):
        self.capacity = capacity
        self.priority_exponent = priority_exponent
        self.importance_exponent = importance_exponent
        self._storage: list[Transition] = []
        self._next_slot = 0

    def __len__(self) -> int:
        return len(self._storage)

    def push(self, transition: Transition) -> None:
        """Insert with maximal existing priority (1.0 when empty); FIFO eviction."""
        transition.priority = max(
            (t.priority for t in self._storage), default=1.0
        )
        if len(self._storage) < self.capacity:
            self._storage.append(transition)
        else:
            self._storage[self._next_slot] = transition
            self._next_slot = (self._next_slot + 1) % self.capacity

    def probabilities(self) -> np.ndarray:
        scaled = np.array(
            [t.priority for t in self._storage], dtype=np.float64
        ) ** self.priority_exponent
        return scaled / scaled.sum()

    def sample(
        self, batch_size: int, rng: np.random.Generator
    ) -> tuple[list[Transition], np.ndarray, np.ndarray]:
        """Sample a batch; returns (transitions, indices, importance weights)."""
        if not self._storage:
            raise EmptyBuffer("cannot sample from an empty replay buffer")
        probs = self.probabilities()
        indices = rng.choice(len(self._storage), size=batch_size, p=probs)
        weights = (len(self._storage) * probs[indices]) ** (-self.importance_exponent)
        weights /= weights.max()
        return [self._storage[i] for i in indices], indices, weights

    def update_priorities(self, indices: np.ndarray, priorities: np.ndarray) -> None:
        for i, priority in zip(indices, priorities):
            self._storage[int(i)].priority = float(priority)


def ddqn_target(
    transition: Transition,
    policy: QNetwork,
    target: QNetwork,
    gamma_disc: float,
) -> float:
    """Double-DQN bootstrap: action from the policy net, value from the target."""
    if transition.done or transition.next_state is None:
        return transition.reward
    next_q_policy = policy.forward(transition.next_state)
    best = int(np.argmax(next_q_policy))
    return transition.reward + gamma_disc * float(
        target.forward(transition.next_state)[best]
    )


def td_loss_and_grads(
    net: QNetwork,
    states: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
) -> tuple[float, np.ndarray, list[np.ndarray], list[np.ndarray]]:
    """Importance-weighted squared TD loss with analytic parameter gradients.

    loss = mean_b weights[b] * (Q(s_b)[a_b] - targets[b])^2

    Returns (loss, td_errors, weight_grads, bias_grads).  Pure with respect
    to the network parameters, so finite differences can check it.
    """
    batch = states.shape[0]
    pre_activations, activations = net._forward_cached(states)
    output = activations[-1]
    chosen = output[np.arange(batch), actions]
    td_errors = chosen - targets
    loss = float(np.mean(weights * td_errors**2))

    delta = np.zeros_like(output)
    delta[np.arange(batch), actions] = 2.0 * weights * td_errors / batch

    weight_grads: list[np.ndarray] = [np.empty(0)] * len(net.weights)
    bias_grads: list[np.ndarray] = [np.empty(0)] * len(net.biases)
    for layer in range(len(net.weights) - 1, -1, -1):
        weight_grads[layer] = delta.T @ activations[layer]
        bias_grads[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ net.weights[layer]) * (pre_activations[layer - 1] > 0.0)
    return loss, td_errors, weight_grads, bias_grads


class Adam:
    """Standard Adam with bias correction, updating parameters in place."""

    def __init__(self, net: QNetwork, cfg: TrainConfig):
        self.lr = cfg.learning_rate
        self.beta1 = cfg.adam_beta1
        self.beta2 = cfg.adam_beta2
        self.eps = cfg.adam_epsilon
        self.t = 0
        self._m = [np.zeros_like(p) for p in net.weights + net.biases]
        self._v = [np.zeros_like(p) for p in net.weights + net.biases]

    def step(self, net: QNetwork, grads: list[np.ndarray]) -> None:
        self.t += 1
        params = net.weights + net.biases
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g**2
            p -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


class Trainer:
    """Owns the online/target networks, optimizer, replay buffer, step count."""

    def __init__(
        self,
        cfg: TrainConfig,
        rng: np.random.Generator,
        widths: Sequence[int] = DEFAULT_WIDTHS,
    ):
        self.cfg = cfg
        self.policy = QNetwork.initialize(rng, widths)
        self.target = self.policy.copy()
        self.buffer = ReplayBuffer(
            cfg.buffer_capacity, cfg.priority_exponent, cfg.importance_exponent
        )
        self.optimizer = Adam(self.policy, cfg)
        self.steps = 0

    def _batch_targets(self, batch: list[Transition]) -> np.ndarray:
        """DDQN targets for a whole batch; one matmul instead of 2N forwards.

        Same formula as :func:`ddqn_target` (BLAS batching may differ in the
        last ulp).
        """
        targets = np.array([t.reward for t in batch], dtype=np.float64)
        open_idx = [
            i for i, t in enumerate(batch) if not t.done and t.next_state is not None
        ]
        if open_idx:
            next_states = np.stack([batch[i].next_state for i in open_idx])
            best = np.argmax(self.policy.forward(next_states), axis=1)
            next_values = self.target.forward(next_states)[
                np.arange(len(open_idx)), best
            ]
            targets[open_idx] += self.cfg.gamma_disc * next_values
        return targets

    def train_step(
        self,
        batch: list[Transition],
        indices: np.ndarray,
        weights: np.ndarray,
    ) -> float:
        """One gradient step; updates batch priorities and syncs the target."""
        cfg = self.cfg
        states = np.stack([t.state for t in batch])
        actions = np.array([t.action for t in batch], dtype=np.intp)
        targets = self._batch_targets(batch)
        loss, td_errors, weight_grads, bias_grads = td_loss_and_grads(
            self.policy, states, actions, targets, weights
        )
        self.optimizer.step(self.policy, weight_grads + bias_grads)
        self.buffer.update_priorities(indices, np.abs(td_errors) + cfg.priority_floor)
        self.steps += 1
        if self.steps % cfg.target_sync_every == 0:
            self.target.copy_from(self.policy)
        return loss


def save_model(net: QNetwork, path: str) -> None:
    """Write the network as little-endian binary: magic, version, widths, params."""
    widths = net.widths
    with open(path, "wb") as handle:
        handle.write(MODEL_MAGIC)
        handle.write(struct.pack("<I", MODEL_VERSION))
        handle.write(struct.pack("<I", len(net.weights)))
        handle.write(struct.pack(f"<{len(widths)}I", *widths))
        for w, b in zip(net.weights, net.biases):
            handle.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            handle.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_model(path: str) -> QNetwork:
    """Read a model file back; bit-exact round trip with :func:`save_model`."""
    with open(path, "rb") as handle:
        data = handle.read()
    if len(data) < 12 or data[:4] != MODEL_MAGIC:
        raise ParseError("not a model file (bad magic)")
    version = struct.unpack_from("<I", data, 4)[0]
    if version != MODEL_VERSION:
        raise VersionMismatch(f"unsupported model format version {version}")
    layer_count = struct.unpack_from("<I", data, 8)[0]
    offset = 12
    width_bytes = 4 * (layer_count + 1)
    if len(data) < offset + width_bytes:
        raise ParseError("model file truncated in width list")
    widths = struct.unpack_from(f"<{layer_count + 1}I", data, offset)
    offset += width_bytes
    if widths[0] != STATE_DIM or widths[-1] != N_ACTIONS:
        raise ShapeMismatch(
            f"policy model must map {STATE_DIM} -> {N_ACTIONS}, file has "
            f"{widths[0]} -> {widths[-1]}"
        )
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        w_bytes = 8 * fan_out * fan_in
        b_bytes = 8 * fan_out
        if len(data) < offset + w_bytes + b_bytes:
            raise ParseError("model file truncated in parameter payload")
        w = np.frombuffer(data, dtype="<f8", count=fan_out * fan_in, offset=offset)
        offset += w_bytes
        b = np.frombuffer(data, dtype="<f8", count=fan_out, offset=offset)
        offset += b_bytes
        weights.append(w.reshape(fan_out, fan_in).astype(np.float64))
        biases.append(b.astype(np.float64))
    if offset != len(data):
        raise ParseError("model file has trailing bytes")
    return QNetwork(weights, biases)


@dataclass(frozen=True)
class EpisodeStats:
    episode: int
    mean_reward: float
    epsilon: float
    gradient_steps: int


def states_for_document(embeddings: list[np.ndarray]) -> list[np.ndarray]:
    """Neighbor-mean states for every sentence of a document."""
    states = []
    for i, emb in enumerate(embeddings):
        prev = embeddings[i - 1] if i > 0 else None
        next_ = embeddings[i + 1] if i + 1 < len(embeddings) else None
        states.append(build_state(prev, emb, next_))
    return states


def train(
    corpus: list[Document],
    backend,
    cfg: TrainConfig,
    rng: np.random.Generator,
    widths: Sequence[int] = DEFAULT_WIDTHS,
) -> tuple[QNetwork, list[EpisodeStats]]:
    """Train the ratio policy.

    One episode walks one document's sentences in order (documents cycle
    across episodes): build the state, pick an epsilon-greedy action, compress
    at that ratio, score the reward, store the transition, and take one
    gradient step per environment step once the buffer holds a full batch.
    Epsilon decays once per episode; the importance-sampling exponent anneals
    linearly to 1 over the episode schedule.
    """
    if not corpus:
        raise EmptySentence("training corpus is empty")
    trainer = Trainer(cfg, rng, widths)
    epsilon = cfg.epsilon_start
    log: list[EpisodeStats] = []
    scored_cache: dict[int, list] = {}

    for episode in range(cfg.episodes):
        if cfg.episodes > 1:
            anneal = episode / (cfg.episodes - 1)
        else:
            anneal = 1.0
        trainer.buffer.importance_exponent = (
            cfg.importance_exponent + (1.0 - cfg.importance_exponent) * anneal
        )

        doc_index = episode % len(corpus)
        if doc_index not in scored_cache:
            scored_cache[doc_index] = backend.score_document(corpus[doc_index])
        scored = scored_cache[doc_index]
        if not scored:
            log.append(EpisodeStats(episode, 0.0, epsilon, trainer.steps))
            continue

        states = states_for_document([s.embedding for s in scored])
        rewards = []
        for i, scored_sentence in enumerate(scored):
            qvals = trainer.policy.forward(states[i])
            action = select_action(qvals, epsilon, rng)
            plan = compress_sentence(scored_sentence, action_to_ratio(action))
            compressed = plan_to_sentence(scored_sentence.sentence, plan)
            step_reward = reward(scored_sentence.sentence, compressed, cfg)
            done = i == len(scored) - 1
            trainer.buffer.push(
                Transition(
                    state=states[i],
                    action=action,
                    reward=step_reward,
                    next_state=None if done else states[i + 1],
                    done=done,
                )
            )
            if len(trainer.buffer) >= cfg.batch_size:
                batch, indices, weights = trainer.buffer.sample(cfg.batch_size, rng)
                trainer.train_step(batch, indices, weights)
            rewards.append(step_reward)

        epsilon = decay_epsilon(epsilon, cfg.epsilon_decay, cfg.epsilon_min)
        log.append(
            EpisodeStats(episode, float(np.mean(rewards)), epsilon, trainer.steps)
        )
    return trainer.policy, log
