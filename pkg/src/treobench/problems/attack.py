"""Minimalistic pixel attacks on a black-box action policy.

A genome encodes `pixel_budget` pixels, three genes each: x = floor(g1*W)
clamped to [0, W-1], y = floor(g2*H) clamped to [0, H-1], and a replacement
intensity g3*255. Perturbed pixels overwrite the frame value (later entries
win on duplicate coordinates). Fitness is max_{e != o} pi_e - pi_o on the
perturbed frame, where o is the policy argmax on the clean frame; a positive
value means the argmax flipped and the attack succeeded.

The bundled policy is a deterministic two-layer tanh network standing in for
a pre-trained agent: same interface (probability vector per frame), no
emulator. Two design constraints drive the weight layout. A dense first
layer at 84x84 fan-in dilutes any one pixel to O(1/sqrt(n)), so no few-pixel
attack would ever flip the argmax; instead each hidden unit reads a small
random pixel subset. And attacks must concentrate on a shared salient region
(the way real agents fixate on the ship or paddle), or else every run
converges to a different pixel basin and knowledge cannot transfer between
frames: one boosted unit reads a seeded contiguous blob through a
checkerboard contrast pattern, which cancels on smooth frames but swings
hard when any single blob pixel is pushed to an extreme.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import ContractError, RngStream

# calibrated once against the sensitivity smoke test: a 255-intensity flip of
# one pixel must shift some logit by >= 0.1 while leaving random frames
# attackable-but-not-trivial at the default budgets (~40 of 1000 random
# 4-pixel perturbations flip the argmax, checked over several 84x84 frames)
_HIDDEN = 32
_SPARSE_K = 16
_BG_GAIN = 0.25
_BLOB_HALF = 8
_BLOB_GAIN = 1.2
_W2_GAIN = 1.5
_SALIENT_BOOST = 3.0
_COARSE = 12


class ToyPolicy:
    """Deterministic affine-tanh-affine-softmax policy over (H, W) frames."""

    def __init__(self, seed: int, height: int, width: int, action_count: int):
        if action_count < 2:
            raise ContractError("need at least two actions")
        self.seed = int(seed)
        self.height = int(height)
        self.width = int(width)
        self.action_count = int(action_count)
        g = RngStream(seed, 0).split_label("toy-policy").generator
        n_in = height * width
        k = min(_SPARSE_K, n_in)
        self.w1 = np.zeros((n_in, _HIDDEN))
        for j in range(_HIDDEN):
            idx = g.choice(n_in, size=k, replace=False)
            self.w1[idx, j] = g.normal(0.0, _BG_GAIN, k)
        # unit 0 is the salient-blob detector; overwrites any background
        # weights that landed on blob pixels
        half = _BLOB_HALF
        cy = int(g.integers(half, height - half)) if height > 2 * half else height // 2
        cx = int(g.integers(half, width - half)) if width > 2 * half else width // 2
        ys = np.arange(max(cy - half, 0), min(cy + half + 1, height))
        xs = np.arange(max(cx - half, 0), min(cx + half + 1, width))
        yy, xx = np.meshgrid(ys, xs, indexing="ij")
        checker = np.where((yy + xx) % 2 == 0, 1.0, -1.0)
        self.w1[(yy * width + xx).ravel(), 0] = checker.ravel() * _BLOB_GAIN
        self.blob_center = (cy, cx)
        self.b1 = g.normal(0.0, 0.1, _HIDDEN)
        self.w2 = g.normal(0.0, _W2_GAIN / np.sqrt(_HIDDEN), (_HIDDEN, action_count))
        self.w2[0] *= _SALIENT_BOOST
        self.b2 = g.normal(0.0, 0.1, action_count)

    def query_batch(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=np.float64)
        if states.ndim == 2:
            states = states[None, :, :]
        if states.shape[1:] != (self.height, self.width):
            raise ContractError("state shape does not match policy input")
        x = states.reshape(states.shape[0], -1) / 255.0 - 0.5
        hidden = np.tanh(x @ self.w1 + self.b1)
        logits = hidden @ self.w2 + self.b2
        logits -= logits.max(axis=1, keepdims=True)
        probs = np.exp(logits)
        probs /= probs.sum(axis=1, keepdims=True)
        return probs

    def query(self, state: np.ndarray) -> np.ndarray:
        return self.query_batch(state)[0]

    def logits(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=np.float64)
        if states.ndim == 2:
            states = states[None, :, :]
        x = states.reshape(states.shape[0], -1) / 255.0 - 0.5
        return np.tanh(x @ self.w1 + self.b1) @ self.w2 + self.b2


def toy_policy(seed: int, height: int, width: int, action_count: int) -> ToyPolicy:
    return ToyPolicy(seed, height, width, action_count)


def toy_frame(seed: int, height: int, width: int) -> np.ndarray:
    """Seeded smooth random field in [0, 255]: coarse noise, bilinear upsample."""
    g = RngStream(seed, 0).split_label("toy-frame").generator
    coarse = g.uniform(0.0, 255.0, (_COARSE, _COARSE))
    return _bilinear(coarse, height, width)


def _bilinear(coarse: np.ndarray, height: int, width: int) -> np.ndarray:
    ch, cw = coarse.shape
    xs = np.linspace(0.0, cw - 1.0, width)
    ys = np.linspace(0.0, ch - 1.0, height)
    rows = np.stack([np.interp(xs, np.arange(cw), row) for row in coarse])
    return np.stack([np.interp(ys, np.arange(ch), col) for col in rows.T]).T


@dataclass(frozen=True)
class AttackTask:
    policy: ToyPolicy
    base_state: np.ndarray
    pixel_budget: int = 4
    # construction recipe (for compact serialization); None for ad-hoc frames
    recipe: tuple | None = None
    original_action: int = field(init=False)

    def __post_init__(self):
        state = np.ascontiguousarray(self.base_state, dtype=np.float64)
        object.__setattr__(self, "base_state", state)
        if state.shape != (self.policy.height, self.policy.width):
            raise ContractError("frame shape does not match policy input")
        if state.min() < 0.0 or state.max() > 255.0:
            raise ContractError("frame intensities must lie in [0, 255]")
        if self.pixel_budget < 1:
            raise ContractError("pixel budget must be positive")
        pi = self.policy.query(state)
        _check_distribution(pi)
        object.__setattr__(self, "original_action", int(np.argmax(pi)))

    @property
    def dimension(self) -> int:
        return 3 * self.pixel_budget


def _check_distribution(pi: np.ndarray) -> None:
    if pi.min() < 0.0 or abs(pi.sum() - 1.0) > 1e-9:
        raise ContractError("policy output is not a probability distribution")


def related_frame(
    base_seed: int, noise_seed: int, amplitude: float, height: int, width: int
) -> np.ndarray:
    """The base frame plus a low-amplitude smooth field, clipped to [0, 255]."""
    base = toy_frame(base_seed, height, width)
    noise = toy_frame(noise_seed, height, width) / 127.5 - 1.0
    return np.clip(base + amplitude * noise, 0.0, 255.0)


def make_toy_task(
    policy_seed: int,
    frame_seed: int,
    height: int,
    width: int,
    action_count: int,
    pixel_budget: int,
) -> AttackTask:
    policy = toy_policy(policy_seed, height, width, action_count)
    frame = toy_frame(frame_seed, height, width)
    return AttackTask(policy, frame, pixel_budget, recipe=("toy", frame_seed))


def make_related_task(
    policy_seed: int,
    base_frame_seed: int,
    noise_seed: int,
    amplitude: float,
    height: int,
    width: int,
    action_count: int,
    pixel_budget: int,
) -> AttackTask:
    policy = toy_policy(policy_seed, height, width, action_count)
    frame = related_frame(base_frame_seed, noise_seed, amplitude, height, width)
    recipe = ("toy_related", base_frame_seed, noise_seed, repr(float(amplitude)))
    return AttackTask(policy, frame, pixel_budget, recipe=recipe)


def task_from_recipe(
    policy_seed: int,
    height: int,
    width: int,
    action_count: int,
    pixel_budget: int,
    recipe: list | tuple,
) -> AttackTask:
    kind = recipe[0]
    if kind == "toy":
        return make_toy_task(
            policy_seed, int(recipe[1]), height, width, action_count, pixel_budget
        )
    if kind == "toy_related":
        return make_related_task(
            policy_seed,
            int(recipe[1]),
            int(recipe[2]),
            float(recipe[3]),
            height,
            width,
            action_count,
            pixel_budget,
        )
    raise ContractError(f"unknown attack frame recipe {kind!r}")


def decode_perturbation(task: AttackTask, genes: np.ndarray) -> list[tuple[int, int, float]]:
    """(x, y, intensity) triples in genome order; later entries overwrite."""
    genes = np.asarray(genes, dtype=np.float64)
    if genes.size != task.dimension:
        raise ContractError("genome length must be 3 * pixel_budget")
    h, w = task.policy.height, task.policy.width
    out = []
    for k in range(task.pixel_budget):
        g1, g2, g3 = genes[3 * k : 3 * k + 3]
        x = min(int(np.floor(g1 * w)), w - 1)
        y = min(int(np.floor(g2 * h)), h - 1)
        out.append((x, y, float(g3 * 255.0)))
    return out


def perturbed_states(task: AttackTask, genes: np.ndarray) -> np.ndarray:
    """Apply each row's decoded perturbation to a copy of the base frame."""
    genes = np.atleast_2d(genes)
    m = genes.shape[0]
    h, w = task.policy.height, task.policy.width
    states = np.broadcast_to(task.base_state, (m, h, w)).copy()
    rows = np.arange(m)
    for k in range(task.pixel_budget):  # genome order so later pixels overwrite
        xs = np.minimum((genes[:, 3 * k] * w).astype(np.int64), w - 1)
        ys = np.minimum((genes[:, 3 * k + 1] * h).astype(np.int64), h - 1)
        states[rows, ys, xs] = genes[:, 3 * k + 2] * 255.0
    return states


def evaluate_batch(task: AttackTask, genes: np.ndarray) -> np.ndarray:
    genes = np.atleast_2d(genes)
    if genes.shape[1] != task.dimension:
        raise ContractError("genome length must be 3 * pixel_budget")
    probs = task.policy.query_batch(perturbed_states(task, genes))
    if probs.min() < -1e-12 or np.abs(probs.sum(axis=1) - 1.0).max() > 1e-9:
        raise ContractError("policy output is not a probability distribution")
    original = probs[:, task.original_action].copy()
    masked = probs.copy()
    masked[:, task.original_action] = -np.inf
    return masked.max(axis=1) - original


def attack_evaluate(task: AttackTask, genes: np.ndarray) -> float:
    return float(evaluate_batch(task, np.asarray(genes, dtype=np.float64)[None, :])[0])
