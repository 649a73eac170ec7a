"""
Edge-LDP Randomized Response Channel

Users obfuscate their adjacency bits with randomized response under a
privacy budget epsilon; the server maps each noisy bit to an unbiased
estimate of the true bit.

User i reports only the bits a_{i,j} with j < i, so every edge bit is
obfuscated exactly once and each user answers a single query.
"""

import logging
import math
from dataclasses import dataclass, asdict
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from .graph import Graph, pair_count, pair_endpoints, pair_index
from .workers import run_tasks

logger = logging.getLogger(__name__)

# Pairs per independently seeded random block.
OBFUSCATION_BLOCK = 4096

# One randomized-response query per user.
QUERIES_PER_USER = 1

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class PrivacyBudget:
    """
    Attributes:
        epsilon: Privacy budget, positive and finite.
    """
    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon}")

    @property
    def flip_probability(self) -> float:
        """Probability 1 / (1 + e^epsilon) that a reported bit is flipped."""
        return flip_probability(self)

    @property
    def keep_probability(self) -> float:
        """Probability e^epsilon / (1 + e^epsilon) that a bit is reported as is."""
        return 1.0 / (1.0 + math.exp(-self.epsilon))

    def to_dict(self) -> dict:
        return asdict(self)


def flip_probability(budget: PrivacyBudget) -> float:
    """Return 1 / (1 + e^epsilon), evaluated without overflow for large epsilon."""
    tail = math.exp(-budget.epsilon)
    return tail / (1.0 + tail)


def channel_values(budget: PrivacyBudget) -> Tuple[float, float]:
    """
    The two debiased values (low, high) = (-1/(e^eps - 1), e^eps/(e^eps - 1)).
    """
    eps = budget.epsilon
    return -1.0 / math.expm1(eps), -1.0 / math.expm1(-eps)


def expected_unbiased_value(budget: PrivacyBudget, true_bit: int) -> float:
    """Closed-form E[a_hat | a = true_bit]; equals true_bit up to rounding."""
    low, high = channel_values(budget)
    keep, flip = budget.keep_probability, flip_probability(budget)
    if true_bit:
        return keep * high + flip * low
    return flip * high + keep * low


@dataclass(frozen=True)
class NoisyAdjacency:
    """
    Randomized-response output: one noisy bit per unordered pair.

    Attributes:
        n: Node count.
        epsilon: Budget the bits were produced with.
        master_seed: Seed the flips were derived from.
        packed: Noisy pair bits, np.packbits layout, as bytes.
    """
    n: int
    epsilon: float
    master_seed: int
    packed: bytes

    def __post_init__(self):
        expected = (pair_count(self.n) + 7) // 8
        if len(self.packed) != expected:
            raise ValueError(
                f"Packed noisy bits for n={self.n} need {expected} bytes, got {len(self.packed)}"
            )

    @cached_property
    def pair_bits(self) -> np.ndarray:
        raw = np.frombuffer(self.packed, dtype=np.uint8)
        bits = np.unpackbits(raw, count=pair_count(self.n)).astype(bool)
        bits.setflags(write=False)
        return bits

    def to_graph(self) -> Graph:
        """The obfuscated graph G~."""
        return Graph(self.n, self.packed)

    def report_of(self, user: int) -> np.ndarray:
        """Noisy bits a~_{user, j} for j < user, as sent by that user."""
        if not 0 <= user < self.n:
            raise ValueError(f"User {user} out of range for n={self.n}")
        indices = [pair_index(self.n, j, user) for j in range(user)]
        return self.pair_bits[indices]

    def privacy_loss(self, user: int) -> float:
        """Total budget consumed by a user: one query at epsilon."""
        if not 0 <= user < self.n:
            raise ValueError(f"User {user} out of range for n={self.n}")
        return QUERIES_PER_USER * self.epsilon


@dataclass(frozen=True, eq=False)
class UnbiasedAdjacency:
    """
    Debiased adjacency: one real value per unordered pair.

    Attributes:
        n: Node count.
        epsilon: Budget of the channel (inf for the noiseless test channel).
        values: Float vector in pair-index order.
    """
    n: int
    epsilon: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (pair_count(self.n),):
            raise ValueError(
                f"Expected {pair_count(self.n)} values for n={self.n}, got shape {values.shape}"
            )
        if self.epsilon == math.inf:
            allowed = (0.0, 1.0)
        else:
            allowed = channel_values(PrivacyBudget(self.epsilon))
        stray = ~np.isin(values, allowed)
        if stray.any():
            raise ValueError(
                f"Values must lie in {allowed} for epsilon={self.epsilon}, "
                f"got {values[stray][0]!r}"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def value(self, i: int, j: int) -> float:
        """a_hat_{i,j}; symmetric in i and j."""
        return float(self.values[pair_index(self.n, i, j)])

    def matrix(self) -> np.ndarray:
        """Dense symmetric matrix with a zero diagonal (read-only)."""
        return self._dense

    @cached_property
    def _dense(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=np.float64)
        rows, cols = pair_endpoints(self.n)
        matrix[rows, cols] = self.values
        matrix[cols, rows] = self.values
        matrix.setflags(write=False)
        return matrix


def _check_seed(seed: int) -> None:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {seed}")


def _block_flips(master_seed: int, q: float, total: int, block: int) -> np.ndarray:
    start = block * OBFUSCATION_BLOCK
    size = min(OBFUSCATION_BLOCK, total - start)
    rng = np.random.default_rng([master_seed, block])
    return rng.random(size) < q


def flip_stream(master_seed: int, q: float, total: int, workers: int = 1) -> np.ndarray:
    """
    Flip indicators for pairs 0..total-1. Pair p draws from the block
    p // OBFUSCATION_BLOCK seeded by (master_seed, block), so the result
    does not depend on evaluation order or worker count.
    """
    blocks = range(-(-total // OBFUSCATION_BLOCK))
    parts = run_tasks(blocks, lambda b: _block_flips(master_seed, q, total, b), workers=workers)
    if not parts:
        return np.zeros(0, dtype=bool)
    return np.concatenate(parts)


def obfuscate(
    graph: Graph,
    budget: PrivacyBudget,
    master_seed: int,
    flip_mask: Optional[np.ndarray] = None,
    workers: int = 1
) -> NoisyAdjacency:
    """
    Apply randomized response to every pair bit.

    Args:
        graph: True graph.
        budget: Privacy budget.
        master_seed: 64-bit seed; output is a function of (graph, epsilon, seed).
        flip_mask: Optional forced flip indicators (one per pair) replacing
            the random stream; an all-False mask gives a zero-noise channel.
        workers: Threads used to draw the flip stream.
    """
    _check_seed(master_seed)
    total = pair_count(graph.n)
    if flip_mask is None:
        flips = flip_stream(master_seed, flip_probability(budget), total, workers)
    else:
        flips = np.asarray(flip_mask, dtype=bool)
        if flips.shape != (total,):
            raise ValueError(f"flip_mask needs {total} entries, got shape {flips.shape}")
    noisy = graph.pair_bits ^ flips
    logger.debug("obfuscate(n=%d, eps=%s, seed=%d): %d of %d bits flipped",
                 graph.n, budget.epsilon, master_seed, int(flips.sum()), total)
    return NoisyAdjacency(graph.n, budget.epsilon, master_seed, np.packbits(noisy).tobytes())


def debias(noisy: NoisyAdjacency, budget: PrivacyBudget) -> UnbiasedAdjacency:
    """
    Map each noisy bit to ((e^eps + 1) a~ - 1) / (e^eps - 1).

    Raises:
        ValueError: If the budget differs from the one the bits were made with.
    """
    if noisy.epsilon != budget.epsilon:
        raise ValueError(
            f"Budget mismatch: bits were produced at epsilon={noisy.epsilon}, "
            f"debias called with epsilon={budget.epsilon}"
        )
    low, high = channel_values(budget)
    return UnbiasedAdjacency(noisy.n, budget.epsilon, np.where(noisy.pair_bits, high, low))


def noiseless_channel(graph: Graph) -> UnbiasedAdjacency:
    """Zero-noise channel with a_hat == a (the epsilon -> inf limit)."""
    return UnbiasedAdjacency(graph.n, math.inf, graph.pair_bits.astype(np.float64))


# ==================== DEBUG SERIALIZATION ====================

def dump_noisy(noisy: NoisyAdjacency) -> str:
    """
    Header "n epsilon master_seed", then one hex-packed row per user
    i = 1..n-1 holding that user's report (bits for j < i).
    """
    lines = [f"{noisy.n} {noisy.epsilon!r} {noisy.master_seed}"]
    for user in range(1, noisy.n):
        lines.append(np.packbits(noisy.report_of(user)).tobytes().hex())
    return "\n".join(lines) + "\n"


def load_noisy(text: str) -> NoisyAdjacency:
    """
    Parse the dump_noisy format.

    Raises:
        ValueError: On a malformed header or row.
    """
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("Noisy dump is empty")
    try:
        n_text, eps_text, seed_text = lines[0].split()
        n, epsilon, seed = int(n_text), float(eps_text), int(seed_text)
    except ValueError:
        raise ValueError(f"Malformed noisy dump header {lines[0]!r}") from None
    if len(lines) - 1 != max(n - 1, 0):
        raise ValueError(f"Expected {max(n - 1, 0)} report rows, got {len(lines) - 1}")

    bits = np.zeros(pair_count(n), dtype=bool)
    for user, row in enumerate(lines[1:], 1):
        try:
            raw = np.frombuffer(bytes.fromhex(row), dtype=np.uint8)
            report = np.unpackbits(raw, count=user).astype(bool)
        except ValueError:
            raise ValueError(f"Malformed report row for user {user}: {row!r}") from None
        bits[[pair_index(n, j, user) for j in range(user)]] = report
    return NoisyAdjacency(n, epsilon, seed, np.packbits(bits).tobytes())
