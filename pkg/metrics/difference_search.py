"""
Difference-vector search policy shared by the certification sweeps.

A sweep over nonzero difference vectors ds in D^k is exhaustive when
|D|^k <= EXHAUSTIVE_LIMIT. Otherwise it covers every weight-1 and weight-2
vector and `budget` uniform random draws from a seeded generator.
"""

import logging
import sys
from itertools import combinations
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    EXHAUSTIVE_LIMIT,
    LOG_FORMAT,
    LOG_LEVEL,
    SWEEP_CHUNK,
)

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


class DifferenceSearch:
    """
    Chunked generator of nonzero difference vectors.

    Attributes:
        mode: "exhaustive" or "sampled"
        total: number of vectors the search will yield
    """

    def __init__(
        self,
        diffs,
        k: int,
        budget: int = DEFAULT_BUDGET,
        seed: int = DEFAULT_SEED,
        chunk: int = SWEEP_CHUNK,
        exhaustive_limit: int = EXHAUSTIVE_LIMIT,
        max_weight: Optional[int] = None,
    ):
        """
        Args:
            diffs: difference alphabet, must contain 0 and be closed under negation
            k: symbols per codeword
            budget: random draws when the sweep is sampled
            seed: sampling seed
            chunk: vectors per yielded block
            exhaustive_limit: largest |diffs|^k enumerated in full
            max_weight: restrict to vectors of weight <= max_weight (1 or 2),
                no random draws
        """
        diffs = np.asarray(diffs, dtype=np.complex128).ravel()
        if not np.any(np.isclose(diffs, 0)):
            raise ValueError("Difference alphabet must contain 0")
        if not all(np.any(np.isclose(diffs, -d)) for d in diffs):
            raise ValueError("Difference alphabet must be closed under negation")
        nonzero = diffs[~np.isclose(diffs, 0)]
        if nonzero.size == 0:
            raise ValueError("Difference alphabet has no nonzero value")
        if max_weight is not None and max_weight not in (1, 2):
            raise ValueError(f"max_weight must be 1 or 2, got {max_weight}")

        self.alphabet = np.concatenate([[0j], nonzero])
        self.k = k
        self.budget = int(budget)
        self.seed = seed
        self.chunk = chunk
        self.max_weight = max_weight

        n = len(self.alphabet)
        space = float(n) ** k
        if max_weight is not None:
            self.mode = f"weight<={max_weight}"
        elif space <= exhaustive_limit:
            self.mode = "exhaustive"
        else:
            self.mode = "sampled"

        n_w1 = k * (n - 1)
        n_w2 = (k * (k - 1) // 2) * (n - 1) ** 2
        if self.mode == "exhaustive":
            self.total = int(space) - 1
        elif self.mode == "weight<=1":
            self.total = n_w1
        elif self.mode == "weight<=2":
            self.total = n_w1 + n_w2
        else:
            self.total = n_w1 + n_w2 + self.budget

    def describe(self) -> str:
        return f"{self.mode}({self.total})"

    # ------------------------------------------------------------------
    # generators
    # ------------------------------------------------------------------

    def _exhaustive(self) -> Iterator[np.ndarray]:
        n = len(self.alphabet)
        total = n ** self.k
        powers = n ** np.arange(self.k - 1, -1, -1, dtype=np.int64)
        # index 0 is the zero vector
        for start in range(1, total, self.chunk):
            idx = np.arange(start, min(start + self.chunk, total), dtype=np.int64)
            digits = (idx[:, None] // powers) % n
            yield self.alphabet[digits]

    def _weight_one(self) -> Iterator[np.ndarray]:
        nonzero = self.alphabet[1:]
        block = np.zeros((self.k * len(nonzero), self.k), dtype=np.complex128)
        rows = np.arange(block.shape[0])
        block[rows, rows // len(nonzero)] = np.tile(nonzero, self.k)
        yield block

    def _weight_two(self) -> Iterator[np.ndarray]:
        nonzero = self.alphabet[1:]
        a, b = np.meshgrid(nonzero, nonzero, indexing="ij")
        a, b = a.ravel(), b.ravel()
        for i, j in combinations(range(self.k), 2):
            block = np.zeros((len(a), self.k), dtype=np.complex128)
            block[:, i] = a
            block[:, j] = b
            yield block

    def _random(self) -> Iterator[np.ndarray]:
        rng = np.random.default_rng(self.seed)
        n = len(self.alphabet)
        remaining = self.budget
        while remaining > 0:
            size = min(self.chunk, remaining)
            idx = rng.integers(0, n, size=(size, self.k))
            zero = ~idx.any(axis=1)
            # redraw the (rare) all-zero rows
            while zero.any():
                idx[zero] = rng.integers(0, n, size=(int(zero.sum()), self.k))
                zero = ~idx.any(axis=1)
            remaining -= size
            yield self.alphabet[idx]

    def chunks(self) -> Iterator[np.ndarray]:
        """Yield (N, k) blocks of nonzero difference vectors."""
        if self.mode == "exhaustive":
            yield from self._exhaustive()
            return
        yield from self._weight_one()
        if self.mode == "weight<=1":
            return
        yield from self._weight_two()
        if self.mode == "sampled":
            yield from self._random()
