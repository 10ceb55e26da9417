"""
QAM / HEX Constellations

q-QAM symbols are carved from the Gaussian integers Z[i] and q-HEX symbols
from the Eisenstein integers Z[j]. Both are built as a product of two
per-coordinate level sets in a lattice basis (1, i) or (1, j), so the sphere
decoder can enumerate each real coordinate independently.

Features:
- Gray labelling per coordinate for QAM, natural binary for HEX
- Points kept at integer lattice coordinates (algebraic certification works
  on these); `scale` gives the unit-energy normalization for simulation
- Difference alphabets used by the certification sweeps
"""

import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import LOG_FORMAT, LOG_LEVEL

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

J = complex(-0.5, math.sqrt(3) / 2)

SUPPORTED_SIZES = (4, 16)

# Lattice basis (1, b) of each alphabet
LATTICE_BASIS = {"QAM": (1.0 + 0j, 1j), "HEX": (1.0 + 0j, J)}


# =============================================================================
# CONSTELLATION
# =============================================================================

@dataclass(frozen=True)
class Constellation:
    """
    Finite symbol alphabet points[n] = levels[ia] + levels[ib] * basis[1].

    Point n carries the bit label `labels[n]` (MSB first); `coords[n]` holds
    its per-coordinate level indices (ia, ib).
    """
    kind: str
    q: int
    levels: np.ndarray
    points: np.ndarray
    coords: np.ndarray
    labels: np.ndarray

    @property
    def basis(self) -> Tuple[complex, complex]:
        return LATTICE_BASIS[self.kind]

    @property
    def base_field(self) -> str:
        return "gaussian" if self.kind == "QAM" else "eisenstein"

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.q))

    @property
    def energy(self) -> float:
        """Average symbol energy of the unnormalized points."""
        return float(np.mean(np.abs(self.points) ** 2))

    @property
    def scale(self) -> float:
        """Factor bringing the average energy to 1."""
        return 1.0 / math.sqrt(self.energy)

    def normalized_points(self) -> np.ndarray:
        return self.points * self.scale

    def index_of_coords(self, ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
        """Symbol index from per-coordinate level indices."""
        lookup = np.empty((len(self.levels), len(self.levels)), dtype=np.int64)
        lookup[self.coords[:, 0], self.coords[:, 1]] = np.arange(self.q)
        return lookup[ia, ib]

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "levels": self.levels.tolist(),
            "energy": self.energy,
        }


def _gray_order(n: int) -> np.ndarray:
    """Level index carrying each Gray label g = 0..n-1."""
    idx = np.arange(n)
    gray = idx ^ (idx >> 1)
    return np.argsort(gray)


def _build(kind: str, q: int) -> Constellation:
    if q not in SUPPORTED_SIZES:
        raise ValueError(f"Unsupported constellation size {q}; expected one of {SUPPORTED_SIZES}")
    side = int(round(math.sqrt(q)))
    half_bits = int(np.log2(side))

    if kind == "QAM":
        levels = 2.0 * np.arange(side) - (side - 1)
        level_of_label = _gray_order(side)
    elif kind == "HEX":
        levels = np.arange(side) - (side - 1) / 2.0
        level_of_label = np.arange(side)
    else:
        raise ValueError(f"Unknown constellation kind: {kind}")

    n = np.arange(q)
    ia = level_of_label[n >> half_bits]
    ib = level_of_label[n & (side - 1)]
    coords = np.stack([ia, ib], axis=1)
    points = levels[ia] + levels[ib] * LATTICE_BASIS[kind][1]
    labels = ((n[:, None] >> np.arange(2 * half_bits)[::-1]) & 1).astype(np.uint8)

    return Constellation(
        kind=kind,
        q=q,
        levels=levels,
        points=points.astype(np.complex128),
        coords=coords,
        labels=labels,
    )


def qam(q: int = 4) -> Constellation:
    """Gray-coded square q-QAM with levels {+-1, +-3, ...}."""
    return _build("QAM", q)


def hex_constellation(q: int = 4) -> Constellation:
    """
    q-HEX carved from Z[j]: {a + b j : a, b in 0..sqrt(q)-1} centered at the
    origin. 4-HEX is {0, 1, j, 1+j} - (1+j)/2.
    """
    return _build("HEX", q)


def get_constellation(kind: str, q: int) -> Constellation:
    kind = kind.upper()
    if kind == "QAM":
        return qam(q)
    if kind == "HEX":
        return hex_constellation(q)
    raise ValueError(f"Unknown constellation kind: {kind}")


def constellation_for_field(base_field: str, q: int) -> Constellation:
    """QAM for codes over Q(i), HEX for codes over Q(j)."""
    return hex_constellation(q) if base_field == "eisenstein" else qam(q)


# =============================================================================
# BIT MAPPING
# =============================================================================

def bits_to_indices(bits: np.ndarray, c: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    b = c.bits_per_symbol
    if bits.shape[-1] % b != 0:
        raise ValueError(f"Bit length {bits.shape[-1]} is not a multiple of log2(q)={b}")
    groups = bits.reshape(bits.shape[:-1] + (bits.shape[-1] // b, b))
    return groups @ (1 << np.arange(b)[::-1])


def indices_to_bits(indices: np.ndarray, c: Constellation) -> np.ndarray:
    labels = c.labels[np.asarray(indices)]
    return labels.reshape(labels.shape[:-2] + (-1,))


def bits_to_symbols(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """
    Map a bit vector to constellation points (unnormalized).

    Raises:
        ValueError: if len(bits) is not a multiple of log2(q)
    """
    return c.points[bits_to_indices(bits, c)]


def symbols_to_bits(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    """Nearest-point demapping back to bits."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    indices = np.argmin(np.abs(symbols[..., None] - c.points), axis=-1)
    return indices_to_bits(indices, c)


# =============================================================================
# DIFFERENCE ALPHABETS
# =============================================================================

def difference_alphabet(c: Constellation) -> np.ndarray:
    """
    All distinct differences p - p' of constellation points, zero first.

    For q-QAM this is {a + bi : a, b in {0, +-2, ..., +-2(sqrt(q)-1)}};
    for q-HEX the analogous Eisenstein set.
    """
    steps = np.unique(np.round(c.levels[:, None] - c.levels[None, :], 9))
    da, db = np.meshgrid(steps, steps, indexing="ij")
    pairs = np.stack([da.ravel(), db.ravel()], axis=1)
    # zero first, then by magnitude
    values = pairs[:, 0] + pairs[:, 1] * c.basis[1]
    order = np.lexsort((np.angle(values), np.abs(values)))
    return values[order].astype(np.complex128)
