"""
MMSE-DFE Preprocessing and Sphere Decoding

The effective real channel of an asynchronous relay block is often rank
deficient. Appending sqrt(noise_var) * I under it and taking a QR
factorization gives a square upper-triangular R that is always nonsingular;
the sphere decoder then searches min ||r - R s||^2 over a finite alphabet per
coordinate (Schnorr-Euchner enumeration with radius shrinking).
"""

import logging
import sys
from itertools import product
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import LOG_FORMAT, LOG_LEVEL

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

Alphabet = Union[np.ndarray, Sequence[np.ndarray]]


def mmse_dfe_preprocess(heff: np.ndarray, noise_var: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    QR of the augmented matrix [heff; sqrt(noise_var) I].

    Args:
        heff: real (n x p) effective channel, or a stack (..., n, p)
        noise_var: regularization, noise variance per coordinate variance

    Returns:
        (F, R): forward filter (p x n) and upper-triangular R (p x p) with a
        positive diagonal, so that F y is the received vector in R-coordinates
    """
    if noise_var <= 0:
        raise ValueError(f"noise_var must be positive, got {noise_var}")
    heff = np.asarray(heff, dtype=float)
    n, p = heff.shape[-2:]
    eye = np.broadcast_to(np.sqrt(noise_var) * np.eye(p), heff.shape[:-2] + (p, p))
    augmented = np.concatenate([heff, eye], axis=-2)
    q, r = np.linalg.qr(augmented)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    r = r * signs[..., :, None]
    q = q * signs[..., None, :]
    forward = np.swapaxes(q[..., :n, :], -1, -2)
    return forward, r


def _per_coordinate(alphabet: Alphabet, p: int) -> List[np.ndarray]:
    if isinstance(alphabet, np.ndarray) and alphabet.ndim == 1:
        return [alphabet.astype(float)] * p
    levels = [np.asarray(a, dtype=float) for a in alphabet]
    if len(levels) != p:
        raise ValueError(f"Alphabet has {len(levels)} coordinates, R has {p}")
    return levels


def sphere_decode(r: np.ndarray, R: np.ndarray, alphabet: Alphabet, radius: float = np.inf) -> np.ndarray:
    """
    Exact argmin ||r - R s||^2 over s in alphabet (per coordinate).

    Depth-first from the last coordinate; at each layer candidates are visited
    in order of distance to the layer's centre, and a branch is cut as soon as
    its partial distance reaches the best full distance found so far.

    Args:
        r: received vector in R-coordinates (length p)
        R: upper-triangular p x p, nonzero diagonal
        alphabet: 1-D level set shared by all coordinates, or one per coordinate
        radius: initial squared search radius

    Returns:
        The minimizing coordinate vector (None if nothing lies within radius)
    """
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    p = R.shape[0]
    if R.shape != (p, p):
        raise ValueError(f"R must be square, got {R.shape}")
    diag = np.diag(R)
    if np.any(diag == 0):
        raise ValueError("R is singular")
    levels = _per_coordinate(alphabet, p)

    s = np.zeros(p)
    best = None
    best_dist = radius

    def search(i: int, dist: float):
        nonlocal best, best_dist
        centre = (r[i] - R[i, i + 1:] @ s[i + 1:]) / diag[i]
        cand = levels[i]
        for a in cand[np.argsort(np.abs(cand - centre), kind="stable")]:
            d = dist + (diag[i] * (a - centre)) ** 2
            if d >= best_dist:
                break
            s[i] = a
            if i == 0:
                best_dist = d
                best = s.copy()
            else:
                search(i - 1, d)

    search(p - 1, 0.0)
    return best


def exhaustive_search(y: np.ndarray, H: np.ndarray, alphabet: Alphabet) -> np.ndarray:
    """Brute-force ML reference: argmin ||y - H s||^2 over the full alphabet."""
    H = np.asarray(H, dtype=float)
    levels = _per_coordinate(alphabet, H.shape[1])
    candidates = np.array(list(product(*levels)))
    residual = np.asarray(y, dtype=float)[None, :] - candidates @ H.T
    return candidates[np.argmin(np.sum(residual ** 2, axis=1))]
