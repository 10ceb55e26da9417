"""
Field Constructor for Tensor-Product Lattice Codes

Builds the algebraic constants and unitary lattice generator matrices used
by the delay-tolerant codes:
- M1: the perfect-code lattice (Golden for M=2, 2cos(2pi/7) for M=3,
  2cos(2pi/15) for M=4, and the numeric rotation of the non-norm 2x2 code)
- M2: the cyclotomic (or M-th root of gamma) embedding matrix
- M = M2 (x) M1: the M^2-dimensional rotated lattice

Features:
- Closed-form double precision constants (no symbolic arithmetic)
- Galois orbits evaluated by iterating theta -> theta^2 - 2
- Discriminant-based minimum product distance bound
- U, V matrices factoring a Gamma codeword into its perfect code

Usage:
    python -m algebra.field_constructor
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import LOG_FORMAT, LOG_LEVEL, NUMERIC_UNITARY_TOL, UNITARY_TOL
from algebra.linalg_core import ComplexMatrix, is_unitary, kron

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


# =============================================================================
# CONSTANTS
# =============================================================================

J = complex(-0.5, math.sqrt(3) / 2)  # e^{2 pi i / 3}
GOLDEN = (1 + math.sqrt(5)) / 2
GOLDEN_BAR = (1 - math.sqrt(5)) / 2

SUPPORTED_DIMENSIONS = (2, 3, 4)

# theta2 = e^{2 pi i / n} with theta2^M = gamma (i, j, i)
CYCLOTOMIC_ORDER = {2: 8, 3: 9, 4: 16}

# (d_K1, d_K2) relative discriminants
PERFECT_DISCRIMINANTS = {2: (5, 4), 3: (49, 27), 4: (1125, 256)}
NON_NORM_DISCRIMINANTS = (5, 52)

# Non-norm element of the alternate 2x2 algebra
NON_NORM_GAMMA = complex(3, 2) / complex(2, 3)

# Rotation of Z[i]^2 for the non-norm 2x2 code, printed to 5 digits
ALT2_M1 = np.array([[-0.52573, -0.85065], [-0.85065, 0.52573]], dtype=np.complex128)

# Integral bases as polynomial coefficients in theta1 (ascending powers)
PERFECT3_BASIS = [
    [1 + J, 1],
    [-1 - 2 * J, 0, J],
    [-1 - 2 * J, 1 + J, 1 + J],
]
PERFECT4_BASIS = [
    [1 - 3j, 0, 1j],
    [0, 1 - 3j, 0, 1j],
    [-1j, -3 + 4j, 0, 1 - 1j],
    [-1 + 1j, -3, 1, 1],
]


# =============================================================================
# DATA CLASSES
# =============================================================================

@dataclass(frozen=True)
class FieldSpec:
    """
    Description of the two cyclic extensions whose compositum gives the lattice.

    variant is "perfect" (gamma a root of unity, theta2 cyclotomic) or
    "non_norm" (gamma = (3+2i)/(2+3i), theta2 its principal square root).
    """
    dimension: int
    base: str = "gaussian"
    variant: str = "perfect"
    discriminants: Tuple[int, int] = (5, 4)

    def __post_init__(self):
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"Unsupported dimension {self.dimension}; expected one of {SUPPORTED_DIMENSIONS}")
        if self.base not in ("gaussian", "eisenstein"):
            raise ValueError(f"Unknown base field: {self.base}")
        if self.variant not in ("perfect", "non_norm"):
            raise ValueError(f"Unknown variant: {self.variant}")
        if (self.base == "eisenstein") != (self.dimension == 3):
            raise ValueError(
                f"Base {self.base} does not match dimension {self.dimension} "
                "(Eisenstein integers are used exactly for M=3)"
            )
        if self.variant == "non_norm" and self.dimension != 2:
            raise ValueError("The non-norm variant is only constructed for M=2")
        d1, d2 = self.discriminants
        if math.gcd(d1, d2) != 1:
            raise ValueError(f"Discriminants {d1}, {d2} are not coprime")

    @classmethod
    def perfect(cls, dimension: int) -> "FieldSpec":
        if dimension not in PERFECT_DISCRIMINANTS:
            raise ValueError(f"Unsupported dimension {dimension}; expected one of {SUPPORTED_DIMENSIONS}")
        base = "eisenstein" if dimension == 3 else "gaussian"
        return cls(dimension, base, "perfect", PERFECT_DISCRIMINANTS[dimension])

    @classmethod
    def non_norm(cls) -> "FieldSpec":
        return cls(2, "gaussian", "non_norm", NON_NORM_DISCRIMINANTS)

    @property
    def omega(self) -> complex:
        """Primitive M-th root of unity: sigma2(theta2) = omega * theta2."""
        return complex(np.exp(2j * np.pi / self.dimension))

    @property
    def theta2(self) -> complex:
        if self.variant == "non_norm":
            return complex(np.sqrt(NON_NORM_GAMMA))
        return complex(np.exp(2j * np.pi / CYCLOTOMIC_ORDER[self.dimension]))

    @property
    def gamma(self) -> complex:
        """Non-norm element; equals theta2 ** M."""
        if self.variant == "non_norm":
            return NON_NORM_GAMMA
        return {2: 1j, 3: J, 4: 1j}[self.dimension]

    def to_dict(self) -> Dict:
        return {
            "dimension": self.dimension,
            "base": self.base,
            "variant": self.variant,
            "discriminants": list(self.discriminants),
        }


@dataclass
class GeneratorSet:
    """Unitary generators M1, M2 and their tensor product M = M2 (x) M1."""
    m1: ComplexMatrix
    m2: ComplexMatrix
    m: ComplexMatrix
    normalization: Tuple[float, float]
    spec: Optional[FieldSpec] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.m1.shape[0]


# =============================================================================
# EMBEDDINGS
# =============================================================================

def galois_orbit(theta: float, n: int) -> np.ndarray:
    """
    Images of theta = 2cos(2pi/p) under sigma^r, r = 0..n-1, with
    sigma: theta -> theta^2 - 2.
    """
    orbit = np.empty(n)
    orbit[0] = theta
    for r in range(1, n):
        orbit[r] = orbit[r - 1] ** 2 - 2
    return orbit


def _basis_embedding(basis: Sequence[Sequence[complex]], theta: float, norm: float) -> ComplexMatrix:
    n = len(basis)
    orbit = galois_orbit(theta, n)
    m1 = np.empty((n, n), dtype=np.complex128)
    for k, coeffs in enumerate(basis):
        m1[:, k] = P.polyval(orbit, np.asarray(coeffs, dtype=np.complex128))
    return m1 / math.sqrt(norm)


def _root_embedding(theta2: complex, omega: complex, dimension: int) -> ComplexMatrix:
    """Rows r: (1, w^r t, (w^r t)^2, ...) / sqrt(M)."""
    r = np.arange(dimension)[:, None]
    c = np.arange(dimension)[None, :]
    return (theta2 ** c) * (omega ** (r * c)) / math.sqrt(dimension)


# =============================================================================
# GENERATOR MATRICES
# =============================================================================

def golden_m1() -> ComplexMatrix:
    """Golden code rotation (1/sqrt5)[[a, a t], [a', a' t']]."""
    alpha = 1 + 1j - 1j * GOLDEN
    alpha_bar = 1 + 1j - 1j * GOLDEN_BAR
    return np.array(
        [[alpha, alpha * GOLDEN], [alpha_bar, alpha_bar * GOLDEN_BAR]],
        dtype=np.complex128,
    ) / math.sqrt(5)


def cyclotomic_m2(dimension: int) -> ComplexMatrix:
    """
    Embedding of the cyclotomic basis (1, z, ..., z^{M-1}) under sigma2.

    Args:
        dimension: M in {2, 3, 4}, using z = zeta8, zeta9, zeta16

    Returns:
        M x M unitary matrix normalized by 1/sqrt(M)
    """
    spec = FieldSpec.perfect(dimension)
    return _root_embedding(spec.theta2, spec.omega, dimension)


def perfect3_m1() -> ComplexMatrix:
    """3x3 perfect code rotation of Z[j]^3, theta1 = 2cos(2pi/7)."""
    return _basis_embedding(PERFECT3_BASIS, 2 * math.cos(2 * math.pi / 7), 7)


def perfect4_m1() -> ComplexMatrix:
    """4x4 perfect code rotation of Z[i]^4, theta1 = 2cos(2pi/15)."""
    return _basis_embedding(PERFECT4_BASIS, 2 * math.cos(2 * math.pi / 15), 15)


def alt2_m1() -> ComplexMatrix:
    return ALT2_M1.copy()


def alt2_m2() -> ComplexMatrix:
    spec = FieldSpec.non_norm()
    return _root_embedding(spec.theta2, spec.omega, 2)


def build_generators(spec: FieldSpec) -> GeneratorSet:
    """
    Assemble (M1, M2, M2 (x) M1) for a field specification.

    Raises:
        ValueError: for an unsupported dimension/variant combination
    """
    if spec.variant == "non_norm":
        m1, m2, p1 = alt2_m1(), alt2_m2(), 1.0
    elif spec.dimension == 2:
        m1, m2, p1 = golden_m1(), cyclotomic_m2(2), 5.0
    elif spec.dimension == 3:
        m1, m2, p1 = perfect3_m1(), cyclotomic_m2(3), 7.0
    elif spec.dimension == 4:
        m1, m2, p1 = perfect4_m1(), cyclotomic_m2(4), 15.0
    else:
        raise ValueError(f"Unsupported field spec: {spec}")
    return GeneratorSet(
        m1=m1,
        m2=m2,
        m=kron(m2, m1),
        normalization=(p1, float(spec.dimension)),
        spec=spec,
    )


def min_product_distance_bound(spec: FieldSpec) -> float:
    """1 / sqrt(d_K1^M * d_K2^M), the product distance floor of M2 (x) M1."""
    d1, d2 = spec.discriminants
    m = spec.dimension
    return 1.0 / math.sqrt(float(d1) ** m * float(d2) ** m)


# =============================================================================
# FACTORIZATION  Gamma = U Z V
# =============================================================================

def factorization_matrices(dimension: int, theta2: Optional[complex] = None) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Fixed unitary U, V with Gamma(s) = U Z(s) V, Z the layered perfect code.

    For M=2 (sign-pattern mask) U = diag(t, -1), V = [[1/t, 1/t], [1, -1]]/sqrt2,
    which is [[-i z8, -i z8], [1, -1]]/sqrt2 for t = zeta8. For M=3, 4 (Fourier
    mask) U = diag(t^-k) and V[m, c] = t^m w^{mc} / sqrt(M).

    Args:
        dimension: M in {2, 3, 4}
        theta2: M-th root of gamma (defaults to the cyclotomic one)
    """
    if dimension not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"Unsupported dimension {dimension}; expected one of {SUPPORTED_DIMENSIONS}")
    if theta2 is None:
        theta2 = FieldSpec.perfect(dimension).theta2
    if dimension == 2:
        u = np.diag([theta2, -1.0]).astype(np.complex128)
        v = np.array([[1 / theta2, 1 / theta2], [1, -1]], dtype=np.complex128) / math.sqrt(2)
        return u, v
    omega = np.exp(2j * np.pi / dimension)
    u = np.diag(theta2 ** -np.arange(dimension, dtype=float)).astype(np.complex128)
    v = _root_embedding(theta2, omega, dimension).T
    return u, v


# =============================================================================
# MAIN
# =============================================================================

def main():
    """Print a unitarity summary for every generator set."""
    specs = {f"perfect{m}": FieldSpec.perfect(m) for m in SUPPORTED_DIMENSIONS}
    specs["non_norm2"] = FieldSpec.non_norm()

    print("=" * 60)
    print("LATTICE GENERATORS")
    print("=" * 60)
    for name, spec in specs.items():
        gens = build_generators(spec)
        tol = NUMERIC_UNITARY_TOL if spec.variant == "non_norm" else UNITARY_TOL
        ok = all(is_unitary(mat, tol) for mat in (gens.m1, gens.m2, gens.m))
        status = "✅" if ok else "❌"
        print(
            f"{status} {name:10s} M={spec.dimension} size={gens.m.shape[0]}x{gens.m.shape[1]} "
            f"d_p,min >= {min_product_distance_bound(spec):.3e}"
        )


if __name__ == "__main__":
    main()
