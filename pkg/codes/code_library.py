"""
Space-Time Code Library

Encoders for the distributed codes compared across synchronous and
asynchronous relay transmission.

Features:
- Tensor-product codes gamma2 / gamma3 / gamma4 and the non-norm 2x2 variant
  alt2: x = (M2 (x) M1) s filled column-major into the codeword and masked
  entrywise by Phi
- Golden code G and its variant C, layered perfect codes (3x3, 4x4)
- Silver, Sezginer-Sari and Damen 2x2 codes, and the delay-tolerant
  U X V versions silver_d / sezginer_d
- Name registry and real-valued dispersion matrices for the simulator

All encoders are vectorized: an array of shape (..., k) maps to codewords of
shape (..., M, T). Symbols are taken at integer lattice coordinates.
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import LOG_FORMAT, LOG_LEVEL
from algebra.field_constructor import (
    GOLDEN,
    GOLDEN_BAR,
    FieldSpec,
    GeneratorSet,
    build_generators,
    factorization_matrices,
)
from algebra.linalg_core import ComplexMatrix

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


# =============================================================================
# EXCEPTIONS / DATA CLASSES
# =============================================================================

class UnknownCodeError(KeyError):
    """Raised when a code name is not in the registry."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"Unknown code '{self.name}'. Known codes: {', '.join(CODE_NAMES)}"


@dataclass
class Codeword:
    matrix: ComplexMatrix
    source_symbols: np.ndarray


@dataclass
class CodeSpec:
    """
    A named code: M relays, T channel uses, k symbols per codeword.

    `encoder` maps symbols (..., k) to codewords (..., M, T). `phi` is the
    unit-modulus coefficient mask of the tensor-product codes (all ones for
    closed-form codes).
    """
    name: str
    M: int
    T: int
    k: int
    encoder: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    phi: ComplexMatrix = field(repr=False, default=None)
    generators: Optional[GeneratorSet] = field(repr=False, default=None)
    base_field: str = "gaussian"
    conjugating: bool = False
    description: str = ""

    def __post_init__(self):
        if self.phi is None:
            self.phi = np.ones((self.M, self.T), dtype=np.complex128)
        if not np.allclose(np.abs(self.phi), 1.0):
            raise ValueError(f"Coefficient mask of {self.name} has entries with |phi| != 1")

    @property
    def is_gamma(self) -> bool:
        return self.generators is not None

    def encode(self, s) -> Codeword:
        """
        Encode one symbol vector.

        Raises:
            ValueError: on length mismatch
        """
        s = np.asarray(s, dtype=np.complex128)
        if s.shape != (self.k,):
            raise ValueError(f"{self.name} expects {self.k} symbols, got shape {s.shape}")
        return Codeword(matrix=self.encoder(s), source_symbols=s)

    def encode_batch(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.complex128)
        if s.shape[-1] != self.k:
            raise ValueError(f"{self.name} expects {self.k} symbols, got {s.shape[-1]}")
        return self.encoder(s)

    def dispersion_matrices(self, basis: Sequence[complex] = (1.0, 1j)) -> np.ndarray:
        """
        Codewords of the unit real coordinates: array (2k, M, T) whose row
        2n + t is encode(e_n * basis[t]). Every code here is R-linear, so
        X(s) = sum_n,t coord[n, t] * A[2n + t].
        """
        probes = np.zeros((2 * self.k, self.k), dtype=np.complex128)
        for n in range(self.k):
            probes[2 * n, n] = basis[0]
            probes[2 * n + 1, n] = basis[1]
        return self.encoder(probes)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "M": self.M,
            "T": self.T,
            "k": self.k,
            "base_field": self.base_field,
            "conjugating": self.conjugating,
            "description": self.description,
        }


def _check_length(s: np.ndarray, k: int, name: str) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    if s.shape[-1] != k:
        raise ValueError(f"{name} expects {k} symbols, got {s.shape[-1]}")
    return s


def _single(encoder: Callable, s, k: int, name: str) -> Codeword:
    s = _check_length(s, k, name)
    if s.ndim != 1:
        raise ValueError(f"{name} encodes one symbol vector at a time, got shape {s.shape}")
    return Codeword(matrix=encoder(s), source_symbols=s)


# =============================================================================
# COEFFICIENT MASKS
# =============================================================================

def sign_mask() -> ComplexMatrix:
    """phi_2 = -1, others 1: [[1, 1], [-1, 1]]."""
    return np.array([[1, 1], [-1, 1]], dtype=np.complex128)


def fourier_mask(dimension: int) -> ComplexMatrix:
    """Phi[r, c] = w^{rc}, w = e^{2 pi i / M}."""
    r = np.arange(dimension)[:, None]
    c = np.arange(dimension)[None, :]
    return np.exp(2j * np.pi * r * c / dimension)


# =============================================================================
# TENSOR-PRODUCT (GAMMA) CODES
# =============================================================================

def _gamma_array(generators: GeneratorSet, phi: ComplexMatrix, s: np.ndarray) -> np.ndarray:
    m = generators.dimension
    x = s @ generators.m.T
    # x_{cM + r} -> [r, c]
    x = np.swapaxes(x.reshape(x.shape[:-1] + (m, m)), -1, -2)
    return phi * x


def encode_gamma(spec: CodeSpec, s) -> Codeword:
    """
    Gamma codeword: x = M s, entry [r, c] = Phi[r, c] * x_{cM + r}.

    Raises:
        ValueError: if spec is not a tensor-product code or on length mismatch
    """
    if not spec.is_gamma:
        raise ValueError(f"{spec.name} is not a tensor-product code")
    return _single(lambda v: _gamma_array(spec.generators, spec.phi, v), s, spec.k, spec.name)


# =============================================================================
# GOLDEN CODE AND VARIANT
# =============================================================================

ALPHA = 1 + 1j - 1j * GOLDEN
ALPHA_BAR = 1 + 1j - 1j * GOLDEN_BAR


def _golden_array(s: np.ndarray) -> np.ndarray:
    s1, s2, s3, s4 = np.moveaxis(s, -1, 0)
    x = np.empty(s.shape[:-1] + (2, 2), dtype=np.complex128)
    x[..., 0, 0] = ALPHA * (s1 + s2 * GOLDEN)
    x[..., 0, 1] = ALPHA * (s3 + s4 * GOLDEN)
    x[..., 1, 0] = 1j * ALPHA_BAR * (s3 + s4 * GOLDEN_BAR)
    x[..., 1, 1] = ALPHA_BAR * (s1 + s2 * GOLDEN_BAR)
    return x / math.sqrt(5)


def encode_golden(s) -> Codeword:
    """(1/sqrt5)[[a(s1+s2 t), a(s3+s4 t)], [i a'(s3+s4 t'), a'(s1+s2 t')]]."""
    return _single(_golden_array, s, 4, "golden")


def _golden_c_array(s: np.ndarray) -> np.ndarray:
    r = GOLDEN - 1
    s1, s2, s3, s4 = np.moveaxis(s, -1, 0)
    x = np.empty(s.shape[:-1] + (2, 2), dtype=np.complex128)
    x[..., 0, 0] = s1 + 1j * r * s4
    x[..., 0, 1] = r * s2 + s3
    x[..., 1, 0] = s2 - r * s3
    x[..., 1, 1] = 1j * r * s1 + s4
    return x / math.sqrt(2 * (1 + r ** 2))


def encode_golden_c(s) -> Codeword:
    return _single(_golden_c_array, s, 4, "goldenC")


# =============================================================================
# LAYERED PERFECT CODES
# =============================================================================

def _perfect_array(generators: GeneratorSet, gamma: complex, s: np.ndarray) -> np.ndarray:
    m = generators.dimension
    blocks = s.reshape(s.shape[:-1] + (m, m))      # [..., layer, symbol]
    layers = blocks @ generators.m1.T              # [..., layer, row]
    z = np.empty(s.shape[:-1] + (m, m), dtype=np.complex128)
    for k in range(m):
        for col in range(m):
            layer = (col - k) % m
            z[..., k, col] = layers[..., layer, k] * (gamma if col < k else 1.0)
    return z


def encode_perfect(dimension: int, s) -> Codeword:
    """
    Layered perfect code: layer l places M1 s_l on the l-th wrapped
    diagonal, wrapped entries (below the main diagonal) times gamma.

    Raises:
        ValueError: for M not in {3, 4}
    """
    if dimension not in (3, 4):
        raise ValueError(f"Perfect codes are built for M in (3, 4), got {dimension}")
    spec = get_code(f"perfect{dimension}")
    return _single(spec.encoder, s, spec.k, spec.name)


# =============================================================================
# SILVER / SEZGINER-SARI / DAMEN
# =============================================================================

SILVER_W = np.array([[1 + 1j, -1 + 2j], [1 + 2j, 1 - 1j]], dtype=np.complex128) / math.sqrt(7)
SILVER_T = np.diag([1.0, -1.0]).astype(np.complex128)

SEZGINER_A = SEZGINER_C = 1 / math.sqrt(2)
SEZGINER_B = ((1 - math.sqrt(7)) + 1j * (1 + math.sqrt(7))) / (4 * math.sqrt(2))
SEZGINER_D = -1j * SEZGINER_B

DAMEN_A = 1 / math.sqrt((5 + math.sqrt(5)) * (2 + math.sqrt(2)))
DAMEN_B = 1 / math.sqrt((5 - math.sqrt(5)) * (2 + math.sqrt(2)))
DAMEN_C = 1 / math.sqrt((5 + math.sqrt(5)) * (2 - math.sqrt(2)))
DAMEN_D = 1 / math.sqrt((5 - math.sqrt(5)) * (2 - math.sqrt(2)))


def alamouti(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """X(a, b) = [[a, -b*], [b, a*]]."""
    x = np.empty(np.shape(a) + (2, 2), dtype=np.complex128)
    x[..., 0, 0] = a
    x[..., 0, 1] = -np.conj(b)
    x[..., 1, 0] = b
    x[..., 1, 1] = np.conj(a)
    return x


def _silver_array(s: np.ndarray) -> np.ndarray:
    s1, s2, s3, s4 = np.moveaxis(s, -1, 0)
    z = s[..., 2:] @ SILVER_W.T
    return alamouti(s1, s2) + SILVER_T @ alamouti(z[..., 0], z[..., 1])


def encode_silver(s) -> Codeword:
    """
    X_A(s1, s2) + T X_B(z1, z2) with (z1, z2) = W (s3, s4).

    W rotates the symbol pair before the Alamouti map X_B; the literal
    product T W X_B(s3, s4) would not keep the 2x2 block in Alamouti form.
    """
    return _single(_silver_array, s, 4, "silver")


def _sezginer_array(s: np.ndarray) -> np.ndarray:
    s1, s2, s3, s4 = np.moveaxis(s, -1, 0)
    x = np.empty(s.shape[:-1] + (2, 2), dtype=np.complex128)
    x[..., 0, 0] = SEZGINER_A * s1 + SEZGINER_B * s3
    x[..., 0, 1] = -SEZGINER_C * np.conj(s2) - SEZGINER_D * np.conj(s4)
    x[..., 1, 0] = SEZGINER_A * s2 + SEZGINER_B * s4
    x[..., 1, 1] = SEZGINER_C * np.conj(s1) + SEZGINER_D * np.conj(s3)
    return x


def encode_sezginer(s) -> Codeword:
    return _single(_sezginer_array, s, 4, "sezginer")


def _damen_array(s: np.ndarray) -> np.ndarray:
    a, b, c, d = DAMEN_A, DAMEN_B, DAMEN_C, DAMEN_D
    s1, s2, s3, s4 = np.moveaxis(s, -1, 0)
    x = np.empty(s.shape[:-1] + (2, 2), dtype=np.complex128)
    x[..., 0, 0] = a * s1 + b * s2 - c * s3 - d * s4
    x[..., 0, 1] = -c * s1 - d * s2 - a * s3 - b * s4
    x[..., 1, 0] = -b * s1 + a * s2 + d * s3 - c * s4
    x[..., 1, 1] = -d * s1 + c * s2 - b * s3 + a * s4
    return x


def encode_damen(s) -> Codeword:
    return _single(_damen_array, s, 4, "damen")


# =============================================================================
# DERIVED DELAY-TOLERANT CODES
# =============================================================================

DERIVED_U, DERIVED_V = factorization_matrices(2)

_DERIVED_BASES = {"T": _silver_array, "S": _sezginer_array}


def _derived_array(base: str, s: np.ndarray) -> np.ndarray:
    return DERIVED_U @ _DERIVED_BASES[base](s) @ DERIVED_V


def encode_derived(base: str, s) -> Codeword:
    """
    U X(s) V with the fixed unitary U, V of the gamma2 factorization.

    Args:
        base: "T" (Silver) or "S" (Sezginer-Sari)
    """
    if base not in _DERIVED_BASES:
        raise ValueError(f"Derived codes are built from T or S, got {base!r}")
    name = "silver_d" if base == "T" else "sezginer_d"
    return _single(lambda v: _derived_array(base, v), s, 4, name)


def encode_alt2(s) -> Codeword:
    spec = get_code("alt2")
    return _single(spec.encoder, s, spec.k, spec.name)


# =============================================================================
# REGISTRY
# =============================================================================

def _gamma_spec(name: str, field_spec: FieldSpec, description: str) -> CodeSpec:
    gens = build_generators(field_spec)
    m = field_spec.dimension
    phi = sign_mask() if m == 2 else fourier_mask(m)
    return CodeSpec(
        name=name,
        M=m,
        T=m,
        k=m * m,
        encoder=lambda s: _gamma_array(gens, phi, s),
        phi=phi,
        generators=gens,
        base_field=field_spec.base,
        description=description,
    )


def _perfect_spec(dimension: int) -> CodeSpec:
    field_spec = FieldSpec.perfect(dimension)
    gens = build_generators(field_spec)
    gamma = field_spec.gamma
    return CodeSpec(
        name=f"perfect{dimension}",
        M=dimension,
        T=dimension,
        k=dimension * dimension,
        encoder=lambda s: _perfect_array(gens, gamma, s),
        base_field=field_spec.base,
        description=f"{dimension}x{dimension} layered perfect code",
    )


def _closed_form(name: str, encoder: Callable, conjugating: bool, description: str) -> CodeSpec:
    return CodeSpec(
        name=name, M=2, T=2, k=4, encoder=encoder,
        conjugating=conjugating, description=description,
    )


_BUILDERS: Dict[str, Callable[[], CodeSpec]] = {
    "gamma2": lambda: _gamma_spec("gamma2", FieldSpec.perfect(2), "2x2 delay-tolerant code from the Golden algebra"),
    "gamma3": lambda: _gamma_spec("gamma3", FieldSpec.perfect(3), "3x3 delay-tolerant code over Z[j]"),
    "gamma4": lambda: _gamma_spec("gamma4", FieldSpec.perfect(4), "4x4 delay-tolerant code over Z[i]"),
    "golden": lambda: _closed_form("golden", _golden_array, False, "Golden code G"),
    "goldenC": lambda: _closed_form("goldenC", _golden_c_array, False, "Golden code variant C"),
    "silver": lambda: _closed_form("silver", _silver_array, True, "Silver (Tirkkonen-Hottinen) code T"),
    "sezginer": lambda: _closed_form("sezginer", _sezginer_array, True, "Sezginer-Sari code S"),
    "damen": lambda: _closed_form("damen", _damen_array, False, "Damen code D"),
    "silver_d": lambda: _closed_form("silver_d", lambda s: _derived_array("T", s), True, "Delay-tolerant U T V"),
    "sezginer_d": lambda: _closed_form("sezginer_d", lambda s: _derived_array("S", s), True, "Delay-tolerant U S V"),
    "alt2": lambda: _gamma_spec("alt2", FieldSpec.non_norm(), "2x2 delay-tolerant code, gamma=(3+2i)/(2+3i)"),
    "perfect3": lambda: _perfect_spec(3),
    "perfect4": lambda: _perfect_spec(4),
}

CODE_NAMES: List[str] = list(_BUILDERS)

_CACHE: Dict[str, CodeSpec] = {}


def get_code(name: str) -> CodeSpec:
    """
    Look up a code by registry name.

    Raises:
        UnknownCodeError: if the name is not registered
    """
    if name not in _BUILDERS:
        raise UnknownCodeError(name)
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


def list_codes() -> List[CodeSpec]:
    return [get_code(name) for name in CODE_NAMES]
