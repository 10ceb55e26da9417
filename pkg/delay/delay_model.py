"""
Delay Model for Asynchronous Relays

Relay i starts transmitting d_i symbol periods after the earliest relay. The
destination sees the M x T codeword as an M x (T + d_max) matrix whose row i
has d_i leading zeros and d_max - d_i trailing zeros. A code is delay
tolerant when every shifted nonzero difference matrix keeps rank M.

Features:
- DelayProfile with classification into the 4x4 profile types
  (1, 2, 3I, 3II, 4) and "sync"
- Enumeration of every profile up to a maximum delay
- Vectorized rank certification over difference vectors, with a structured
  text report (one record per profile)

Usage:
    python -m delay.delay_model --code gamma2 --dmax 1 --q 4
    python -m delay.delay_model --code golden --delay 1,0
"""

import argparse
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    LOG_FORMAT,
    LOG_LEVEL,
    RANK_TOL,
    get_certification_report_path,
)
from codes.code_library import CodeSpec, Codeword, get_code
from codes.constellation import constellation_for_field, difference_alphabet
from metrics.difference_search import DifferenceSearch

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

# One representative per 4x4 profile type
REPRESENTATIVE_PROFILES = {
    "1": (0, 1, 2, 3),
    "2": (0, 0, 1, 3),
    "3I": (2, 2, 0, 0),
    "3II": (1, 1, 0, 0),
    "4": (0, 0, 0, 1),
}

# Violating vectors kept per profile in the report
MAX_EXAMPLES = 5


# =============================================================================
# DATA CLASSES
# =============================================================================

@dataclass(frozen=True)
class DelayProfile:
    """Integer relative delays, one per relay row; min entry is 0."""
    delays: Tuple[int, ...]

    def __post_init__(self):
        delays = tuple(int(d) for d in self.delays)
        object.__setattr__(self, "delays", delays)
        if not delays:
            raise ValueError("Delay profile is empty")
        if min(delays) < 0:
            raise ValueError(f"Delays must be non-negative, got {delays}")
        if min(delays) != 0:
            raise ValueError(f"Delays are relative to the earliest relay; min must be 0, got {delays}")

    @classmethod
    def parse(cls, text: str) -> "DelayProfile":
        """Parse the `d1,d2,...` flag syntax."""
        try:
            return cls(tuple(int(tok) for tok in text.split(",")))
        except ValueError as e:
            raise ValueError(f"Malformed delay profile '{text}': {e}") from e

    @classmethod
    def synchronous(cls, m: int) -> "DelayProfile":
        return cls((0,) * m)

    @property
    def M(self) -> int:
        return len(self.delays)

    @property
    def d_max(self) -> int:
        return max(self.delays)

    def __str__(self) -> str:
        return "(" + ",".join(str(d) for d in self.delays) + ")"


@dataclass
class ShiftedCodeword:
    matrix: np.ndarray
    profile: DelayProfile


@dataclass
class ProfileResult:
    """Certification outcome for one delay profile."""
    profile: DelayProfile
    profile_type: str
    vectors_tested: int = 0
    min_sigma: float = float("inf")
    violations: int = 0
    examples: List[List[complex]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "profile": list(self.profile.delays),
            "type": self.profile_type,
            "vectors_tested": self.vectors_tested,
            "min_sigma": self.min_sigma,
            "violations": self.violations,
            "examples": [[str(v) for v in ex] for ex in self.examples],
        }


@dataclass
class DelayCertificationReport:
    code: str
    search: str
    profiles: List[ProfileResult] = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return sum(p.violations for p in self.profiles)

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    @property
    def min_sigma(self) -> float:
        return min((p.min_sigma for p in self.profiles), default=float("inf"))

    def profile_types(self) -> List[str]:
        return sorted({p.profile_type for p in self.profiles})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "code": self.code,
            "search": self.search,
            "passed": self.passed,
            "total_violations": self.total_violations,
            "profiles": [p.to_dict() for p in self.profiles],
        }


# =============================================================================
# SHIFTING
# =============================================================================

def shift_rows(x: np.ndarray, profile: DelayProfile) -> np.ndarray:
    """Row-shift a batch of codewords (..., M, T) -> (..., M, T + d_max)."""
    x = np.asarray(x)
    m, t = x.shape[-2:]
    if profile.M != m:
        raise ValueError(f"Delay profile has {profile.M} entries but the codeword has {m} rows")
    out = np.zeros(x.shape[:-1] + (t + profile.d_max,), dtype=np.complex128)
    for i, d in enumerate(profile.delays):
        out[..., i, d:d + t] = x[..., i, :]
    return out


def apply_delay(x: Union[Codeword, np.ndarray], d: DelayProfile) -> ShiftedCodeword:
    """
    Zero-pad each row by its delay.

    Raises:
        ValueError: if the profile length differs from the number of rows
    """
    matrix = x.matrix if isinstance(x, Codeword) else np.asarray(x)
    if matrix.ndim != 2:
        raise ValueError(f"apply_delay expects one M x T codeword, got shape {matrix.shape}")
    return ShiftedCodeword(matrix=shift_rows(matrix, d), profile=d)


# =============================================================================
# PROFILES
# =============================================================================

def classify_profile(d: DelayProfile) -> str:
    """
    Profile type by the equality pattern of the delays.

    All equal -> "sync". For M = 4: all distinct -> "1", one pair -> "2",
    two pairs -> "3I" (values 2 or 3 apart) / "3II" (1 apart), a triple -> "4".
    Other asynchronous profiles of M != 4 are "async".
    """
    counts = sorted(Counter(d.delays).values(), reverse=True)
    if len(counts) == 1:
        return "sync"
    if d.M != 4:
        return "async"
    if counts == [1, 1, 1, 1]:
        return "1"
    if counts == [2, 1, 1]:
        return "2"
    if counts == [2, 2]:
        return "3II" if d.d_max == 1 else "3I"
    return "4"


def enumerate_profiles(m: int, d_max: int) -> List[DelayProfile]:
    """All vectors in {0..d_max}^M containing at least one 0."""
    if d_max < 0:
        raise ValueError(f"d_max must be >= 0, got {d_max}")
    return [
        DelayProfile(delays)
        for delays in product(range(d_max + 1), repeat=m)
        if min(delays) == 0
    ]


def representative_profiles() -> Dict[str, DelayProfile]:
    """One 4-relay profile for each of the types 1, 2, 3I, 3II, 4."""
    return {name: DelayProfile(d) for name, d in REPRESENTATIVE_PROFILES.items()}


# =============================================================================
# CERTIFICATION
# =============================================================================

class DelayToleranceCertifier:
    """
    Checks numerical_rank(shift(encode(ds), d)) == M over a difference search.

    The rank test uses the M-th singular value against RANK_TOL * sigma_max,
    which is the linalg_core.numerical_rank rule applied to a whole batch.
    """

    def __init__(
        self,
        code: CodeSpec,
        diffs,
        d_max: Optional[int] = None,
        profiles: Optional[Sequence[DelayProfile]] = None,
        budget: int = DEFAULT_BUDGET,
        seed: int = DEFAULT_SEED,
        show_progress: bool = True,
    ):
        """
        Args:
            code: code under test
            diffs: difference alphabet (contains 0, closed under negation)
            d_max: certify every profile with entries <= d_max
            profiles: explicit profiles (used when d_max is None)
            budget: random difference vectors when the space is too large
            seed: sampling seed
            show_progress: tqdm bar over difference chunks
        """
        if profiles is None:
            profiles = enumerate_profiles(code.M, 0 if d_max is None else d_max)
        for p in profiles:
            if p.M != code.M:
                raise ValueError(f"Profile {p} does not match M={code.M} of {code.name}")
        self.code = code
        self.profiles = list(profiles)
        self.search = DifferenceSearch(diffs, code.k, budget=budget, seed=seed)
        self.show_progress = show_progress
        self.report_lines: List[str] = []

    def _add_report_line(self, line: str = ""):
        self.report_lines.append(line)

    def _add_report_section(self, title: str):
        self._add_report_line()
        self._add_report_line("=" * 60)
        self._add_report_line(title)
        self._add_report_line("=" * 60)

    def run(self) -> DelayCertificationReport:
        """Sweep all difference vectors against all profiles."""
        report = DelayCertificationReport(code=self.code.name, search=self.search.describe())
        results = [ProfileResult(p, classify_profile(p)) for p in self.profiles]
        m = self.code.M

        logger.info(
            f"Certifying {self.code.name}: {len(self.profiles)} profiles, "
            f"search {self.search.describe()}"
        )
        chunks = self.search.chunks()
        if self.show_progress:
            chunks = tqdm(chunks, desc=f"certify-delay {self.code.name}", unit="chunk")

        for ds in chunks:
            x = self.code.encode_batch(ds)
            for res in results:
                s = np.linalg.svd(shift_rows(x, res.profile), compute_uv=False)
                sigma_m = s[:, m - 1]
                bad = sigma_m <= RANK_TOL * s[:, 0]
                res.vectors_tested += len(ds)
                res.min_sigma = min(res.min_sigma, float(sigma_m.min()))
                if bad.any():
                    res.violations += int(bad.sum())
                    room = MAX_EXAMPLES - len(res.examples)
                    res.examples.extend(ds[bad][:room].tolist())

        report.profiles = results
        self._build_report(report)

        status = "✅ delay tolerant" if report.passed else f"❌ {report.total_violations} rank violations"
        logger.info(f"{self.code.name}: {status}")
        return report

    def _build_report(self, report: DelayCertificationReport):
        self.report_lines = []
        self._add_report_section(f"DELAY-TOLERANCE CERTIFICATION: {report.code}")
        self._add_report_line(f"Search: {report.search}")
        self._add_report_line(f"Profiles: {len(report.profiles)}  types: {', '.join(report.profile_types())}")
        self._add_report_line(f"Result: {'PASS' if report.passed else 'FAIL'}")

        self._add_report_section("PER-PROFILE RECORDS")
        for res in report.profiles:
            self._add_report_line(
                f"profile={res.profile} type={res.profile_type} "
                f"vectors={res.vectors_tested} min_sigma_M={res.min_sigma:.6e} "
                f"violations={res.violations}"
            )
            for ex in res.examples:
                self._add_report_line(f"    violating ds = {np.round(ex, 6).tolist()}")

    def save_report(self, output_path: Optional[Path] = None) -> Path:
        """
        Save the report (overwrites).

        Args:
            output_path: defaults to reports/certification/delay_<code>.txt
        """
        if output_path is None:
            output_path = get_certification_report_path(f"delay_{self.code.name}")
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write("\n".join(self.report_lines))
        logger.info(f"Report saved to {output_path}")
        return output_path


def certify_delay_tolerance(
    code: CodeSpec,
    diffs,
    d_max: int,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    show_progress: bool = False,
) -> DelayCertificationReport:
    """Certify rank M for every profile with entries <= d_max."""
    certifier = DelayToleranceCertifier(
        code, diffs, d_max=d_max, budget=budget, seed=seed, show_progress=show_progress
    )
    return certifier.run()


def main():
    """Main entry point for a standalone certification run."""
    parser = argparse.ArgumentParser(
        description="Certify delay tolerance of a space-time code",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  All profiles up to one symbol of delay:
    python -m delay.delay_model --code gamma2 --dmax 1 --q 4

  One profile:
    python -m delay.delay_model --code golden --delay 1,0
        """,
    )
    parser.add_argument("--code", type=str, required=True, help="Registered code name")
    parser.add_argument("--q", type=int, default=4, help="Constellation size")
    parser.add_argument("--dmax", type=int, default=None, help="Enumerate all profiles up to this delay")
    parser.add_argument("--delay", type=str, default=None, help="Single profile d1,d2,...")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Sampled vectors")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Sampling seed")
    parser.add_argument("--output", type=str, default=None, help="Report path")
    args = parser.parse_args()

    code = get_code(args.code)
    diffs = difference_alphabet(constellation_for_field(code.base_field, args.q))
    profiles = [DelayProfile.parse(args.delay)] if args.delay else None
    certifier = DelayToleranceCertifier(
        code, diffs, d_max=args.dmax, profiles=profiles, budget=args.budget, seed=args.seed
    )
    report = certifier.run()
    certifier.save_report(Path(args.output) if args.output else None)
    sys.exit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
