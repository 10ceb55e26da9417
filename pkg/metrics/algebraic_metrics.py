"""
Algebraic Metrics

Brute-force oracles over nonzero difference vectors:
- minimum squared determinant |det X(ds)|^2 (and its behaviour as the
  constellation grows, i.e. the non-vanishing determinant property)
- minimum product distance prod_k |(M ds)_k| of a lattice generator
- non-vanishing cofactor (adjugate) entries of 3x3 / 4x4 codewords
- non-vanishing 2x2 minors of the 4x4 code carrying one +-i coefficient

Values are computed on unnormalized lattice symbols. Each sweep follows the
DifferenceSearch policy (exhaustive when small, else low weight + sampled).

Usage:
    python -m metrics.algebraic_metrics --code gamma2 --q 4 16
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import (
    CONSTANT_TOL,
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    LOG_FORMAT,
    LOG_LEVEL,
    RANK_TOL,
    get_certification_report_path,
)
from algebra.field_constructor import GeneratorSet
from algebra.linalg_core import adjugate
from codes.code_library import CodeSpec, get_code
from codes.constellation import constellation_for_field, difference_alphabet
from metrics.difference_search import DifferenceSearch

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


@dataclass
class MetricReport:
    """Minimum of one metric over the tested difference vectors."""
    code: str
    metric: str
    value: float
    argmin: List[complex]
    search: str
    violations: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "code": self.code,
            "metric": self.metric,
            "value": self.value,
            "argmin": [str(v) for v in self.argmin],
            "search": self.search,
            "violations": self.violations,
            **self.extra,
        }


class _MinTracker:
    def __init__(self, k: int):
        self.value = float("inf")
        self.argmin = np.zeros(k, dtype=np.complex128)
        self.violations = 0

    def update(self, values: np.ndarray, ds: np.ndarray, zero: Optional[np.ndarray] = None):
        i = int(np.argmin(values))
        if values[i] < self.value:
            self.value = float(values[i])
            self.argmin = ds[i].copy()
        if zero is not None:
            self.violations += int(zero.sum())


def _sweep(search: DifferenceSearch, show_progress: bool, desc: str):
    chunks = search.chunks()
    if show_progress:
        chunks = tqdm(chunks, desc=desc, unit="chunk")
    return chunks


# =============================================================================
# DETERMINANT
# =============================================================================

def min_determinant(
    code: CodeSpec,
    diffs,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    show_progress: bool = False,
) -> MetricReport:
    """
    min |det X(ds)|^2 over nonzero difference vectors.

    Raises:
        ValueError: if the code is not square or the alphabet has no nonzero value
    """
    if code.M != code.T:
        raise ValueError(f"{code.name} is {code.M}x{code.T}; the determinant needs M == T")
    search = DifferenceSearch(diffs, code.k, budget=budget, seed=seed)
    tracker = _MinTracker(code.k)
    for ds in _sweep(search, show_progress, f"min-det {code.name}"):
        x = code.encode_batch(ds)
        dets = np.abs(np.linalg.det(x)) ** 2
        # Hadamard bound (||X||_F^2 / M)^M sets the scale of |det|^2
        scale = (np.sum(np.abs(x) ** 2, axis=(1, 2)) / code.M) ** code.M
        tracker.update(dets, ds, zero=dets <= RANK_TOL * scale)
    return MetricReport(
        code=code.name,
        metric="min_det",
        value=tracker.value,
        argmin=tracker.argmin.tolist(),
        search=search.describe(),
        violations=tracker.violations,
    )


def nvd_sweep(
    code: CodeSpec,
    sizes: Sequence[int],
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    show_progress: bool = False,
) -> List[MetricReport]:
    """
    min_determinant for each constellation size q.

    Raises:
        ValueError: if sizes are not ascending
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError(f"Constellation sizes must be ascending, got {sizes}")
    reports = []
    for q in sizes:
        diffs = difference_alphabet(constellation_for_field(code.base_field, q))
        report = min_determinant(code, diffs, budget=budget, seed=seed, show_progress=show_progress)
        report.extra["q"] = q
        reports.append(report)
        logger.info(f"{code.name} q={q}: min |det|^2 = {report.value:.6e} [{report.search}]")
    return reports


def nvd_observed(reports: Sequence[MetricReport], tol: float = CONSTANT_TOL) -> bool:
    """True iff the minima never increase with q and stay positive."""
    values = [r.value for r in reports]
    if not values:
        return False
    non_increasing = all(b <= a + tol for a, b in zip(values, values[1:]))
    return non_increasing and min(values) > tol


# =============================================================================
# PRODUCT DISTANCE
# =============================================================================

def min_product_distance(
    gen: GeneratorSet,
    diffs,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    name: str = "",
    show_progress: bool = False,
) -> MetricReport:
    """min over nonzero ds of prod_k |(m ds)_k|."""
    k = gen.m.shape[1]
    search = DifferenceSearch(diffs, k, budget=budget, seed=seed)
    tracker = _MinTracker(k)
    for ds in _sweep(search, show_progress, f"prodist {name}"):
        coords = np.abs(ds @ gen.m.T)
        dp = np.prod(coords, axis=-1)
        # m is unitary, so each |coordinate| is at most ||ds||; the product
        # vanishes only through a vanishing coordinate
        norms = np.linalg.norm(ds, axis=-1)
        tracker.update(dp, ds, zero=coords.min(axis=-1) <= RANK_TOL * norms)
    return MetricReport(
        code=name or f"M={gen.dimension}",
        metric="min_prod_dist",
        value=tracker.value,
        argmin=tracker.argmin.tolist(),
        search=search.describe(),
        violations=tracker.violations,
    )


# =============================================================================
# COFACTORS AND MINORS
# =============================================================================

def cofactor_nonzero_check(
    code: CodeSpec,
    diffs,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    max_weight: Optional[int] = None,
    show_progress: bool = False,
) -> MetricReport:
    """
    min over ds of the smallest |entry| of adj(X(ds)); violations count the
    vectors with a vanishing entry.

    Raises:
        ValueError: for M not in {3, 4}
    """
    if code.M not in (3, 4) or code.M != code.T:
        raise ValueError(f"Cofactor check is defined for 3x3 and 4x4 codes, got {code.name}")
    search = DifferenceSearch(diffs, code.k, budget=budget, seed=seed, max_weight=max_weight)
    tracker = _MinTracker(code.k)
    for ds in _sweep(search, show_progress, f"cofactor {code.name}"):
        adj = np.abs(adjugate(code.encode_batch(ds))).reshape(len(ds), -1)
        smallest = adj.min(axis=1)
        tracker.update(smallest, ds, zero=smallest <= RANK_TOL * adj.max(axis=1))
    return MetricReport(
        code=code.name,
        metric="min_cofactor",
        value=tracker.value,
        argmin=tracker.argmin.tolist(),
        search=search.describe(),
        violations=tracker.violations,
    )


def single_unit_minors(phi: np.ndarray) -> List[tuple]:
    """
    (rows, cols) of the 2x2 submatrices whose mask holds exactly one +-i.
    """
    m = phi.shape[0]
    selected = []
    for rows in combinations(range(m), 2):
        for cols in combinations(range(m), 2):
            block = phi[np.ix_(rows, cols)]
            if int(np.sum(np.isclose(np.abs(block.imag), 1.0))) == 1:
                selected.append((rows, cols))
    return selected


def minor2_check_gamma4(
    diffs,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    max_weight: Optional[int] = None,
    show_progress: bool = False,
) -> MetricReport:
    """min |minor| over the single-(+-i) 2x2 minors of gamma4."""
    code = get_code("gamma4")
    minors = single_unit_minors(code.phi)
    search = DifferenceSearch(diffs, code.k, budget=budget, seed=seed, max_weight=max_weight)
    tracker = _MinTracker(code.k)
    for ds in _sweep(search, show_progress, "minor2 gamma4"):
        x = code.encode_batch(ds)
        values = np.stack(
            [
                np.abs(x[:, r0, c0] * x[:, r1, c1] - x[:, r0, c1] * x[:, r1, c0])
                for (r0, r1), (c0, c1) in minors
            ],
            axis=1,
        )
        smallest = values.min(axis=1)
        # a 2x2 minor scales like the squared entries
        scale = np.max(np.abs(x), axis=(1, 2)) ** 2
        tracker.update(smallest, ds, zero=smallest <= RANK_TOL * scale)
    return MetricReport(
        code=code.name,
        metric="min_minor",
        value=tracker.value,
        argmin=tracker.argmin.tolist(),
        search=search.describe(),
        violations=tracker.violations,
        extra={"minors": len(minors)},
    )


# =============================================================================
# REPORTING
# =============================================================================

class MetricReportWriter:
    """Structured text report for a list of MetricReport records."""

    def __init__(self, title: str):
        self.title = title
        self.report_lines: List[str] = []

    def _add_report_line(self, line: str = ""):
        self.report_lines.append(line)

    def _add_report_section(self, title: str):
        self._add_report_line()
        self._add_report_line("=" * 60)
        self._add_report_line(title)
        self._add_report_line("=" * 60)

    def build(self, reports: Sequence[MetricReport]) -> List[str]:
        self.report_lines = []
        self._add_report_section(self.title)
        for r in reports:
            q = f" q={r.extra['q']}" if "q" in r.extra else ""
            self._add_report_line(
                f"code={r.code}{q} metric={r.metric} value={r.value:.12e} "
                f"search={r.search} violations={r.violations}"
            )
            self._add_report_line(f"    argmin = {np.round(r.argmin, 6).tolist()}")
        return self.report_lines

    def save_report(self, output_path: Path) -> Path:
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write("\n".join(self.report_lines))
        logger.info(f"Report saved to {output_path}")
        return output_path


def main():
    """Main entry point: NVD sweep for one code."""
    parser = argparse.ArgumentParser(
        description="Minimum determinant of a code across constellation sizes",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    python -m metrics.algebraic_metrics --code gamma2 --q 4 16
    python -m metrics.algebraic_metrics --code gamma3 --q 4 --budget 100000
        """,
    )
    parser.add_argument("--code", type=str, required=True, help="Registered code name")
    parser.add_argument("--q", type=int, nargs="+", default=[4], help="Constellation sizes")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Sampled vectors")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Sampling seed")
    args = parser.parse_args()

    code = get_code(args.code)
    reports = nvd_sweep(code, args.q, budget=args.budget, seed=args.seed, show_progress=True)
    writer = MetricReportWriter(f"NVD SWEEP: {code.name}")
    writer.build(reports)
    writer.save_report(get_certification_report_path(f"nvd_{code.name}"))
    print("✅ NVD observed" if nvd_observed(reports) else "❌ determinant vanishes")


if __name__ == "__main__":
    main()
