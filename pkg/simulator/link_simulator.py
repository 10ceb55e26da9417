"""
Relay -> Destination Link Simulator

Monte Carlo BER / CER of a distributed space-time code over a quasi-static
Rayleigh channel, with synchronous or fixed-delay asynchronous relays.

Features:
- Real-valued effective channel built from the code's dispersion matrices,
  so conjugating codes (Silver, Sezginer-Sari and their U X V versions) use
  the same decoder as the linear ones
- MMSE-DFE preprocessing + Schnorr-Euchner sphere decoding
- Eb/N0 per receive antenna with Eb = E[||X||_F^2] / (bits per codeword)
- Seeded sub-streams per (seed, SNR index, batch index): parallel and serial
  runs give identical counts
- Clopper-Pearson intervals and ordering checks between two codes
- CSV output (code, snr_db, codewords, bit_errors, cw_errors, ber, cer)

Usage:
    python -m simulator.link_simulator --code gamma2 --delay 1,0 --snr 4:20:2
"""

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats
from tqdm import tqdm

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import (
    BATCH_SIZE,
    CONFIDENCE_LEVEL,
    DEFAULT_SEED,
    DEFAULT_SNR_RANGE,
    LOG_FORMAT,
    LOG_LEVEL,
    MAX_CODEWORDS,
    MAX_THREADS,
    MIN_ERRORS,
    SIM_CSV_COLUMNS,
    get_simulation_csv_path,
)
from codes.code_library import CodeSpec, get_code
from codes.constellation import Constellation, constellation_for_field, get_constellation
from delay.delay_model import DelayProfile, shift_rows
from simulator.sphere_decoder import mmse_dfe_preprocess, sphere_decode

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)


# =============================================================================
# DATA CLASSES
# =============================================================================

@dataclass
class ChannelRealization:
    """N_r x M i.i.d. CN(0, 1) fading, constant over one codeword."""
    h: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator, n_r: int, m: int) -> "ChannelRealization":
        h = (rng.standard_normal((n_r, m)) + 1j * rng.standard_normal((n_r, m))) / math.sqrt(2)
        return cls(h)


@dataclass
class SimConfig:
    """
    One Monte Carlo experiment.

    n_r defaults to 2 for 2x2 codes and M otherwise; the constellation to
    4-QAM / 4-HEX matching the code's base field; the delay to synchronous.
    noise_var, when set, fixes the per-real-dimension noise variance and
    ignores the SNR grid values.
    """
    code: str
    snr_grid: Sequence[float] = field(default_factory=lambda: snr_range(*DEFAULT_SNR_RANGE))
    n_r: Optional[int] = None
    constellation: Optional[Constellation] = None
    delay: Optional[DelayProfile] = None
    min_errors: int = MIN_ERRORS
    max_codewords: int = MAX_CODEWORDS
    seed: int = DEFAULT_SEED
    threads: int = MAX_THREADS
    batch_size: int = BATCH_SIZE
    noise_var: Optional[float] = None
    show_progress: bool = True

    def __post_init__(self):
        spec = get_code(self.code)
        if self.n_r is None:
            self.n_r = 2 if spec.M == 2 else spec.M
        if self.constellation is None:
            self.constellation = constellation_for_field(spec.base_field, 4)
        if self.delay is None:
            self.delay = DelayProfile.synchronous(spec.M)
        self.snr_grid = [float(v) for v in self.snr_grid]
        if self.min_errors < 1:
            raise ValueError(f"min_errors must be >= 1, got {self.min_errors}")
        if self.max_codewords < 1:
            raise ValueError(f"max_codewords must be >= 1, got {self.max_codewords}")
        if not self.snr_grid:
            raise ValueError("snr_grid is empty")
        if self.n_r < 1:
            raise ValueError(f"n_r must be >= 1, got {self.n_r}")
        if self.delay.M != spec.M:
            raise ValueError(f"Delay profile {self.delay} does not match M={spec.M} of {self.code}")
        if self.constellation.base_field != spec.base_field:
            raise ValueError(
                f"{self.constellation.q}-{self.constellation.kind} cannot carry {self.code} "
                f"(code is built over the {spec.base_field} integers)"
            )
        if self.noise_var is not None and self.noise_var <= 0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")

    @property
    def spec(self) -> CodeSpec:
        return get_code(self.code)


@dataclass
class SimPoint:
    snr_db: float
    codewords: int
    bit_errors: int
    cw_errors: int
    bits_per_codeword: int

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.codewords * self.bits_per_codeword) if self.codewords else 0.0

    @property
    def cer(self) -> float:
        return self.cw_errors / self.codewords if self.codewords else 0.0

    def ber_interval(self, level: float = CONFIDENCE_LEVEL) -> Tuple[float, float]:
        return clopper_pearson(self.bit_errors, self.codewords * self.bits_per_codeword, level)

    def cer_interval(self, level: float = CONFIDENCE_LEVEL) -> Tuple[float, float]:
        return clopper_pearson(self.cw_errors, self.codewords, level)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "snr_db": self.snr_db,
            "codewords": self.codewords,
            "bit_errors": self.bit_errors,
            "cw_errors": self.cw_errors,
            "ber": self.ber,
            "cer": self.cer,
        }


@dataclass
class SimResult:
    code: str
    rate_bpcu: float
    points: List[SimPoint] = field(default_factory=list)

    def point(self, snr_db: float) -> SimPoint:
        for p in self.points:
            if math.isclose(p.snr_db, snr_db):
                return p
        raise KeyError(f"No point at {snr_db} dB for {self.code}")

    def to_dataframe(self) -> pd.DataFrame:
        rows = [{"code": self.code, **p.to_dict()} for p in self.points]
        return pd.DataFrame(rows, columns=SIM_CSV_COLUMNS)


# =============================================================================
# RATES / INTERVALS
# =============================================================================

def snr_range(start: float, stop: float, step: float) -> List[float]:
    """Inclusive grid start:stop:step (dB)."""
    if step <= 0:
        raise ValueError(f"SNR step must be positive, got {step}")
    if stop < start:
        raise ValueError(f"SNR stop {stop} is below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def code_rate_bpcu(code: CodeSpec, q: int, d_max: int = 0) -> float:
    """k log2(q) / (T + d_max) bits per channel use."""
    return code.k * math.log2(q) / (code.T + d_max)


def clopper_pearson(errors: int, trials: int, level: float = CONFIDENCE_LEVEL) -> Tuple[float, float]:
    """Exact binomial confidence interval for errors / trials."""
    if trials <= 0:
        return 0.0, 1.0
    alpha = 1.0 - level
    lo = 0.0 if errors == 0 else float(stats.beta.ppf(alpha / 2, errors, trials - errors + 1))
    hi = 1.0 if errors == trials else float(stats.beta.ppf(1 - alpha / 2, errors + 1, trials - errors))
    return lo, hi


def compare_orderings(
    a: SimResult,
    b: SimResult,
    snr_db: float,
    metric: str = "ber",
    level: float = CONFIDENCE_LEVEL,
) -> Dict[str, Any]:
    """
    Compare two codes at one SNR point.

    Returns:
        dict with both intervals, `disjoint` (intervals do not overlap) and
        `a_better` (a's interval lies entirely below b's)
    """
    if metric not in ("ber", "cer"):
        raise ValueError(f"metric must be 'ber' or 'cer', got {metric}")
    pa, pb = a.point(snr_db), b.point(snr_db)
    ia = pa.ber_interval(level) if metric == "ber" else pa.cer_interval(level)
    ib = pb.ber_interval(level) if metric == "ber" else pb.cer_interval(level)
    return {
        "snr_db": snr_db,
        "metric": metric,
        a.code: ia,
        b.code: ib,
        "disjoint": ia[1] < ib[0] or ib[1] < ia[0],
        "a_better": ia[1] < ib[0],
    }


# =============================================================================
# EFFECTIVE CHANNEL
# =============================================================================

def _realify(v: np.ndarray) -> np.ndarray:
    """Stack [Re; Im] along the last axis."""
    return np.concatenate([v.real, v.imag], axis=-1)


def shifted_dispersion(code: CodeSpec, d: DelayProfile, basis=(1.0, 1j), scale: float = 1.0) -> np.ndarray:
    """(2k, M, T + d_max) shifted codewords of the unit real coordinates."""
    return shift_rows(code.dispersion_matrices(basis) * scale, d)


def effective_channel(
    code: CodeSpec,
    h: ChannelRealization,
    d: DelayProfile,
    basis=(1.0, 1j),
    scale: float = 1.0,
) -> np.ndarray:
    """
    Real (2 N_r (T + d_max)) x 2k map from symbol coordinates to the stacked
    received block.

    Coordinate 2n + t scales basis[t] in symbol n; the received N_r x
    (T + d_max) block is flattened row-major, real parts above imaginary.
    """
    h = h.h if isinstance(h, ChannelRealization) else np.asarray(h)
    return _effective_batch(h[None], shifted_dispersion(code, d, basis, scale))[0]


def _effective_batch(h: np.ndarray, disp: np.ndarray) -> np.ndarray:
    received = np.einsum("bnm,jmt->bjnt", h, disp)
    received = received.reshape(received.shape[0], received.shape[1], -1)
    return np.swapaxes(_realify(received), -1, -2)


def codeword_energy(code: CodeSpec, c: Constellation) -> float:
    """
    E ||X||_F^2 for uniform unit-energy symbols.

    Symbol coordinates are independent and zero mean, so the energy is the
    coordinate variance times the summed dispersion energies.
    """
    disp = code.dispersion_matrices(c.basis)
    coord_var = float(np.mean(c.levels ** 2)) * c.scale ** 2
    return coord_var * float(np.sum(np.abs(disp) ** 2))


# =============================================================================
# BATCH WORKER
# =============================================================================

@dataclass(frozen=True)
class BatchTask:
    code: str
    kind: str
    q: int
    delays: Tuple[int, ...]
    n_r: int
    seed: int
    snr_index: int
    batch_index: int
    size: int
    sigma2: float


@lru_cache(maxsize=32)
def _link_setup(code_name: str, kind: str, q: int, delays: Tuple[int, ...]):
    code = get_code(code_name)
    c = get_constellation(kind, q)
    profile = DelayProfile(delays)
    disp = shifted_dispersion(code, profile, c.basis, c.scale)
    return code, c, profile, disp


def _simulate_batch(task: BatchTask) -> Tuple[int, int, int]:
    """Run one seeded batch; returns (codewords, bit_errors, cw_errors)."""
    code, c, profile, disp = _link_setup(task.code, task.kind, task.q, task.delays)
    rng = np.random.default_rng(np.random.SeedSequence([task.seed, task.snr_index, task.batch_index]))
    size, k = task.size, code.k

    # transmit
    idx = rng.integers(0, c.q, size=(size, k))
    x = shift_rows(code.encode_batch(c.points[idx] * c.scale), profile)
    h = (rng.standard_normal((size, task.n_r, code.M)) + 1j * rng.standard_normal((size, task.n_r, code.M))) / math.sqrt(2)
    noise_shape = (size, task.n_r, x.shape[-1])
    sigma = math.sqrt(task.sigma2)
    w = sigma * (rng.standard_normal(noise_shape) + 1j * rng.standard_normal(noise_shape))
    y = _realify((h @ x + w).reshape(size, -1))

    # receive
    heff = _effective_batch(h, disp)
    reg = task.sigma2 / float(np.mean(c.levels ** 2))
    forward, R = mmse_dfe_preprocess(heff, reg)
    r = np.einsum("bpn,bn->bp", forward, y)

    decoded = np.empty((size, 2 * k))
    for b in range(size):
        decoded[b] = sphere_decode(r[b], R[b], c.levels)

    level_idx = np.argmin(np.abs(decoded[..., None] - c.levels), axis=-1).reshape(size, k, 2)
    idx_hat = c.index_of_coords(level_idx[..., 0], level_idx[..., 1])
    bit_errors = int(np.sum(c.labels[idx] != c.labels[idx_hat]))
    cw_errors = int(np.sum(np.any(idx != idx_hat, axis=1)))
    return size, bit_errors, cw_errors


# =============================================================================
# SIMULATOR
# =============================================================================

class LinkSimulator:
    """
    Runs a SimConfig SNR point by SNR point.

    Batches are generated in waves of `threads` tasks and folded in batch
    order, so the stopping point (and hence every count) does not depend on
    the number of workers.
    """

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.code = cfg.spec
        self.constellation = cfg.constellation
        self.bits_per_codeword = self.code.k * self.constellation.bits_per_symbol
        self.rate = code_rate_bpcu(self.code, self.constellation.q, cfg.delay.d_max)
        self.energy = codeword_energy(self.code, self.constellation)
        self.stats = {"codewords": 0, "batches": 0, "snr_points": 0}

    def noise_variance(self, snr_db: float) -> float:
        """Per-real-dimension variance N0 / 2 for an Eb/N0 in dB."""
        if self.cfg.noise_var is not None:
            return self.cfg.noise_var
        eb = self.energy / self.bits_per_codeword
        n0 = eb / (10.0 ** (snr_db / 10.0))
        return n0 / 2.0

    def _tasks(self, snr_index: int, sigma2: float, first_batch: int, count: int, done: int) -> List[BatchTask]:
        cfg = self.cfg
        tasks = []
        for b in range(first_batch, first_batch + count):
            size = min(cfg.batch_size, cfg.max_codewords - done)
            if size <= 0:
                break
            done += size
            tasks.append(BatchTask(
                code=cfg.code,
                kind=self.constellation.kind,
                q=self.constellation.q,
                delays=cfg.delay.delays,
                n_r=cfg.n_r,
                seed=cfg.seed,
                snr_index=snr_index,
                batch_index=b,
                size=size,
                sigma2=sigma2,
            ))
        return tasks

    def run_point(self, snr_index: int, snr_db: float, pool: Optional[Any] = None) -> SimPoint:
        cfg = self.cfg
        sigma2 = self.noise_variance(snr_db)
        point = SimPoint(snr_db, 0, 0, 0, self.bits_per_codeword)
        wave = max(1, cfg.threads)
        batch = 0
        while point.cw_errors < cfg.min_errors and point.codewords < cfg.max_codewords:
            tasks = self._tasks(snr_index, sigma2, batch, wave, point.codewords)
            if not tasks:
                break
            outcomes = pool.map(_simulate_batch, tasks) if pool is not None else map(_simulate_batch, tasks)
            for n, bit_err, cw_err in outcomes:
                if point.cw_errors >= cfg.min_errors:
                    break
                point.codewords += n
                point.bit_errors += bit_err
                point.cw_errors += cw_err
                self.stats["batches"] += 1
            batch += len(tasks)
        self.stats["codewords"] += point.codewords
        self.stats["snr_points"] += 1
        return point

    def run(self) -> SimResult:
        cfg = self.cfg
        result = SimResult(code=cfg.code, rate_bpcu=self.rate)
        logger.info(
            f"Simulating {cfg.code}: {self.constellation.q}-{self.constellation.kind}, "
            f"N_r={cfg.n_r}, delay={cfg.delay}, R={self.rate:.4f} bpcu"
        )
        grid = list(enumerate(cfg.snr_grid))
        if cfg.show_progress:
            grid = tqdm(grid, desc=f"simulate {cfg.code}", unit="snr")

        pool = Pool(cfg.threads) if cfg.threads > 1 else None
        try:
            for i, snr_db in grid:
                point = self.run_point(i, snr_db, pool)
                result.points.append(point)
                logger.info(
                    f"  {cfg.code} @ {snr_db:5.1f} dB: {point.codewords} codewords, "
                    f"BER={point.ber:.3e} CER={point.cer:.3e}"
                )
        finally:
            if pool is not None:
                pool.close()
                pool.join()
        return result


def run_simulation(cfg: SimConfig) -> SimResult:
    """Monte Carlo BER / CER of one code over the configured SNR grid."""
    return LinkSimulator(cfg).run()


def results_to_dataframe(results: Sequence[SimResult]) -> pd.DataFrame:
    frames = [r.to_dataframe() for r in results]
    if not frames:
        return pd.DataFrame(columns=SIM_CSV_COLUMNS)
    return pd.concat(frames, ignore_index=True)


def save_results_csv(results: Sequence[SimResult], output_path: Path) -> Path:
    """Write all results to one CSV (overwrites)."""
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    results_to_dataframe(results).to_csv(output_path, index=False)
    logger.info(f"Results saved to {output_path}")
    return output_path


def main():
    """Main entry point for a single-code simulation."""
    parser = argparse.ArgumentParser(
        description="Monte Carlo BER/CER of a distributed space-time code",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    python -m simulator.link_simulator --code gamma2 --delay 1,0 --snr 4:20:2
    python -m simulator.link_simulator --code gamma3 --q 4 --delay 2,1,0 --threads 4
        """,
    )
    parser.add_argument("--code", type=str, required=True, help="Registered code name")
    parser.add_argument("--q", type=int, default=4, help="Constellation size")
    parser.add_argument("--delay", type=str, default=None, help="Delay profile d1,d2,...")
    parser.add_argument("--snr", type=str, default="4:20:2", help="Eb/N0 grid start:stop:step (dB)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    parser.add_argument("--threads", type=int, default=MAX_THREADS, help="Worker processes")
    parser.add_argument("--output", type=str, default=None, help="CSV path")
    args = parser.parse_args()

    spec = get_code(args.code)
    start, stop, step = (float(v) for v in args.snr.split(":"))
    cfg = SimConfig(
        code=args.code,
        snr_grid=snr_range(start, stop, step),
        constellation=constellation_for_field(spec.base_field, args.q),
        delay=DelayProfile.parse(args.delay) if args.delay else None,
        seed=args.seed,
        threads=args.threads,
    )
    result = run_simulation(cfg)
    save_results_csv([result], Path(args.output) if args.output else get_simulation_csv_path(args.code))


if __name__ == "__main__":
    main()
