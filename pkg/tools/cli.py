"""
Command-line front end for the delay-tolerant space-time code toolkit.

Subcommands:
- list:           registered codes with dimensions and rates
- certify-nvd:    minimum determinant across constellation sizes
- certify-delay:  full rank of shifted difference matrices
- prodist:        minimum product distance of a code's lattice generator
- simulate:       Monte Carlo BER/CER sweep, written as CSV

Exit status: 0 success, 1 certification violation found, 2 usage error.

Usage:
    python -m tools.cli list
    python -m tools.cli certify-delay --code gamma2 --dmax 1 --q 4
    python -m tools.cli simulate --code gamma2,golden --snr 4:20:2 --delay 1,0
"""

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.config import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_SNR_RANGE,
    LOG_FILE,
    LOG_FORMAT,
    LOG_LEVEL,
    MAX_CODEWORDS,
    MAX_THREADS,
    MIN_ERRORS,
    get_certification_report_path,
    get_simulation_csv_path,
    load_experiment_presets,
)
from algebra.field_constructor import min_product_distance_bound
from codes.code_library import CODE_NAMES, UnknownCodeError, get_code
from codes.constellation import J, constellation_for_field, difference_alphabet
from delay.delay_model import DelayProfile, DelayToleranceCertifier
from metrics.algebraic_metrics import (
    MetricReportWriter,
    min_product_distance,
    nvd_observed,
    nvd_sweep,
)
from simulator.link_simulator import (
    SimConfig,
    code_rate_bpcu,
    run_simulation,
    save_results_csv,
    snr_range,
)

# Configure logging
logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

SUBCOMMANDS = ("list", "certify-nvd", "certify-delay", "prodist", "simulate")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Flag values that parse but make no sense together."""


# =============================================================================
# RUN CONFIG
# =============================================================================

@dataclass
class RunConfig:
    """Parsed command line; serializable for provenance."""
    subcommand: str
    codes: List[str] = field(default_factory=list)
    q: int = 4
    sizes: List[int] = field(default_factory=lambda: [4, 16])
    d_max: Optional[int] = None
    delay: Optional[List[int]] = None
    budget: int = DEFAULT_BUDGET
    seed: int = DEFAULT_SEED
    snr: Tuple[float, float, float] = DEFAULT_SNR_RANGE
    n_r: Optional[int] = None
    min_errors: int = MIN_ERRORS
    max_codewords: int = MAX_CODEWORDS
    output: Optional[str] = None
    threads: int = MAX_THREADS
    preset: Optional[str] = None
    alphabet: str = "units"
    quiet: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["snr"] = list(self.snr)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        data = dict(data)
        if "snr" in data and data["snr"] is not None:
            data["snr"] = tuple(float(v) for v in data["snr"])
        return cls(**data)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_yaml(cls, text: str) -> "RunConfig":
        return cls.from_dict(yaml.safe_load(text))


# =============================================================================
# PARSING
# =============================================================================

def _parse_snr(text: str) -> Tuple[float, float, float]:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got '{text}'")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"invalid SNR range '{text}'")
    return start, stop, step


def _parse_delay(text: str) -> List[int]:
    try:
        return list(DelayProfile.parse(text).delays)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _parse_int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    seed_default = int(os.environ.get("STC_SEED", DEFAULT_SEED))

    parser = argparse.ArgumentParser(
        prog="stc",
        description="Delay-tolerant distributed space-time codes: certification and simulation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  List registered codes:
    python -m tools.cli list

  Certify delay tolerance over every profile with d_max <= 1:
    python -m tools.cli certify-delay --code gamma2 --dmax 1 --q 4

  NVD floors for 4- and 16-QAM:
    python -m tools.cli certify-nvd --code gamma2,golden --sizes 4,16

  Asynchronous BER/CER sweep:
    python -m tools.cli simulate --code gamma2,golden --snr 4:20:2 --delay 1,0

  Reproduce a preset comparison:
    python -m tools.cli simulate --preset async_2x2 --threads 4
        """,
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="Action to run")
    parser.add_argument("--code", type=str, default="", help="Comma-separated code names")
    parser.add_argument("--q", type=int, default=4, choices=(4, 16), help="Constellation size")
    parser.add_argument("--sizes", type=_parse_int_list, default=[4, 16], help="certify-nvd sizes, e.g. 4,16")
    parser.add_argument("--dmax", type=int, default=None, help="Enumerate all delay profiles up to this delay")
    parser.add_argument("--delay", type=_parse_delay, default=None, help="Delay profile d1,d2,...")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Sampled difference vectors")
    parser.add_argument("--seed", type=int, default=seed_default, help="Random seed (env STC_SEED)")
    parser.add_argument("--snr", type=_parse_snr, default=DEFAULT_SNR_RANGE, help="Eb/N0 grid start:stop:step (dB)")
    parser.add_argument("--nr", type=int, default=None, help="Receive antennas")
    parser.add_argument("--min-errors", type=int, default=MIN_ERRORS, help="Codeword errors per SNR point")
    parser.add_argument("--max-codewords", type=int, default=MAX_CODEWORDS, help="Codeword cap per SNR point")
    parser.add_argument("--output", type=str, default=None, help="Report / CSV path (overwritten)")
    parser.add_argument("--threads", type=int, default=MAX_THREADS, help="Worker processes")
    parser.add_argument("--preset", type=str, default=None, help="Named experiment from config_simulation.yaml")
    parser.add_argument("--alphabet", choices=("units", "diff"), default="units",
                        help="prodist alphabet: lattice units {0, +-1, ...} or constellation differences")
    parser.add_argument("--quiet", action="store_true", help="No progress bars, warnings only")
    return parser


def parse_args(argv: List[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    codes = [c.strip() for c in args.code.split(",") if c.strip()]
    return RunConfig(
        subcommand=args.subcommand,
        codes=codes,
        q=args.q,
        sizes=args.sizes,
        d_max=args.dmax,
        delay=args.delay,
        budget=args.budget,
        seed=args.seed,
        snr=tuple(args.snr),
        n_r=args.nr,
        min_errors=args.min_errors,
        max_codewords=args.max_codewords,
        output=args.output,
        threads=args.threads,
        preset=args.preset,
        alphabet=args.alphabet,
        quiet=args.quiet,
    )


def _require_codes(cfg: RunConfig):
    if not cfg.codes:
        raise UsageError(f"{cfg.subcommand} needs --code")
    for name in cfg.codes:
        get_code(name)


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_list(cfg: RunConfig) -> int:
    print("=" * 60)
    print("REGISTERED CODES")
    print("=" * 60)
    for name in CODE_NAMES:
        spec = get_code(name)
        rate = code_rate_bpcu(spec, 4)
        print(f"{name:12s} {spec.M}x{spec.T} k={spec.k:2d} {spec.base_field:10s} "
              f"R(q=4)={rate:.1f} bpcu  {spec.description}")
    return EXIT_OK


def cmd_certify_nvd(cfg: RunConfig) -> int:
    _require_codes(cfg)
    writer = MetricReportWriter("NVD CERTIFICATION")
    all_reports = []
    failed = False
    for name in cfg.codes:
        spec = get_code(name)
        reports = nvd_sweep(spec, cfg.sizes, budget=cfg.budget, seed=cfg.seed, show_progress=not cfg.quiet)
        all_reports.extend(reports)
        ok = nvd_observed(reports) and all(r.violations == 0 for r in reports)
        failed |= not ok
        print(f"{'✅' if ok else '❌'} {name}: " + ", ".join(f"q={r.extra['q']}: {r.value:.6e}" for r in reports))
    writer.build(all_reports)
    output = Path(cfg.output) if cfg.output else get_certification_report_path("nvd_" + "_".join(cfg.codes))
    writer.save_report(output)
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_certify_delay(cfg: RunConfig) -> int:
    _require_codes(cfg)
    lines: List[str] = []
    failed = False
    for name in cfg.codes:
        spec = get_code(name)
        diffs = difference_alphabet(constellation_for_field(spec.base_field, cfg.q))
        if cfg.delay is not None:
            certifier = DelayToleranceCertifier(
                spec, diffs, profiles=[DelayProfile(tuple(cfg.delay))],
                budget=cfg.budget, seed=cfg.seed, show_progress=not cfg.quiet,
            )
        else:
            d_max = 1 if cfg.d_max is None else cfg.d_max
            certifier = DelayToleranceCertifier(
                spec, diffs, d_max=d_max,
                budget=cfg.budget, seed=cfg.seed, show_progress=not cfg.quiet,
            )
        report = certifier.run()
        lines.extend(certifier.report_lines)
        failed |= not report.passed
        status = "✅ delay tolerant" if report.passed else f"❌ {report.total_violations} violations"
        print(f"{status}: {name} [{report.search}, {len(report.profiles)} profiles]")

    output = Path(cfg.output) if cfg.output else get_certification_report_path("delay_" + "_".join(cfg.codes))
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text("\n".join(lines), encoding="utf-8")
    logger.info(f"Report saved to {output}")
    return EXIT_VIOLATION if failed else EXIT_OK


def unit_alphabet(base_field: str) -> np.ndarray:
    """0 and the units of Z[i] ({+-1, +-i}) or Z[j] ({+-1, +-j, +-j^2})."""
    if base_field == "eisenstein":
        units = [1, -1, J, -J, J * J, -J * J]
    else:
        units = [1, -1, 1j, -1j]
    return np.array([0] + units, dtype=np.complex128)


def cmd_prodist(cfg: RunConfig) -> int:
    _require_codes(cfg)
    writer = MetricReportWriter("MINIMUM PRODUCT DISTANCE")
    reports = []
    failed = False
    for name in cfg.codes:
        spec = get_code(name)
        if not spec.is_gamma:
            raise UsageError(f"prodist needs a tensor-product code, {name} has no lattice generator")
        if cfg.alphabet == "units":
            diffs = unit_alphabet(spec.base_field)
        else:
            diffs = difference_alphabet(constellation_for_field(spec.base_field, cfg.q))
        report = min_product_distance(
            spec.generators, diffs, budget=cfg.budget, seed=cfg.seed,
            name=name, show_progress=not cfg.quiet,
        )
        report.extra["bound"] = min_product_distance_bound(spec.generators.spec)
        reports.append(report)
        failed |= report.violations > 0
        print(f"{'✅' if report.violations == 0 else '❌'} {name}: d_p,min = {report.value:.6e} "
              f"(discriminant bound {report.extra['bound']:.6e}) [{report.search}]")
    writer.build(reports)
    output = Path(cfg.output) if cfg.output else get_certification_report_path("prodist_" + "_".join(cfg.codes))
    writer.save_report(output)
    return EXIT_VIOLATION if failed else EXIT_OK


def _apply_preset(cfg: RunConfig) -> RunConfig:
    presets = load_experiment_presets()
    if cfg.preset not in presets:
        raise UsageError(f"Unknown preset '{cfg.preset}'. Known presets: {', '.join(presets)}")
    preset = presets[cfg.preset]
    cfg.codes = list(preset["codes"])
    cfg.q = int(preset.get("q", cfg.q))
    cfg.delay = list(preset["delay"]) if preset.get("delay") is not None else None
    if preset.get("snr") is not None:
        cfg.snr = tuple(float(v) for v in preset["snr"])
    cfg.n_r = preset.get("n_r", cfg.n_r)
    return cfg


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.preset:
        cfg = _apply_preset(cfg)
    _require_codes(cfg)
    grid = snr_range(*cfg.snr)
    results = []
    for name in cfg.codes:
        spec = get_code(name)
        sim_cfg = SimConfig(
            code=name,
            snr_grid=grid,
            n_r=cfg.n_r,
            constellation=constellation_for_field(spec.base_field, cfg.q),
            delay=DelayProfile(tuple(cfg.delay)) if cfg.delay else None,
            min_errors=cfg.min_errors,
            max_codewords=cfg.max_codewords,
            seed=cfg.seed,
            threads=cfg.threads,
            show_progress=not cfg.quiet,
        )
        results.append(run_simulation(sim_cfg))
    name = cfg.preset or "_".join(cfg.codes)
    output = Path(cfg.output) if cfg.output else get_simulation_csv_path(name)
    save_results_csv(results, output)
    print(f"📊 {len(results)} codes x {len(grid)} SNR points -> {output}")
    return EXIT_OK


COMMANDS = {
    "list": cmd_list,
    "certify-nvd": cmd_certify_nvd,
    "certify-delay": cmd_certify_delay,
    "prodist": cmd_prodist,
    "simulate": cmd_simulate,
}


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    """
    Parse argv, run the subcommand, and return the exit status.

    Returns:
        0 on success, 1 if a certification violation was found, 2 on usage
        errors (bad flags, unknown code or preset) and unexpected failures
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if cfg.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        return COMMANDS[cfg.subcommand](cfg)
    except UnknownCodeError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except ValueError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"❌ Unexpected failure in {cfg.subcommand}: {e}")
        return EXIT_USAGE


def attach_log_file(path: Path = LOG_FILE) -> logging.FileHandler:
    """Mirror log records into a file next to the console output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def main():
    attach_log_file()
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
