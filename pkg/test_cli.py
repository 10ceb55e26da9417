#!/usr/bin/env python3
"""
Tests for the command-line front end (exit codes, outputs, run config).
"""

import logging

import numpy as np
import pandas as pd
import pytest

from codes.code_library import CODE_NAMES
from tools.cli import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    RunConfig,
    attach_log_file,
    parse_and_dispatch,
    parse_args,
    unit_alphabet,
)


def test_list_prints_every_code(capsys):
    assert parse_and_dispatch(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in CODE_NAMES:
        assert name in out


def test_certify_delay_exit_codes(tmp_path):
    golden = tmp_path / "golden.txt"
    gamma2 = tmp_path / "gamma2.txt"
    assert parse_and_dispatch(
        ["certify-delay", "--code", "golden", "--dmax", "1", "--quiet", "--output", str(golden)]
    ) == EXIT_VIOLATION
    assert parse_and_dispatch(
        ["certify-delay", "--code", "gamma2", "--dmax", "1", "--quiet", "--output", str(gamma2)]
    ) == EXIT_OK
    assert "FAIL" in golden.read_text(encoding="utf-8")
    assert "PASS" in gamma2.read_text(encoding="utf-8")


def test_certify_delay_single_profile(tmp_path):
    out = tmp_path / "delay.txt"
    status = parse_and_dispatch(
        ["certify-delay", "--code", "golden", "--delay", "0,0", "--quiet", "--output", str(out)]
    )
    assert status == EXIT_OK


def test_usage_errors():
    assert parse_and_dispatch(["certify-delay", "--code", "platinum", "--quiet"]) == EXIT_USAGE
    assert parse_and_dispatch(["frobnicate"]) == EXIT_USAGE
    assert parse_and_dispatch(["simulate", "--snr", "10:4:2"]) == EXIT_USAGE
    assert parse_and_dispatch(["certify-delay", "--delay", "1,x"]) == EXIT_USAGE
    assert parse_and_dispatch(["certify-nvd", "--quiet"]) == EXIT_USAGE
    assert parse_and_dispatch(["simulate", "--preset", "no_such_preset", "--quiet"]) == EXIT_USAGE


def test_prodist_requires_tensor_code(tmp_path):
    out = tmp_path / "prodist.txt"
    assert parse_and_dispatch(["prodist", "--code", "golden", "--quiet", "--output", str(out)]) == EXIT_USAGE
    assert parse_and_dispatch(["prodist", "--code", "gamma2", "--quiet", "--output", str(out)]) == EXIT_OK
    assert "metric=min_prod_dist" in out.read_text(encoding="utf-8")


def test_prodist_gamma4_passes(tmp_path):
    out = tmp_path / "prodist_gamma4.txt"
    status = parse_and_dispatch(
        ["prodist", "--code", "gamma4", "--budget", "2000", "--quiet", "--output", str(out)]
    )
    assert status == EXIT_OK
    assert "violations=0" in out.read_text(encoding="utf-8")


def test_unit_alphabet():
    assert len(unit_alphabet("gaussian")) == 5
    units = unit_alphabet("eisenstein")
    assert len(units) == 7
    np.testing.assert_allclose(np.abs(units[1:]), 1.0)


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "sim.csv"
    status = parse_and_dispatch([
        "simulate", "--code", "gamma2,golden", "--snr", "0:2:2", "--delay", "1,0",
        "--max-codewords", "32", "--min-errors", "1000", "--threads", "1",
        "--quiet", "--output", str(out),
    ])
    assert status == EXIT_OK
    df = pd.read_csv(out)
    assert sorted(df["code"].unique()) == ["gamma2", "golden"]
    assert len(df) == 4
    assert (df["codewords"] == 32).all()


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("STC_SEED", "77")
    assert parse_args(["list"]).seed == 77
    assert parse_args(["list", "--seed", "3"]).seed == 3


def test_run_config_yaml_round_trip():
    cfg = parse_args(["simulate", "--code", "gamma2,golden", "--delay", "1,0", "--snr", "4:8:2"])
    restored = RunConfig.from_yaml(cfg.to_yaml())
    assert restored == cfg
    assert restored.codes == ["gamma2", "golden"]
    assert restored.delay == [1, 0]
    assert restored.snr == (4.0, 8.0, 2.0)


def test_log_file_receives_records(tmp_path):
    path = tmp_path / "logs" / "stc.log"
    handler = attach_log_file(path)
    try:
        logging.getLogger("tools.cli").warning("certify-delay finished")
        handler.flush()
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()
    assert "certify-delay finished" in path.read_text(encoding="utf-8")
