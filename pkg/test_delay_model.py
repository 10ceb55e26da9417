#!/usr/bin/env python3
"""
Tests for delay profiles, row shifting and delay-tolerance certification.
"""

import numpy as np
import pytest

from codes.code_library import encode_golden, get_code
from codes.constellation import difference_alphabet, hex_constellation, qam
from delay.delay_model import (
    DelayProfile,
    DelayToleranceCertifier,
    apply_delay,
    certify_delay_tolerance,
    classify_profile,
    enumerate_profiles,
    representative_profiles,
    shift_rows,
)

QAM4_DIFFS = difference_alphabet(qam(4))


# =============================================================================
# PROFILES
# =============================================================================

def test_profile_validation():
    assert DelayProfile.parse("1,0").delays == (1, 0)
    assert DelayProfile.synchronous(3).d_max == 0
    with pytest.raises(ValueError):
        DelayProfile((1, 2))
    with pytest.raises(ValueError):
        DelayProfile((0, -1))
    with pytest.raises(ValueError):
        DelayProfile.parse("1,x")


@pytest.mark.parametrize(
    "delays,expected",
    [
        ((0, 0, 0, 0), "sync"),
        ((0, 1, 2, 3), "1"),
        ((0, 0, 1, 3), "2"),
        ((2, 2, 0, 0), "3I"),
        ((1, 1, 0, 0), "3II"),
        ((0, 0, 0, 1), "4"),
        ((1, 0), "async"),
        ((0, 0), "sync"),
    ],
)
def test_classify_profile(delays, expected):
    assert classify_profile(DelayProfile(delays)) == expected


def test_representative_profiles_have_their_type():
    for name, profile in representative_profiles().items():
        assert classify_profile(profile) == name


@pytest.mark.parametrize("m,d_max,count", [(2, 1, 3), (3, 2, 19), (4, 3, 175)])
def test_enumerate_profiles_count(m, d_max, count):
    profiles = enumerate_profiles(m, d_max)
    assert len(profiles) == count
    assert all(min(p.delays) == 0 for p in profiles)


def test_enumerate_profiles_rejects_negative():
    with pytest.raises(ValueError):
        enumerate_profiles(2, -1)


# =============================================================================
# SHIFTING
# =============================================================================

def test_apply_delay_examples():
    x = np.array([[1, 2], [3, 4]], dtype=complex)
    np.testing.assert_array_equal(apply_delay(x, DelayProfile((1, 0))).matrix, [[0, 1, 2], [3, 4, 0]])
    np.testing.assert_array_equal(apply_delay(x, DelayProfile((0, 0))).matrix, x)
    np.testing.assert_array_equal(apply_delay(x, DelayProfile((0, 2))).matrix, [[1, 2, 0, 0], [0, 0, 3, 4]])


def test_apply_delay_length_mismatch():
    with pytest.raises(ValueError):
        apply_delay(np.eye(2), DelayProfile((0, 1, 0)))


def test_shift_preserves_frobenius_norm():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((10, 4, 4)) + 1j * rng.standard_normal((10, 4, 4))
    for profile in enumerate_profiles(4, 2):
        shifted = shift_rows(x, profile)
        np.testing.assert_allclose(np.linalg.norm(shifted, axis=(1, 2)), np.linalg.norm(x, axis=(1, 2)))


def test_golden_loses_rank_under_delay():
    shifted = apply_delay(encode_golden([2, 0, 0, 0]), DelayProfile((1, 0)))
    assert np.linalg.matrix_rank(shifted.matrix) == 1


# =============================================================================
# CERTIFICATION
# =============================================================================

def test_golden_is_not_delay_tolerant():
    report = certify_delay_tolerance(get_code("golden"), QAM4_DIFFS, d_max=1)
    assert not report.passed
    by_profile = {p.profile.delays: p for p in report.profiles}
    assert by_profile[(0, 0)].passed
    assert by_profile[(1, 0)].violations > 0
    assert by_profile[(1, 0)].examples


def test_gamma2_is_delay_tolerant():
    report = certify_delay_tolerance(get_code("gamma2"), QAM4_DIFFS, d_max=1)
    assert report.passed
    assert report.search == "exhaustive(6560)"
    assert len(report.profiles) == 3
    assert all(p.vectors_tested == 6560 for p in report.profiles)
    assert report.min_sigma > 0


@pytest.mark.parametrize("name", ["silver_d", "sezginer_d", "alt2", "damen"])
def test_two_relay_codes_are_delay_tolerant(name):
    report = certify_delay_tolerance(get_code(name), QAM4_DIFFS, d_max=1)
    assert report.search == "exhaustive(6560)"
    assert report.passed
    assert report.min_sigma > 0.1


def test_gamma3_is_delay_tolerant_sampled():
    diffs = difference_alphabet(hex_constellation(4))
    report = certify_delay_tolerance(get_code("gamma3"), diffs, d_max=2, budget=2000, seed=7)
    assert report.search == f"sampled({9 * 8 + 36 * 64 + 2000})"
    assert len(report.profiles) == 19
    assert report.passed


def test_gamma4_representative_profiles():
    profiles = list(representative_profiles().values())
    certifier = DelayToleranceCertifier(
        get_code("gamma4"), QAM4_DIFFS, profiles=profiles, budget=2000, seed=8, show_progress=False
    )
    report = certifier.run()
    assert report.profile_types() == ["1", "2", "3I", "3II", "4"]
    assert report.passed


@pytest.mark.slow
def test_gamma3_is_delay_tolerant_large_sample():
    diffs = difference_alphabet(hex_constellation(4))
    report = certify_delay_tolerance(get_code("gamma3"), diffs, d_max=2, budget=10 ** 6, seed=9)
    assert report.passed


@pytest.mark.slow
def test_gamma4_is_delay_tolerant_up_to_three():
    report = certify_delay_tolerance(get_code("gamma4"), QAM4_DIFFS, d_max=3, budget=10 ** 5, seed=10)
    assert len(report.profiles) == 175
    assert {"1", "2", "3I", "3II", "4"} <= set(report.profile_types())
    assert report.passed


def test_certifier_rejects_mismatched_profile():
    with pytest.raises(ValueError):
        DelayToleranceCertifier(get_code("gamma2"), QAM4_DIFFS, profiles=[DelayProfile((0, 1, 0))])


def test_report_save_overwrites(tmp_path):
    certifier = DelayToleranceCertifier(
        get_code("golden"), QAM4_DIFFS, profiles=[DelayProfile((1, 0))], show_progress=False
    )
    certifier.run()
    path = tmp_path / "delay_golden.txt"
    certifier.save_report(path)
    first = path.read_text(encoding="utf-8")
    certifier.save_report(path)
    assert path.read_text(encoding="utf-8") == first
    assert "FAIL" in first
    assert "profile=(1,0)" in first
