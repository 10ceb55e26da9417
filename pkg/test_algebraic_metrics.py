#!/usr/bin/env python3
"""
Tests for determinant, product distance, cofactor and minor sweeps.
"""

import math

import numpy as np
import pytest

from algebra.field_constructor import FieldSpec, GeneratorSet, build_generators, min_product_distance_bound
from codes.code_library import get_code
from codes.constellation import difference_alphabet, hex_constellation, qam
from metrics.algebraic_metrics import (
    MetricReportWriter,
    cofactor_nonzero_check,
    min_determinant,
    min_product_distance,
    minor2_check_gamma4,
    nvd_observed,
    nvd_sweep,
    single_unit_minors,
)
from metrics.difference_search import DifferenceSearch

UNITS = np.array([0, 1, -1, 1j, -1j])
QAM4_DIFFS = difference_alphabet(qam(4))


# =============================================================================
# DIFFERENCE SEARCH
# =============================================================================

def test_search_modes():
    assert DifferenceSearch(QAM4_DIFFS, 4).describe() == "exhaustive(6560)"
    sampled = DifferenceSearch(QAM4_DIFFS, 16, budget=100)
    assert sampled.mode == "sampled"
    assert sampled.total == 16 * 8 + 120 * 64 + 100
    assert sum(len(c) for c in sampled.chunks()) == sampled.total
    assert DifferenceSearch(QAM4_DIFFS, 9, max_weight=1).total == 72


def test_search_never_yields_zero_vector():
    search = DifferenceSearch(QAM4_DIFFS, 16, budget=5000, seed=1)
    for block in search.chunks():
        assert np.all(np.any(block != 0, axis=1))


def test_search_rejects_bad_alphabets():
    with pytest.raises(ValueError):
        DifferenceSearch([0], 4)
    with pytest.raises(ValueError):
        DifferenceSearch([1, -1], 4)
    with pytest.raises(ValueError):
        DifferenceSearch([0, 1], 4)


def test_sampled_search_is_seeded():
    a = np.concatenate(list(DifferenceSearch(QAM4_DIFFS, 16, budget=300, seed=9).chunks()))
    b = np.concatenate(list(DifferenceSearch(QAM4_DIFFS, 16, budget=300, seed=9).chunks()))
    np.testing.assert_array_equal(a, b)


# =============================================================================
# DETERMINANTS
# =============================================================================

def test_gamma2_and_golden_min_det_match():
    g2 = min_determinant(get_code("gamma2"), QAM4_DIFFS)
    g = min_determinant(get_code("golden"), QAM4_DIFFS)
    assert g2.value == pytest.approx(g.value, rel=1e-9)
    assert g2.violations == 0
    assert g2.value > 0
    assert g2.value == pytest.approx(3.2, rel=1e-9)


def test_min_det_scales_with_alphabet():
    base = min_determinant(get_code("gamma2"), UNITS)
    scaled = min_determinant(get_code("gamma2"), 2 * UNITS)
    assert scaled.value == pytest.approx(16 * base.value, rel=1e-9)


def test_min_det_threshold_follows_symbol_scale():
    base = min_determinant(get_code("gamma2"), UNITS)
    tiny = min_determinant(get_code("gamma2"), 1e-4 * UNITS)
    assert tiny.violations == 0
    assert tiny.value == pytest.approx(1e-16 * base.value, rel=1e-6)


@pytest.mark.slow
def test_gamma3_min_det_floor():
    diffs = difference_alphabet(hex_constellation(4))
    report = min_determinant(get_code("gamma3"), diffs, budget=10 ** 6, seed=1)
    assert report.value >= 1 / 49 - 1e-9
    assert report.violations == 0


@pytest.mark.slow
def test_gamma4_min_det_floor():
    report = min_determinant(get_code("gamma4"), QAM4_DIFFS, budget=10 ** 6, seed=1)
    assert report.value >= 1 / 1125 - 1e-9
    assert report.violations == 0


@pytest.mark.slow
def test_gamma3_cofactors_nonzero_sampled():
    diffs = difference_alphabet(hex_constellation(4))
    report = cofactor_nonzero_check(get_code("gamma3"), diffs, budget=10 ** 5, seed=2)
    assert report.violations == 0


def test_min_det_rejects_zero_only_alphabet():
    with pytest.raises(ValueError):
        min_determinant(get_code("gamma2"), [0])


def test_nvd_sweep_gamma2():
    reports = nvd_sweep(get_code("gamma2"), [4])
    assert reports[0].extra["q"] == 4
    assert nvd_observed(reports)
    with pytest.raises(ValueError):
        nvd_sweep(get_code("gamma2"), [16, 4])


@pytest.mark.slow
@pytest.mark.parametrize("name", ["gamma2", "golden"])
def test_nvd_floor_holds_from_4_to_16_qam(name):
    reports = nvd_sweep(get_code(name), [4, 16])
    assert [r.search for r in reports] == ["exhaustive(6560)", "exhaustive(5764800)"]
    for r in reports:
        assert r.value == pytest.approx(3.2, rel=1e-9)
        assert r.violations == 0
    assert nvd_observed(reports)


def test_nvd_observed_rules():
    class R:
        def __init__(self, value):
            self.value = value

    assert nvd_observed([R(0.2), R(0.2)])
    assert not nvd_observed([R(0.2), R(0.0)])
    assert not nvd_observed([])


# =============================================================================
# PRODUCT DISTANCE
# =============================================================================

def test_gamma2_product_distance_over_units():
    gens = build_generators(FieldSpec.perfect(2))
    report = min_product_distance(gens, UNITS, name="gamma2")
    assert report.value == pytest.approx(1 / 20, rel=1e-9)
    assert report.violations == 0


def test_gamma4_product_distance_meets_bound():
    spec = FieldSpec.perfect(4)
    report = min_product_distance(build_generators(spec), UNITS, budget=2000, seed=3, name="gamma4")
    bound = min_product_distance_bound(spec)
    assert bound < 1e-10
    assert report.violations == 0
    assert report.value >= bound * (1 - 1e-9)


def test_product_distance_threshold_follows_symbol_scale():
    gens = build_generators(FieldSpec.perfect(2))
    report = min_product_distance(gens, 1e-3 * UNITS, name="gamma2")
    assert report.violations == 0
    assert report.value == pytest.approx(1e-12 / 20, rel=1e-6)


def test_product_distance_flags_vanishing_coordinates():
    eye2 = np.eye(2, dtype=np.complex128)
    gens = GeneratorSet(m1=eye2, m2=eye2, m=np.eye(4, dtype=np.complex128), normalization=(1.0, 1.0))
    report = min_product_distance(gens, UNITS, name="identity")
    assert report.value == 0.0
    # nonzero vectors in {0, +-1, +-i}^4 with at least one zero entry
    assert report.violations == 5 ** 4 - 4 ** 4 - 1


@pytest.mark.slow
def test_gamma3_product_distance_over_units():
    gens = build_generators(FieldSpec.perfect(3))
    units = difference_alphabet(hex_constellation(4))
    report = min_product_distance(gens, units, name="gamma3")
    assert report.value >= 1 / math.sqrt(49 ** 3 * 27 ** 3) * (1 - 1e-6)


# =============================================================================
# COFACTORS / MINORS
# =============================================================================

def test_gamma3_cofactors_nonzero_at_weight_one():
    diffs = difference_alphabet(hex_constellation(4))
    report = cofactor_nonzero_check(get_code("gamma3"), diffs, max_weight=1)
    assert report.violations == 0
    assert report.search == "weight<=1(72)"


def test_gamma4_cofactors_nonzero_at_weight_one():
    report = cofactor_nonzero_check(get_code("gamma4"), QAM4_DIFFS, max_weight=1)
    assert report.violations == 0


def test_gamma4_cofactors_nonzero_sampled():
    report = cofactor_nonzero_check(get_code("gamma4"), QAM4_DIFFS, budget=2000, seed=4)
    assert report.search == f"sampled({16 * 8 + 120 * 64 + 2000})"
    assert report.violations == 0


@pytest.mark.slow
def test_gamma4_cofactors_nonzero_large_sample():
    report = cofactor_nonzero_check(get_code("gamma4"), QAM4_DIFFS, budget=10 ** 5, seed=5)
    assert report.violations == 0


def test_cofactor_check_rejects_2x2():
    with pytest.raises(ValueError):
        cofactor_nonzero_check(get_code("gamma2"), QAM4_DIFFS)


def test_single_unit_minors_of_gamma4_mask():
    minors = single_unit_minors(get_code("gamma4").phi)
    assert minors
    phi = get_code("gamma4").phi
    for rows, cols in minors:
        block = phi[np.ix_(rows, cols)]
        assert np.sum(np.isclose(np.abs(block.imag), 1.0)) == 1


def test_gamma4_minor2_at_weight_one():
    report = minor2_check_gamma4(QAM4_DIFFS, max_weight=1)
    assert report.violations == 0
    assert report.extra["minors"] == len(single_unit_minors(get_code("gamma4").phi))


# =============================================================================
# REPORT WRITER
# =============================================================================

def test_metric_report_writer(tmp_path):
    reports = nvd_sweep(get_code("gamma2"), [4])
    writer = MetricReportWriter("NVD SWEEP: gamma2")
    lines = writer.build(reports)
    assert any("code=gamma2 q=4 metric=min_det" in line for line in lines)
    path = writer.save_report(tmp_path / "nvd.txt")
    assert path.read_text(encoding="utf-8").count("metric=min_det") == 1


def test_gamma4_minor2_sampled():
    report = minor2_check_gamma4(QAM4_DIFFS, budget=2000, seed=6)
    assert report.search == f"sampled({16 * 8 + 120 * 64 + 2000})"
    assert report.violations == 0


def test_minor2_threshold_follows_symbol_scale():
    base = minor2_check_gamma4(QAM4_DIFFS, max_weight=1)
    tiny = minor2_check_gamma4(1e-5 * QAM4_DIFFS, max_weight=1)
    assert tiny.violations == 0
    assert tiny.value == pytest.approx(1e-10 * base.value, rel=1e-6)
