#!/usr/bin/env python3
"""
Tests for MMSE-DFE preprocessing and the sphere decoder.
"""

import math

import numpy as np
import pytest

from codes.code_library import get_code
from codes.constellation import qam
from delay.delay_model import DelayProfile
from simulator.link_simulator import ChannelRealization, effective_channel
from simulator.sphere_decoder import exhaustive_search, mmse_dfe_preprocess, sphere_decode

LEVELS4 = np.array([-3.0, -1.0, 1.0, 3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(21)


# =============================================================================
# PREPROCESSING
# =============================================================================

def test_identity_channel():
    sigma2 = 0.3
    _, R = mmse_dfe_preprocess(np.eye(4), sigma2)
    np.testing.assert_allclose(R, math.sqrt(1 + sigma2) * np.eye(4), atol=1e-12)


def test_singular_channel_gives_nonsingular_r(rng):
    heff = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 4))
    _, R = mmse_dfe_preprocess(heff, 0.1)
    assert np.all(np.diag(R) > 0)
    np.testing.assert_allclose(np.tril(R, -1), 0, atol=1e-12)


def test_small_noise_matches_plain_qr(rng):
    heff = rng.standard_normal((8, 4))
    _, R = mmse_dfe_preprocess(heff, 1e-14)
    _, r_plain = np.linalg.qr(heff)
    r_plain = r_plain * np.sign(np.diag(r_plain))[:, None]
    np.testing.assert_allclose(R, r_plain, atol=1e-6)


def test_preprocess_is_batched(rng):
    heff = rng.standard_normal((5, 6, 3))
    forward, R = mmse_dfe_preprocess(heff, 0.2)
    assert forward.shape == (5, 3, 6)
    assert R.shape == (5, 3, 3)
    gram = np.swapaxes(R, -1, -2) @ R
    expected = np.swapaxes(heff, -1, -2) @ heff + 0.2 * np.eye(3)
    np.testing.assert_allclose(gram, expected, atol=1e-10)


def test_preprocess_rejects_non_positive_noise():
    with pytest.raises(ValueError):
        mmse_dfe_preprocess(np.eye(2), 0.0)


# =============================================================================
# DECODING
# =============================================================================

def test_sphere_matches_exhaustive_on_augmented_system(rng):
    p, n, sigma2 = 4, 6, 0.5
    for _ in range(1000):
        heff = rng.standard_normal((n, p))
        s = rng.choice(LEVELS4, size=p)
        y = heff @ s + math.sqrt(sigma2) * rng.standard_normal(n)
        forward, R = mmse_dfe_preprocess(heff, sigma2)
        decoded = sphere_decode(forward @ y, R, LEVELS4)
        augmented_y = np.concatenate([y, np.zeros(p)])
        augmented_h = np.vstack([heff, math.sqrt(sigma2) * np.eye(p)])
        np.testing.assert_array_equal(decoded, exhaustive_search(augmented_y, augmented_h, LEVELS4))


def test_noiseless_recovery(rng):
    for _ in range(50):
        heff = rng.standard_normal((8, 6))
        s = rng.choice(LEVELS4, size=6)
        forward, R = mmse_dfe_preprocess(heff, 1e-12)
        np.testing.assert_array_equal(sphere_decode(forward @ (heff @ s), R, LEVELS4), s)


def test_per_coordinate_alphabets():
    R = np.eye(2)
    decoded = sphere_decode(np.array([0.9, 0.4]), R, [np.array([-1.0, 1.0]), np.array([-0.5, 0.5])])
    np.testing.assert_array_equal(decoded, [1.0, 0.5])
    with pytest.raises(ValueError):
        sphere_decode(np.zeros(2), R, [np.array([-1.0, 1.0])])


def test_radius_too_small_returns_none():
    assert sphere_decode(np.array([0.0, 0.0]), np.eye(2), np.array([-1.0, 1.0]), radius=0.5) is None


def test_singular_r_rejected():
    with pytest.raises(ValueError):
        sphere_decode(np.zeros(2), np.diag([1.0, 0.0]), np.array([-1.0, 1.0]))


@pytest.mark.parametrize("name", ["gamma2", "golden", "silver", "damen"])
@pytest.mark.parametrize("delays", [(0, 0), (1, 0)], ids=["sync", "delay1"])
def test_mmse_dfe_sphere_agrees_with_ml_on_code_channels(rng, name, delays):
    code = get_code(name)
    levels = qam(4).levels
    profile = DelayProfile(delays)
    sigma2 = 0.4
    trials, agree = 300, 0
    for _ in range(trials):
        heff = effective_channel(code, ChannelRealization.draw(rng, 2, 2), profile)
        s = rng.choice(levels, size=heff.shape[1])
        y = heff @ s + math.sqrt(sigma2) * rng.standard_normal(heff.shape[0])
        forward, R = mmse_dfe_preprocess(heff, sigma2 / float(np.mean(levels ** 2)))
        decoded = sphere_decode(forward @ y, R, levels)
        agree += np.array_equal(decoded, exhaustive_search(y, heff, levels))
    assert agree >= 0.99 * trials
