import numpy as np
import pytest

from shotstego import codec
from shotstego.camera import SensorConfig, capture, capture_pair, make_scene
from shotstego.imageio import RawImage
from shotstego.stego import (
    StegoParams,
    collision_rate,
    default_usable_mask,
    embed,
    expected_collision_rate,
    extract,
)


def small_pair(seed=21, n=256, lam=10000, pattern="flat"):
    scene = make_scene(n, n, pattern, lam)
    return capture_pair(scene, SensorConfig(seed=seed))


def test_all_zero_bits_returns_key():
    key, cover = small_pair()
    params = StegoParams(block_pixels=1,
                         usable_mask=default_usable_mask(key, 50000))
    bits = np.zeros(params.capacity_bits(key), dtype=np.uint8)
    assert embed(key, cover, bits, params) == key


def test_all_one_bits_returns_cover():
    key, cover = small_pair()
    params = StegoParams(block_pixels=1)  # empty mask: every pixel usable
    bits = np.ones(key.pixel_count, dtype=np.uint8)
    assert embed(key, cover, bits, params) == cover


def test_every_stego_pixel_from_key_or_cover():
    """Exhaustive source check: the stego image never invents a value."""
    key, cover = small_pair(seed=33)
    params = StegoParams(block_pixels=1)
    bits = codec.keyed_filler_bits(key.pixel_count, 7)
    out = embed(key, cover, bits, params).pixels
    assert bool(np.all((out == key.pixels) | (out == cover.pixels)))
    chosen = np.where(bits.reshape(out.shape) == 1, cover.pixels, key.pixels)
    assert np.array_equal(out, chosen)


def test_extract_of_key_is_all_zeros():
    key, _ = small_pair(seed=40)
    params = StegoParams(block_pixels=1)
    decoded = extract(key, key, params)
    assert decoded.raw_mismatch_count == 0
    assert not decoded.bits.any()


def test_extract_recovers_bits_where_pixels_differ():
    """Residual error rate at g=1 equals the collision rate restricted to
    1-bits; direct count of agreeing pixels is the oracle."""
    key, cover = small_pair(seed=55, n=512)
    params = StegoParams(block_pixels=1)
    bits = codec.keyed_filler_bits(key.pixel_count, 99)
    stego_img = embed(key, cover, bits, params)
    got = extract(stego_img, key, params).bits
    differs = (key.pixels != cover.pixels).reshape(-1)
    expect = bits & differs
    assert np.array_equal(got, expect)
    ones = bits == 1
    ber = float(np.mean(got[ones] != bits[ones]))
    collisions = float(np.mean(key.pixels == cover.pixels))
    assert abs(ber - collisions) < 0.35 * collisions  # Monte Carlo tolerance


def test_group_mode_g16_error_free():
    """At g=16 a bit fails only if all 16 pixels collide: probability
    ~(2.8e-3)^16, so one million bits decode without a single error."""
    scene = make_scene(4096, 4096, "flat", 10000)
    key, cover = capture_pair(scene, SensorConfig(seed=60))
    params = StegoParams(block_pixels=16)
    n_bits = params.capacity_bits(key)
    assert n_bits == 4096 * 4096 // 16
    bits = codec.keyed_filler_bits(n_bits, 3)
    got = extract(embed(key, cover, bits, params), key, params).bits
    assert np.array_equal(got, bits)


def test_bit_error_rate_monotone_in_group_size():
    key, cover = small_pair(seed=70, n=1024)
    rates = []
    for g in (1, 2, 4, 16, 256):
        params = StegoParams(block_pixels=g)
        bits = codec.keyed_filler_bits(params.capacity_bits(key), g)
        got = extract(embed(key, cover, bits, params), key, params).bits
        rates.append(float(np.mean(got != bits)))
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[0] > 0
    assert rates[-1] == 0


def test_capacity_scaling_block_mode():
    key, _ = small_pair(seed=75, n=512)
    params = StegoParams(block_pixels=256)
    assert params.capacity_bits(key) == key.pixel_count // 256


def test_masked_pixels_copied_from_key():
    key, cover = small_pair(seed=80, n=64, lam=10000, pattern="pcb")
    mask = default_usable_mask(key, 50000)
    params = StegoParams(block_pixels=1, usable_mask=mask)
    bits = np.ones(params.capacity_bits(key), dtype=np.uint8)
    out = embed(key, cover, bits, params).pixels
    assert np.array_equal(out[~mask], key.pixels[~mask])


def test_default_mask_excludes_saturated_and_dark():
    key, _ = small_pair(seed=81, n=64, pattern="pcb")
    mask = default_usable_mask(key, 50000)
    assert not mask[key.pixels == 50000].any()
    assert not mask[key.pixels < 16].any()
    assert mask.any()


def test_embed_validates_lengths_and_dims():
    key, cover = small_pair(seed=82, n=32)
    params = StegoParams(block_pixels=1)
    with pytest.raises(ValueError):
        embed(key, cover, np.zeros(5, dtype=np.uint8), params)
    other = RawImage(width=16, height=16,
                     pixels=np.zeros((16, 16), dtype=np.uint16))
    with pytest.raises(ValueError):
        embed(key, other, np.zeros(key.pixel_count, dtype=np.uint8), params)
    with pytest.raises(ValueError):
        extract(other, key, params)


def test_collision_rate_identity_and_saturated():
    key, cover = small_pair(seed=83, n=64)
    assert collision_rate(key, key) == 1.0
    sat = RawImage(width=8, height=8,
                   pixels=np.full((8, 8), 50000, dtype=np.uint16))
    assert collision_rate(sat, sat) == 1.0


def test_collision_rate_flat_vs_analytic(flat_pair_1m, collision_oracle):
    key, cover = flat_pair_1m
    rate = collision_rate(key, cover)
    expect = collision_oracle(10000.0)
    assert abs(rate - expect) < 0.3 * expect


def test_expected_collision_rate_lambda_zero():
    assert expected_collision_rate(0.0) == 1.0


def test_expected_collision_rate_against_brute_force(collision_oracle):
    """Oracle: direct sum over k = 0..40 at lambda=1, and the asymptotic
    1 / (2 sqrt(pi lambda)) cross-check at lambda=1e4."""
    import math
    assert expected_collision_rate(1.0) == pytest.approx(collision_oracle(1.0, hi=40), rel=1e-9)
    assert expected_collision_rate(1.0) == pytest.approx(0.3085083, abs=2e-7)
    assert expected_collision_rate(10000.0) == pytest.approx(collision_oracle(10000.0), rel=1e-6)
    assert expected_collision_rate(10000.0) == pytest.approx(
        1.0 / (2.0 * math.sqrt(math.pi * 10000.0)), rel=1e-3)


def test_wrong_key_bits_carry_no_payload(collision_oracle):
    """Extracting with an unrelated capture yields almost all ones (the
    fraction of zeros is just the collision rate) and is independent of the
    true bits: plug-in mutual information stays below 0.01 bit/bit."""
    scene = make_scene(512, 512, "flat", 10000)
    sensor = SensorConfig(seed=90)
    key, cover = capture_pair(scene, sensor)
    third = capture(scene, sensor, 2)
    params = StegoParams(block_pixels=1)
    bits = codec.keyed_filler_bits(key.pixel_count, 17)
    stego_img = embed(key, cover, bits, params)
    leaked = extract(stego_img, third, params).bits
    ones = float(np.mean(leaked))
    assert abs(ones - (1.0 - collision_oracle(10000.0))) < 5e-4
    mi = _plugin_mi(bits, leaked)
    assert mi < 0.01


def _plugin_mi(a: np.ndarray, b: np.ndarray) -> float:
    joint = np.zeros((2, 2))
    for i in (0, 1):
        for j in (0, 1):
            joint[i, j] = np.sum((a == i) & (b == j))
    joint /= joint.sum()
    pa, pb = joint.sum(1), joint.sum(0)
    mi = 0.0
    for i in (0, 1):
        for j in (0, 1):
            if joint[i, j] > 0:
                mi += joint[i, j] * np.log2(joint[i, j] / (pa[i] * pb[j]))
    return float(mi)
