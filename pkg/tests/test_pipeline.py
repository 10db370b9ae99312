import numpy as np
import pytest

from shotstego import pipeline
from shotstego.camera import SensorConfig, capture, capture_pair, make_scene
from shotstego.codec import CodecError, DecodeError


def pair(pattern="flat", seed=101, n=512, lam=10000):
    scene = make_scene(n, n, pattern, lam)
    sensor = SensorConfig(seed=seed)
    return scene, sensor, *capture_pair(scene, sensor)


def test_round_trip_flat_defaults():
    _, _, key, cover = pair()
    msg = b"meet at the usual place, bring the negatives"
    res = pipeline.embed_message(key, cover, msg, mixing_seed=3)
    assert pipeline.extract_message(res.stego_image, key, mixing_seed=3) == msg


def test_round_trip_pcb_defaults():
    _, _, key, cover = pair("pcb", seed=102)
    msg = bytes(range(48))
    res = pipeline.embed_message(key, cover, msg, mixing_seed=4)
    assert pipeline.extract_message(res.stego_image, key, mixing_seed=4) == msg


def test_round_trip_large_payload_strong_parity():
    _, _, key, cover = pair("pcb", seed=103)
    msg = bytes(np.random.default_rng(9).integers(0, 256, 16384, dtype=np.uint8))
    res = pipeline.embed_message(key, cover, msg, parity_symbols=32, mixing_seed=5)
    got = pipeline.extract_message(res.stego_image, key, parity_symbols=32, mixing_seed=5)
    assert got == msg


@pytest.mark.parametrize("size", [0, 50, 215, 216, 400, 2000])
def test_length_discovery_across_block_boundaries(size):
    """Payload sizes straddling the one-full-block boundary exercise both
    halves of the header bootstrap (full-block path and short-block scan)."""
    _, _, key, cover = pair(seed=104, n=256)
    msg = bytes(np.random.default_rng(size).integers(0, 256, size, dtype=np.uint8))
    res = pipeline.embed_message(key, cover, msg, parity_symbols=32, mixing_seed=6)
    assert pipeline.extract_message(res.stego_image, key, parity_symbols=32,
                                    mixing_seed=6) == msg


def test_declared_length_path():
    _, _, key, cover = pair(seed=105, n=256)
    msg = b"x" * 300
    res = pipeline.embed_message(key, cover, msg, parity_symbols=16, mixing_seed=7)
    got = pipeline.extract_message(res.stego_image, key, parity_symbols=16,
                                   mixing_seed=7, payload_length=300)
    assert got == msg
    with pytest.raises(DecodeError):
        pipeline.extract_message(res.stego_image, key, parity_symbols=16,
                                 mixing_seed=7, payload_length=299)


def test_wrong_key_fails_loudly():
    scene, sensor, key, cover = pair(seed=106)
    third = capture(scene, sensor, 2)
    msg = b"only the right key may read this"
    res = pipeline.embed_message(key, cover, msg, mixing_seed=8)
    with pytest.raises(DecodeError):
        pipeline.extract_message(res.stego_image, third, mixing_seed=8)


def test_wrong_mixing_seed_fails_loudly():
    _, _, key, cover = pair(seed=107, n=256)
    res = pipeline.embed_message(key, cover, b"seed matters", mixing_seed=9)
    with pytest.raises(DecodeError):
        pipeline.extract_message(res.stego_image, key, mixing_seed=10)


def test_capacity_enforcement():
    _, _, key, cover = pair(seed=108, n=64)  # 4096 pixels -> 512 byte slots
    with pytest.raises(CodecError, match="too large|capacity"):
        pipeline.embed_message(key, cover, b"\x00" * 2000)


def test_embedded_bits_fill_capacity_exactly():
    _, _, key, cover = pair(seed=109, n=256)
    res = pipeline.embed_message(key, cover, b"hello", mixing_seed=11)
    assert len(res.bits) == res.plan.capacity_bits
    assert res.plan.capacity_bits == 256 * 256  # flat scene: every pixel usable


def test_deterministic_stego_image():
    _, _, key, cover = pair(seed=110, n=256)
    a = pipeline.embed_message(key, cover, b"same in, same out", mixing_seed=12)
    b = pipeline.embed_message(key, cover, b"same in, same out", mixing_seed=12)
    assert a.stego_image == b.stego_image


def test_group_mode_round_trip():
    _, _, key, cover = pair(seed=111, n=512)
    msg = b"block mode trades capacity for robustness"
    res = pipeline.embed_message(key, cover, msg, block_pixels=16, mixing_seed=13)
    got = pipeline.extract_message(res.stego_image, key, block_pixels=16, mixing_seed=13)
    assert got == msg
    assert res.plan.capacity_bits == 512 * 512 // 16
