import numpy as np
import pytest

from shotstego import camera, statcheck
from shotstego.camera import SensorConfig, capture, capture_pair, make_scene


def test_flat_scene():
    scene = make_scene(2, 2, "flat", 100)
    assert np.all(scene.lam == 100)


def test_gradient_endpoints():
    scene = make_scene(33, 4, "gradient", 500)
    assert np.all(scene.lam[:, 0] == 0)
    assert np.all(scene.lam[:, -1] == 1000)


def test_scene_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        make_scene(0, 5, "flat", 10)
    with pytest.raises(ValueError):
        make_scene(5, -1, "flat", 10)
    with pytest.raises(ValueError):
        make_scene(5, 5, "zebra", 10)


def test_pcb_produces_saturated_pixels():
    """Brute-force scan of a 64x64 capture: the bright tiles must clip."""
    img = capture(make_scene(64, 64, "pcb", 10000), SensorConfig(seed=1), 0)
    saturated = int(np.sum(img.pixels == 50000))
    assert saturated > 0
    assert int(np.sum(img.pixels < 16)) > 0  # and dark tiles stay dark


def test_capture_zero_radiance_is_zero():
    img = capture(make_scene(32, 32, "flat", 0), SensorConfig(seed=2), 0)
    assert img.pixels.max() == 0


def test_capture_shot_noise_law():
    """Counts at lambda=1e4 over 1e6 samples: mean ~ lambda and standard
    deviation sqrt(lambda) = 100 within a +-1 band."""
    img = capture(make_scene(1000, 1000, "flat", 10000), SensorConfig(seed=3), 0)
    v = img.pixels.astype(np.float64)
    assert abs(v.mean() - 10000) < 1.0
    assert abs(v.std(ddof=1) - 100.0) < 1.0


def test_capture_clamps_at_full_well():
    img = capture(make_scene(64, 64, "flat", 500000), SensorConfig(seed=4), 0)
    assert np.all(img.pixels == 50000)


def test_capture_deterministic_and_index_separated():
    scene = make_scene(128, 128, "flat", 5000)
    a = capture(scene, SensorConfig(seed=9), 0)
    b = capture(scene, SensorConfig(seed=9), 0)
    c = capture(scene, SensorConfig(seed=9), 1)
    assert a == b
    assert a != c


def test_capture_independent_of_chunking(monkeypatch):
    """Counter-based draws: slab size is an implementation detail and must
    never show in the output (stands in for any parallel evaluation order)."""
    scene = make_scene(300, 77, "pcb", 3000)
    sensor = SensorConfig(seed=77, read_noise_sigma=4.0)
    baseline = capture(scene, sensor, 0)
    monkeypatch.setattr(camera, "_CHUNK", 1234)
    assert capture(scene, sensor, 0) == baseline


def test_capture_pair_repeatable(flat_pair_1m):
    scene = make_scene(1024, 1024, "flat", 10000)
    again = capture_pair(scene, SensorConfig(seed=57))
    assert again[0] == flat_pair_1m[0]
    assert again[1] == flat_pair_1m[1]


def test_pair_collision_rate_matches_poisson_oracle(flat_pair_1m, collision_oracle):
    key, cover = flat_pair_1m
    rate = float(np.mean(key.pixels == cover.pixels))
    expect = collision_oracle(10000.0)
    assert abs(rate - expect) < 0.2 * expect


def test_exposure_jitter_shifts_means():
    scene = make_scene(512, 512, "flat", 10000)
    sensor = SensorConfig(seed=6, exposure_jitter_fraction=0.05)
    key, cover = capture_pair(scene, sensor)
    ratio = cover.pixels.mean() / key.pixels.mean()
    assert 0.90 <= ratio <= 1.10
    # measurably different exposures: far outside shot-noise-only noise
    assert abs(ratio - 1.0) > 20 * np.sqrt(2.0 / (10000 * scene.width * scene.height))


def test_jitter_factors_bounded():
    sensor = SensorConfig(seed=123, exposure_jitter_fraction=0.05)
    factors = [camera.exposure_factor(sensor, i) for i in range(200)]
    assert all(0.95 <= f <= 1.05 for f in factors)
    assert np.std(factors) > 0.01  # actually varies


def test_pixel_independence_autocorrelation(flat_pair_1m):
    """Assumption check: lag 1..8 autocorrelation of the capture difference
    stays below the finite-sample bound 3/sqrt(N)."""
    key, cover = flat_pair_1m
    rho = statcheck.autocorrelation(key, cover, 8)
    assert np.all(np.abs(rho) < 3.0 / np.sqrt(key.pixel_count))


def test_variance_law(flat_pair_1m):
    v = flat_pair_1m[0].pixels.astype(np.float64).var(ddof=1)
    assert 0.95 * 10000 <= v <= 1.05 * 10000


def test_read_noise_adds_variance():
    scene = make_scene(512, 512, "flat", 1000)
    quiet = capture(scene, SensorConfig(seed=8), 0)
    noisy = capture(scene, SensorConfig(seed=8, read_noise_sigma=30.0), 0)
    v_quiet = quiet.pixels.astype(float).var()
    v_noisy = noisy.pixels.astype(float).var()
    assert abs(v_quiet - 1000) < 30
    assert abs(v_noisy - 1900) < 60  # lambda + sigma^2


def test_read_noise_floors_at_zero():
    img = capture(make_scene(64, 64, "flat", 0),
                  SensorConfig(seed=5, read_noise_sigma=5.0), 0)
    assert img.pixels.min() == 0
    assert img.pixels.max() > 0


def test_knuth_branch_moments():
    img = capture(make_scene(700, 700, "flat", 7.5), SensorConfig(seed=10), 0)
    v = img.pixels.astype(np.float64)
    assert abs(v.mean() - 7.5) < 0.05
    assert abs(v.var(ddof=1) - 7.5) < 0.15


def test_sensor_config_validation():
    with pytest.raises(ValueError):
        SensorConfig(full_well=70000)
    with pytest.raises(ValueError):
        SensorConfig(read_noise_sigma=-1)
    with pytest.raises(ValueError):
        SensorConfig(exposure_jitter_fraction=1.0)
