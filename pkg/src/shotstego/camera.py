"""Photon-counting camera simulator.

A sensor pixel that absorbs on average lambda photons during the exposure
reports a Poisson-distributed count: mean lambda, standard deviation
sqrt(lambda). At typical operating points (lambda ~ 1e4, full well 5e4)
this shot noise dwarfs electronic read noise, so two captures of a static
scene are two fresh draws from the same per-pixel distribution. That
equality of distributions is what the embedding protocol rides on; this
module exists to produce such capture pairs and to let tests violate the
static-scene assumption on purpose (exposure jitter, read noise).

Randomness is counter-based: every variate is a pure function of
(seed, capture_index, pixel_index, draw_index) through the splitmix64
mixing function, so output never depends on evaluation or chunking order
and captures reproduce exactly across platforms. The draw for pixel i,
draw j is mix64(base + (i+1)*GAMMA + (j+1)*DELTA); the stride constants
are audited so no two (i, j) pairs of one capture collide.

Sampling is exact Knuth inversion below lambda = 60 and the rounded normal
approximation N(lambda, lambda) above, where the approximation error is
orders of magnitude below statistical test resolution. Normals come from
Box-Muller evaluated in float32 with the cos/sin pair trick; captures are
only required to be statistically faithful, not bit-identical across
implementations, so the cheap transcendentals are fine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import (
    CAPTURE_SALT,
    JITTER_SALT,
    MASK64,
    READNOISE_SALT,
    SPLITMIX64_GAMMA,
    splitmix64_mix,
)
from .imageio import RawImage

NORMAL_APPROX_THRESHOLD = 60.0
DEFAULT_FULL_WELL = 50000
_CHUNK = 1 << 22  # pixels per processing slab (even), bounds peak memory

# Second stride for the draw index; with |draw delta| <= 600 the nearest
# pixel-index alias sits at |di| ~ 3.4e15, far outside any image.
DRAW_DELTA = 0xD1342543DE82EF95
POISSON_SMALL_SALT = 0x510E527FADE682D1  # keeps the Knuth stream independent

_U64_GAMMA = np.uint64(SPLITMIX64_GAMMA)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_40 = np.float32(2.0 ** -40)  # uniforms keep the top 40 bits


@dataclass
class SceneRadiance:
    """Per-pixel expected photon count; ground truth for the simulator."""

    width: int
    height: int
    lam: np.ndarray  # float64, shape (height, width), all >= 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("scene dimensions must be >= 1")
        lam = np.asarray(self.lam, dtype=np.float64)
        if lam.shape != (self.height, self.width):
            raise ValueError("radiance array shape does not match dimensions")
        if np.any(lam < 0):
            raise ValueError("expected photon counts must be >= 0")
        self.lam = lam


@dataclass
class SensorConfig:
    """Sensor parameters, including deliberate assumption violations.

    exposure_jitter_fraction f applies a per-capture multiplicative factor
    drawn uniformly from [1-f, 1+f]; read noise is additive Gaussian in
    electrons, rounded, applied after the photon draw and before clamping
    to the full well.
    """

    full_well: int = DEFAULT_FULL_WELL
    read_noise_sigma: float = 0.0
    exposure_jitter_fraction: float = 0.0
    seed: int = 1

    def __post_init__(self):
        if not (1 <= self.full_well <= 65535):
            raise ValueError("full_well must be in [1, 65535] so counts fit 16 bits")
        if self.read_noise_sigma < 0:
            raise ValueError("read_noise_sigma must be >= 0")
        if not (0 <= self.exposure_jitter_fraction < 1):
            raise ValueError("exposure_jitter_fraction must be in [0, 1)")
        self.seed = self.seed & MASK64


def make_scene(width: int, height: int, pattern: str, mean_level: float) -> SceneRadiance:
    """Build a test scene.

    flat: constant mean_level everywhere.
    gradient: linear ramp across columns from 0 to 2 * mean_level.
    pcb: 16x16-pixel tiles cycling bright / mid / dark like a circuit board
         under even light; bright tiles sit at 1.5x the default full well so
         they saturate in capture, dark tiles are unlit. One tile in eight
         is bright, one is dark, six carry mean_level.
    """
    if width < 1 or height < 1:
        raise ValueError("scene dimensions must be >= 1")
    if mean_level < 0:
        raise ValueError("mean_level must be >= 0")
    if pattern == "flat":
        lam = np.full((height, width), float(mean_level))
    elif pattern == "gradient":
        if width == 1:
            ramp = np.zeros(1)
        else:
            ramp = 2.0 * mean_level * np.arange(width) / (width - 1)
        lam = np.tile(ramp, (height, 1))
    elif pattern == "pcb":
        tile = 16
        ty = np.arange(height) // tile
        tx = np.arange(width) // tile
        role = (tx[None, :] + 3 * ty[:, None]) % 8
        lam = np.full((height, width), float(mean_level))
        lam[role == 0] = 1.5 * DEFAULT_FULL_WELL
        lam[role == 4] = 0.0
    else:
        raise ValueError(f"unknown scene pattern: {pattern!r}")
    return SceneRadiance(width=width, height=height, lam=lam)


# ---------------------------------------------------------------------------
# counter-based sampling
# ---------------------------------------------------------------------------

def _mix_words(state: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, in place on a uint64 working array."""
    t = state >> np.uint64(30)
    state ^= t
    state *= _M1
    np.right_shift(state, np.uint64(27), out=t)
    state ^= t
    state *= _M2
    np.right_shift(state, np.uint64(31), out=t)
    state ^= t
    return state


def _uniforms(base: int, idx: np.ndarray, draw: int) -> np.ndarray:
    """Uniform floats in (0, 1] for (counter idx, draw) under a stream base."""
    offset = np.uint64((base + (draw + 1) * DRAW_DELTA) & MASK64)
    words = _mix_words((idx + np.uint64(1)) * _U64_GAMMA + offset)
    u = (words >> np.uint64(24)).astype(np.float32)
    u += np.float32(1.0)
    u *= _INV_2_40
    return u


def _chunk_normals(base: int, start: int, count: int) -> np.ndarray:
    """One standard normal per pixel start..start+count, Box-Muller with the
    cos/sin pair trick. Uniform pairs are keyed by the absolute pixel-pair
    id (pixel_index >> 1), so each value is a pure function of the pixel
    index no matter how the image is chunked. start must be even."""
    half = (count + 1) // 2
    pair_ids = np.arange(start >> 1, (start >> 1) + half, dtype=np.uint64)
    u1 = _uniforms(base, pair_ids, 0)
    u2 = _uniforms(base, pair_ids, 1)
    r = np.sqrt(np.float32(-2.0) * np.log(u1))
    theta = np.float32(2.0 * np.pi) * u2
    z = np.empty(count, dtype=np.float32)
    z[0::2] = r * np.cos(theta)
    z[1::2] = (r * np.sin(theta))[: count - half]
    return z


def _poisson_knuth(base: int, idx: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Exact Poisson inversion (Knuth product method), vectorised.

    Multiplies uniforms until the running product drops below exp(-lam);
    the count is the number of draws minus one. Only used for lam < 60,
    where exp(-lam) is comfortably representable (draws use float64).
    """
    limit = np.exp(-lam)
    prod = np.ones_like(lam)
    counts = np.zeros(lam.shape, dtype=np.int64)
    active_idx = np.arange(len(lam))
    draw = 0
    # hard cap: beyond lam + 40*sqrt(lam) + 20 draws the tail mass is ~0
    cap = int(np.max(lam) + 40.0 * np.sqrt(np.max(lam)) + 20.0) if lam.size else 0
    while len(active_idx) and draw <= cap:
        u = _uniforms(base, idx[active_idx], draw).astype(np.float64)
        prod[active_idx] *= u
        done = prod[active_idx] <= limit[active_idx]
        counts[active_idx[done]] = draw
        active_idx = active_idx[~done]
        draw += 1
    counts[active_idx] = cap  # unreachable in practice
    return counts


def capture(scene: SceneRadiance, sensor: SensorConfig, capture_index: int) -> RawImage:
    """Simulate one exposure of the scene.

    Per pixel: draw Poisson(j * lambda) photons where j is this capture's
    exposure factor, add rounded Gaussian read noise, clamp to
    [0, full_well]. Deterministic in (seed, capture_index, pixel index).
    """
    n = scene.width * scene.height
    jitter = exposure_factor(sensor, capture_index)
    base = splitmix64_mix(
        (sensor.seed ^ CAPTURE_SALT) + ((capture_index + 1) * SPLITMIX64_GAMMA & MASK64)
    )
    noise_base = splitmix64_mix(base ^ READNOISE_SALT)
    knuth_base = splitmix64_mix(base ^ POISSON_SMALL_SALT)
    lam_flat = scene.lam.reshape(-1) * jitter
    out = np.empty(n, dtype=np.uint16)
    sigma_r = sensor.read_noise_sigma
    full_well = np.float32(sensor.full_well)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        count = stop - start
        lam = lam_flat[start:stop]
        big = lam >= NORMAL_APPROX_THRESHOLD
        z = _chunk_normals(base, start, count)
        if np.all(big):
            counts = z
            lam32 = lam.astype(np.float32)
            counts *= np.sqrt(lam32)
            counts += lam32
            np.rint(counts, out=counts)
        else:
            counts = np.empty(count, dtype=np.float32)
            blam = lam[big].astype(np.float32)
            counts[big] = np.rint(blam + np.sqrt(blam) * z[big])
            small = np.flatnonzero(~big)
            counts[small] = _poisson_knuth(
                knuth_base, (np.uint64(start) + small.astype(np.uint64)), lam[small])
        np.maximum(counts, np.float32(0.0), out=counts)
        if sigma_r > 0:
            noise = _chunk_normals(noise_base, start, count)
            noise *= np.float32(sigma_r)
            np.rint(noise, out=noise)
            counts += noise
        np.clip(counts, np.float32(0.0), full_well, out=counts)
        out[start:stop] = counts.astype(np.uint16)
    return RawImage(width=scene.width, height=scene.height,
                    pixels=out.reshape(scene.height, scene.width))


def exposure_factor(sensor: SensorConfig, capture_index: int) -> float:
    """This capture's multiplicative exposure factor (1.0 without jitter)."""
    f = sensor.exposure_jitter_fraction
    if f == 0:
        return 1.0
    word = splitmix64_mix(
        (sensor.seed ^ JITTER_SALT) + ((capture_index + 1) * SPLITMIX64_GAMMA & MASK64)
    )
    u = (word >> 11) * 2.0 ** -53
    return 1.0 - f + 2.0 * f * u


def capture_pair(scene: SceneRadiance, sensor: SensorConfig) -> tuple[RawImage, RawImage]:
    """Key and cover: two independent captures (indices 0 and 1) of the
    identical scene, each with its own exposure factor when jitter is on."""
    return capture(scene, sensor, 0), capture(scene, sensor, 1)
