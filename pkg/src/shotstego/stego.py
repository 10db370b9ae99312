"""Pixel-selection embedding and key-comparison extraction.

The stego image is assembled one pixel (or one g-pixel group) at a time by
choosing between two statistically identical captures: a 0 bit keeps the
key image's pixels, a 1 bit takes the cover image's. Extraction compares
the published image against the key: any difference inside a group means 1.

Because a 0 bit copies the whole group verbatim from the key, the only
error mechanism on raw pixels is a collision: every pixel of a 1-group
happening to agree with the key. For one pixel per bit that probability is
sum_k P(count=k)^2 of the per-pixel count distribution (~0.28% at a mean of
1e4 photons); for g pixels per bit it falls like that number to the g-th
power, which is the capacity-for-robustness trade of block mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .imageio import RawImage

DARK_FLOOR = 16  # counts below this carry mostly electronic noise


@dataclass
class StegoParams:
    """Embedding geometry: pixels per message bit and the usable mask.

    usable_mask is a boolean (height, width) array; None means every pixel
    participates. Groups are g consecutive usable pixels in row-major
    order; leftover usable pixels and all masked pixels are copied from
    the key image so extraction sees them as unused.
    """

    block_pixels: int = 1
    usable_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.block_pixels < 1:
            raise ValueError("block_pixels must be >= 1")

    def mask_for(self, img: RawImage) -> np.ndarray:
        if self.usable_mask is None:
            return np.ones((img.height, img.width), dtype=bool)
        mask = np.asarray(self.usable_mask, dtype=bool)
        if mask.shape != (img.height, img.width):
            raise ValueError("usable_mask shape does not match image")
        return mask

    def capacity_bits(self, img: RawImage) -> int:
        return int(self.mask_for(img).sum()) // self.block_pixels


@dataclass
class DecodedBits:
    """Extraction output: one bit per group plus the raw pixel disagreement
    count between the stego image and the key."""

    bits: np.ndarray
    raw_mismatch_count: int


def default_usable_mask(key: RawImage, full_well: int) -> np.ndarray:
    """Exclude the two failure sources visible in the key alone: saturated
    pixels (count pinned at the full well in both captures) and dark pixels
    (no photon noise to hide in). Both sides derive the identical mask from
    the shared key image."""
    px = key.pixels
    return (px < full_well) & (px >= DARK_FLOOR)


def _groups(mask: np.ndarray, g: int) -> np.ndarray:
    usable = np.flatnonzero(mask.reshape(-1))
    n_groups = len(usable) // g
    return usable[: n_groups * g].reshape(n_groups, g)


def _check_dims(a: RawImage, b: RawImage) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError("image dimensions do not match")


def embed(key: RawImage, cover: RawImage, bits: np.ndarray, params: StegoParams) -> RawImage:
    """Assemble the stego image: group b comes from the cover if bits[b] is
    1, from the key otherwise; everything outside the groups is the key."""
    _check_dims(key, cover)
    g = params.block_pixels
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    out = key.pixels.reshape(-1).copy()
    if params.usable_mask is None:
        n_groups = key.pixel_count // g
        if len(bits) != n_groups:
            raise ValueError(
                f"bit vector length {len(bits)} != group count {n_groups}")
        used = n_groups * g
        sel = np.repeat(bits.astype(bool), g)
        np.copyto(out[:used], cover.pixels.reshape(-1)[:used], where=sel)
    else:
        groups = _groups(params.mask_for(key), g)
        if len(bits) != len(groups):
            raise ValueError(
                f"bit vector length {len(bits)} != group count {len(groups)}")
        take = groups[bits == 1].reshape(-1)
        out[take] = cover.pixels.reshape(-1)[take]
    return RawImage(width=key.width, height=key.height,
                    pixels=out.reshape(key.height, key.width))


def extract(stego: RawImage, key: RawImage, params: StegoParams) -> DecodedBits:
    """Recover bits by comparison: a group decodes to 1 iff any of its
    pixels differs from the key."""
    _check_dims(stego, key)
    g = params.block_pixels
    diff = (stego.pixels != key.pixels).reshape(-1)
    if params.usable_mask is None:
        used = (key.pixel_count // g) * g
        bits = diff[:used].reshape(-1, g).any(axis=1).astype(np.uint8)
    else:
        groups = _groups(params.mask_for(key), g)
        bits = diff[groups].any(axis=1).astype(np.uint8)
    return DecodedBits(bits=bits, raw_mismatch_count=int(diff.sum()))


def collision_rate(key: RawImage, cover: RawImage,
                   mask: Optional[np.ndarray] = None) -> float:
    """Fraction of (usable) pixels where the two captures agree exactly."""
    _check_dims(key, cover)
    same = key.pixels == cover.pixels
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise ValueError("mask leaves no usable pixels")
        same = same[mask]
    return float(np.mean(same))


def expected_collision_rate(lam: float) -> float:
    """Analytic probability that two independent Poisson(lam) draws agree:
    sum_k (e^-lam lam^k / k!)^2, truncated at lam +- 12 sqrt(lam) (at least
    [0, 40]), relative error below 1e-6. Planning aid for parity sizing."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if lam == 0:
        return 1.0
    half = 12.0 * math.sqrt(lam)
    lo = max(0, int(math.floor(lam - half)))
    hi = max(40, int(math.ceil(lam + half)))
    k = np.arange(lo, hi + 1, dtype=np.float64)
    log_pmf = -lam + k * math.log(lam) - gammaln(k + 1.0)
    return float(np.exp(2.0 * log_pmf).sum())
