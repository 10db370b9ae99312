"""End-to-end sender and receiver pipelines.

Sender: frame + Reed-Solomon + keyed byte mixing + filler padding, then
pixel-selection embedding. Receiver: key comparison, unmixing, correction,
CRC check. The receiver does not need the payload length up front: it
recovers the framing header from the first Reed-Solomon block (trying the
short-single-block layouts if the stream is smaller than one full block).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import codec, stego
from .camera import DEFAULT_FULL_WELL
from .codec import CodecError, DecodeError, MessagePlan
from .imageio import RawImage


@dataclass
class EmbedResult:
    stego_image: RawImage
    plan: MessagePlan
    bits: np.ndarray  # the exact bit vector that was embedded


def _params_and_slots(key: RawImage, block_pixels: int,
                      usable_mask, full_well: int):
    if usable_mask is None:
        usable_mask = stego.default_usable_mask(key, full_well)
    params = stego.StegoParams(block_pixels=block_pixels, usable_mask=usable_mask)
    capacity_bits = params.capacity_bits(key)
    return params, capacity_bits, capacity_bits // 8


def embed_message(key: RawImage, cover: RawImage, payload: bytes,
                  parity_symbols: int = 8, mixing_seed: int = 1,
                  block_pixels: int = 1, usable_mask=None,
                  full_well: int = DEFAULT_FULL_WELL) -> EmbedResult:
    """Alice's side: returns the stego image ready to publish."""
    params, capacity_bits, slots = _params_and_slots(
        key, block_pixels, usable_mask, full_well)
    plan = MessagePlan(payload=bytes(payload), parity_symbols=parity_symbols,
                       mixing_seed=mixing_seed, capacity_bits=capacity_bits,
                       block_pixels=block_pixels)
    coded = codec.rs_encode(plan.payload, parity_symbols)
    if len(coded) > slots:
        raise CodecError(
            f"message too large: coded stream is {len(coded)} bytes, "
            f"image capacity is {slots} byte slots"
        )
    perm = codec.mixing_permutation(slots, mixing_seed)
    bits = codec.scatter(coded, perm, capacity_bits, mixing_seed)
    stego_image = stego.embed(key, cover, bits, params)
    return EmbedResult(stego_image=stego_image, plan=plan, bits=bits)


def extract_message(stego_image: RawImage, key: RawImage,
                    parity_symbols: int = 8, mixing_seed: int = 1,
                    block_pixels: int = 1, usable_mask=None,
                    full_well: int = DEFAULT_FULL_WELL,
                    payload_length: Optional[int] = None) -> bytes:
    """Bob's side: recover the payload or raise DecodeError loudly."""
    params, capacity_bits, slots = _params_and_slots(
        key, block_pixels, usable_mask, full_well)
    if slots < 1:
        raise DecodeError("image has no usable byte capacity")
    perm = codec.mixing_permutation(slots, mixing_seed)
    bits = stego.extract(stego_image, key, params).bits

    if payload_length is not None:
        need = codec.coded_length(payload_length, parity_symbols)
        if need > slots:
            raise DecodeError("declared payload does not fit this image")
        payload = codec.rs_decode(codec.gather(bits, perm, need), parity_symbols)
        if len(payload) != payload_length:
            raise DecodeError("recovered payload length does not match declaration")
        return payload

    # Length discovery. A stream of at least one full block: correct the
    # first block, read the framed length, then decode the exact stream.
    if slots >= 255:
        try:
            first = codec.gather(bits, perm, 255)
            corrected = codec._rs_correct_block(first, parity_symbols)
            length = int.from_bytes(corrected[0:4], "big")
            need = codec.coded_length(length, parity_symbols)
            if 255 <= need <= slots:
                return codec.rs_decode(codec.gather(bits, perm, need), parity_symbols)
        except DecodeError:
            pass
    # Shorter than one block: scan the few possible single-block layouts.
    top = min(255, slots)
    for need in range(8 + parity_symbols, top + 1):
        try:
            return codec.rs_decode(codec.gather(bits, perm, need), parity_symbols)
        except DecodeError:
            continue
    raise DecodeError("no decodable payload found (wrong key, wrong plan, "
                      "or damage beyond the correction budget)")
