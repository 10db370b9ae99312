"""Payload coding for the pixel-selection protocol.

Sender side: frame the payload (length + CRC-32), add Reed-Solomon parity
per block, shuffle byte placement with a keyed permutation, and pad with
keyed filler bits until there is exactly one bit per usable pixel.
Receiver side runs the same steps in reverse.

Everything in this module is specified bit-exactly so that two independent
implementations interoperate:

  * coded stream:  [len: u32 BE][crc32: u32 BE][payload] split into blocks
    of (255 - parity) data bytes (last block shorter), each block extended
    with `parity` Reed-Solomon bytes over GF(2^8), primitive polynomial
    0x11D, generator alpha=2, systematic, parity roots alpha^0..alpha^(t-1).
  * mixing permutation: backward Fisher-Yates driven by the splitmix64
    stream of the mixing seed, bounded draws by rejection sampling.
  * filler: splitmix64 stream of (mixing_seed XOR FILLER_SALT), 64-bit
    words consumed MSB-first, written into unoccupied bit positions in
    increasing position order.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

# splitmix64 constants (Steele, Lea & Flood's SplittableRandom finalizer).
SPLITMIX64_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX64_MULT1 = 0xBF58476D1CE4E5B9
SPLITMIX64_MULT2 = 0x94D049BB133111EB

# Domain-separation salts (SHA-512 initial hash words; any fixed odd-ish
# constants would do, these are published nothing-up-my-sleeve numbers).
FILLER_SALT = 0x6A09E667F3BCC908
CAPTURE_SALT = 0xBB67AE8584CAA73B
JITTER_SALT = 0x3C6EF372FE94F82B
READNOISE_SALT = 0xA54FF53A5F1D36F1


class CodecError(ValueError):
    """Malformed parameters or a payload that cannot fit the capacity."""


class DecodeError(ValueError):
    """Coded data could not be decoded: uncorrectable block, inconsistent
    framing, or CRC mismatch. Deliberately loud; a wrong key lands here."""


# ---------------------------------------------------------------------------
# splitmix64
# ---------------------------------------------------------------------------

def splitmix64_mix(z: int) -> int:
    """The splitmix64 output (avalanche) function on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * SPLITMIX64_MULT1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX64_MULT2) & MASK64
    return z ^ (z >> 31)


def splitmix64_mix_array(z: np.ndarray) -> np.ndarray:
    """Vectorised splitmix64_mix over a uint64 array (wrapping arithmetic)."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(SPLITMIX64_MULT1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(SPLITMIX64_MULT2)
    z ^= z >> np.uint64(31)
    return z


class SplitMix64:
    """Sequential splitmix64 stream.

    The n-th output (n >= 1) equals splitmix64_mix(seed + n * GAMMA), so the
    sequential stream and counter-based evaluation agree exactly.
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + SPLITMIX64_GAMMA) & MASK64
        return splitmix64_mix(self._state)

    def next_below(self, bound: int) -> int:
        """Unbiased draw in [0, bound) by rejection sampling.

        Accept v < 2**64 - (2**64 mod bound), return v mod bound. This exact
        rule is part of the permutation's bit-exact contract.
        """
        if bound <= 0:
            raise CodecError("bound must be positive")
        threshold = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < threshold:
                return v % bound


# ---------------------------------------------------------------------------
# GF(2^8) arithmetic, tables for primitive polynomial 0x11D, generator 2
# ---------------------------------------------------------------------------

GF_PRIM_POLY = 0x11D
GF_GENERATOR = 2


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int32)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= GF_PRIM_POLY
    exp[255:510] = exp[0:255]  # doubled so products need no mod 255
    return exp, log


GF_EXP, GF_LOG = _build_tables()
_GF_EXP_INT = [int(v) for v in GF_EXP]
_GF_LOG_INT = [int(v) for v in GF_LOG]


def _gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _GF_EXP_INT[_GF_LOG_INT[a] + _GF_LOG_INT[b]]


def _gf_inv(a: int) -> int:
    return _GF_EXP_INT[255 - _GF_LOG_INT[a]]


def _gf_poly_mul(p, q):
    r = [0] * (len(p) + len(q) - 1)
    for j, qj in enumerate(q):
        if qj == 0:
            continue
        for i, pi in enumerate(p):
            if pi:
                r[i + j] ^= _gf_mul(pi, qj)
    return r


def _gf_poly_eval(poly, x):
    """Horner evaluation, coefficients highest degree first."""
    y = poly[0]
    for c in poly[1:]:
        y = _gf_mul(y, x) ^ c
    return y


def _generator_poly(nsym: int):
    g = [1]
    for i in range(nsym):
        g = _gf_poly_mul(g, [1, _GF_EXP_INT[i]])  # root alpha^i
    return g


_GEN_CACHE: dict[int, list[int]] = {}


def _gen_poly(nsym: int) -> list[int]:
    if nsym not in _GEN_CACHE:
        _GEN_CACHE[nsym] = _generator_poly(nsym)
    return _GEN_CACHE[nsym]


# ---------------------------------------------------------------------------
# Reed-Solomon block codec
# ---------------------------------------------------------------------------

def _check_parity(parity_symbols: int) -> None:
    if not (2 <= parity_symbols <= 254) or parity_symbols % 2 != 0:
        raise CodecError(
            f"parity_symbols must be even and in [2, 254], got {parity_symbols}"
        )


def _rs_encode_block(data: bytes, nsym: int) -> bytes:
    """Systematic encoding: remainder of data * x^nsym by the generator."""
    gen = _gen_poly(nsym)
    log_gen = np.array([_GF_LOG_INT[c] for c in gen[1:]], dtype=np.int32)
    rem = np.zeros(nsym, dtype=np.uint8)
    for b in data:
        coef = int(rem[0]) ^ b
        rem[:-1] = rem[1:]
        rem[-1] = 0
        if coef:
            rem ^= GF_EXP[log_gen + _GF_LOG_INT[coef]]
    return rem.tobytes()


def _rs_syndromes(block: bytes, nsym: int) -> list[int]:
    n = len(block)
    arr = np.frombuffer(block, dtype=np.uint8)
    nz = np.nonzero(arr)[0]
    if len(nz) == 0:
        return [0] * nsym
    logs = GF_LOG[arr[nz]]
    degrees = (n - 1 - nz).astype(np.int64)
    synd = []
    for i in range(nsym):
        idx = (logs + i * degrees) % 255
        synd.append(int(np.bitwise_xor.reduce(GF_EXP[idx])))
    return synd


def _berlekamp_massey(synd: list[int], nsym: int) -> list[int]:
    """Error locator polynomial (lowest degree first is NOT used here;
    returned highest degree first, matching _gf_poly_eval)."""
    err_loc = [1]
    old_loc = [1]
    for i in range(nsym):
        delta = synd[i]
        for j in range(1, len(err_loc)):
            delta ^= _gf_mul(err_loc[-(j + 1)], synd[i - j])
        old_loc.append(0)
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = [_gf_mul(c, delta) for c in old_loc]
                inv = _gf_inv(delta)
                old_loc = [_gf_mul(c, inv) for c in err_loc]
                err_loc = new_loc
            scaled = [_gf_mul(c, delta) for c in old_loc]
            # xor-add, aligning lowest degrees (both stored highest first)
            if len(scaled) > len(err_loc):
                err_loc = [0] * (len(scaled) - len(err_loc)) + err_loc
            off = len(err_loc) - len(scaled)
            for k, c in enumerate(scaled):
                err_loc[off + k] ^= c
    while err_loc and err_loc[0] == 0:
        err_loc.pop(0)
    return err_loc


def _rs_correct_block(block: bytes, nsym: int) -> bytes:
    """Correct up to nsym // 2 byte errors in one block, raise otherwise."""
    synd = _rs_syndromes(block, nsym)
    if max(synd) == 0:
        return block
    err_loc = _berlekamp_massey(synd, nsym)
    n_err = len(err_loc) - 1
    if n_err == 0 or n_err > nsym // 2:
        raise DecodeError("uncorrectable block: too many errors")
    n = len(block)
    # Chien search: the locator has roots at inverse error locations alpha^-d
    err_pos = []
    for pos in range(n):
        degree = n - 1 - pos
        x_inv = _GF_EXP_INT[(255 - degree) % 255]
        if _gf_poly_eval(err_loc, x_inv) == 0:
            err_pos.append(pos)
    if len(err_pos) != n_err:
        raise DecodeError("uncorrectable block: error locator has no valid roots")
    # Forney with parity roots alpha^0..alpha^(nsym-1):
    #   e_l = Omega(X_l^-1) / prod_{j != l} (1 - X_j X_l^-1),
    # Omega = S(x) * Lambda(x) mod x^nsym.
    synd_rev = synd[::-1]
    omega_full = _gf_poly_mul(synd_rev, err_loc)
    omega = omega_full[len(omega_full) - nsym:]  # mod x^nsym
    out = bytearray(block)
    xs = [_GF_EXP_INT[(n - 1 - p) % 255] for p in err_pos]
    for i, pos in enumerate(err_pos):
        xi_inv = _gf_inv(xs[i])
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                denom = _gf_mul(denom, 1 ^ _gf_mul(xi_inv, xj))
        if denom == 0:
            raise DecodeError("uncorrectable block: Forney denominator zero")
        num = _gf_poly_eval(omega, xi_inv)
        out[pos] ^= _gf_mul(num, _gf_inv(denom))
    if max(_rs_syndromes(bytes(out), nsym)) != 0:
        raise DecodeError("uncorrectable block: correction did not converge")
    return bytes(out)


def _frame(payload: bytes) -> bytes:
    header = len(payload).to_bytes(4, "big") + (zlib.crc32(payload) & 0xFFFFFFFF).to_bytes(4, "big")
    return header + payload


def rs_encode(payload: bytes, parity_symbols: int) -> bytes:
    """Frame the payload (u32 length + u32 CRC-32, big-endian) and append
    `parity_symbols` Reed-Solomon bytes per block of (255 - parity) data."""
    _check_parity(parity_symbols)
    framed = _frame(bytes(payload))
    k = 255 - parity_symbols
    out = bytearray()
    for start in range(0, len(framed), k):
        chunk = framed[start:start + k]
        out += chunk
        out += _rs_encode_block(chunk, parity_symbols)
    return bytes(out)


def rs_decode(coded: bytes, parity_symbols: int) -> bytes:
    """Correct every block, strip framing, verify length and CRC-32.

    Raises DecodeError on an uncorrectable block, framing that does not
    match the coded length, or a CRC mismatch. Never returns a silently
    wrong payload (up to CRC-32 strength).
    """
    _check_parity(parity_symbols)
    coded = bytes(coded)
    n = len(coded)
    rem = n % 255
    if n == 0 or (rem != 0 and rem <= parity_symbols):
        raise DecodeError("coded length inconsistent with block structure")
    framed = bytearray()
    for start in range(0, n, 255):
        block = coded[start:start + 255]
        corrected = _rs_correct_block(block, parity_symbols)
        framed += corrected[:len(block) - parity_symbols]
    if len(framed) < 8:
        raise DecodeError("coded data too short for framing header")
    length = int.from_bytes(framed[0:4], "big")
    crc_expect = int.from_bytes(framed[4:8], "big")
    if length != len(framed) - 8:
        raise DecodeError(
            f"framed length mismatch: header says {length}, got {len(framed) - 8}"
        )
    payload = bytes(framed[8:8 + length])
    if (zlib.crc32(payload) & 0xFFFFFFFF) != crc_expect:
        raise DecodeError("payload CRC-32 mismatch")
    return payload


def coded_length(payload_length: int, parity_symbols: int) -> int:
    """Coded byte count for a payload of the given length."""
    _check_parity(parity_symbols)
    framed = payload_length + 8
    k = 255 - parity_symbols
    n_blocks = -(-framed // k)
    return framed + n_blocks * parity_symbols


# ---------------------------------------------------------------------------
# Keyed mixing permutation and bit scatter/gather
# ---------------------------------------------------------------------------

def mixing_permutation(slot_count: int, mixing_seed: int) -> np.ndarray:
    """Fisher-Yates shuffle of the identity permutation of byte slots.

    Driven by the sequential splitmix64 stream of `mixing_seed`, iterating
    i = slot_count-1 .. 1 and swapping with an unbiased draw in [0, i].
    Bit-exact across implementations; see tests/golden for frozen vectors.
    """
    if slot_count < 1:
        raise CodecError("slot_count must be >= 1")
    perm = list(range(slot_count))
    rng = SplitMix64(mixing_seed)
    for i in range(slot_count - 1, 0, -1):
        j = rng.next_below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


def keyed_filler_bits(count: int, seed: int) -> np.ndarray:
    """`count` pseudorandom bits from the domain-separated filler stream.

    64-bit words of splitmix64(seed XOR FILLER_SALT), consumed MSB-first.
    Statistically a fair coin; keyed so outputs are reproducible.
    """
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    rng = SplitMix64(seed ^ FILLER_SALT)
    n_words = -(-count // 64)
    words = np.array([rng.next_u64() for _ in range(n_words)], dtype=np.uint64)
    bits = np.unpackbits(words.astype(">u8").view(np.uint8))  # MSB-first per word
    return bits[:count]


def scatter(coded: bytes, perm: np.ndarray, capacity_bits: int, mixing_seed: int) -> np.ndarray:
    """Spread coded bytes over byte slots and fill the rest with keyed filler.

    Byte b lands at slot perm[b], occupying 8 consecutive bit positions
    MSB-first. Returns a bit vector (uint8 0/1) of exactly capacity_bits.
    """
    slots = capacity_bits // 8
    if len(perm) != slots:
        raise CodecError(f"permutation covers {len(perm)} slots, capacity has {slots}")
    if 8 * len(coded) > capacity_bits:
        raise CodecError(
            f"message too large for capacity: {8 * len(coded)} bits > {capacity_bits}"
        )
    bits = np.zeros(capacity_bits, dtype=np.uint8)
    occupied = np.zeros(capacity_bits, dtype=bool)
    if len(coded) > 0:
        byte_bits = np.unpackbits(np.frombuffer(coded, dtype=np.uint8)).reshape(-1, 8)
        targets = perm[:len(coded)].astype(np.int64) * 8
        offsets = targets[:, None] + np.arange(8)[None, :]
        bits[offsets.ravel()] = byte_bits.ravel()
        occupied[offsets.ravel()] = True
    free = np.flatnonzero(~occupied)
    bits[free] = keyed_filler_bits(len(free), mixing_seed)
    return bits


def gather(bits: np.ndarray, perm: np.ndarray, coded_length: int) -> bytes:
    """Inverse of scatter restricted to the occupied slots."""
    bits = np.asarray(bits, dtype=np.uint8)
    if coded_length > len(perm):
        raise CodecError(f"coded_length {coded_length} exceeds slot count {len(perm)}")
    if len(bits) < 8 * coded_length:
        raise CodecError("bit vector shorter than the requested byte count")
    if coded_length == 0:
        return b""
    sources = perm[:coded_length].astype(np.int64) * 8
    offsets = sources[:, None] + np.arange(8)[None, :]
    return np.packbits(bits[offsets.ravel()]).tobytes()


# ---------------------------------------------------------------------------
# Message plan
# ---------------------------------------------------------------------------

@dataclass
class MessagePlan:
    """Everything the sender and receiver agree on besides the key image.

    The receiver's copy has payload=b"" (the payload travels in the stego
    image; its length is recovered from the framed header).
    """

    payload: bytes
    parity_symbols: int = 8
    mixing_seed: int = 1
    capacity_bits: int = 0
    block_pixels: int = 1

    def __post_init__(self):
        _check_parity(self.parity_symbols)
        if self.block_pixels < 1:
            raise CodecError("block_pixels must be >= 1")
        if self.capacity_bits and 8 * self.coded_length > self.capacity_bits:
            raise CodecError(
                f"coded payload needs {8 * self.coded_length} bits, "
                f"capacity is {self.capacity_bits}"
            )

    @property
    def coded_length(self) -> int:
        return coded_length(len(self.payload), self.parity_symbols)
