"""Secret keys and LFSR-driven running-key generation.

The pseudo-random generator is a deliberately weak Fibonacci LFSR so that
keystream-correlation masking claims can be stress-tested. The register
shifts right; the output bit is the register LSB before the shift and the
feedback (XOR of the tap positions, counted from the output end) enters at
the MSB. Tap sets are primitive-polynomial exponents, so taps {16,15,13,4}
means x^16 + x^15 + x^13 + x^4 + 1.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np

# primitive-polynomial taps giving period 2^L - 1 (one registered set per length)
MAXIMAL_TAPS = {
    2: (2, 1), 3: (3, 2), 4: (4, 3), 5: (5, 3), 6: (6, 5), 7: (7, 6),
    8: (8, 6, 5, 4), 9: (9, 5), 10: (10, 7), 11: (11, 9), 12: (12, 6, 4, 1),
    13: (13, 4, 3, 1), 14: (14, 5, 3, 1), 15: (15, 14), 16: (16, 15, 13, 4),
    17: (17, 14), 18: (18, 11), 19: (19, 6, 2, 1), 20: (20, 17), 21: (21, 19),
    22: (22, 21), 23: (23, 18), 24: (24, 23, 22, 17), 25: (25, 22),
}

DEFAULT_REGISTER_LENGTH = 16


@dataclass(frozen=True)
class SecretKey:
    """A secret key of n_bits independent bits, stored as an integer."""

    n_bits: int
    value: int

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("key length must be >= 1 bit")
        if not 0 <= self.value < (1 << self.n_bits):
            raise ValueError("key value outside range for its bit length")

    @classmethod
    def from_hex(cls, text: str, n_bits: int | None = None) -> "SecretKey":
        text = text.strip().lower()
        value = int(text, 16)
        if n_bits is None:
            n_bits = 4 * len(text)
        return cls(n_bits, value)

    def to_hex(self) -> str:
        ndigits = (self.n_bits + 3) // 4
        return format(self.value, f"0{ndigits}x")

    def bit(self, i: int) -> int:
        """Bit i, 0 = most significant of the key string."""
        return (self.value >> (self.n_bits - 1 - i)) & 1


def true_random_key(bits: int, entropy_source=None, seed: int | None = None) -> SecretKey:
    """Draw a fresh key.

    By default uses the host entropy source (secrets). Passing seed switches
    to a reproducible generator; entropy_source may be a callable(bits)->int
    for injection in tests.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if entropy_source is not None:
        return SecretKey(bits, int(entropy_source(bits)) & ((1 << bits) - 1))
    if seed is not None:
        rng = np.random.default_rng(seed)
        value = 0
        for _ in range(bits):
            value = (value << 1) | int(rng.integers(0, 2))
        return SecretKey(bits, value)
    return SecretKey(bits, secrets.randbits(bits))


@dataclass(frozen=True)
class LfsrSpec:
    """Register length and feedback taps of the running-key LFSR."""

    register_length: int = DEFAULT_REGISTER_LENGTH
    taps: tuple = MAXIMAL_TAPS[DEFAULT_REGISTER_LENGTH]

    def __post_init__(self):
        if self.register_length < 2:
            raise ValueError("register_length must be >= 2")
        taps = tuple(sorted(set(int(t) for t in self.taps), reverse=True))
        if not taps:
            raise ValueError("taps must be non-empty")
        if taps[0] != self.register_length or taps[-1] < 1:
            raise ValueError("taps must lie in [1, register_length] and include it")
        object.__setattr__(self, "taps", taps)

    def period(self, seed: int = 1) -> int:
        """Cycle length from the given seed (enumerated; L <= 25 is practical)."""
        lfsr = Lfsr(self, seed)
        start = lfsr.state
        n = 0
        limit = 1 << self.register_length
        while n <= limit:
            lfsr.next_bit()
            n += 1
            if lfsr.state == start:
                return n
        raise RuntimeError("period enumeration failed")  # unreachable

    def is_maximal(self) -> bool:
        """True when the period from any nonzero seed is 2^L - 1."""
        if self.register_length > 24:
            raise ValueError("maximality check by enumeration limited to L <= 24")
        return self.period(1) == (1 << self.register_length) - 1


def default_lfsr_spec(key_bits: int) -> LfsrSpec:
    """Spec whose register is one bit longer than the key, so that the
    key-to-seed fold is injective and every key value (including zero) is usable."""
    length = key_bits + 1
    if length in MAXIMAL_TAPS:
        return LfsrSpec(length, MAXIMAL_TAPS[length])
    return LfsrSpec()


class Lfsr:
    """Fibonacci LFSR; rejects the all-zero seed (a fixed point)."""

    def __init__(self, spec: LfsrSpec, seed: int):
        self.spec = spec
        mask = 0
        for t in spec.taps:
            mask |= 1 << (spec.register_length - t)
        self._mask = mask
        self._msb = spec.register_length - 1
        self.state = seed & ((1 << spec.register_length) - 1)
        if self.state == 0:
            raise ValueError("all-zero LFSR seed rejected")

    def next_bit(self) -> int:
        out = self.state & 1
        fb = (self.state & self._mask).bit_count() & 1
        self.state = (self.state >> 1) | (fb << self._msb)
        return out

    def bits(self, n: int) -> np.ndarray:
        """The next n output bits in one tight loop (same stream as next_bit)."""
        out = np.empty(n, dtype=np.int64)
        state = self.state
        mask = self._mask
        msb = self._msb
        for i in range(n):
            out[i] = state & 1
            state = (state >> 1) | (((state & mask).bit_count() & 1) << msb)
        self.state = state
        return out


def key_to_seed(key: SecretKey, spec: LfsrSpec) -> int:
    """Fold a key into a nonzero register seed.

    seed = (key mod (2^L - 1)) + 1 lies in [1, 2^L - 1]; for key lengths
    below the register length the map is injective, so distinct keys give
    distinct keystreams.
    """
    modulus = (1 << spec.register_length) - 1
    return (key.value % modulus) + 1


class RunningKeyStream:
    """Sequential running-key cursor: per-slot basis chunks plus OSK bits.

    Deterministic in (spec, key); not shareable across tasks ; clone() when
    parallel sweeps need independent identical streams.
    """

    def __init__(self, key: SecretKey, spec: LfsrSpec | None = None):
        if spec is None:
            spec = default_lfsr_spec(key.n_bits)
        self.key = key
        self.spec = spec
        self._lfsr = Lfsr(spec, key_to_seed(key, spec))
        self.bits_consumed = 0

    def next_bit(self) -> int:
        self.bits_consumed += 1
        return self._lfsr.next_bit()

    def next_chunk(self, m_values: int) -> int:
        """Next running-key value in [0, m_values); consumes log2(m_values) bits.

        Bits are packed big-endian: the first bit drawn is the MSB.
        m_values must be a power of two (m_values=1 consumes nothing).
        """
        if m_values < 1 or (m_values & (m_values - 1)) != 0:
            raise ValueError(f"m_values={m_values} is not a power of two")
        chunk = 0
        for _ in range(m_values.bit_length() - 1):
            chunk = (chunk << 1) | self.next_bit()
        return chunk

    def osk_bit(self) -> int:
        """One extra mapping-inversion bit, drawn after the basis chunk."""
        return self.next_bit()

    def clone(self) -> "RunningKeyStream":
        other = RunningKeyStream(self.key, self.spec)
        other._lfsr.state = self._lfsr.state
        other.bits_consumed = self.bits_consumed
        return other

    def chunk_array(self, n_slots: int, m_values: int, osk: bool = False):
        """Vectorized slot layout: n_slots chunks (and OSK bits when enabled).

        Stream layout per slot: chunk bits first, then the OSK bit.
        Returns (chunks, osk_bits) int arrays of length n_slots.
        """
        if m_values < 1 or (m_values & (m_values - 1)) != 0:
            raise ValueError(f"m_values={m_values} is not a power of two")
        nb = m_values.bit_length() - 1
        per_slot = nb + (1 if osk else 0)
        if per_slot == 0:
            return np.zeros(n_slots, dtype=np.int64), np.zeros(n_slots, dtype=np.int64)
        raw = self._lfsr.bits(n_slots * per_slot).reshape(n_slots, per_slot)
        self.bits_consumed += n_slots * per_slot
        chunks = np.zeros(n_slots, dtype=np.int64)
        for b in range(nb):  # big-endian packing, first bit is the MSB
            chunks = (chunks << 1) | raw[:, b]
        osks = raw[:, -1].copy() if osk else np.zeros(n_slots, dtype=np.int64)
        return chunks, osks
