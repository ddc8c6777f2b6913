"""Dense bit-packed arrays of floating-point counters.

Many small counters packed back to back: slot i occupies bits
[i*width, (i+1)*width) of the payload, values stored least significant
bit first, and bit b of the payload lives in byte b >> 3 at in-byte
position b & 7.  Slots freely straddle byte boundaries; width 8 with a
4-bit significand is enough to count past 5 * 10**5 per slot at one
byte per counter.

A slot whose value reaches 2**width - 1 is saturated: it is counted
once in ``saturation_count``, further increments leave it unchanged,
and its estimate is flagged as a lower bound.

Snapshot format (version 1, all fields little-endian)::

    offset 0   magic        4 bytes  b"FPCT"
    offset 4   version      u16      1
    offset 6   d            u8
    offset 7   width        u8
    offset 8   num_slots    u64
    offset 16  saturation_count  u64
    offset 24  payload      ceil(num_slots * width / 8) bytes

The layout is byte-exact: snapshots written on any platform load on any
other.
"""

from __future__ import annotations

import struct
from typing import NamedTuple

from .chain import CounterParams, estimate_float
from .randbits import BitStream

_HEADER = struct.Struct("<4sHBBQQ")
_MAGIC = b"FPCT"
_VERSION = 1

__all__ = ["CounterTable", "SlotEstimate"]


class SlotEstimate(NamedTuple):
    value: float
    lower_bound: bool  # True when the slot is saturated


class CounterTable:
    """num_slots packed fp(d) counters, width bits per slot."""

    def __init__(self, num_slots: int, d: int, width: int):
        if num_slots < 1:
            raise ValueError("num_slots must be positive")
        if d < 0:
            raise ValueError("d must be nonnegative")
        if width < d + 1:
            raise ValueError("width must be at least d + 1 (one exponent bit)")
        if width > 32:
            raise ValueError("width must be at most 32")
        self.num_slots = num_slots
        self.d = d
        self.width = width
        self.params = CounterParams.fp(d)
        self.saturation_count = 0
        self._max_value = (1 << width) - 1
        self._data = bytearray((num_slots * width + 7) >> 3)

    @property
    def payload_bytes(self) -> int:
        return len(self._data)

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.num_slots:
            raise IndexError(f"slot {index} out of range (0..{self.num_slots - 1})")

    def get_state(self, index: int) -> int:
        self._check_index(index)
        bitpos = index * self.width
        start = bitpos >> 3
        end = (bitpos + self.width + 7) >> 3
        word = int.from_bytes(self._data[start:end], "little")
        return (word >> (bitpos & 7)) & self._max_value

    def _set_state(self, index: int, value: int) -> None:
        bitpos = index * self.width
        start = bitpos >> 3
        end = (bitpos + self.width + 7) >> 3
        shift = bitpos & 7
        word = int.from_bytes(self._data[start:end], "little")
        word &= ~(self._max_value << shift)
        word |= value << shift
        self._data[start:end] = word.to_bytes(end - start, "little")

    def increment(self, index: int, src: BitStream) -> int:
        """One counted event for slot `index`; returns the new state.

        Saturated slots are left unchanged (no bits consumed, no error).
        """
        k = self.get_state(index)
        if k == self._max_value:
            return k
        if src.bernoulli_pow2(k >> self.d):
            k += 1
            self._set_state(index, k)
            if k == self._max_value:
                self.saturation_count += 1
        return k

    def estimate(self, index: int) -> SlotEstimate:
        """Unbiased count estimate for the slot; a lower bound once saturated."""
        k = self.get_state(index)
        return SlotEstimate(estimate_float(self.params, k), k == self._max_value)

    # -- snapshots ------------------------------------------------------------

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(
            _MAGIC, _VERSION, self.d, self.width, self.num_slots, self.saturation_count
        )
        return header + bytes(self._data)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CounterTable":
        if len(blob) < _HEADER.size:
            raise ValueError("snapshot too short for its header")
        magic, version, d, width, num_slots, saturation_count = _HEADER.unpack_from(
            blob
        )
        if magic != _MAGIC:
            raise ValueError(f"bad snapshot magic {magic!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        table = cls(num_slots, d, width)
        payload = blob[_HEADER.size :]
        if len(payload) != len(table._data):
            raise ValueError(
                f"payload length {len(payload)} does not match "
                f"{num_slots} slots of {width} bits"
            )
        table._data[:] = payload
        table.saturation_count = saturation_count
        return table

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "CounterTable":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
