"""Logic-family kernels: MD5 digesting and pointwise activations.

MD5 is implemented from scratch (Merkle-Damgard over 64-byte blocks with the
sine-derived constant table) so the digest loop itself is the measured unit of
work rather than a C library call; the test suite cross-checks it byte-exactly
against an independent reference.
"""

from __future__ import annotations

import math

from ..datasets import Tensor, TextCorpus
from ..errors import KernelError

_MASK32 = 0xFFFFFFFF

# K[i] = floor(abs(sin(i + 1)) * 2^32)
_K = [int(abs(math.sin(i + 1)) * 4294967296) & _MASK32 for i in range(64)]

_SHIFTS = (
    [7, 12, 17, 22] * 4
    + [5, 9, 14, 20] * 4
    + [4, 11, 16, 23] * 4
    + [6, 10, 15, 21] * 4
)


def _rotl(x: int, c: int) -> int:
    return ((x << c) | (x >> (32 - c))) & _MASK32


def md5_bytes(data: bytes) -> bytes:
    """16-byte MD5 digest of a byte string."""
    msg = bytearray(data)
    bit_len = (len(msg) * 8) & ((1 << 64) - 1)
    msg.append(0x80)
    while len(msg) % 64 != 56:
        msg.append(0)
    msg += bit_len.to_bytes(8, "little")

    a0, b0, c0, d0 = 0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476
    for start in range(0, len(msg), 64):
        block = msg[start : start + 64]
        m = [int.from_bytes(block[i : i + 4], "little") for i in range(0, 64, 4)]
        a, b, c, d = a0, b0, c0, d0
        for i in range(64):
            if i < 16:
                f = (b & c) | (~b & d)
                g = i
            elif i < 32:
                f = (d & b) | (~d & c)
                g = (5 * i + 1) % 16
            elif i < 48:
                f = b ^ c ^ d
                g = (3 * i + 5) % 16
            else:
                f = c ^ (b | (~d & _MASK32))
                g = (7 * i) % 16
            f = (f + a + _K[i] + m[g]) & _MASK32
            a, d, c = d, c, b
            b = (b + _rotl(f, _SHIFTS[i])) & _MASK32
        a0 = (a0 + a) & _MASK32
        b0 = (b0 + b) & _MASK32
        c0 = (c0 + c) & _MASK32
        d0 = (d0 + d) & _MASK32

    return b"".join(x.to_bytes(4, "little") for x in (a0, b0, c0, d0))


def md5_hex(data: bytes) -> str:
    return md5_bytes(data).hex()


def md5_corpus(corpus: TextCorpus) -> TextCorpus:
    """Per-record digests: one 32-char hex line per input line (UTF-8 bytes)."""
    return TextCorpus([md5_hex(line.encode("utf-8")) for line in corpus.documents])


def _sigmoid(v: float) -> float:
    # Split on sign to avoid exp overflow for large |v|.
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


_ACTIVATIONS = {
    "relu": lambda v: v if v > 0.0 else 0.0,
    "sigmoid": _sigmoid,
    "tanh": math.tanh,
}


def elementwise_activation(x: Tensor, fn: str) -> Tensor:
    """Pointwise relu/sigmoid/tanh; shape preserved."""
    try:
        f = _ACTIVATIONS[fn]
    except KeyError:
        raise KernelError(f"unknown activation {fn!r}") from None
    return Tensor(x.shape, [f(v) for v in x.data])
