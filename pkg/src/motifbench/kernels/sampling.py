"""Sampling-family kernels: record sampling, spatial pooling, grid
downsampling, and dropout. All randomness comes from the seeded SplitMix64
stream, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from ..datasets import Matrix, Table, Tensor, TextCorpus
from ..errors import KernelError
from ..rng import SplitMix64


def random_sample(data, fraction: float, seed: int = 0):
    """Keep each record independently with probability `fraction`; relative
    order preserved; deterministic per (input, fraction, seed)."""
    if not 0.0 <= fraction <= 1.0:
        raise KernelError(f"fraction must be in [0, 1], got {fraction}")
    rng = SplitMix64(seed)
    if isinstance(data, TextCorpus):
        return TextCorpus([line for line in data.documents if rng.random() < fraction])
    if isinstance(data, Table):
        return Table(data.schema, [row for row in data.rows if rng.random() < fraction])
    raise KernelError(f"random_sample does not accept {type(data).__name__}")


def pool(x: Tensor, window: int, stride: int, mode: str) -> Tensor:
    """max/avg pooling over the spatial dims of a [batch, h, w, c] tensor;
    output spatial size is floor((dim - window) / stride) + 1."""
    if x.rank != 4:
        raise KernelError(f"pool needs a [batch, h, w, c] tensor, got shape {x.shape}")
    if window < 1 or stride < 1:
        raise KernelError(f"window and stride must be >= 1, got {window}, {stride}")
    if mode not in ("max", "avg"):
        raise KernelError(f"unknown pooling mode {mode!r}")
    batch, h, w, c = x.shape
    if window > h or window > w:
        raise KernelError(f"window {window} larger than spatial dims {h}x{w}")
    oh = (h - window) // stride + 1
    ow = (w - window) // stride + 1
    area = window * window
    out = []
    for b in range(batch):
        for i in range(oh):
            for j in range(ow):
                for ch in range(c):
                    vals = [
                        x.data[((b * h + (i * stride + u)) * w + (j * stride + v)) * c + ch]
                        for u in range(window)
                        for v in range(window)
                    ]
                    out.append(max(vals) if mode == "max" else sum(vals) / area)
    return Tensor((batch, oh, ow, c), out)


def downsample(m: Matrix, factor: int) -> Matrix:
    """Keep every factor-th row and column starting at (0, 0)."""
    if factor < 1:
        raise KernelError(f"factor must be >= 1, got {factor}")
    rows = (m.rows + factor - 1) // factor
    cols = (m.cols + factor - 1) // factor
    out = [m.at(i * factor, j * factor) for i in range(rows) for j in range(cols)]
    return Matrix(rows, cols, out)


def dropout(x: Tensor, p: float, seed: int = 0) -> Tensor:
    """Inverted dropout: zero each element with probability p, scale survivors
    by 1/(1-p); p=1 zeroes everything without scaling."""
    if not 0.0 <= p <= 1.0:
        raise KernelError(f"p must be in [0, 1], got {p}")
    if p == 1.0:
        return Tensor(x.shape, [0.0] * len(x.data))
    rng = SplitMix64(seed)
    scale = 1.0 / (1.0 - p)
    return Tensor(x.shape, [0.0 if rng.random() < p else v * scale for v in x.data])
