"""Matrix-family kernels: multiplication, elementwise combination, the dense
layer, and the sigmoid/tanh activations this catalog tags as matrix work.
"""

from __future__ import annotations

import math

from ..datasets import Matrix, Tensor
from ..errors import KernelError


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """c[i][j] = sum_k a[i][k] * b[k][j]."""
    if a.cols != b.rows:
        raise KernelError(f"dimension mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    n, k, m = a.rows, a.cols, b.cols
    # Walk b by rows (contiguous) and accumulate into the output row: one pass
    # per a-element instead of gathering a strided b-column per output cell.
    out = [0.0] * (n * m)
    for i in range(n):
        arow = a.data[i * k : (i + 1) * k]
        obase = i * m
        for kk in range(k):
            aik = arow[kk]
            brow = b.data[kk * m : (kk + 1) * m]
            for j in range(m):
                out[obase + j] += aik * brow[j]
    return Matrix(n, m, out)


_ELEMENTWISE = {
    "add": lambda x, y: x + y,
    "subtract": lambda x, y: x - y,
    "hadamard": lambda x, y: x * y,
}


def mat_elementwise(a: Matrix, b: Matrix, op: str) -> Matrix:
    """Pointwise add | subtract | hadamard over identically shaped matrices."""
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise KernelError(
            f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}"
        )
    try:
        f = _ELEMENTWISE[op]
    except KeyError:
        raise KernelError(f"unknown elementwise op {op!r}") from None
    return Matrix(a.rows, a.cols, [f(x, y) for x, y in zip(a.data, b.data)])


def fully_connected(x: Tensor, w: Matrix, bias: Tensor) -> Tensor:
    """y = x @ w + bias with bias broadcast over the batch.

    x is [batch, ...features]; trailing dimensions are flattened to the layer
    input width, so a pooled conv volume feeds the dense head directly.
    """
    batch = x.shape[0]
    feat = 1
    for d in x.shape[1:]:
        feat *= d
    if feat != w.rows:
        raise KernelError(
            f"input features {feat} (shape {x.shape}) != weight rows {w.rows}"
        )
    if bias.rank != 1 or bias.shape[0] != w.cols:
        raise KernelError(
            f"bias shape {bias.shape} != weight output width ({w.cols},)"
        )
    out = []
    for b in range(batch):
        xrow = x.data[b * feat : (b + 1) * feat]
        for o in range(w.cols):
            acc = math.fsum(xrow[i] * w.data[i * w.cols + o] for i in range(feat))
            out.append(acc + bias.data[o])
    return Tensor((batch, w.cols), out)
