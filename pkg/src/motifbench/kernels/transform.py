"""Transform-family kernels: radix-2 FFT in one and two dimensions plus direct
convolution.

The FFT is the iterative Cooley-Tukey form (bit-reversal permutation, then
butterflies of doubling span), restricted to power-of-two lengths. Matrix
wrappers pack complex planes as real matrices with interleaved re,im columns
so spectra can flow through the dataset pipeline.
"""

from __future__ import annotations

import math

from ..datasets import Matrix, Tensor
from ..errors import KernelError


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def fft(values, inverse: bool = False) -> list[complex]:
    """DFT (or inverse DFT with 1/n scaling) of a power-of-two-length sequence."""
    n = len(values)
    if not _is_pow2(n):
        raise KernelError(f"fft length must be a power of two, got {n}")
    data = [complex(v) for v in values]

    # bit-reversal permutation
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            data[i], data[j] = data[j], data[i]

    sign = 1.0 if inverse else -1.0
    span = 2
    while span <= n:
        ang = sign * 2.0 * math.pi / span
        w_span = complex(math.cos(ang), math.sin(ang))
        half = span >> 1
        for start in range(0, n, span):
            w = 1.0 + 0.0j
            for k in range(start, start + half):
                u = data[k]
                v = data[k + half] * w
                data[k] = u + v
                data[k + half] = u - v
                w *= w_span
        span <<= 1

    if inverse:
        inv_n = 1.0 / n
        data = [v * inv_n for v in data]
    return data


def fft2d(grid: list[list[complex]], inverse: bool = False) -> list[list[complex]]:
    """Row-wise then column-wise FFT of a rectangular grid; both dimensions
    must be powers of two."""
    rows = len(grid)
    if rows == 0:
        raise KernelError("fft2d needs a non-empty grid")
    cols = len(grid[0])
    if any(len(r) != cols for r in grid):
        raise KernelError("fft2d needs a rectangular grid")
    if not (_is_pow2(rows) and _is_pow2(cols)):
        raise KernelError(f"fft2d dims must be powers of two, got {rows}x{cols}")
    stage1 = [fft(row, inverse) for row in grid]
    out = [[0j] * cols for _ in range(rows)]
    for j in range(cols):
        col = fft([stage1[i][j] for i in range(rows)], inverse)
        for i in range(rows):
            out[i][j] = col[i]
    return out


# ---------------------------------------------------------------------------
# Matrix packing: a complex r x c plane travels as a real r x 2c matrix with
# columns re0, im0, re1, im1, ...


def _unpack_complex(m: Matrix) -> list[list[complex]]:
    if m.cols % 2 != 0:
        raise KernelError(f"interleaved complex matrix needs even cols, got {m.cols}")
    half = m.cols // 2
    return [
        [complex(m.at(i, 2 * j), m.at(i, 2 * j + 1)) for j in range(half)]
        for i in range(m.rows)
    ]


def _pack_complex(grid: list[list[complex]]) -> Matrix:
    data = []
    for row in grid:
        for z in row:
            data.append(z.real)
            data.append(z.imag)
    return Matrix(len(grid), 2 * len(grid[0]), data)


def matrix_fft(m: Matrix) -> Matrix:
    """Row-wise FFT of a real matrix -> interleaved complex matrix."""
    return _pack_complex([fft(m.row(i)) for i in range(m.rows)])


def matrix_ifft(m: Matrix) -> Matrix:
    """Row-wise inverse FFT of an interleaved complex matrix -> real matrix
    (imaginary part of the reconstruction is dropped)."""
    grid = _unpack_complex(m)
    out = [fft(row, inverse=True) for row in grid]
    return Matrix(m.rows, m.cols // 2, [z.real for row in out for z in row])


def matrix_fft2d(m: Matrix) -> Matrix:
    """2-D FFT of a real plane -> interleaved complex matrix."""
    if not (_is_pow2(m.rows) and _is_pow2(m.cols)):
        raise KernelError(f"fft2d dims must be powers of two, got {m.rows}x{m.cols}")
    grid = [[complex(v) for v in m.row(i)] for i in range(m.rows)]
    return _pack_complex(fft2d(grid))


def matrix_ifft2d(m: Matrix) -> Matrix:
    """Inverse 2-D FFT of an interleaved complex matrix -> real plane."""
    grid = _unpack_complex(m)
    if not _is_pow2(len(grid)):
        raise KernelError(f"fft2d dims must be powers of two, got {m.rows}x{m.cols // 2}")
    out = fft2d(grid, inverse=True)
    return Matrix(m.rows, m.cols // 2, [z.real for row in out for z in row])


# ---------------------------------------------------------------------------
# convolution


def convolution(x: Tensor, k: Tensor, stride: int = 1, padding: str = "valid") -> Tensor:
    """Direct cross-correlation of [batch, h, w, c_in] with [kh, kw, c_in, c_out].

    valid: no padding, output dim floor((dim - kdim) / stride) + 1.
    same:  zero padding split evenly (extra on the bottom/right), output dim
           ceil(dim / stride).
    """
    if x.rank != 4:
        raise KernelError(f"convolution input must be [batch, h, w, c], got {x.shape}")
    if k.rank != 4:
        raise KernelError(f"convolution kernel must be [kh, kw, c_in, c_out], got {k.shape}")
    if stride < 1:
        raise KernelError(f"stride must be >= 1, got {stride}")
    batch, h, w, cin = x.shape
    kh, kw, kcin, cout = k.shape
    if kcin != cin:
        raise KernelError(f"kernel expects {kcin} input channels, input has {cin}")
    if padding == "valid":
        if kh > h or kw > w:
            raise KernelError(f"kernel {kh}x{kw} larger than input {h}x{w}")
        oh = (h - kh) // stride + 1
        ow = (w - kw) // stride + 1
        pad_top = pad_left = 0
    elif padding == "same":
        oh = -(-h // stride)
        ow = -(-w // stride)
        pad_top = max((oh - 1) * stride + kh - h, 0) // 2
        pad_left = max((ow - 1) * stride + kw - w, 0) // 2
    else:
        raise KernelError(f"unknown padding {padding!r}")

    out = [0.0] * (batch * oh * ow * cout)
    xd, kd = x.data, k.data
    pos = 0
    for b in range(batch):
        for i in range(oh):
            for j in range(ow):
                base_i = i * stride - pad_top
                base_j = j * stride - pad_left
                acc = [0.0] * cout
                for u in range(kh):
                    si = base_i + u
                    if si < 0 or si >= h:
                        continue
                    for v in range(kw):
                        sj = base_j + v
                        if sj < 0 or sj >= w:
                            continue
                        xoff = ((b * h + si) * w + sj) * cin
                        koff = (u * kw + v) * cin * cout
                        for ci in range(cin):
                            xv = xd[xoff + ci]
                            kbase = koff + ci * cout
                            for co in range(cout):
                                acc[co] += xv * kd[kbase + co]
                out[pos : pos + cout] = acc
                pos += cout
    return Tensor((batch, oh, ow, cout), out)
