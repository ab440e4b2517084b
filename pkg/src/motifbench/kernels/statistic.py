"""Statistic-family kernels: token counting, grouped aggregation, record
counting, and the two normalization layers.
"""

from __future__ import annotations

import math

from ..datasets import (
    Graph,
    KeyValueSet,
    Matrix,
    Payload,
    Table,
    Tensor,
    TextCorpus,
)
from ..errors import KernelError


def wordcount(corpus: TextCorpus) -> KeyValueSet:
    """Multiplicity of every whitespace-delimited token across all lines."""
    counts: dict[str, int] = {}
    for line in corpus.documents:
        for token in line.split():
            counts[token] = counts.get(token, 0) + 1
    return KeyValueSet({token: str(n) for token, n in counts.items()})


def aggregate(t: Table, group_col: str, agg: str, target_col: str | None = None) -> Table:
    """One row per distinct group key, in first-appearance order.

    count needs no target; sum/avg need a numeric target column and accumulate
    with exact extended-precision summation.
    """
    if agg not in ("count", "sum", "avg"):
        raise KernelError(f"unknown aggregate {agg!r}")
    try:
        gi = t.column_index(group_col)
    except KeyError:
        raise KernelError(f"unknown column {group_col!r}") from None
    group_kind = t.schema[gi][1]

    if agg == "count":
        order = []
        counts: dict[object, int] = {}
        for row in t.rows:
            key = row[gi]
            if key not in counts:
                order.append(key)
                counts[key] = 0
            counts[key] += 1
        schema = [(group_col, group_kind), ("count", "integer")]
        return Table(schema, [(k, counts[k]) for k in order])

    if target_col is None:
        raise KernelError(f"{agg} needs a target column")
    try:
        ti = t.column_index(target_col)
    except KeyError:
        raise KernelError(f"unknown column {target_col!r}") from None
    target_kind = t.schema[ti][1]
    if target_kind not in ("integer", "real"):
        raise KernelError(f"{agg} target {target_col!r} must be numeric, is {target_kind}")

    order = []
    values: dict[object, list[float]] = {}
    for row in t.rows:
        key = row[gi]
        if key not in values:
            order.append(key)
            values[key] = []
        values[key].append(row[ti])

    if agg == "sum":
        if target_kind == "integer":
            schema = [(group_col, group_kind), (f"sum_{target_col}", "integer")]
            return Table(schema, [(k, sum(values[k])) for k in order])
        schema = [(group_col, group_kind), (f"sum_{target_col}", "real")]
        return Table(schema, [(k, math.fsum(values[k])) for k in order])

    schema = [(group_col, group_kind), (f"avg_{target_col}", "real")]
    return Table(schema, [(k, math.fsum(values[k]) / len(values[k])) for k in order])


def count_records(payload: Payload) -> KeyValueSet:
    """Record count of any payload: lines, rows, matrix rows, leading tensor
    dimension, edges, or entries."""
    if isinstance(payload, TextCorpus):
        n = len(payload.documents)
    elif isinstance(payload, Table):
        n = len(payload.rows)
    elif isinstance(payload, Matrix):
        n = payload.rows
    elif isinstance(payload, Tensor):
        n = payload.shape[0]
    elif isinstance(payload, Graph):
        n = len(payload.edges)
    elif isinstance(payload, KeyValueSet):
        n = len(payload.entries)
    else:
        raise KernelError(f"count does not accept {type(payload).__name__}")
    return KeyValueSet({"count": str(n)})


def _fibers(shape: tuple[int, ...], axis: int):
    """Yield flat-index lists of every 1-D fiber along `axis` (row-major)."""
    strides = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    other = [i for i in range(len(shape)) if i != axis]
    base_indices = [0]
    for ax in other:
        base_indices = [b + k * strides[ax] for b in base_indices for k in range(shape[ax])]
    step = strides[axis]
    n = shape[axis]
    for base in base_indices:
        yield [base + k * step for k in range(n)]


def batch_norm(x: Tensor, axis: int = 0, epsilon: float = 1e-5) -> Tensor:
    """Standardize every 1-D fiber along `axis` to mean 0, variance 1
    (population variance, epsilon-guarded)."""
    if not 0 <= axis < x.rank:
        raise KernelError(f"axis {axis} out of range for rank-{x.rank} tensor")
    if not epsilon > 0:
        raise KernelError(f"epsilon must be > 0, got {epsilon}")
    out = list(x.data)
    for fiber in _fibers(x.shape, axis):
        n = len(fiber)
        mean = math.fsum(x.data[i] for i in fiber) / n
        var = math.fsum((x.data[i] - mean) ** 2 for i in fiber) / n
        scale = 1.0 / math.sqrt(var + epsilon)
        for i in fiber:
            out[i] = (x.data[i] - mean) * scale
    return Tensor(x.shape, out)


def cosine_norm(x: Tensor, axis: int = 0) -> Tensor:
    """Scale every 1-D fiber along `axis` to unit L2 norm."""
    if not 0 <= axis < x.rank:
        raise KernelError(f"axis {axis} out of range for rank-{x.rank} tensor")
    out = list(x.data)
    for fiber in _fibers(x.shape, axis):
        norm = math.sqrt(math.fsum(x.data[i] ** 2 for i in fiber))
        if norm == 0.0:
            raise KernelError("cosine_norm hit a zero-norm slice")
        for i in fiber:
            out[i] = x.data[i] / norm
    return Tensor(x.shape, out)
