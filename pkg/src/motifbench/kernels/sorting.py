"""Sort-family kernels."""

from __future__ import annotations

from ..datasets import Matrix, Table, TextCorpus
from ..errors import KernelError


def sort_records(data, key: int = 0):
    """Stable non-decreasing sort of a corpus's lines, a table's rows, or a
    matrix's rows.

    key selects the table/matrix column to order by; corpora order by the
    whole line and accept only key 0.
    """
    if isinstance(data, TextCorpus):
        if key != 0:
            raise KernelError(f"key {key} out of range for a text corpus (only 0)")
        return TextCorpus(sorted(data.documents))
    if isinstance(data, Table):
        if not 0 <= key < len(data.schema):
            raise KernelError(f"key {key} out of range for table with {len(data.schema)} columns")
        return Table(data.schema, sorted(data.rows, key=lambda row: row[key]))
    if isinstance(data, Matrix):
        if not 0 <= key < data.cols:
            raise KernelError(f"key {key} out of range for matrix with {data.cols} columns")
        rows = sorted(range(data.rows), key=lambda i: (data.at(i, key), i))
        out = []
        for i in rows:
            out.extend(data.row(i))
        return Matrix(data.rows, data.cols, out)
    raise KernelError(f"sort does not accept {type(data).__name__}")
