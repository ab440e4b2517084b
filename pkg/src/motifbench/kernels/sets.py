"""Set-family kernels: substring search over corpora, key-value set algebra,
and the relational operators (which this catalog files under set computation).
"""

from __future__ import annotations

from ..datasets import KeyValueSet, Table, TextCorpus
from ..errors import KernelError

_COMPARATORS = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
}


def grep(corpus: TextCorpus, pattern: str) -> TextCorpus:
    """Lines containing the literal substring, original order preserved."""
    if not pattern:
        raise KernelError("grep pattern must be non-empty")
    return TextCorpus([line for line in corpus.documents if pattern in line])


def set_op(a: KeyValueSet, b: KeyValueSet, op: str) -> KeyValueSet:
    """union | intersect | difference over key sets; on union collisions the
    value from a wins, intersect and difference keep a's values."""
    if op == "union":
        merged = dict(b.entries)
        merged.update(a.entries)
        return KeyValueSet(merged)
    if op == "intersect":
        return KeyValueSet({k: v for k, v in a.entries.items() if k in b.entries})
    if op == "difference":
        return KeyValueSet({k: v for k, v in a.entries.items() if k not in b.entries})
    raise KernelError(f"unknown set op {op!r}")


def project(t: Table, columns: list[str]) -> Table:
    """Keep only the named columns, in the order given."""
    try:
        idx = [t.column_index(c) for c in columns]
    except KeyError as exc:
        raise KernelError(f"unknown column {exc.args[0]!r}") from None
    if not idx:
        raise KernelError("project needs at least one column")
    schema = [t.schema[i] for i in idx]
    rows = [tuple(row[i] for i in idx) for row in t.rows]
    return Table(schema, rows)


def _coerce_literal(kind: str, value):
    try:
        if kind == "integer":
            return int(value)
        if kind == "real":
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise KernelError(f"literal {value!r} is not a valid {kind}") from None


def filter_rows(t: Table, column: str, cmp: str, value) -> Table:
    """Rows whose cell in `column` satisfies `cmp` against the literal;
    surviving row order preserved. `select` is this same operator."""
    if cmp not in _COMPARATORS:
        raise KernelError(f"unknown comparator {cmp!r}")
    try:
        i = t.column_index(column)
    except KeyError:
        raise KernelError(f"unknown column {column!r}") from None
    lit = _coerce_literal(t.schema[i][1], value)
    pred = _COMPARATORS[cmp]
    return Table(t.schema, [row for row in t.rows if pred(row[i], lit)])


def table_union(a: Table, b: Table) -> Table:
    """Bag-semantics union: concatenation; schemas must match exactly."""
    if a.schema != b.schema:
        raise KernelError(f"schema mismatch on union: {a.schema} vs {b.schema}")
    return Table(a.schema, list(a.rows) + list(b.rows))
