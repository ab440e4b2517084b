"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: usage problems exit 2,
workload-spec validation failures exit 3, everything else that goes wrong
at runtime exits 1.
"""

from __future__ import annotations


class MotifBenchError(Exception):
    """Base class for all toolkit errors."""


class InvariantError(MotifBenchError, ValueError):
    """A constructor or generator was handed invariant-violating input."""


class FormatError(MotifBenchError):
    """A data file could not be parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = path if line is None else f"{path}:{line}"
            where = f"{where}: "
        super().__init__(f"{where}{message}")


class KernelError(MotifBenchError, ValueError):
    """A motif kernel rejected its operands or parameters."""


class SpecError(MotifBenchError):
    """A workload spec is syntactically or semantically invalid.

    Carries the full diagnostic list so callers can report every problem,
    not just the first one.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class EventError(MotifBenchError):
    """An event sample is unusable for the requested analysis."""


class MissingEventsError(EventError):
    """Tree formulas reference events absent from the sample."""

    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("missing events: " + ", ".join(self.names))


class FormulaError(MotifBenchError):
    """A metric formula failed to parse or evaluate."""
