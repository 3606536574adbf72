"""Exception types shared across the pipeline.

Every error that reaches the CLI maps onto an exit code: domain errors
(bad input files, integrity violations, backend protocol faults) exit 1,
usage errors (bad flags, impossible configuration) exit 2.
"""


class RationaleMinerError(Exception):
    """Base class for all domain errors raised by this package."""


class FormatError(RationaleMinerError):
    """An input file does not conform to its declared schema."""

    def __init__(self, message: str, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += f"{path}"
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class GraphIntegrityError(RationaleMinerError):
    """A persisted or in-memory graph violates a structural invariant."""


class SchemaVersionError(GraphIntegrityError):
    """A persisted graph carries an unknown schema version."""


class ExtractorError(RationaleMinerError):
    """An extractor reply could not be obtained or parsed."""


class ScorerTransportError(RationaleMinerError):
    """A scorer backend could not be reached; partial work is discarded."""


class ScorerProtocolError(RationaleMinerError):
    """A scorer backend replied with data that violates the wire contract."""


class UsageError(RationaleMinerError):
    """The requested run is impossible with the given configuration."""
