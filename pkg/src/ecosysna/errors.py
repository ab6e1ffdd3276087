"""Exception hierarchy shared across the toolkit.

The CLI maps ``ValidationError`` subclasses to exit code 1 and ``OSError``
to exit code 2.
"""


class EcosysnaError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(EcosysnaError, ValueError):
    """Input or configuration failed validation."""


class DomainError(ValidationError):
    """A raw domain string is empty after normalization."""

    def __init__(self, raw):
        super().__init__(f"cannot normalize domain {raw!r}")
        self.raw = raw


class NodeNotFoundError(EcosysnaError, KeyError):
    def __init__(self, node):
        super().__init__(node)
        self.node = node

    def __str__(self):
        return f"unknown node {self.node!r}"


class GraphFrozenError(EcosysnaError, RuntimeError):
    """Mutation attempted on a finalized graph."""


class EmptyDatasetError(ValidationError):
    """A transition source produced zero valid records."""


class ConfigError(ValidationError):
    pass


class FixtureError(ValidationError):
    """Fixture JSON violates the schema; ``path`` names the offending location."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class UndefinedModularityError(ValidationError):
    """Modularity is undefined for graphs without edge weight."""


class SizeLimitError(ValidationError):
    pass


class PartitionMismatchError(ValidationError):
    def __init__(self, missing, extra=()):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        parts = []
        if self.missing:
            parts.append("uncovered domains: " + ", ".join(self.missing))
        if self.extra:
            parts.append("unknown domains: " + ", ".join(self.extra))
        super().__init__("; ".join(parts) or "partition mismatch")
