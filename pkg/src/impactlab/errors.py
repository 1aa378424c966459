"""Exception hierarchy shared by the pipeline stages."""


class ImpactLabError(Exception):
    """Base class for every error raised by impactlab."""


class GraphFormatError(ImpactLabError):
    """A serialized artifact could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphIntegrityError(ImpactLabError):
    """A reference points at a node that does not exist, or data disagree."""


class UnknownNodeError(GraphIntegrityError, KeyError):
    def __init__(self, node_id: str) -> None:
        self.node_id = node_id
        super().__init__(f"unknown node {node_id!r}")

    def __str__(self) -> str:
        return self.args[0]


class MiniLangError(ImpactLabError):
    """Syntax or static-semantics error in a MiniLang source."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class RedBaselineError(ImpactLabError):
    """The unmutated program does not pass its own test suite."""


class GenerationError(ImpactLabError):
    """Synthetic model generation failed after the retry budget."""
