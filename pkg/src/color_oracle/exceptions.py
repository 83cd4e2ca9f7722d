"""Custom exceptions for the color distance oracles."""

from typing import Optional


class OracleError(Exception):
    """Base exception for all oracle errors."""

    def __init__(
        self,
        message: str,
        *,
        vertex: Optional[int] = None,
        color: Optional[int] = None,
        operation: Optional[str] = None,
    ):
        """
        Initialize oracle error with context.

        Args:
            message: Human-readable error description
            vertex: Vertex id involved (if any)
            color: Color id involved (if any)
            operation: Operation that failed (e.g., "query", "build_cover")
        """
        self.message = message
        self.vertex = vertex
        self.color = color
        self.operation = operation
        super().__init__(message)

    def __str__(self):
        parts = [self.message]
        if self.operation:
            parts.append(f"(op: {self.operation})")
        if self.vertex is not None:
            parts.append(f"(vertex: {self.vertex})")
        if self.color is not None:
            parts.append(f"(color: {self.color})")
        return " ".join(parts)


class InvalidVertex(OracleError):
    """Vertex id outside [0, n)."""


class InvalidK(OracleError):
    """Level count k < 1."""


class InvalidDistortion(OracleError):
    """Cover distortion factor D < 1."""


class InvalidBase(OracleError):
    """Path interval base b < 2."""


class InvalidRange(OracleError):
    """Range query with a > b or bounds outside the array."""


class EmptyInput(OracleError):
    """A structure was asked to build over nothing."""


class NotATree(OracleError):
    """
    Parent map does not describe a single rooted tree.

    Raised when:
    - more than one node maps to itself (forest)
    - a node's parent chain never reaches the root (cycle)
    """


class DimensionError(OracleError):
    """Vector length does not match the gadget's matrix."""


class VariantError(OracleError):
    """Operation is not defined for this gadget variant."""


class DisconnectedInput(OracleError):
    """A per-component builder was handed vertices from several components."""


class NoSuchColor(OracleError):
    """
    No vertex carries the queried color.

    Routing: the query has no finite answer; the CLI reports the pair and skips it.
    """


class NoSuchColorInComponent(NoSuchColor):
    """The color exists, but only in components other than the query vertex's."""


class NoSuchColorInTree(NoSuchColor):
    """No leaf of the HST is colored with the queried color under the active variant."""


class KeyNotFound(OracleError, KeyError):
    """Delete of a key absent from an ordered key set."""

    def __str__(self):
        return OracleError.__str__(self)


class RetryBudgetExceeded(OracleError):
    """
    A Las-Vegas loop ran out of attempts.

    Raised when:
    - no sampled hierarchy of a component has a nonempty top level
    - no candidate ultrametric (nor the anchored fallback) certifies any vertex

    Routing: fail fast; raise the attempt budget in the config or change the seed.
    """

    def __init__(self, message: str, attempts: Optional[int] = None, **kwargs):
        """
        Initialize with the number of attempts spent.

        Args:
            message: Error description
            attempts: Attempts made before giving up
            **kwargs: Additional context (vertex, color, operation)
        """
        self.attempts = attempts
        super().__init__(message, **kwargs)


class ContractViolation(OracleError):
    """A distance estimate outside the factor-b contract left no candidate answer."""


class ParseError(OracleError):
    """Malformed line in an input file."""

    def __init__(self, message: str, line_number: Optional[int] = None, **kwargs):
        """
        Initialize with the offending line.

        Args:
            message: Error description
            line_number: 1-based line number in the input file
            **kwargs: Additional context
        """
        self.line_number = line_number
        super().__init__(message, **kwargs)

    def __str__(self):
        text = super().__str__()
        if self.line_number is not None:
            text = f"line {self.line_number}: {text}"
        return text


class RangeError(ParseError):
    """An id in an input file lies outside its declared range."""


class ConfigurationError(OracleError):
    """
    Missing or invalid configuration.

    Raised when:
    - config YAML cannot be parsed
    - a run parameter is out of range (k, D, base, window)

    Routing: fail fast, the user needs to fix flags or config.
    """
