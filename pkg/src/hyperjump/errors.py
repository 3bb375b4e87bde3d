"""Exception types shared across the package.

Everything derives from HyperjumpError so callers (and the CLI) can catch
domain failures in one place and map them to exit code 1.
"""

from __future__ import annotations


class HyperjumpError(Exception):
    """Base class for all domain errors raised by this package."""


class DuplicateEdge(HyperjumpError, ValueError):
    """The same 3-set appears twice in an edge list."""


class RepeatedVertexInTriple(HyperjumpError, ValueError):
    """A triple uses some vertex more than once."""


class IndexOutOfRange(HyperjumpError, ValueError):
    """A vertex index falls outside [0, vertex_count)."""


class CapExceeded(HyperjumpError, ValueError):
    """Input too large for an enumeration-bounded operation."""


class DimensionMismatch(HyperjumpError, ValueError):
    """Weight vector dimension does not match the graph."""


class DomainError(HyperjumpError, ValueError):
    """Numeric argument outside the domain an operation is defined on."""


class SupportError(HyperjumpError, ValueError):
    """A weight vector lacks the full support the operation requires."""


class HypothesisViolated(HyperjumpError, ValueError):
    """The structural hypotheses of a checked statement do not hold."""


class UnsupportedOrder(HyperjumpError, ValueError):
    """No construction is available for this system order."""


class WrongResidue(HyperjumpError, ValueError):
    """Order fails the residue condition (t = 1 or 3 mod 6, per method)."""


class NotABijection(HyperjumpError, ValueError):
    """A relabeling map is not a bijection on the vertex set."""


class WeightMismatch(HyperjumpError, ValueError):
    """The closed-form weighting does not certify the expected bound."""


class FormatError(HyperjumpError, ValueError):
    """Malformed .3g / pair / certificate input."""


class IoError(HyperjumpError, OSError):
    """A certificate or graph file could not be read or written."""
