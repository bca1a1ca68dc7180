"""Error hierarchy and process exit codes.

Every library error derives from :class:`GeomdsError` and carries the exit
code the CLI uses when the error escapes a command: 0 success, 2 file/I-O
problems, 3 invalid input data or configuration, 4 numerical degeneracy,
5 linear-solver failure.
"""

EXIT_OK = 0
EXIT_IO = 2
EXIT_BAD_INPUT = 3
EXIT_DEGENERATE = 4
EXIT_SOLVER = 5


class GeomdsError(Exception):
    """Base class for all geomds errors."""

    exit_code = EXIT_BAD_INPUT


class FileAccessError(GeomdsError):
    """A required file is missing or unreadable."""

    exit_code = EXIT_IO


class ParseError(GeomdsError):
    """A file exists but its contents are malformed."""


class EmptyMesh(GeomdsError):
    """Mesh has too few vertices or no faces to be usable."""


class DegenerateEdge(GeomdsError):
    """An edge of zero length was produced (coincident endpoints)."""


class DisconnectedGraph(GeomdsError):
    """Graph has more than one connected component."""


class Unreachable(GeomdsError):
    """A shortest-path query hit an unreachable vertex."""


class ZeroAreaFace(GeomdsError):
    """A mesh face has zero area."""


class IsolatedVertex(GeomdsError):
    """A vertex belongs to no face, so it has no mass."""


class ShapeMismatch(GeomdsError):
    """Operands have incompatible shapes or sample orders."""


class MetricMismatch(GeomdsError):
    """Factorization carries the wrong metric tag for this operation."""


class IndexOutOfRange(GeomdsError):
    """A vertex index is outside [0, p)."""


class TooLarge(GeomdsError):
    """A dense operation was requested above the configured size cap."""


class NonSymmetric(GeomdsError):
    """Matrix expected to be symmetric (with zero diagonal) is not."""


class ZeroReference(GeomdsError):
    """Relative error against a reference of norm zero."""


class ZeroDistancePair(GeomdsError):
    """Relative pair error requested for a pair at distance zero."""


class InvalidConfig(GeomdsError):
    """Run configuration violates its declared bounds."""


class SingularSystem(GeomdsError):
    """Sparse system factorization found an exactly singular matrix."""

    exit_code = EXIT_DEGENERATE


class IllConditioned(GeomdsError):
    """Condition number beyond the usable threshold."""

    exit_code = EXIT_DEGENERATE


class DegenerateEmbedding(GeomdsError):
    """Not enough positive eigenvalues for the requested embedding."""

    exit_code = EXIT_DEGENERATE


class SolverFailure(GeomdsError):
    """Linear solver did not reach the required residual."""

    exit_code = EXIT_SOLVER


class ConnectivityWarning(UserWarning):
    """Graph construction produced more than one component."""


class RankDeficientWarning(UserWarning):
    """Fewer usable eigenvalues than requested; factor rank was reduced."""
