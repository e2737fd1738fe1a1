"""Models module."""
import dataclasses
import enum
import json
from typing import Any


class Variable(enum.IntEnum):
    """Selector for the first or second variable of a bivariate series."""

    X = 0
    Y = 1


class Convention(enum.Enum):
    """Labelling convention used to turn coefficients into counts."""

    EDGE_LABELLED = "edge-labelled"
    VERTEX_LABELLED = "vertex-labelled"


class ConnectivityClass(enum.IntEnum):
    """Connectivity classes, ordered so that stronger compares greater."""

    DISCONNECTED = 0
    CONNECTED = 1
    TWO_CONNECTED = 2
    THREE_CONNECTED = 3


class Level(enum.Enum):
    """Count table levels."""

    ALL = "all"
    CONNECTED = "connected"
    TWO_CONNECTED = "two_connected"
    THREE_CONNECTED = "three_connected"


LEVEL_CLASSES = {
    Level.ALL: ConnectivityClass.DISCONNECTED,
    Level.CONNECTED: ConnectivityClass.CONNECTED,
    Level.TWO_CONNECTED: ConnectivityClass.TWO_CONNECTED,
    Level.THREE_CONNECTED: ConnectivityClass.THREE_CONNECTED,
}


@dataclasses.dataclass(frozen=True)
class CountTable:
    """Exact counts of labelled graphs by (vertices, edges)."""

    rows: dict[tuple[int, int], int]
    class_tag: Level = Level.ALL

    def count(self, n: int, m: int) -> int:
        """Get count for (n, m)."""
        return self.rows.get((n, m), 0)

    def totals(self) -> dict[int, int]:
        """Sum counts over edges for each vertex number."""
        result: dict[int, int] = {}
        for (n, _), value in sorted(self.rows.items()):
            result[n] = result.get(n, 0) + value
        return result

    def restricted(self, n_max: int, m_max: int | None = None) -> "CountTable":
        """Keep rows with 1 <= n <= n_max and m <= m_max."""
        return CountTable(
            {
                (n, m): value
                for (n, m), value in self.rows.items()
                if 1 <= n <= n_max and (m_max is None or m <= m_max) and value
            },
            self.class_tag,
        )

    def first_mismatch(
        self, other: "CountTable"
    ) -> None | tuple[tuple[int, int], int, int]:
        """Return the first (n, m) where the tables differ."""
        for key in sorted(set(self.rows) | set(other.rows)):
            mine, theirs = self.rows.get(key, 0), other.rows.get(key, 0)
            if mine != theirs:
                return key, mine, theirs
        return None

    def to_csv(self, header: dict[str, Any] | None = None) -> str:
        """Render as n,m,count CSV with per-n total rows."""
        lines = []
        if header is not None:
            lines.append("# " + json.dumps(header, sort_keys=True))
        lines.append("n,m,count")
        totals = self.totals()
        for n in sorted(totals):
            for m in sorted(m for (k, m) in self.rows if k == n):
                lines.append(f"{n},{m},{self.rows[(n, m)]}")
            lines.append(f"{n},total,{totals[n]}")
        return "\n".join(lines) + "\n"

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "class": self.class_tag.value,
            "rows": [[n, m, value] for (n, m), value in sorted(self.rows.items())],
        }


class TutteError(Exception):
    """Base error."""

    code = "TUTTE"


class ConstantTermViolation(TutteError):
    """exp/log precondition on the constant term failed."""

    code = "SERIES_CONSTANT_TERM"


class DivisibilityError(TutteError):
    """A monomial division was not exact."""

    code = "SERIES_DIVISIBILITY"


class ValuationError(TutteError):
    """A substitution is not well-founded at the requested truncation."""

    code = "SERIES_VALUATION"


class NonContractive(TutteError):
    """Fixed-point iteration did not converge."""

    code = "SERIES_NON_CONTRACTIVE"


class TruncationError(TutteError):
    """An input series is not precise enough."""

    code = "SERIES_TRUNCATION"


class InvalidSystem(TutteError):
    """Malformed series system."""

    code = "SERIES_INVALID_SYSTEM"


class SeriesFormatError(TutteError):
    """Malformed series JSON."""

    code = "SERIES_FORMAT"


class InvalidGraph(TutteError):
    """Malformed multigraph."""

    code = "GRAPH_INVALID"


class EmptyGraph(TutteError):
    """Graph without vertices."""

    code = "GRAPH_EMPTY"


class NotConnected(TutteError):
    """Graph is not connected."""

    code = "GRAPH_NOT_CONNECTED"


class NotTwoConnected(TutteError):
    """Graph is not 2-connected."""

    code = "GRAPH_NOT_TWO_CONNECTED"


class TooFewEdges(TutteError):
    """Graph has fewer than 3 edges."""

    code = "GRAPH_TOO_FEW_EDGES"


class UnknownVertex(TutteError):
    """Vertex not in graph."""

    code = "GRAPH_UNKNOWN_VERTEX"


class InvalidTree(TutteError):
    """Decomposition tree violates its invariants."""

    code = "GRAPH_INVALID_TREE"


class SizeLimit(TutteError):
    """Input too large for exhaustive enumeration."""

    code = "ORACLE_SIZE_LIMIT"


class NonIntegerCount(TutteError):
    """Extracted count is not a nonnegative integer."""

    code = "GRAMMAR_NON_INTEGER"


class InconsistentTerminals(TutteError):
    """Terminal series violate their derivative relations."""

    code = "GRAMMAR_TERMINALS"


class DoubleRouteMismatch(TutteError):
    """Two routes to the same series disagree."""

    code = "MAPS_DOUBLE_ROUTE"


class ConflictingFlags(TutteError):
    """Mutually exclusive flags given together."""

    code = "CLI_CONFLICTING_FLAGS"


class UsageError(TutteError):
    """Invalid command line usage."""

    code = "CLI_USAGE"


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ERRORS = {
    error.code: error.__doc__ or ""
    for error in (
        TutteError,
        ConstantTermViolation,
        DivisibilityError,
        ValuationError,
        NonContractive,
        TruncationError,
        InvalidSystem,
        SeriesFormatError,
        InvalidGraph,
        EmptyGraph,
        NotConnected,
        NotTwoConnected,
        TooFewEdges,
        UnknownVertex,
        InvalidTree,
        SizeLimit,
        NonIntegerCount,
        InconsistentTerminals,
        DoubleRouteMismatch,
        ConflictingFlags,
        UsageError,
    )
}


def exit_code(error: TutteError) -> int:
    """Map error to process exit code."""
    if isinstance(error, (ConflictingFlags, UsageError)):
        return EXIT_USAGE
    return EXIT_FAILURE
