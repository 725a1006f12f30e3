"""This module implements the counting query and result records."""
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction

CSV_HEADER = ("Q", "delta", "count", "N0", "main_term", "ratio")


@dataclass(frozen=True)
class CountQuery:
    """A query for the rational points a/q, q <= Q, with ||q f_r(a/q)|| <= delta for all r."""
    Q: int
    delta: Any
    weighted: bool = False
    weight: Optional[Any] = None

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 1:
            raise ValueError(f'Q must be a positive integer, got {self.Q}.')
        object.__setattr__(self, "Q", int(self.Q))
        if not 0 <= as_fraction(self.delta) <= Fraction(1, 2):
            raise ValueError(f'delta must lie in [0, 1/2], got {self.delta}.')
        if self.weighted and self.weight is None:
            raise ValueError("A weighted query needs a weight function.")

    def to_dict(self):
        data = {"Q": self.Q, "delta": float(self.delta), "weighted": self.weighted}
        if self.weight is not None:
            data["weight"] = {"center": [str(c) for c in self.weight.center],
                              "radius": str(self.weight.support_radius), "scale": str(self.weight.scale)}
        return data


@dataclass(frozen=True)
class CountResult:
    """The count of a query with the base count N0 and the main term (2 delta)^R N0.

    For unweighted queries N0 is the number of base points scanned.
    """
    query: CountQuery
    count: Any
    N0: float
    main_term: float
    ratio: Optional[float]
    points_scanned: int
    wall_time: float
    exact: bool = True
    near_threshold: int = 0

    @classmethod
    def build(cls, query, R, count, N0, points_scanned, wall_time, exact=True, near_threshold=0):
        """Creates a result and derives the main term and the ratio.

        Args:
            query: The count query.
            R: The codimension.
            count: The (weighted) count.
            N0: The base count.
            points_scanned: The number of base points scanned.
            wall_time: The wall time in seconds.
            exact: Whether all height decisions were exact.
            near_threshold: The number of float decisions within the guard band.

        Returns:
            The count result.
        """
        main_term = float((2 * as_fraction(query.delta)) ** R) * float(N0)
        ratio = float(count) / main_term if main_term > 0 else None
        return cls(query=query, count=count, N0=float(N0), main_term=main_term, ratio=ratio,
                   points_scanned=points_scanned, wall_time=wall_time, exact=exact, near_threshold=near_threshold)

    def with_wall_time(self, wall_time):
        return dataclasses.replace(self, wall_time=wall_time)

    def to_dict(self):
        """Converts the result to a JSON-compatible mapping.

        Returns:
            The mapping.
        """
        return {
            "query": self.query.to_dict(),
            "count": self.count if isinstance(self.count, int) else float(self.count),
            "N0": self.N0,
            "main_term": self.main_term,
            "ratio": self.ratio,
            "points_scanned": self.points_scanned,
            "wall_time": self.wall_time,
            "exact": self.exact,
            "near_threshold": self.near_threshold,
        }

    def csv_row(self):
        """Gets the row (Q, delta, count, N0, main_term, ratio).

        Returns:
            The row tuple.
        """
        return (self.query.Q, float(self.query.delta), self.count, self.N0, self.main_term,
                "" if self.ratio is None else self.ratio)
