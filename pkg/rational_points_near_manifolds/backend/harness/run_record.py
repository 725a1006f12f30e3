"""This module implements run records of experiments and their JSON and CSV persistence."""
import csv
import json
import logging
import math
import pathlib
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

from rational_points_near_manifolds.backend.counting.count_query import CSV_HEADER
from rational_points_near_manifolds.errors import ExperimentConfigError
from rational_points_near_manifolds.version import __version__

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RUN_CSV_HEADER = CSV_HEADER + ("fitted_ratio",)


def timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunRow:
    """The result of one ladder rung."""
    Q: int
    delta: float
    count: float
    N0: float
    main_term: float
    ratio: Optional[float]
    points_scanned: int = 0
    wall_time: float = 0.0
    fitted_ratio: Optional[float] = None

    @classmethod
    def from_result(cls, result):
        """Creates a row from a count result.

        Args:
            result: The count result.

        Returns:
            The run row.
        """
        return cls(Q=result.query.Q, delta=float(result.query.delta), count=result.count, N0=result.N0,
                   main_term=result.main_term, ratio=result.ratio, points_scanned=result.points_scanned,
                   wall_time=result.wall_time)

    def to_dict(self):
        return {
            "Q": self.Q, "delta": self.delta, "count": self.count, "N0": self.N0, "main_term": self.main_term,
            "ratio": self.ratio, "points_scanned": self.points_scanned, "wall_time": self.wall_time,
            "fitted_ratio": self.fitted_ratio,
        }

    def csv_row(self):
        return (self.Q, self.delta, self.count, self.N0, self.main_term, "" if self.ratio is None else self.ratio,
                "" if self.fitted_ratio is None else self.fitted_ratio)


@dataclass(frozen=True)
class RunRecord:
    """The outcome of an experiment: the config snapshot, the rows sorted by Q and the fitted constants."""
    config: dict
    n: int
    R: int
    rows: tuple
    fitted_constant: Optional[float] = None
    envelope: Optional[dict] = None
    curvature: Optional[dict] = None
    started_at: str = ""
    finished_at: str = ""
    version: str = __version__
    schema_version: int = SCHEMA_VERSION
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        qs = [row.Q for row in self.rows]
        if qs != sorted(qs):
            raise ExperimentConfigError("Run rows must be sorted by Q.")
        for row in self.rows:
            if row.main_term > 0 and (row.ratio is None or not math.isfinite(row.ratio)):
                raise ExperimentConfigError(f'Ratio of rung Q={row.Q} is not finite.')

    @property
    def q_list(self):
        return [row.Q for row in self.rows]

    @property
    def ratios(self):
        return [row.ratio for row in self.rows]

    def with_envelope(self, envelope):
        return replace(self, envelope=envelope)

    def to_dict(self):
        """Converts the record to a JSON-compatible mapping.

        Returns:
            The mapping.
        """
        return {
            "schema_version": self.schema_version,
            "version": self.version,
            "config": self.config,
            "n": self.n,
            "R": self.R,
            "rows": [row.to_dict() for row in self.rows],
            "fitted_constant": self.fitted_constant,
            "envelope": self.envelope,
            "curvature": self.curvature,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, data):
        """Restores a record from its mapping.

        Args:
            data: The mapping written by to_dict.

        Returns:
            The run record.
        """
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ExperimentConfigError(f'Unsupported run record schema {data.get("schema_version")!r}, '
                                        f'expected {SCHEMA_VERSION}.')
        try:
            return cls(config=data["config"], n=data["n"], R=data["R"],
                       rows=tuple(RunRow(**row) for row in data["rows"]),
                       fitted_constant=data.get("fitted_constant"), envelope=data.get("envelope"),
                       curvature=data.get("curvature"), started_at=data.get("started_at", ""),
                       finished_at=data.get("finished_at", ""), version=data.get("version", ""),
                       extras=data.get("extras", {}))
        except (KeyError, TypeError) as exc:
            raise ExperimentConfigError(f'Run record is malformed: {exc}') from exc


def write_run_record(record, path):
    """Writes a run record as JSON.

    Args:
        record: The run record.
        path: The target file.

    Returns:
        The written path.
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(record.to_dict(), file, indent=2)
    logger.info(f'Wrote run record to "{path}".')
    return path


def load_run_record(path):
    """Loads a run record from JSON.

    Args:
        path: The record file.

    Returns:
        The run record.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ExperimentConfigError(f'Run record "{path}" does not exist.')
    try:
        with open(path, "r", encoding="utf-8") as file:
            data = json.load(file)
    except json.JSONDecodeError as exc:
        raise ExperimentConfigError(f'Run record "{path}" is malformed: {exc}') from exc
    return RunRecord.from_dict(data)


def append_csv_rows(path, rows, header=CSV_HEADER):
    """Appends rows to a CSV file and writes the header if the file is new.

    Args:
        path: The CSV file.
        rows: The row tuples.
        header: The header tuple.

    Returns:
        The path.
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    new_file = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        if new_file:
            writer.writerow(header)
        writer.writerows(rows)
    return path
