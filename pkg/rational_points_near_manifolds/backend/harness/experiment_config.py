"""This module implements experiment configurations and their loading from JSON or TOML files."""
import json
import logging
import pathlib
import tomllib
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from rational_points_near_manifolds.backend.counting.rational_point_counter import DEFAULT_SCAN_CAP
from rational_points_near_manifolds.backend.harness.delta_rule import DEFAULT_EPSILON, DeltaRule, parse_delta_rule
from rational_points_near_manifolds.definitions import MANIFOLD_DIR
from rational_points_near_manifolds.errors import ExperimentConfigError

logger = logging.getLogger(__name__)


class ExperimentMode(Enum):
    """An enum of the possible experiment modes."""
    NEAR = 1  # Counts near the manifold, N(M; Q, delta) or N_w(Q, delta)
    ON = 2  # Counts on the manifold, N(M; Q, 0) in exact arithmetic
    BASE = 3  # Base counts N0 and the density estimate


@dataclass(frozen=True)
class ExperimentConfig:
    """A ladder of counts over increasing Q with a delta rule."""
    manifold: pathlib.Path
    q_list: tuple
    delta_rule: DeltaRule
    mode: ExperimentMode = ExperimentMode.NEAR
    weight: Optional[dict] = None
    weighted: bool = False
    output_dir: Optional[pathlib.Path] = None
    name: str = "experiment"
    workers: int = 1
    epsilon: float = DEFAULT_EPSILON
    require_curvature: bool = True
    scan_cap: int = DEFAULT_SCAN_CAP
    source: Optional[pathlib.Path] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.q_list:
            raise ExperimentConfigError("The Q list is empty.")
        if any(int(Q) != Q or Q < 1 for Q in self.q_list):
            raise ExperimentConfigError(f'Q values must be positive integers, got {list(self.q_list)}.')
        if any(b <= a for a, b in zip(self.q_list, self.q_list[1:])):
            raise ExperimentConfigError(f'The Q list must be strictly increasing, got {list(self.q_list)}.')
        if self.workers < 1:
            raise ExperimentConfigError(f'workers must be positive, got {self.workers}.')
        if self.scan_cap < 1:
            raise ExperimentConfigError(f'scan_cap must be positive, got {self.scan_cap}.')

    def to_dict(self):
        """Converts the config to a JSON-compatible mapping (the snapshot stored in run records).

        Returns:
            The mapping.
        """
        data = {
            "manifold": str(self.manifold),
            "q_list": list(self.q_list),
            "delta_rule": str(self.delta_rule),
            "mode": self.mode.name.lower(),
            "weighted": self.weighted,
            "name": self.name,
            "workers": self.workers,
            "epsilon": self.epsilon,
            "require_curvature": self.require_curvature,
            "scan_cap": self.scan_cap,
        }
        if self.weight is not None:
            data["weight"] = dict(self.weight)
        if self.output_dir is not None:
            data["output_dir"] = str(self.output_dir)
        return data


def _resolve(path, base_dir):
    path = pathlib.Path(path)
    if path.is_absolute():
        return path
    for directory in (base_dir, MANIFOLD_DIR):
        if directory is not None and directory.joinpath(path).exists():
            return directory.joinpath(path)
    return (base_dir or pathlib.Path.cwd()).joinpath(path)


def experiment_config_from_dict(data, base_dir=None, source=None):
    """Builds an experiment config from a parsed mapping.

    Args:
        data: The mapping with keys manifold, q_list, delta_rule and optional mode, weight, weighted, output_dir,
            name, workers, epsilon, require_curvature, scan_cap.
        base_dir: The directory relative paths are resolved against (then the bundled manifolds).
        source: The originating file.

    Returns:
        The experiment config.
    """
    missing = [key for key in ("manifold", "q_list", "delta_rule") if key not in data]
    if missing:
        raise ExperimentConfigError(f'Experiment definition {source or ""} lacks keys {missing}.')
    unknown = set(data) - {"manifold", "q_list", "delta_rule", "mode", "weight", "weighted", "output_dir", "name",
                           "workers", "epsilon", "require_curvature", "scan_cap"}
    if unknown:
        raise ExperimentConfigError(f'Unknown experiment keys {sorted(unknown)}.')
    try:
        mode = ExperimentMode[str(data.get("mode", "near")).upper()]
    except KeyError as exc:
        raise ExperimentConfigError(f'Unknown mode "{data["mode"]}" (use near, on or base).') from exc
    epsilon = float(data.get("epsilon", DEFAULT_EPSILON))
    weight = data.get("weight")
    if weight is not None and not isinstance(weight, dict):
        raise ExperimentConfigError(f'weight must be a mapping with center and radius, got {weight!r}.')
    output_dir = data.get("output_dir")
    return ExperimentConfig(
        manifold=_resolve(data["manifold"], base_dir),
        q_list=tuple(data["q_list"]),
        delta_rule=parse_delta_rule(data["delta_rule"], epsilon=epsilon),
        mode=mode,
        weight=weight,
        weighted=bool(data.get("weighted", weight is not None)),
        output_dir=_resolve(output_dir, base_dir) if output_dir is not None else None,
        name=str(data.get("name", source.stem if source is not None else "experiment")),
        workers=int(data.get("workers", 1)),
        epsilon=epsilon,
        require_curvature=bool(data.get("require_curvature", True)),
        scan_cap=int(data.get("scan_cap", DEFAULT_SCAN_CAP)),
        source=source,
    )


def load_experiment_config(path):
    """Loads an experiment file.

    Args:
        path: The .json or .toml file.

    Returns:
        The experiment config.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ExperimentConfigError(f'Experiment file "{path}" does not exist.')
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as file:
                data = tomllib.load(file)
        elif path.suffix == ".json":
            with open(path, "r", encoding="utf-8") as file:
                data = json.load(file)
        else:
            raise ExperimentConfigError(f'Unsupported experiment file type "{path.suffix}" (use .json or .toml).')
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ExperimentConfigError(f'Experiment file "{path}" is malformed: {exc}') from exc
    config = experiment_config_from_dict(data, base_dir=path.parent, source=path)
    logger.info(f'Loaded experiment "{config.name}" with {len(config.q_list)} rungs from "{path}".')
    return config
