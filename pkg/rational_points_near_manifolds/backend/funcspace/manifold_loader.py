"""This module implements loading and dumping of manifold definition files (JSON or TOML)."""
import json
import logging
import pathlib
import tomllib
from dataclasses import dataclass
from typing import Optional

from rational_points_near_manifolds.backend.funcspace.exact import as_fraction
from rational_points_near_manifolds.backend.funcspace.manifold_chart import ManifoldChart
from rational_points_near_manifolds.backend.funcspace.smooth_map import ANALYTIC_SMOOTHNESS, SmoothMap
from rational_points_near_manifolds.backend.funcspace.weight_function import WeightFunction, make_bump
from rational_points_near_manifolds.errors import ExpressionError, ManifoldConfigError

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("n", "R", "x0", "eps0", "maps")


@dataclass(frozen=True)
class ManifoldDefinition:
    """A chart loaded from a file together with its optional weight."""
    chart: ManifoldChart
    weight: Optional[WeightFunction] = None
    source: Optional[pathlib.Path] = None


def _read_raw(path):
    path = pathlib.Path(path)
    if not path.is_file():
        raise ManifoldConfigError(f'Manifold file "{path}" does not exist.')
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as file:
                return tomllib.load(file)
        if path.suffix == ".json":
            with open(path, "r", encoding="utf-8") as file:
                return json.load(file)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ManifoldConfigError(f'Manifold file "{path}" is malformed: {exc}') from exc
    raise ManifoldConfigError(f'Unsupported manifold file type "{path.suffix}" (use .json or .toml).')


def _number(value, key):
    if isinstance(value, float):
        # Decimal literals in config files are meant as exact decimals.
        value = repr(value)
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ManifoldConfigError(f'Entry "{key}" = {value!r} is not a rational number.') from exc


def weight_from_dict(spec, center, radius):
    """Builds the bump weight of a mapping with optional keys center, radius and scale.

    Args:
        spec: The mapping.
        center: The default center.
        radius: The default radius.

    Returns:
        The weight function.
    """
    if not isinstance(spec, dict):
        raise ManifoldConfigError(f'Weight must be a mapping with center and radius, got {spec!r}.')
    center = [_number(c, "weight.center") for c in spec.get("center", center)]
    weight = make_bump(center, _number(spec.get("radius", radius), "weight.radius"))
    if "scale" in spec:
        weight = weight.scaled(_number(spec["scale"], "weight.scale"))
    return weight


def manifold_from_dict(data, source=None):
    """Builds a manifold definition from a parsed mapping.

    Args:
        data: The mapping with keys n, R, x0, eps0, maps and optional smoothness, weight, name.
        source: The originating file (for messages).

    Returns:
        The manifold definition.
    """
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise ManifoldConfigError(f'Manifold definition {source or ""} lacks keys {missing}.')
    n, big_r = data["n"], data["R"]
    if not isinstance(n, int) or not isinstance(big_r, int) or n < 1 or big_r < 1:
        raise ManifoldConfigError(f'n and R must be positive integers, got n={n!r}, R={big_r!r}.')
    x0 = [_number(c, "x0") for c in data["x0"]]
    if len(x0) != n:
        raise ManifoldConfigError(f'x0 has {len(x0)} coordinates, expected n={n}.')
    eps0 = _number(data["eps0"], "eps0")
    if eps0 <= 0:
        raise ManifoldConfigError(f'eps0 must be positive, got {eps0}.')
    expressions = data["maps"]
    if len(expressions) != big_r:
        raise ManifoldConfigError(f'Got {len(expressions)} maps, expected R={big_r}.')
    smoothness = data.get("smoothness")

    maps = []
    for r, text in enumerate(expressions, start=1):
        try:
            maps.append(SmoothMap(text, n, smoothness=smoothness))
        except ExpressionError as exc:
            raise ManifoldConfigError(f'Map f{r} is invalid: {exc}') from exc
    chart = ManifoldChart(x0, eps0, maps, name=data.get("name"))

    weight = weight_from_dict(data["weight"], x0, eps0) if "weight" in data else None
    return ManifoldDefinition(chart=chart, weight=weight, source=source)


def load_manifold(path):
    """Loads a manifold definition file.

    Args:
        path: The .json or .toml file.

    Returns:
        The manifold definition.
    """
    path = pathlib.Path(path)
    definition = manifold_from_dict(_read_raw(path), source=path)
    logger.info(f'Loaded chart n={definition.chart.n}, R={definition.chart.R} from "{path}".')
    for smooth_map in definition.chart.maps:
        smooth_map.check_smoothness()
    return definition


def manifold_to_dict(chart, weight=None):
    """Serializes a chart (and optional weight) to a JSON-compatible mapping.

    Args:
        chart: The chart.
        weight: The optional weight.

    Returns:
        The mapping.
    """
    data = {
        "n": chart.n,
        "R": chart.R,
        "x0": [str(c) for c in chart.x0],
        "eps0": str(chart.eps0),
        "maps": [str(m.expression).replace("**", "^") for m in chart.maps],
    }
    if chart.name:
        data["name"] = chart.name
    smoothness = chart.smoothness
    if smoothness < ANALYTIC_SMOOTHNESS:
        data["smoothness"] = smoothness
    if weight is not None:
        data["weight"] = {
            "center": [str(c) for c in weight.center],
            "radius": str(weight.support_radius),
        }
        if weight.scale != 1:
            data["weight"]["scale"] = str(weight.scale)
    return data


def dump_manifold(chart, path, weight=None):
    """Writes a chart as a JSON manifold file.

    Args:
        chart: The chart.
        path: The target .json file.
        weight: The optional weight.

    Returns:
        The written path.
    """
    path = pathlib.Path(path)
    if path.suffix != ".json":
        raise ManifoldConfigError(f'Manifold files are written as .json, got "{path.suffix}".')
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(manifold_to_dict(chart, weight), file, indent=2)
    logger.info(f'Wrote chart to "{path}".')
    return path
