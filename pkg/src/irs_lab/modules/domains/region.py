"""Bounded sampling regions: a domain with its cusp neighbourhoods removed, or plain boxes."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import UnboundedRegionError
from irs_lab.modules.domains.cycles import cusp_vertices
from irs_lab.modules.domains.polygon import HyperbolicPolygon, polygon_area
from irs_lab.modules.hyperbolic.area import Box, cusp_strip_area
from irs_lab.modules.hyperbolic.isometry import Isometry, IsometryType, classify
from irs_lab.modules.hyperbolic.models import klein_to_uhp
from irs_lab.modules.hyperbolic.plane import apply_arrays, distance_arrays
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

_CHORD_SAMPLES = 400
_PROBE_SAMPLES = 200
_MAX_GROWTH = 8


def horoball_size(parabolic: Isometry, delta: float) -> Tuple[float, float]:
    """(fixed point, size) of {z : d(z, Pz) ≤ δ}.

    At ∞ the size is the height |b|/(2sinh(δ/2)) above which the horoball starts; at a finite
    point it is the Euclidean diameter 2sinh(δ/2)/|c| of the horocircle.
    """
    if delta <= 0.0:
        raise ValueError(f"Cusp cut delta must be positive, got {delta}")
    cls = classify(parabolic, settings.PARABOLIC_TOL)
    if cls.tag is not IsometryType.PARABOLIC:
        raise ValueError(f"Horoball requested for a non-parabolic element {parabolic}")
    s = 2.0 * math.sinh(0.5 * delta)
    # trace -2 lifts are normalized away by the sign convention, so |b|, |c| suffice
    if math.isinf(cls.fixed_point):
        return math.inf, abs(parabolic.b) / s
    return cls.fixed_point, s / abs(parabolic.c)


def _horocircle(
    parabolic: Isometry, delta: float, n: int, x_range: Tuple[float, float]
) -> Tuple[np.ndarray, np.ndarray]:
    xi, size = horoball_size(parabolic, delta)
    if math.isinf(xi):
        # horizontal line, clipped by the polygon later
        x = np.linspace(x_range[0], x_range[1], 4 * n)
        return x, np.full_like(x, size)
    theta = np.linspace(-math.pi, math.pi, n, endpoint=False) + math.pi / n
    r = 0.5 * size
    return xi + r * np.sin(theta), r + r * np.cos(theta)


@dataclass(frozen=True, eq=False)
class CutRegion:
    """A finite-area polygon minus the horoballs {d(z, Pz) ≤ δ} of its ideal vertices."""

    polygon: HyperbolicPolygon
    delta: float
    cusps: Tuple[Isometry, ...]
    cusp_cycles: int
    box: Box

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = self.polygon.contains(x, y)
        for parabolic in self.cusps:
            px, py = apply_arrays(parabolic, x, y)
            inside &= distance_arrays(x, y, px, py) > self.delta
        return inside

    @property
    def removed_area(self) -> float:
        """Each cusp gives up exactly 2sinh(δ/2), however many vertices its cycle has."""
        return self.cusp_cycles * cusp_strip_area(self.delta)

    @property
    def area(self) -> float:
        return polygon_area(self.polygon) - self.removed_area


def _boundary_samples(region: CutRegion, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points along the sides and horocircles that belong to the region."""
    polygon = region.polygon
    xs: List[np.ndarray] = []
    ys: List[np.ndarray] = []
    t = np.linspace(0.0, 1.0, n)[:, None]
    for i in range(len(polygon)):
        p, q = polygon.vertices[i], polygon.vertices[(i + 1) % len(polygon)]
        chord = (1.0 - t) * p + t * q
        norms = np.hypot(chord[:, 0], chord[:, 1])
        chord = chord[norms < 1.0 - 1e-12]
        x, y = klein_to_uhp(chord[:, 0], chord[:, 1])
        xs.append(x)
        ys.append(y)
    x, y = np.concatenate(xs), np.concatenate(ys)
    keep = np.isfinite(x) & np.isfinite(y) & (y > 0.0)
    x, y = x[keep], y[keep]
    x_range = (float(np.min(x)) - 1.0, float(np.max(x)) + 1.0)
    for parabolic in region.cusps:
        hx, hy = _horocircle(parabolic, region.delta, n, x_range)
        x, y = np.concatenate([x, hx]), np.concatenate([y, hy])
    # tolerance-inflated membership picks up points lying on the boundary itself
    inside = region.polygon.contains(x, y, tol=1e-7)
    for parabolic in region.cusps:
        px, py = apply_arrays(parabolic, x, y)
        inside &= distance_arrays(x, y, px, py) >= region.delta * (1.0 - 1e-7)
    return x[inside], y[inside]


def _edge_points(box: Box, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x_min, x_max, y_min, y_max = box
    xs = np.linspace(x_min, x_max, n)
    ys = np.geomspace(y_min, y_max, n)
    x = np.concatenate([xs, xs, np.full(n, x_min), np.full(n, x_max)])
    y = np.concatenate([np.full(n, y_min), np.full(n, y_max), ys, ys])
    return x, y


def _padded(x: np.ndarray, y: np.ndarray, pad: float) -> Box:
    x_span = max(float(np.ptp(x)), 1e-6)
    return (
        float(np.min(x)) - pad * x_span,
        float(np.max(x)) + pad * x_span,
        float(np.min(y)) / (1.0 + pad),
        float(np.max(y)) * (1.0 + pad),
    )


def _grow(box: Box, factor: float) -> Box:
    x_min, x_max, y_min, y_max = box
    centre, half = 0.5 * (x_min + x_max), 0.5 * (x_max - x_min) * factor
    return centre - half, centre + half, y_min / factor, y_max * factor


def cut_region(polygon: HyperbolicPolygon, delta: Optional[float] = None) -> CutRegion:
    """Remove the δ-horoballs at the ideal vertices of a finite-area polygon and box the rest.

    Raises:
        UnboundedRegionError: If the polygon has infinite area or no box contains the region
    """
    delta = settings.CUSP_DELTA if delta is None else float(delta)
    if delta <= 0.0:
        raise ValueError(f"Cusp cut delta must be positive, got {delta}")
    if polygon.is_empty or not math.isfinite(polygon_area(polygon)):
        raise UnboundedRegionError(f"cannot cut a polygon of area {polygon_area(polygon)}")

    cusps = cusp_vertices(polygon)
    parabolics = tuple(c.stabilizer for c in cusps)
    cycles = len({frozenset(c.cycle) for c in cusps})

    region = CutRegion(polygon, delta, parabolics, cycles, (0.0, 1.0, 1.0, 2.0))
    x, y = _boundary_samples(region, _CHORD_SAMPLES)
    if len(x) == 0:
        raise UnboundedRegionError("no boundary samples survive the cusp cut")
    box = _padded(x, y, 0.05)
    for _ in range(_MAX_GROWTH):
        ex, ey = _edge_points(box, _PROBE_SAMPLES)
        if not np.any(region.contains(ex, ey)):
            break
        box = _grow(box, 1.5)
    else:
        raise UnboundedRegionError(f"unbounded region: cut domain still meets the box edges {box}")
    logger.debug(f"Cut region: {len(cusps)} ideal vertices in {cycles} cusps, box {box}")
    return CutRegion(polygon, delta, parabolics, cycles, box)


@dataclass(frozen=True)
class BoxRegion:
    """A union of boxes (x_min, x_max, y_min, y_max), used to check the sampler."""

    boxes: Tuple[Box, ...]

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for x_min, x_max, y_min, y_max in self.boxes:
            inside |= (x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max)
        return inside

    @property
    def box(self) -> Box:
        return (
            min(b[0] for b in self.boxes),
            max(b[1] for b in self.boxes),
            min(b[2] for b in self.boxes),
            max(b[3] for b in self.boxes),
        )

    @property
    def area(self) -> float:
        """Sum of the box areas; assumes the boxes are disjoint."""
        return sum((x1 - x0) * (1.0 / y0 - 1.0 / y1) for x0, x1, y0, y1 in self.boxes)
