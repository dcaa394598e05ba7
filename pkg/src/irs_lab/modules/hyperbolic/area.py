import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from irs_lab.core.exceptions import UnboundedRegionError
from irs_lab.core.seeding import child_rng
from irs_lab.modules.hyperbolic.plane import MIN_HEIGHT, HPoint, distance_arrays
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

Indicator = Callable[[np.ndarray, np.ndarray], np.ndarray]
Box = Tuple[float, float, float, float]

_REFINE_CHUNK = 4096


@dataclass(frozen=True)
class AreaEstimate:
    """Hyperbolic area of a region; std_error is zero for quadrature."""

    value: float
    std_error: float = 0.0
    method: str = "midpoint"
    samples: int = 0


@dataclass(frozen=True)
class AreaCheck:
    """One numeric-versus-closed-form comparison."""

    name: str
    params: Dict[str, float]
    numeric: float
    closed_form: float
    bound: Optional[float] = None
    tolerance: float = 1e-4
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def relative_error(self) -> float:
        return abs(self.numeric - self.closed_form) / abs(self.closed_form)

    @property
    def passed(self) -> bool:
        within = self.relative_error <= self.tolerance
        if self.bound is not None:
            within = within and self.numeric <= self.bound * (1.0 + self.tolerance)
        return within


def _validate_box(box: Box) -> Box:
    x_min, x_max, y_min, y_max = (float(v) for v in box)
    if not all(math.isfinite(v) for v in (x_min, x_max, y_min, y_max)):
        raise ValueError(f"Bounding box must be finite, got {box}")
    if x_max <= x_min or y_max <= y_min:
        raise ValueError(f"Bounding box is empty: {box}")
    if y_min < MIN_HEIGHT:
        raise ValueError(f"Bounding box must satisfy y_min > 0, got y_min = {y_min}")
    return x_min, x_max, y_min, y_max


def _probe_boundary(indicator: Indicator, box: Box, n: int, skip_top: bool, fraction: float) -> None:
    x_min, x_max, y_min, y_max = box
    xs = np.linspace(x_min, x_max, n)
    # sample the vertical edges uniformly in u = 1/y, matching the quadrature
    ys = 1.0 / np.linspace(1.0 / y_max, 1.0 / y_min, n)
    edges = [
        (xs, np.full(n, y_min)),
        (np.full(n, x_min), ys),
        (np.full(n, x_max), ys),
    ]
    if not skip_top:
        edges.append((xs, np.full(n, y_max)))
    hits = sum(int(np.count_nonzero(indicator(ex, ey))) for ex, ey in edges)
    total = n * len(edges)
    if hits > fraction * total:
        raise UnboundedRegionError(
            f"unbounded region: indicator accepts {hits}/{total} probe points on the box boundary {box}"
        )


def _grid_shape(resolution: Union[int, Tuple[int, int], None]) -> Tuple[int, int]:
    if resolution is None:
        return settings.AREA_GRID, settings.AREA_GRID
    if isinstance(resolution, int):
        nx = nu = resolution
    else:
        nx, nu = resolution
    if nx < 2 or nu < 2:
        raise ValueError(f"Grid resolution must be at least 2, got {resolution}")
    return int(nx), int(nu)


def _midpoint(indicator: Indicator, box: Box, shape: Tuple[int, int], refine: int) -> float:
    x_min, x_max, y_min, y_max = box
    nx, nu = shape
    u_min, u_max = 1.0 / y_max, 1.0 / y_min
    hx = (x_max - x_min) / nx
    hu = (u_max - u_min) / nu
    xs = x_min + (np.arange(nx) + 0.5) * hx
    us = u_min + (np.arange(nu) + 0.5) * hu

    X, U = np.meshgrid(xs, us, indexing="ij")
    inside = np.asarray(indicator(X, 1.0 / U), dtype=bool)

    mixed = np.zeros_like(inside)
    along_x = inside[1:, :] != inside[:-1, :]
    mixed[1:, :] |= along_x
    mixed[:-1, :] |= along_x
    along_u = inside[:, 1:] != inside[:, :-1]
    mixed[:, 1:] |= along_u
    mixed[:, :-1] |= along_u

    cell = hx * hu
    value = float(np.count_nonzero(inside & ~mixed)) * cell

    ix, iu = np.nonzero(mixed)
    if ix.size == 0:
        return value
    offsets = (np.arange(refine) + 0.5) / refine - 0.5
    covered = 0.0
    for start in range(0, ix.size, _REFINE_CHUNK):
        cx = xs[ix[start : start + _REFINE_CHUNK]]
        cu = us[iu[start : start + _REFINE_CHUNK]]
        sub_x = (cx[:, None] + hx * offsets[None, :])[:, :, None]
        sub_u = (cu[:, None] + hu * offsets[None, :])[:, None, :]
        SX, SU = np.broadcast_arrays(sub_x, sub_u)
        covered += float(np.count_nonzero(indicator(SX, 1.0 / SU)))
    logger.debug(f"Refined {ix.size} boundary cells out of {nx * nu}")
    return value + covered * cell / (refine * refine)


def _monte_carlo(indicator: Indicator, box: Box, n_samples: int, seed: int) -> Tuple[float, float]:
    x_min, x_max, y_min, y_max = box
    u_min, u_max = 1.0 / y_max, 1.0 / y_min
    rng = child_rng(seed, "area_region")
    x = rng.uniform(x_min, x_max, n_samples)
    u = rng.uniform(u_min, u_max, n_samples)
    p = float(np.count_nonzero(indicator(x, 1.0 / u))) / n_samples
    measure = (x_max - x_min) * (u_max - u_min)
    return p * measure, measure * math.sqrt(p * (1.0 - p) / n_samples)


def area_region(
    indicator: Indicator,
    box: Box,
    resolution: Union[int, Tuple[int, int], None] = None,
    method: str = "midpoint",
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
    tail_width: Optional[float] = None,
    boundary_fraction: Optional[float] = None,
    refine: Optional[int] = None,
) -> AreaEstimate:
    """Estimate the hyperbolic area ∫ dx dy / y² of the region selected by `indicator`.

    Integration runs in the coordinates (x, u = 1/y) where the area element is exactly dx du.

    Args:
        indicator: Vectorized membership test (x, y) -> bool array
        box: (x_min, x_max, y_min, y_max) containing the region
        resolution: Grid size per axis, or (nx, nu)
        method: "midpoint" (deterministic) or "monte_carlo"
        n_samples: Sample count for the Monte Carlo method
        seed: Master seed for the Monte Carlo method
        tail_width: Width of a vertical strip escaping through the top edge; its area above
            y_max, tail_width / y_max, is added analytically
        boundary_fraction: Largest tolerated accepted fraction of boundary probe points
        refine: Sub-grid size used on cells where the indicator changes

    Returns:
        AreaEstimate: the area and its standard error (0 for quadrature)

    Raises:
        UnboundedRegionError: If the region reaches the box boundary
    """
    box = _validate_box(box)
    shape = _grid_shape(resolution)
    fraction = settings.AREA_BOUNDARY_FRACTION if boundary_fraction is None else boundary_fraction
    _probe_boundary(indicator, box, 4 * max(shape), tail_width is not None, fraction)

    tail = 0.0 if tail_width is None else float(tail_width) / box[3]

    if method == "midpoint":
        value = _midpoint(indicator, box, shape, settings.AREA_REFINE if refine is None else refine)
        return AreaEstimate(value + tail, 0.0, "midpoint", shape[0] * shape[1])
    if method == "monte_carlo":
        n = settings.N_SAMPLES if n_samples is None else int(n_samples)
        if n <= 0:
            raise ValueError(f"Monte Carlo needs a positive sample count, got {n}")
        value, err = _monte_carlo(indicator, box, n, settings.MASTER_SEED if seed is None else seed)
        return AreaEstimate(value + tail, err, "monte_carlo", n)
    raise ValueError(f"Unknown area method: {method}")


def ball_area(r: float) -> float:
    """Area 2π(cosh r - 1) of a hyperbolic disk, evaluated as 4π sinh²(r/2)."""
    if r < 0.0:
        raise ValueError(f"Radius must be non-negative, got {r}")
    return 4.0 * math.pi * math.sinh(0.5 * r) ** 2


def ball_box(center: HPoint, r: float, pad: float = 0.05) -> Box:
    """Bounding box of the Euclidean circle (centre x + iy·cosh r, radius y·sinh r), padded."""
    half = center.y * math.sinh(r) * (1.0 + pad)
    return (
        center.x - half,
        center.x + half,
        center.y * math.exp(-r) * (1.0 - pad),
        center.y * math.exp(r) * (1.0 + pad),
    )


def ball_indicator(center: HPoint, r: float) -> Indicator:
    def indicator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return distance_arrays(x, y, center.x, center.y) <= r

    return indicator


def cusp_strip_height(delta: float) -> float:
    """Height above which z ↦ z + 1 moves points less than delta."""
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    return 1.0 / (2.0 * math.sinh(0.5 * delta))


def cusp_strip_area(delta: float) -> float:
    return 2.0 * math.sinh(0.5 * delta)


def cusp_strip_indicator(delta: float) -> Indicator:
    """{0 ≤ x ≤ 1, d(z, z + 1) ≤ delta}."""

    def indicator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        moved = distance_arrays(x, y, x + 1.0, y)
        return (x >= 0.0) & (x <= 1.0) & (moved <= delta)

    return indicator


def funnel_angle(delta_0: float, delta: float) -> float:
    """α with sin α = sinh(δ₀/2)/sinh(δ/2)."""
    if not 0.0 < delta_0 < delta:
        raise ValueError(f"Funnel needs 0 < delta_0 < delta, got ({delta_0}, {delta})")
    return math.asin(math.sinh(0.5 * delta_0) / math.sinh(0.5 * delta))


def funnel_area(delta_0: float, delta: float) -> float:
    return delta_0 / math.tan(funnel_angle(delta_0, delta))


def funnel_area_bound(delta: float) -> float:
    return 2.0 * math.sinh(0.5 * delta)


def funnel_indicator(delta_0: float, delta: float) -> Indicator:
    """{x ≥ 0, 1 ≤ |z| ≤ e^{δ₀}, d(z, e^{δ₀}z) ≤ δ}."""
    stretch = math.exp(delta_0)

    def indicator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        r2 = x * x + y * y
        moved = distance_arrays(x, y, stretch * x, stretch * y)
        return (x >= 0.0) & (r2 >= 1.0) & (r2 <= stretch * stretch) & (moved <= delta)

    return indicator


def thin_part_area_bound(peripheral_count: int, epsilon: float) -> float:
    """Residual area 2p·sinh(ε/2) of p cusp or funnel ends cut at ε."""
    if peripheral_count < 0:
        raise ValueError(f"Peripheral count must be non-negative, got {peripheral_count}")
    return 2.0 * peripheral_count * math.sinh(0.5 * epsilon)


def half_collar_area(length: float) -> float:
    """Area ℓ/sinh(ℓ/2) of the one-sided standard collar about a geodesic of length ℓ."""
    if length <= 0.0:
        raise ValueError(f"Collar needs a positive length, got {length}")
    return length / math.sinh(0.5 * length)


def _aligned_pad(span: float, n: int, cells: int) -> float:
    # padding of exactly `cells` grid cells on each side of `span`
    return cells * span / (n - 2 * cells)


def check_cusp_area(delta: float, resolution: int = 400, y_max: float = 1e4, tolerance: float = 1e-4) -> AreaCheck:
    """Quadrature of the cusp strip against 2 sinh(δ/2), with the grid aligned to the strip."""
    n = resolution
    pad_x = _aligned_pad(1.0, n, 8)
    u_top = cusp_strip_area(delta)
    u_min = 1.0 / y_max
    hu = (u_top - u_min) / (n - 8)
    box = (-pad_x, 1.0 + pad_x, 1.0 / (u_top + 8 * hu), y_max)
    estimate = area_region(cusp_strip_indicator(delta), box, resolution=n, tail_width=1.0)
    return AreaCheck("cusp_strip", {"delta": delta}, estimate.value, cusp_strip_area(delta), tolerance=tolerance)


def check_funnel_area(delta_0: float, delta: float, resolution: Optional[int] = None, tolerance: float = 1e-4) -> AreaCheck:
    """Quadrature of the funnel sector against δ₀·cot(α_δ) and the bound 2 sinh(δ/2)."""
    n = settings.AREA_GRID if resolution is None else resolution
    stretch = math.exp(delta_0)
    pad_x = _aligned_pad(stretch, n, 8)
    box = (-pad_x, stretch + pad_x, 0.5 * math.sin(funnel_angle(delta_0, delta)), 1.5 * stretch)
    estimate = area_region(funnel_indicator(delta_0, delta), box, resolution=n)
    return AreaCheck(
        "funnel_sector",
        {"delta_0": delta_0, "delta": delta},
        estimate.value,
        funnel_area(delta_0, delta),
        bound=funnel_area_bound(delta),
        tolerance=tolerance,
    )


def check_ball_area(r: float, resolution: Optional[int] = None, tolerance: float = 1e-3) -> AreaCheck:
    center = HPoint(0.0, 1.0)
    estimate = area_region(ball_indicator(center, r), ball_box(center, r), resolution=resolution)
    return AreaCheck("ball", {"r": r}, estimate.value, ball_area(r), tolerance=tolerance)
