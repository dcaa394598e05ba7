import math
from dataclasses import dataclass

import numpy as np

from irs_lab.core.exceptions import HyperbolicGeometryError
from irs_lab.modules.hyperbolic.isometry import Isometry

MIN_HEIGHT = 1e-12


@dataclass(frozen=True)
class HPoint:
    """A point x + iy of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point coordinates must be finite, got ({self.x}, {self.y})")
        if self.y < MIN_HEIGHT:
            raise ValueError(f"Point ({self.x}, {self.y}) is too close to the boundary")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


ORIGIN = HPoint(0.0, 1.0)


def apply(g: Isometry, z: HPoint) -> HPoint:
    """Möbius action (az + b)/(cz + d)."""
    den_re = g.c * z.x + g.d
    den_im = g.c * z.y
    den2 = den_re * den_re + den_im * den_im
    if math.sqrt(den2) < 1e-300:
        raise HyperbolicGeometryError(f"near-ideal image of {z} under {g}")
    num_re = g.a * z.x + g.b
    x = (num_re * den_re + g.a * g.c * z.y * z.y) / den2
    y = z.y / den2
    if not (math.isfinite(x) and math.isfinite(y)) or y < MIN_HEIGHT:
        raise HyperbolicGeometryError(f"near-ideal image of {z} under {g}")
    return HPoint(x, y)


def apply_arrays(g: Isometry, x: np.ndarray, y: np.ndarray):
    """Vectorized Möbius action on coordinate arrays; no boundary checks."""
    den_re = g.c * x + g.d
    den_im = g.c * y
    den2 = den_re * den_re + den_im * den_im
    new_x = ((g.a * x + g.b) * den_re + g.a * g.c * y * y) / den2
    new_y = y / den2
    return new_x, new_y


def apply_boundary(g: Isometry, xi: float) -> float:
    """Action on the boundary ℝ ∪ {∞}; math.inf stands for ∞."""
    if math.isinf(xi):
        return math.inf if g.c == 0.0 else g.a / g.c
    den = g.c * xi + g.d
    if den == 0.0:
        return math.inf
    return (g.a * xi + g.b) / den


def distance(z: HPoint, w: HPoint) -> float:
    """Hyperbolic distance via sinh(d/2) = |z - w| / (2√(y₁y₂))."""
    return 2.0 * math.asinh(math.hypot(z.x - w.x, z.y - w.y) / (2.0 * math.sqrt(z.y * w.y)))


def distance_arrays(x1, y1, x2, y2) -> np.ndarray:
    return 2.0 * np.arcsinh(np.hypot(x1 - x2, y1 - y2) / (2.0 * np.sqrt(y1 * y2)))


def displacement(g: Isometry, z: HPoint = ORIGIN) -> float:
    """d(z, g·z)."""
    return distance(z, apply(g, z))


def move_i_to(z: HPoint) -> Isometry:
    """The affine isometry sending i to z."""
    root = math.sqrt(z.y)
    return Isometry(root, z.x / root, 0.0, 1.0 / root)
