import logging
import math
from typing import Optional, Tuple

import numpy as np

from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.hyperbolic.area import ball_area, half_collar_area
from irs_lab.modules.hyperbolic.isometry import translation_length
from irs_lab.modules.hyperbolic.models import to_hyperboloid
from irs_lab.modules.hyperbolic.plane import HPoint

logger = logging.getLogger(__name__)


def collar_volume(group: FuchsianGroup) -> float:
    """Half-collar area of the boundary curves, zero for lattices."""
    return sum(half_collar_area(translation_length(group.evaluate(word))) for word in group.boundary_words)


def thick_part_diameter_bound(group: FuchsianGroup, epsilon: float) -> float:
    """R(ε) = 4ε / v(B(ε)) · (2π|χ| + V), with V the half-collar area of the boundary curves.

    The thick part of the core is covered by disjoint ε-balls whose count is bounded by volume,
    and any two thick points are joined through a chain of them.
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if group.signature is None:
        raise ValueError(f"{group.name} has no signature, so no core area")
    volume = group.target_area + collar_volume(group)
    bound = 4.0 * epsilon / ball_area(epsilon) * volume
    logger.debug(f"Thick-part diameter bound for {group.name} at ε = {epsilon}: {bound:.6g}")
    return bound


def max_pairwise_distance(points: np.ndarray) -> float:
    """Largest hyperbolic distance among (n, 2) upper half-plane points."""
    if len(points) < 2:
        return 0.0
    X = to_hyperboloid(points[:, 0], points[:, 1])
    gram = X[:, :1] * X[:, :1].T - X[:, 1:] @ X[:, 1:].T
    return float(np.arccosh(np.maximum(np.max(gram), 1.0)))


def thick_points(
    points: np.ndarray, injectivity: np.ndarray, epsilon: float
) -> Tuple[np.ndarray, Optional[float]]:
    """Points with injectivity radius at least ε and the largest distance among them."""
    thick = points[np.asarray(injectivity) >= epsilon]
    if len(thick) < 2:
        return thick, None
    return thick, max_pairwise_distance(thick)
