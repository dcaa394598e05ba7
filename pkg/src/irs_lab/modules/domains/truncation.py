"""Truncation of Dirichlet domains to the convex core.

The convex core is cut out by the axes of the conjugates of the boundary words; each axis
keeps the side where the limit set lies, decided by a vote over fixed points of hyperbolic
ball elements.
"""

import logging
import math
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import TruncationIncompleteError
from irs_lab.modules.domains.polygon import (
    GeodesicSide,
    HyperbolicPolygon,
    carve,
    empty_polygon,
    polygon_area,
    snap_ideal_vertices,
)
from irs_lab.modules.fuchsian.enumeration import BallEnumeration, enumerate_ball
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.fuchsian.words import Word, invert_word, multiply_words, word_key
from irs_lab.modules.hyperbolic.isometry import Isometry, IsometryType, classify, conjugate
from irs_lab.modules.hyperbolic.models import boundary_to_klein, minkowski, normal_from_chord, to_hyperboloid
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

_VOTE_TOL = 1e-7
_AXIS_MATCH_TOL = 1e-9


def _limit_points(elements: List[Tuple[Word, Isometry]]) -> np.ndarray:
    """Klein coordinates of the fixed points of the hyperbolic elements."""
    points = []
    for word, g in elements:
        if not word:
            continue
        cls = classify(g)
        if cls.tag is IsometryType.HYPERBOLIC:
            points.extend(boundary_to_klein(xi) for xi in cls.fixed_points)
    return np.array(points).reshape(-1, 2)


def axis_side(word: Word, g: Isometry, limit_points: np.ndarray) -> GeodesicSide:
    """The axis of a hyperbolic g as a side facing the majority of the limit points."""
    cls = classify(g)
    if cls.tag is not IsometryType.HYPERBOLIC:
        raise ValueError(f"Axis requested for a non-hyperbolic element {g}")
    p, q = (boundary_to_klein(xi) for xi in cls.fixed_points)
    normal = normal_from_chord(p, q, (0.0, 0.0))
    side = GeodesicSide(normal=normal, word=word, element=g, kind="axis")

    n0, n1, n2 = side.functional
    values = (n0 + limit_points @ np.array([n1, n2])) / math.hypot(n1, n2)
    positive = int(np.sum(values > _VOTE_TOL))
    negative = int(np.sum(values < -_VOTE_TOL))
    if positive and negative:
        logger.warning(f"Axis of {word}: limit points on both sides ({positive} vs {negative})")
    if negative > positive:
        side = replace(side, normal=-normal)
    return side


def _same_axis(a: Tuple[float, ...], b: Tuple[float, ...]) -> bool:
    return all(
        (math.isinf(x) and math.isinf(y)) or (not math.isinf(x) and not math.isinf(y) and abs(x - y) <= _AXIS_MATCH_TOL * (1.0 + abs(x)))
        for x, y in zip(sorted(a), sorted(b))
    )


def boundary_conjugates(
    group: FuchsianGroup, polygon: HyperbolicPolygon, ball: BallEnumeration
) -> List[Tuple[Word, Isometry]]:
    """Conjugates h·b·h⁻¹ of boundary words by ball and side elements, one per axis."""
    conjugators = list(ball.elements)
    for side in polygon.real_sides:
        if side.word is not None and side.element is not None:
            conjugators.append((side.word, side.element))

    found: List[Tuple[Word, Isometry]] = []
    axes: List[Tuple[float, ...]] = []
    for b_word in group.boundary_words:
        b = group.evaluate(b_word)
        for h_word, h in conjugators:
            g = conjugate(b, h)
            axis = classify(g).fixed_points
            if any(_same_axis(axis, other) for other in axes):
                continue
            axes.append(axis)
            found.append((multiply_words(h_word, b_word, invert_word(h_word)), g))
    return found


def truncate_domain(
    group: FuchsianGroup, polygon: HyperbolicPolygon, radius: Optional[float] = None
) -> HyperbolicPolygon:
    """Intersect a Dirichlet domain with the convex-core side of every boundary axis that cuts it.

    Lattices come back unchanged; elementary groups give the empty polygon.

    Raises:
        TruncationIncompleteError: If the result still has infinite area
    """
    if group.is_elementary:
        logger.info(f"{group.name} is elementary: truncated domain is empty")
        return replace(empty_polygon(polygon.base), certificate=polygon.certificate)
    if not group.boundary_words:
        return polygon

    radius = settings.BALL_RADIUS if radius is None else radius
    ball = enumerate_ball(group, polygon.base, radius, strict=False)
    limit_points = _limit_points(list(ball.elements))

    base = to_hyperboloid(polygon.base.x, polygon.base.y)
    sides = [axis_side(w, g, limit_points) for w, g in boundary_conjugates(group, polygon, ball)]
    # nearest axes first
    sides.sort(key=lambda side: (abs(float(minkowski(base, side.normal))), word_key(side.word)))
    truncated, clips = carve(polygon, sides)
    truncated = snap_ideal_vertices(truncated)
    logger.debug(f"Truncation of {group.name}: {len(sides)} axes, {clips} cuts")

    area = polygon_area(truncated)
    if not math.isfinite(area):
        raise TruncationIncompleteError(
            f"truncation incomplete: domain of {group.name} keeps infinite area after {len(sides)} axes (R = {radius})"
        )
    certificate = polygon.certificate
    if certificate is not None:
        target = group.target_area
        certificate = replace(certificate, area=area, area_ok=abs(area - target) <= settings.AREA_TOL)
    logger.info(f"Truncated domain of {group.name}: {len(truncated)} sides, area {area:.9g}")
    return replace(truncated, certificate=certificate)
