import logging
import math
from dataclasses import dataclass, replace
from itertools import product
from typing import List, Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import (
    DiscretenessCheckError,
    DomainNotStabilizedError,
    FrontierOverflowError,
    TruncationIncompleteError,
)
from irs_lab.modules.domains.polygon import (
    GeodesicSide,
    HyperbolicPolygon,
    carve,
    frame_polygon,
    polygon_area,
    snap_ideal_vertices,
)
from irs_lab.modules.domains.truncation import truncate_domain
from irs_lab.modules.fuchsian.enumeration import OrbitIndex, enumerate_ball
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.fuchsian.words import Word, invert_word, multiply_words, word_key
from irs_lab.modules.hyperbolic.isometry import Isometry, compose
from irs_lab.modules.hyperbolic.models import bisector_normal, to_hyperboloid
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, apply, move_i_to
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

VERTEX_MATCH_TOL = 1e-7


@dataclass(frozen=True)
class DomainCertificate:
    """Evidence attached to a computed domain.

    area_ok is None when the group has no target area (elementary groups) or when the domain
    has not been truncated yet for a group with free ends.
    """

    area: float
    target_area: Optional[float]
    area_ok: Optional[bool]
    stabilized: Optional[bool]
    radius: float
    exhaustive: bool
    rounds: int


def _orbit_point(g: Isometry) -> np.ndarray:
    z = apply(g, ORIGIN)
    return to_hyperboloid(z.x, z.y)


def bisector_side(word: Word, g: Isometry) -> GeodesicSide:
    """The half-plane {d(x, i) ≤ d(x, g·i)} as a side paired by g."""
    return GeodesicSide(normal=bisector_normal(_orbit_point(g)), word=word, element=g)


def _candidates(
    group: FuchsianGroup, radius: float
) -> Tuple[List[Tuple[Word, Isometry]], OrbitIndex, bool]:
    """Ball elements at i plus the generators and their inverses, nearest first."""
    ball = enumerate_ball(group, ORIGIN, radius, strict=False)
    index = OrbitIndex()
    index.add(_orbit_point(Isometry(1.0, 0.0, 0.0, 1.0)), 0)
    found = []
    for word, g in list(ball.elements) + group.symmetric_generators():
        if not word:
            continue
        X = _orbit_point(g)
        if index.add(X, len(found) + 1):
            found.append((float(X[0]), word, g))
    found.sort(key=lambda item: (item[0], word_key(item[1])))
    return [(w, g) for _, w, g in found], index, ball.exhaustive


def _closure_candidates(
    polygon: HyperbolicPolygon, index: OrbitIndex, length: int
) -> List[Tuple[Word, Isometry]]:
    """Products of `length` side-pairing elements (and inverses) not tried before."""
    letters = {}
    for side in polygon.real_sides:
        for word, g in ((side.word, side.element), (invert_word(side.word), side.element.inverse())):
            letters.setdefault(word, g)
    letters = sorted(letters.items(), key=lambda item: word_key(item[0]))

    found = []
    for combo in product(letters, repeat=length):
        word = multiply_words(*(w for w, _ in combo))
        if not word:
            continue
        g = combo[0][1]
        for _, h in combo[1:]:
            g = compose(g, h)
        X = _orbit_point(g)
        if index.add(X, len(found) + 1):
            found.append((float(X[0]), word, g))
    found.sort(key=lambda item: (item[0], word_key(item[1])))
    return [(w, g) for _, w, g in found]


def _build_at_i(group: FuchsianGroup, radius: float, rounds: int) -> Tuple[HyperbolicPolygon, bool, int]:
    candidates, index, exhaustive = _candidates(group, radius)
    polygon, clips = carve(frame_polygon(), [bisector_side(w, g) for w, g in candidates])
    logger.debug(f"Ball of radius {radius}: {len(candidates)} candidates, {clips} cuts, {len(polygon)} sides")

    done = 0
    for done in range(1, rounds + 1):
        cut = 0
        for length in (2, 3):
            extra = _closure_candidates(polygon, index, length)
            polygon, cut = carve(polygon, [bisector_side(w, g) for w, g in extra])
            logger.debug(f"Closure round {done}, products of {length}: {len(extra)} candidates, {cut} cuts")
            if cut:
                break
        if not cut:
            break
    return snap_ideal_vertices(polygon), exhaustive, done


def same_vertices(p: HyperbolicPolygon, q: HyperbolicPolygon, tol: float = VERTEX_MATCH_TOL) -> bool:
    if len(p) != len(q):
        return False
    if p.is_empty:
        return True
    gaps = np.max(np.abs(p.vertices[:, None, :] - q.vertices[None, :, :]), axis=2)
    return bool(np.all(np.min(gaps, axis=1) <= tol) and np.all(np.min(gaps, axis=0) <= tol))


def dirichlet_domain(
    group: FuchsianGroup,
    base: HPoint = ORIGIN,
    radius: Optional[float] = None,
    stabilize: bool = True,
    rounds: Optional[int] = None,
) -> HyperbolicPolygon:
    """Intersection of the bisector half-planes H(o, γo), carved nearest-first.

    Candidates are the ball of the given radius around the base plus the generators; products
    of side-pairing elements are then tried until no new cut appears. The returned polygon
    carries a DomainCertificate.

    Args:
        group: The group
        base: Base point o
        radius: Ball radius R (defaults to settings.BALL_RADIUS)
        stabilize: Rebuild from a ball of radius STABILIZATION_FACTOR·R and compare
        rounds: Cap on side-pairing closure rounds (defaults to settings.DIRICHLET_ROUNDS)

    Raises:
        DomainNotStabilizedError: If the larger ball changes the polygon
    """
    radius = settings.BALL_RADIUS if radius is None else float(radius)
    rounds = settings.DIRICHLET_ROUNDS if rounds is None else int(rounds)
    if radius <= 0.0:
        raise ValueError(f"Domain radius must be positive, got {radius}")

    frame = move_i_to(base)
    local = group.conjugated(frame.inverse(), name=group.name)
    polygon, exhaustive, used = _build_at_i(local, radius, rounds)

    stabilized = None
    if stabilize:
        larger, _, _ = _build_at_i(local, radius * settings.STABILIZATION_FACTOR, rounds)
        stabilized = same_vertices(polygon, larger)
        if not stabilized:
            raise DomainNotStabilizedError(
                f"domain not stabilized: {len(polygon)} sides at R = {radius}, "
                f"{len(larger)} at R = {radius * settings.STABILIZATION_FACTOR}"
            )

    area = polygon_area(polygon)
    target = group.target_area
    area_ok = None
    if target is not None and (group.is_lattice or math.isfinite(area)):
        area_ok = abs(area - target) <= settings.AREA_TOL
    certificate = DomainCertificate(area, target, area_ok, stabilized, radius, exhaustive, used)
    polygon = replace(polygon, certificate=certificate)
    if base != ORIGIN:
        polygon = polygon.transformed(frame)

    logger.info(f"Dirichlet domain of {group.name}: {len(polygon)} sides, area {area:.9g}")
    return polygon


def certified_domain(
    group: FuchsianGroup, base: HPoint = ORIGIN, radius: Optional[float] = None
) -> HyperbolicPolygon:
    """The Dirichlet domain, truncated for groups with free ends, checked to have area 2π|χ|.

    Raises:
        DiscretenessCheckError: If the domain cannot be built or its area is off
    """
    if group.is_elementary:
        raise DiscretenessCheckError(f"discreteness check failed: {group.name} is elementary, no target area")

    try:
        polygon = dirichlet_domain(group, base, radius)
        if group.boundary_words:
            polygon = truncate_domain(group, polygon)
    except (DomainNotStabilizedError, TruncationIncompleteError, FrontierOverflowError) as e:
        raise DiscretenessCheckError(f"discreteness check failed: {str(e)}") from e

    area = polygon_area(polygon)
    target = group.target_area
    if not abs(area - target) <= settings.AREA_TOL:
        raise DiscretenessCheckError(
            f"discreteness check failed: area {area:.9g} of {group.name}, expected 2π|χ| = {target:.9g}"
        )
    logger.info(f"Certified {group.name}: area {area:.9g}")
    return replace(polygon, certificate=replace(polygon.certificate, area=area, area_ok=True))


def certify_group(
    group: FuchsianGroup, base: HPoint = ORIGIN, radius: Optional[float] = None
) -> DomainCertificate:
    """Area certificate of a group; elementary groups have no target and are skipped."""
    if group.is_elementary:
        logger.info(f"{group.name} is elementary, no area certificate")
        radius = settings.BALL_RADIUS if radius is None else radius
        return DomainCertificate(math.inf, None, None, None, radius, True, 0)
    return certified_domain(group, base, radius).certificate
