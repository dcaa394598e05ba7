"""Radius-R snapshots of conjugated subgroups and a Hausdorff distance between them.

A snapshot of g⁻¹Γg at base o holds the elements that move o by at most R. It is a finite
proxy for the point g⁻¹Γg of Sub(PSL(2,R)).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import cdist

from irs_lab.core.exceptions import RadiusMismatchError
from irs_lab.modules.domains.tiling import TileEnumerator
from irs_lab.modules.fuchsian.enumeration import enumerate_ball
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.hyperbolic.isometry import IDENTITY, Isometry, compose
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, apply, distance, move_i_to
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

_SORT_DECIMALS = 12
_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class SubgroupSnapshot:
    """Elements of a subgroup displacing `base` by at most `radius`, in canonical order.

    matrices has shape (n, 2, 2) with the sign fixed as for Isometry; the identity comes first.
    """

    radius: float
    base: HPoint
    matrices: np.ndarray
    displacements: np.ndarray
    source: str = ""

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def elements(self) -> List[Isometry]:
        return [Isometry.from_matrix(m) for m in self.matrices]

    @property
    def nontrivial(self) -> np.ndarray:
        return self.matrices[self.displacements > 0.0] if len(self) else self.matrices

    def within(self, radius: float) -> np.ndarray:
        """Matrices of the elements displacing the base by at most radius."""
        return self.matrices[self.displacements <= radius]

    def contains(self, g: Isometry, tol: float = 1e-9) -> bool:
        return bool(np.min(nearest_gaps(self.matrices, g.matrix[None])) <= tol)


def _canonical_sign(matrices: np.ndarray) -> np.ndarray:
    matrices = np.array(matrices, dtype=float).reshape(-1, 2, 2)
    a, b = matrices[:, 0, 0], matrices[:, 0, 1]
    flip = (a < 0.0) | ((a == 0.0) & (b < 0.0))
    matrices[flip] *= -1.0
    return matrices


def _make_snapshot(
    matrices: np.ndarray,
    displacements: np.ndarray,
    trivial: np.ndarray,
    radius: float,
    base: HPoint,
    source: str,
) -> SubgroupSnapshot:
    matrices = _canonical_sign(matrices)
    displacements = np.array(displacements, dtype=float)
    # the identity sits at displacement exactly 0, whatever the rounding in arccosh
    displacements[np.asarray(trivial, dtype=bool)] = 0.0
    keys = [np.round(matrices[:, i, j], _SORT_DECIMALS) for i, j in ((1, 1), (1, 0), (0, 1), (0, 0))]
    order = np.lexsort(keys + [np.round(displacements, 9)])
    return SubgroupSnapshot(radius, base, matrices[order], displacements[order], source)


def displacements_at(matrices: np.ndarray, base: HPoint = ORIGIN) -> np.ndarray:
    """d(base, m·base) for a stack of unit-determinant matrices."""
    frame = move_i_to(base)
    local = frame.inverse().matrix @ np.asarray(matrices, dtype=float) @ frame.matrix
    # cosh d(i, m·i) = ‖m‖²/2
    return np.arccosh(np.maximum(0.5 * np.sum(local**2, axis=(-2, -1)), 1.0))


def conjugation_budget(base: HPoint, conjugator: Isometry, radius: float) -> float:
    """R + 2·d(o, g·o): every γ with d(g·o, γg·o) ≤ R moves o by at most this much."""
    return radius + 2.0 * distance(base, apply(conjugator, base))


def snapshot(
    group: FuchsianGroup,
    conjugator: Isometry = IDENTITY,
    base: HPoint = ORIGIN,
    radius: Optional[float] = None,
    tiles: Optional[TileEnumerator] = None,
) -> SubgroupSnapshot:
    """The elements of g⁻¹Γg moving the base by at most R.

    Without `tiles` the group's ball of radius R + 2·d(o, g·o) is enumerated and filtered.
    With a tiling of a Dirichlet domain of the group, g·o is reduced into the domain and the
    local elements there are conjugated back, which stays cheap for far-away conjugators.

    Raises:
        FrontierOverflowError: If the enumeration is not exhaustive
    """
    radius = settings.SNAPSHOT_RADIUS if radius is None else float(radius)
    if radius <= 0.0:
        raise ValueError(f"Snapshot radius must be positive, got {radius}")
    source = f"{group.name} conjugated by {conjugator!r}"

    if tiles is not None:
        z = apply(conjugator, base)
        z0, h = tiles.reduce(z)
        local = tiles.local_elements(z0, radius)
        # c·o = z0, so c⁻¹·m·c moves o exactly as m moves z0
        c = compose(h, conjugator)
        matrices = c.inverse().matrix @ local.matrices @ c.matrix
        logger.debug(f"Snapshot of {group.name} from {local.tiles} tiles: {len(local)} elements")
        trivial = np.array([not w for w in local.words], dtype=bool)
        return _make_snapshot(matrices, local.displacements, trivial, radius, base, source)

    budget = conjugation_budget(base, conjugator, radius)
    ball = enumerate_ball(group, base, budget)
    stack = np.array([g.matrix for g in ball.isometries])
    matrices = conjugator.inverse().matrix @ stack @ conjugator.matrix
    displacements = displacements_at(matrices, base)
    keep = displacements <= radius + 1e-12
    trivial = np.array([not w for w in ball.words], dtype=bool)
    logger.debug(f"Snapshot of {group.name}: {int(keep.sum())} of {len(ball)} ball elements (budget {budget:.4g})")
    return _make_snapshot(matrices[keep], np.minimum(displacements[keep], radius), trivial[keep], radius, base, source)


def nearest_gaps(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise min over B of min(‖a - b‖, ‖a + b‖), computed in chunks."""
    flat_a = np.asarray(A, dtype=float).reshape(-1, 4)
    flat_b = np.asarray(B, dtype=float).reshape(-1, 4)
    if not len(flat_b):
        return np.full(len(flat_a), math.inf)
    out = np.empty(len(flat_a))
    for start in range(0, len(flat_a), _CHUNK):
        block = flat_a[start:start + _CHUNK]
        plus = cdist(block, flat_b)
        minus = cdist(block, -flat_b)
        out[start:start + _CHUNK] = np.min(np.minimum(plus, minus), axis=1)
    return out


def directed_distance(A: np.ndarray, B: np.ndarray) -> float:
    """sup over a in A of the distance from a to B."""
    if not len(A):
        return 0.0
    return float(np.max(nearest_gaps(A, B)))


def hausdorff(A: np.ndarray, B: np.ndarray) -> float:
    return max(directed_distance(A, B), directed_distance(B, A))


def check_compatible(a: SubgroupSnapshot, b: SubgroupSnapshot) -> None:
    if not math.isclose(a.radius, b.radius, rel_tol=1e-12, abs_tol=1e-12) or a.base != b.base:
        raise RadiusMismatchError(
            f"radius mismatch: snapshots at R = {a.radius}, o = {a.base} and R = {b.radius}, o = {b.base}"
        )


def inner_radius(s: SubgroupSnapshot, margin: Optional[float] = None) -> float:
    margin = settings.SNAPSHOT_MARGIN if margin is None else margin
    return s.radius - margin


def snapshot_distance(a: SubgroupSnapshot, b: SubgroupSnapshot, margin: Optional[float] = None) -> float:
    """Hausdorff distance between the elements within R - margin, under the sign-minimized Frobenius metric.

    Raises:
        RadiusMismatchError: If the snapshots differ in radius or base point
    """
    check_compatible(a, b)
    inner = inner_radius(a, margin)
    return hausdorff(a.within(inner), b.within(inner))


def quiet_margin(limit: SubgroupSnapshot, window: float = 1.2) -> float:
    """A margin whose inner radius sits mid-way across the widest gap in the limit's
    displacements within `window` of R, so that small perturbations do not move elements
    across the inner radius.

    The cut stays above the shortest non-identity displacement, so the inner ball always
    holds a non-identity element of the limit.

    Raises:
        ValueError: If the limit has no non-identity element within R
    """
    radius = limit.radius
    nontrivial = limit.displacements[limit.displacements > 0.0]
    if not len(nontrivial) or float(np.min(nontrivial)) >= radius:
        raise ValueError(f"No non-identity element of {limit.source} within R = {radius}; raise the radius")
    low = max(radius - min(window, radius), float(np.min(nontrivial)))
    values = sorted(float(d) for d in limit.displacements if low < d < radius)
    edges = [low] + values + [radius]
    _, cut = max((b - a, 0.5 * (a + b)) for a, b in zip(edges, edges[1:]))
    return radius - cut
