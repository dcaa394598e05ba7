"""Rejection sampling of the hyperbolic area measure dx dy / y² on a bounded region.

Proposals are uniform in (x, u = 1/y) over the region's box, where the area element is
exactly dx du, so every accepted point is distributed by the normalized area of the region.
"""

import logging
import math
from typing import Optional, Protocol, Tuple

import numpy as np

from irs_lab.core.exceptions import RejectionStallError
from irs_lab.core.seeding import child_rng
from irs_lab.modules.hyperbolic.area import Box
from irs_lab.modules.hyperbolic.plane import HPoint
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

_MIN_BATCH = 256
_MAX_BATCH = 65_536


class SamplingRegion(Protocol):
    box: Box

    def contains(self, x, y) -> np.ndarray: ...


def sample_points(
    region: SamplingRegion,
    n: int,
    rng: np.random.Generator,
    max_proposals: Optional[int] = None,
    min_rate: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw n points of the region, distributed by the normalized hyperbolic area.

    Args:
        region: Anything with a vectorized `contains(x, y)` and a bounding `box`
        n: Number of points
        rng: Source of randomness; consumed in batches, so results depend on n
        max_proposals: Proposal count after which a low acceptance rate is fatal
        min_rate: Smallest tolerated acceptance rate

    Returns:
        Tuple[np.ndarray, np.ndarray]: the x and y coordinates

    Raises:
        RejectionStallError: If the acceptance rate stays below min_rate over max_proposals
    """
    if n < 0:
        raise ValueError(f"Sample count must be non-negative, got {n}")
    if n == 0:
        return np.empty(0), np.empty(0)
    max_proposals = settings.REJECTION_MAX_PROPOSALS if max_proposals is None else max_proposals
    min_rate = settings.REJECTION_MIN_RATE if min_rate is None else min_rate
    x_min, x_max, y_min, y_max = region.box
    u_min, u_max = 1.0 / y_max, 1.0 / y_min

    xs, ys = [], []
    accepted = proposals = 0
    batch = max(_MIN_BATCH, min(_MAX_BATCH, 2 * n))
    while accepted < n:
        x = rng.uniform(x_min, x_max, batch)
        y = 1.0 / rng.uniform(u_min, u_max, batch)
        inside = np.asarray(region.contains(x, y), dtype=bool)
        proposals += batch
        hits = int(np.count_nonzero(inside))
        xs.append(x[inside])
        ys.append(y[inside])
        accepted += hits
        if proposals >= max_proposals and accepted < min_rate * proposals:
            raise RejectionStallError(
                f"rejection stall: {accepted} of {proposals} proposals accepted in box {region.box}"
            )
        if accepted < n:
            rate = max(accepted / proposals, 1.0 / proposals)
            batch = int(min(_MAX_BATCH, max(_MIN_BATCH, 1.2 * (n - accepted) / rate)))
    logger.debug(f"Sampled {n} points from {proposals} proposals (rate {accepted / max(proposals, 1):.3g})")
    return np.concatenate(xs)[:n], np.concatenate(ys)[:n]


def sample_rotations(n: int, rng: np.random.Generator) -> np.ndarray:
    """Angles of rotations about i under the normalized Haar measure of SO(2)."""
    return rng.uniform(0.0, 2.0 * math.pi, n)


def sample_point(region: SamplingRegion, seed: Optional[int] = None) -> HPoint:
    seed = settings.MASTER_SEED if seed is None else seed
    x, y = sample_points(region, 1, child_rng(seed, "sample_point"))
    return HPoint(float(x[0]), float(y[0]))
