import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import FrontierOverflowError, HyperbolicGeometryError
from irs_lab.modules.domains.polygon import HyperbolicPolygon
from irs_lab.modules.fuchsian.enumeration import OrbitIndex
from irs_lab.modules.fuchsian.words import Word, multiply_words
from irs_lab.modules.hyperbolic.isometry import IDENTITY, Isometry, compose
from irs_lab.modules.hyperbolic.models import lorentz_matrix, to_hyperboloid
from irs_lab.modules.hyperbolic.plane import HPoint, apply
from irs_lab.settings import settings

_SIGNATURE = np.array([1.0, -1.0, -1.0])
_MAX_REDUCTIONS = 10_000


@dataclass(frozen=True)
class LocalElements:
    """Elements γ with d(z, γz) ≤ radius, found by walking the tiles γD around z."""

    point: HPoint
    radius: float
    words: Tuple[Word, ...]
    matrices: np.ndarray
    displacements: np.ndarray
    tiles: int

    def __len__(self) -> int:
        return len(self.words)

    @property
    def isometries(self) -> List[Isometry]:
        return [Isometry.from_matrix(m) for m in self.matrices]

    def nontrivial_displacements(self) -> np.ndarray:
        mask = np.array([bool(w) for w in self.words], dtype=bool)
        return self.displacements[mask]


class TileEnumerator:
    """Breadth-first search over the tiling by translates of a Dirichlet domain.

    Every side must carry its pairing element. A tile γD is kept while the largest distance
    from z to one of its side half-planes stays within the radius; the segment [z, γz] only
    crosses tiles meeting the ball, so the search is exhaustive.
    A search still open after max_levels levels doubles its cap, at most `doublings` times.
    """

    def __init__(self, polygon: HyperbolicPolygon, max_levels: Optional[int] = None, doublings: Optional[int] = None):
        sides = polygon.real_sides
        if not sides or any(side.element is None or side.kind != "bisector" for side in sides):
            raise ValueError("Tiling needs a domain whose sides are all paired bisectors")
        self.logger = logging.getLogger(__name__)
        self.polygon = polygon
        self.max_levels = settings.MAX_WORD_LENGTH if max_levels is None else int(max_levels)
        self.doublings = settings.TILE_LEVEL_DOUBLINGS if doublings is None else int(doublings)
        self.words = [side.word for side in sides]
        self.elements = [side.element for side in sides]
        self.matrices = np.array([g.matrix for g in self.elements])
        # neighbour across side s is γs·D; the point seen from it moves by s⁻¹
        self.inverse_lorentz = np.array([lorentz_matrix(g.inverse()) for g in self.elements])
        self.normals = np.array([side.normal for side in sides]) * _SIGNATURE

    def _lower_bounds(self, Y: np.ndarray) -> np.ndarray:
        """Distance lower bound from z to each tile, given Y = X(γ⁻¹z)."""
        values = Y @ self.normals.T
        return np.arcsinh(np.maximum(0.0, -np.min(values, axis=1)))

    def local_elements(self, z: HPoint, radius: float) -> LocalElements:
        """All γ with d(z, γz) ≤ radius, including the identity.

        Raises:
            FrontierOverflowError: If the search is still open after max_levels·2^doublings levels
        """
        if radius <= 0.0:
            raise ValueError(f"Search radius must be positive, got {radius}")
        X = to_hyperboloid(z.x, z.y)
        index = OrbitIndex()
        index.add(X, 0)
        words: List[Word] = [()]
        matrices = [np.eye(2)]
        Ys = [X]
        frontier_Y = X[None, :]
        frontier_M = np.eye(2)[None, :, :]
        frontier_W: List[Word] = [()]
        tiles = 1

        level, limit = 0, self.max_levels
        hard_limit = self.max_levels * 2**self.doublings
        while len(frontier_W):
            if level == limit:
                if limit >= hard_limit:
                    raise FrontierOverflowError(
                        f"frontier overflow: {len(frontier_W)} open tiles after {limit} levels (R = {radius})"
                    )
                limit = min(2 * limit, hard_limit)
                self.logger.debug(
                    f"Tiling search at ({z.x:.4g}, {z.y:.4g}) still open after {level} levels, extending to {limit}"
                )
            level += 1
            Y = np.einsum("sij,fj->fsi", self.inverse_lorentz, frontier_Y)
            M = np.einsum("fij,sjk->fsik", frontier_M, self.matrices)
            bounds = self._lower_bounds(Y.reshape(-1, 3)).reshape(Y.shape[:2])

            next_Y, next_M, next_W = [], [], []
            for f, s in zip(*np.nonzero(bounds <= radius + 1e-12)):
                if not index.add(Y[f, s], len(words)):
                    continue
                word = multiply_words(frontier_W[f], self.words[s])
                words.append(word)
                matrices.append(M[f, s])
                Ys.append(Y[f, s])
                next_Y.append(Y[f, s])
                next_M.append(M[f, s])
                next_W.append(word)
            tiles += len(next_W)
            frontier_Y = np.array(next_Y).reshape(-1, 3)
            frontier_M = np.array(next_M).reshape(-1, 2, 2)
            frontier_W = next_W

        Ys = np.array(Ys)
        # cosh d(z, γz) = ⟨X(γ⁻¹z), X(z)⟩
        displacements = np.arccosh(np.maximum(Ys @ (X * _SIGNATURE), 1.0))
        keep = displacements <= radius
        kept_words = tuple(w for w, k in zip(words, keep) if k)
        self.logger.debug(f"Tiling search at ({z.x:.4g}, {z.y:.4g}): {tiles} tiles, {len(kept_words)} elements")
        return LocalElements(z, radius, kept_words, np.array(matrices)[keep], displacements[keep], tiles)

    def reduce(self, z: HPoint, tol: Optional[float] = None) -> Tuple[HPoint, Isometry]:
        """Move z into the domain by side pairings; returns (z0, h) with h·z = z0.

        Raises:
            HyperbolicGeometryError: If the reduction does not terminate
        """
        tol = settings.DOMAIN_TOL if tol is None else tol
        h = IDENTITY
        for _ in range(_MAX_REDUCTIONS):
            values = self.normals @ to_hyperboloid(z.x, z.y)
            worst = int(np.argmin(values))
            if values[worst] >= -tol:
                return z, h
            step = self.elements[worst].inverse()
            z = apply(step, z)
            h = compose(step, h)
        raise HyperbolicGeometryError(f"reduction of {z} into the domain did not terminate")

