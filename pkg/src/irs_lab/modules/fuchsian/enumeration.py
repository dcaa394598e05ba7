import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from irs_lab.core.exceptions import FrontierOverflowError
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.fuchsian.words import Word, invert_word, word_key
from irs_lab.modules.hyperbolic.isometry import Isometry, compose
from irs_lab.modules.hyperbolic.models import to_hyperboloid
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, move_i_to
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

_CELL = 1e-3


class OrbitIndex:
    """Deduplicates orbit points γ·o, which identify group elements of a torsion-free group.

    Points are stored by their hyperboloid coordinates; two points match when they agree to
    `tol` relative to their height.
    """

    def __init__(self, tol: Optional[float] = None):
        self.tol = settings.MATCH_TOL if tol is None else tol
        self._cells: Dict[Tuple[int, int], List[Tuple[np.ndarray, int]]] = {}

    def __len__(self) -> int:
        return sum(len(bucket) for bucket in self._cells.values())

    @staticmethod
    def _cell(X: np.ndarray) -> Tuple[int, int]:
        return int(math.floor(X[1] / _CELL)), int(math.floor(X[2] / _CELL))

    def find(self, X: np.ndarray) -> Optional[int]:
        """Index of a stored point matching X, if any."""
        i, j = self._cell(X)
        limit = min(_CELL, self.tol * (1.0 + abs(X[0])))
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for stored, index in self._cells.get((i + di, j + dj), ()):
                    if float(np.max(np.abs(stored - X))) <= limit:
                        return index
        return None

    def add(self, X: np.ndarray, index: int) -> bool:
        """Store X unless a match exists; returns whether it was new."""
        if self.find(X) is not None:
            return False
        self._cells.setdefault(self._cell(X), []).append((np.asarray(X, dtype=float), index))
        return True


@dataclass(frozen=True)
class BallEnumeration:
    """Elements g with d(base, g·base) ≤ radius, each with a shortest word found for it."""

    base: HPoint
    radius: float
    elements: Tuple[Tuple[Word, Isometry], ...]
    displacements: Tuple[float, ...]
    exhaustive: bool

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Tuple[Word, Isometry]]:
        return iter(self.elements)

    @property
    def isometries(self) -> List[Isometry]:
        return [g for _, g in self.elements]

    @property
    def words(self) -> List[Word]:
        return [w for w, _ in self.elements]

    def nontrivial(self) -> List[Tuple[Word, Isometry, float]]:
        return [(w, g, d) for (w, g), d in zip(self.elements, self.displacements) if w]

    def contains(self, g: Isometry, tol: float = 1e-9) -> bool:
        return any(g.isclose(h, tol) for _, h in self.elements)


def _orbit_points(matrices: np.ndarray) -> np.ndarray:
    """Hyperboloid coordinates of g·i for a stack of 2×2 matrices."""
    a, b, c, d = matrices[..., 0, 0], matrices[..., 0, 1], matrices[..., 1, 0], matrices[..., 1, 1]
    den = c * c + d * d
    return to_hyperboloid((a * c + b * d) / den, 1.0 / den)


def enumerate_ball(
    group: FuchsianGroup,
    base: HPoint = ORIGIN,
    radius: Optional[float] = None,
    max_word_len: Optional[int] = None,
    slack: Optional[float] = None,
    strict: bool = True,
) -> BallEnumeration:
    """Breadth-first search over reduced words for the elements displacing `base` by ≤ radius.

    A word is extended only while its prefix displaces the base by at most radius + slack;
    slack defaults to the largest generator displacement, the triangle-inequality margin.

    Args:
        group: The group to enumerate
        base: Base point o
        radius: Ball radius R (defaults to settings.BALL_RADIUS)
        max_word_len: Word-length cap (defaults to settings.MAX_WORD_LENGTH)
        slack: Extra pruning margin for prefixes
        strict: Raise on overflow instead of returning a flagged, partial result

    Returns:
        BallEnumeration: the elements in shortlex order of their words

    Raises:
        FrontierOverflowError: If strict and the frontier is still open at max_word_len
    """
    radius = settings.BALL_RADIUS if radius is None else float(radius)
    max_word_len = settings.MAX_WORD_LENGTH if max_word_len is None else int(max_word_len)
    if radius <= 0.0:
        raise ValueError(f"Ball radius must be positive, got {radius}")

    # work in the frame where the base point is i
    frame = move_i_to(base)
    frame_inv = frame.inverse()
    letters = [(w[0], compose(compose(frame_inv, g), frame)) for w, g in group.symmetric_generators()]
    gen_stack = np.array([g.matrix for _, g in letters])
    gen_displacements = np.arccosh(np.maximum(0.5 * np.sum(gen_stack**2, axis=(1, 2)), 1.0))
    if slack is None:
        slack = float(np.max(gen_displacements))
    prune = radius + slack

    index = OrbitIndex()
    index.add(_orbit_points(np.eye(2)), 0)
    found: List[Tuple[Word, np.ndarray, float]] = [((), np.eye(2), 0.0)]
    frontier: List[Tuple[Word, np.ndarray]] = [((), np.eye(2))]
    exhaustive = True
    length = 0

    while frontier:
        if length >= max_word_len:
            exhaustive = False
            break
        length += 1
        words = [w for w, _ in frontier]
        stack = np.array([m for _, m in frontier])
        products = np.einsum("fij,gjk->fgik", stack, gen_stack)
        # cosh d(i, g·i) = ‖g‖²/2 for det g = 1
        cosh_d = 0.5 * np.sum(products**2, axis=(2, 3))
        points = _orbit_points(products)

        next_frontier = []
        for f, word in enumerate(words):
            for k, (letter, _) in enumerate(letters):
                if word and word[-1] == -letter:
                    continue
                dist = math.acosh(max(float(cosh_d[f, k]), 1.0))
                if dist > prune:
                    continue
                if not index.add(points[f, k], len(found)):
                    continue
                new_word = word + (letter,)
                found.append((new_word, products[f, k], dist))
                next_frontier.append((new_word, products[f, k]))
        logger.debug(f"Ball level {length}: {len(next_frontier)} new elements")
        frontier = next_frontier

    if not exhaustive:
        message = f"frontier overflow: {len(frontier)} open words at length {max_word_len} (R = {radius})"
        if strict:
            raise FrontierOverflowError(message)
        logger.warning(message)

    kept = [(w, m, d) for w, m, d in found if d <= radius]
    for w, m, d in list(kept):
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        if index.add(_orbit_points(inv), len(found)):
            kept.append((invert_word(w), inv, d))
    kept.sort(key=lambda item: word_key(item[0]))
    elements = tuple((w, compose(compose(frame, Isometry.from_matrix(m)), frame_inv)) for w, m, _ in kept)
    return BallEnumeration(
        base=base,
        radius=radius,
        elements=elements,
        displacements=tuple(d for _, _, d in kept),
        exhaustive=exhaustive,
    )


def closure_under_inverse(elements: Sequence[Tuple[Word, Isometry]], tol: float = 1e-9) -> bool:
    """Whether every element's inverse is also present."""
    return all(any(g.inverse().isclose(h, tol) for _, h in elements) for _, g in elements)
