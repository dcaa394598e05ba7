import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import HyperbolicGeometryError
from irs_lab.modules.domains.polygon import HyperbolicPolygon
from irs_lab.modules.fuchsian.words import Word, invert_word, multiply_words
from irs_lab.modules.hyperbolic.isometry import IDENTITY, Isometry, compose
from irs_lab.modules.hyperbolic.models import apply_lorentz_klein, klein_to_boundary, lorentz_matrix

logger = logging.getLogger(__name__)

_VERTEX_TOL = 1e-6


@dataclass(frozen=True)
class VertexCycle:
    """Vertices identified by the side pairings, starting from vertices[0].

    stabilizer maps vertices[0] to itself: parabolic at a cusp, the identity at a finite
    vertex of a fundamental domain of a torsion-free group.
    """

    vertices: Tuple[int, ...]
    words: Tuple[Word, ...]
    stabilizer: Isometry
    stabilizer_word: Word
    ideal: bool
    angle_sum: float

    @property
    def length(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class CuspVertex:
    index: int
    point: float
    stabilizer: Isometry
    word: Word
    cycle: Tuple[int, ...]


def _find_vertex(polygon: HyperbolicPolygon, k: np.ndarray) -> Optional[int]:
    gaps = np.max(np.abs(polygon.vertices - k), axis=1)
    j = int(np.argmin(gaps))
    return j if gaps[j] <= _VERTEX_TOL else None


def _pairs_at(polygon: HyperbolicPolygon, index: int) -> Tuple[int, int]:
    """Side indices meeting at a vertex: (incoming, outgoing)."""
    return (index - 1) % len(polygon), index


def follow_cycle(polygon: HyperbolicPolygon, start: int, side: Optional[int] = None) -> VertexCycle:
    """Follow side pairings from a vertex until they return to it.

    At vertex v on a side paired by γ, the image γ⁻¹v lies on the side paired by γ⁻¹; the
    walk continues along the other side meeting there.

    Raises:
        HyperbolicGeometryError: If a vertex touches an unpaired side or the walk does not close
    """
    n = len(polygon)
    angles = polygon.angles()
    side = _pairs_at(polygon, start)[1] if side is None else side
    vertex, current = start, side
    vertices: List[int] = []
    words: List[Word] = []
    stabilizer, stabilizer_word = IDENTITY, ()

    for _ in range(2 * n + 2):
        vertices.append(vertex)
        geodesic = polygon.sides[current]
        if geodesic is None or geodesic.element is None or geodesic.kind != "bisector":
            raise HyperbolicGeometryError(f"vertex {vertex} lies on an unpaired side")
        inverse = geodesic.element.inverse()
        image = apply_lorentz_klein(lorentz_matrix(inverse), polygon.vertices[vertex])[0]
        target = _find_vertex(polygon, image)
        if target is None:
            raise HyperbolicGeometryError(f"image of vertex {vertex} under the pairing {geodesic.label()} is not a vertex")

        words.append(geodesic.word)
        stabilizer = compose(inverse, stabilizer)
        stabilizer_word = multiply_words(invert_word(geodesic.word), stabilizer_word)

        incoming, outgoing = _pairs_at(polygon, target)
        paired = [j for j in (incoming, outgoing) if _is_paired(polygon, j, inverse)]
        if not paired:
            raise HyperbolicGeometryError(f"no side at vertex {target} is paired with {geodesic.label()}")
        vertex = target
        current = outgoing if paired[0] == incoming else incoming
        if vertex == start and current == side:
            ideal = bool(polygon.ideal[start])
            angle_sum = float(sum(angles[v] for v in vertices))
            return VertexCycle(tuple(vertices), tuple(words), stabilizer, stabilizer_word, ideal, angle_sum)

    raise HyperbolicGeometryError(f"vertex cycle from {start} did not close after {2 * n + 2} steps")


def _is_paired(polygon: HyperbolicPolygon, index: int, element: Isometry) -> bool:
    side = polygon.sides[index]
    return side is not None and side.element is not None and side.element.isclose(element, 1e-7)


def vertex_cycles(polygon: HyperbolicPolygon) -> List[VertexCycle]:
    """Partition the vertices into cycles; needs every side to be a paired bisector."""
    seen = set()
    cycles = []
    for index in range(len(polygon)):
        if index in seen:
            continue
        cycle = follow_cycle(polygon, index)
        seen.update(cycle.vertices)
        cycles.append(cycle)
    logger.debug(f"{len(cycles)} vertex cycles, {sum(c.ideal for c in cycles)} ideal")
    return cycles


def cusp_vertices(polygon: HyperbolicPolygon) -> List[CuspVertex]:
    """Every ideal vertex with its parabolic stabilizer."""
    out = []
    for index in np.flatnonzero(polygon.ideal):
        cycle = follow_cycle(polygon, int(index))
        k1, k2 = polygon.vertices[index]
        out.append(CuspVertex(int(index), klein_to_boundary(k1, k2), cycle.stabilizer, cycle.stabilizer_word, cycle.vertices))
    return out


def cusp_count(polygon: HyperbolicPolygon) -> int:
    return sum(1 for cycle in vertex_cycles(polygon) if cycle.ideal)


def angle_defects(polygon: HyperbolicPolygon) -> List[float]:
    """|angle sum - 2π| for each finite vertex cycle."""
    return [abs(cycle.angle_sum - 2.0 * math.pi) for cycle in vertex_cycles(polygon) if not cycle.ideal]
