"""Convex hyperbolic polygons stored in the Klein chart centred at i.

Sides are half-planes {X : ⟨X, N⟩ ≥ 0} of the hyperboloid model, i.e. linear inequalities
n₀ + n₁k₁ + n₂k₂ ≥ 0 on Klein points. Polygons are cut out of a large square frame, so an
unbounded region keeps frame edges (sides set to None) or vertices outside the disk.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from irs_lab.modules.fuchsian.words import Word, invert_word, render_word, word_key
from irs_lab.modules.hyperbolic.isometry import Isometry, conjugate
from irs_lab.modules.hyperbolic.models import (
    apply_lorentz_klein,
    klein_functional,
    klein_to_boundary,
    klein_to_uhp,
    lorentz_matrix,
)
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, apply
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

FRAME_HALF_WIDTH = 2.0
_VERTICAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GeodesicSide:
    """A geodesic with a chosen side, plus the pairing element when it is a bisector.

    normal is a unit space-like vector N with ⟨N, N⟩ = -1; the side is {⟨X, N⟩ ≥ 0}.
    """

    normal: np.ndarray
    word: Optional[Word] = None
    element: Optional[Isometry] = None
    kind: str = "bisector"

    @property
    def functional(self) -> np.ndarray:
        return klein_functional(self.normal)

    def values(self, x, y) -> np.ndarray:
        """⟨X(z), N⟩ at upper half-plane points, positive inside."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n0, n1, n2 = self.normal
        r2 = x * x + y * y
        return ((n0 - n1) * r2 - 2.0 * n2 * x + (n0 + n1)) / (2.0 * y)

    def contains(self, x, y, tol: float = 0.0) -> np.ndarray:
        return self.values(x, y) >= -tol

    @property
    def is_vertical(self) -> bool:
        return abs(self.normal[0] - self.normal[1]) <= _VERTICAL_TOL

    @property
    def center(self) -> float:
        """x = c for a vertical side, otherwise the centre of the circle |z - c| = r."""
        n0, n1, n2 = self.normal
        if self.is_vertical:
            return float((n0 + n1) / (2.0 * n2))
        return float(n2 / (n0 - n1))

    @property
    def radius(self) -> float:
        """Euclidean radius of a circular side; math.inf for a vertical one."""
        if self.is_vertical:
            return math.inf
        return float(1.0 / abs(self.normal[0] - self.normal[1]))

    @property
    def inside(self) -> bool:
        """Circle: whether the side is the disk inside it. Vertical line: whether it is x ≥ c."""
        n0, n1, n2 = self.normal
        if self.is_vertical:
            return bool(n2 < 0.0)
        return bool(n0 - n1 < 0.0)

    def label(self) -> str:
        if self.word is not None:
            return render_word(self.word)
        return self.kind

    def transformed(self, g: Isometry, L: Optional[np.ndarray] = None) -> "GeodesicSide":
        L = lorentz_matrix(g) if L is None else L
        return GeodesicSide(
            normal=L @ self.normal,
            word=self.word,
            element=None if self.element is None else conjugate(self.element, g),
            kind=self.kind,
        )


Vertex = Optional[Union[HPoint, float]]


@dataclass(frozen=True, eq=False)
class HyperbolicPolygon:
    """Convex polygon: side i runs from vertex i to vertex i + 1 (counter-clockwise in the chart)."""

    vertices: np.ndarray
    sides: Tuple[Optional[GeodesicSide], ...]
    base: HPoint = ORIGIN
    certificate: Optional[object] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", vertices)
        if len(vertices) != len(self.sides):
            raise ValueError(f"{len(vertices)} vertices but {len(self.sides)} sides")

    def __len__(self) -> int:
        return len(self.sides)

    @property
    def is_empty(self) -> bool:
        return len(self.sides) == 0

    @property
    def real_sides(self) -> List[GeodesicSide]:
        return [side for side in self.sides if side is not None]

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.vertices[:, 0], self.vertices[:, 1])

    @property
    def ideal(self) -> np.ndarray:
        return np.abs(self.radii - 1.0) <= settings.IDEAL_TOL

    @property
    def is_bounded(self) -> bool:
        """Finite area: no frame edges and no vertex outside the closed disk."""
        if self.is_empty:
            return True
        return all(side is not None for side in self.sides) and bool(np.all(self.radii <= 1.0 + settings.IDEAL_TOL))

    def vertex_points(self) -> List[Vertex]:
        """Finite vertices as HPoints, ideal ones as boundary points (math.inf for ∞).

        Vertices outside the closed disk (frame corners of unbounded polygons) give None.
        """
        out: List[Vertex] = []
        for (k1, k2), ideal, r in zip(self.vertices, self.ideal, self.radii):
            if r > 1.0 + settings.IDEAL_TOL:
                out.append(None)
            elif ideal:
                out.append(klein_to_boundary(k1, k2))
            else:
                x, y = klein_to_uhp(k1, k2)
                out.append(HPoint(float(x), float(y)))
        return out

    def angles(self) -> np.ndarray:
        """Interior angles, zero at ideal vertices."""
        n = len(self)
        out = np.zeros(n)
        if n < 3:
            return out
        poincare = _to_poincare(self.vertices)
        for i in range(n):
            if self.ideal[i]:
                continue
            p = poincare[i]
            u = _mobius_to_origin(poincare[i - 1], p)
            v = _mobius_to_origin(poincare[(i + 1) % n], p)
            cos_angle = (u * np.conj(v)).real / (abs(u) * abs(v))
            out[i] = math.acos(min(1.0, max(-1.0, cos_angle)))
        return out

    def area(self) -> float:
        return polygon_area(self)

    def contains(self, x, y, tol: Optional[float] = None) -> np.ndarray:
        """Closed membership for coordinate arrays."""
        tol = settings.DOMAIN_TOL if tol is None else tol
        x = np.asarray(x, dtype=float)
        inside = np.ones(x.shape, dtype=bool) if not self.is_empty else np.zeros(x.shape, dtype=bool)
        for side in self.real_sides:
            inside &= side.contains(x, y, tol)
        return inside

    def contains_half_open(self, x, y, tol: Optional[float] = None) -> np.ndarray:
        """Membership where a paired side is kept only if its word precedes the inverse word.

        Axis sides are always closed.
        """
        tol = settings.DOMAIN_TOL if tol is None else tol
        x = np.asarray(x, dtype=float)
        inside = np.ones(x.shape, dtype=bool) if not self.is_empty else np.zeros(x.shape, dtype=bool)
        for side in self.real_sides:
            values = side.values(x, y)
            if side.kind == "axis" or side.word is None or word_key(side.word) < word_key(invert_word(side.word)):
                inside &= values >= -tol
            else:
                inside &= values > tol
        return inside

    def transformed(self, g: Isometry) -> "HyperbolicPolygon":
        """The polygon g·P."""
        if self.is_empty:
            return replace(self, base=apply(g, self.base))
        L = lorentz_matrix(g)
        if not self.is_bounded:
            # vertices outside the disk do not map projectively in a stable way; recut the frame
            sides = [side.transformed(g, L) for side in self.real_sides]
            polygon, _ = carve(frame_polygon(apply(g, self.base)), sides)
            return replace(snap_ideal_vertices(polygon), certificate=self.certificate)
        vertices = apply_lorentz_klein(L, self.vertices)
        # keep ideal vertices exactly on the circle
        norms = np.hypot(vertices[:, 0], vertices[:, 1])
        snap = self.ideal
        vertices[snap] = vertices[snap] / norms[snap, None]
        sides = tuple(None if side is None else side.transformed(g, L) for side in self.sides)
        return HyperbolicPolygon(vertices, sides, apply(g, self.base), self.certificate)


def contains(polygon: HyperbolicPolygon, z: HPoint) -> bool:
    return bool(polygon.contains(np.array([z.x]), np.array([z.y]))[0])


def polygon_area(polygon: HyperbolicPolygon) -> float:
    """Gauss–Bonnet: (n - 2)π minus the interior angles; inf for unbounded polygons."""
    if polygon.is_empty:
        return 0.0
    if not polygon.is_bounded:
        return math.inf
    return (len(polygon) - 2) * math.pi - float(np.sum(polygon.angles()))


def empty_polygon(base: HPoint = ORIGIN) -> HyperbolicPolygon:
    return HyperbolicPolygon(np.zeros((0, 2)), (), base)


def frame_polygon(base: HPoint = ORIGIN) -> HyperbolicPolygon:
    h = FRAME_HALF_WIDTH
    vertices = np.array([[-h, -h], [h, -h], [h, h], [-h, h]])
    return HyperbolicPolygon(vertices, (None, None, None, None), base)


def _to_poincare(vertices: np.ndarray) -> np.ndarray:
    k = vertices[:, 0] + 1j * vertices[:, 1]
    r2 = np.minimum(np.abs(k) ** 2, 1.0)
    return k / (1.0 + np.sqrt(1.0 - r2))


def _mobius_to_origin(w: complex, p: complex) -> complex:
    """Image of w under the disk automorphism sending p to 0."""
    return (w - p) / (1.0 - np.conj(p) * w)


def _functional_values(functional: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Klein-chart signed Euclidean distances of vertices from the side's line."""
    n0, n1, n2 = functional
    return (n0 + n1 * vertices[:, 0] + n2 * vertices[:, 1]) / math.hypot(n1, n2)


def cuts(polygon: HyperbolicPolygon, side: GeodesicSide, tol: Optional[float] = None) -> bool:
    """Whether the side's half-plane removes part of the polygon."""
    tol = settings.DOMAIN_TOL if tol is None else tol
    if polygon.is_empty:
        return False
    return bool(np.min(_functional_values(side.functional, polygon.vertices)) < -tol)


def clip(polygon: HyperbolicPolygon, side: GeodesicSide, tol: Optional[float] = None) -> HyperbolicPolygon:
    """Intersect with a half-plane (Sutherland–Hodgman on the convex polygon)."""
    tol = settings.DOMAIN_TOL if tol is None else tol
    if polygon.is_empty:
        return polygon
    values = _functional_values(side.functional, polygon.vertices)
    if np.min(values) >= -tol:
        return polygon

    n = len(polygon)
    out: List[Tuple[np.ndarray, Optional[GeodesicSide]]] = []
    for i in range(n):
        j = (i + 1) % n
        p, q = polygon.vertices[i], polygon.vertices[j]
        fp, fq = values[i], values[j]
        if fp >= -tol:
            out.append((p, polygon.sides[i]))
            if fq < -tol and fp > tol:
                out.append((p + fp / (fp - fq) * (q - p), side))
            elif fq < -tol:
                # p lies on the new line: the edge from p now follows it
                out[-1] = (p, side)
        elif fq >= -tol:
            if fq > tol:
                out.append((p + fp / (fp - fq) * (q - p), polygon.sides[i]))

    out = _drop_repeats(out)
    if len(out) < 3:
        return empty_polygon(polygon.base)
    vertices = np.array([v for v, _ in out])
    return HyperbolicPolygon(vertices, tuple(s for _, s in out), polygon.base)


def _drop_repeats(out: List[Tuple[np.ndarray, Optional[GeodesicSide]]], tol: float = 1e-12):
    """Remove zero-length edges; the later vertex keeps its outgoing side."""
    changed = True
    while changed and len(out) > 1:
        changed = False
        for i in range(len(out)):
            j = (i + 1) % len(out)
            if np.max(np.abs(out[i][0] - out[j][0])) <= tol:
                del out[i]
                changed = True
                break
    return out


def snap_ideal_vertices(polygon: HyperbolicPolygon) -> HyperbolicPolygon:
    """Project vertices within IDEAL_TOL of the circle onto it."""
    if polygon.is_empty:
        return polygon
    vertices = polygon.vertices.copy()
    norms = np.hypot(vertices[:, 0], vertices[:, 1])
    snap = np.abs(norms - 1.0) <= settings.IDEAL_TOL
    vertices[snap] = vertices[snap] / norms[snap, None]
    return replace(polygon, vertices=vertices)


def carve(
    polygon: HyperbolicPolygon,
    sides: Sequence[GeodesicSide],
    tol: Optional[float] = None,
) -> Tuple[HyperbolicPolygon, int]:
    """Clip by the given half-planes, earliest first, dropping those that never cut.

    A half-plane that misses the polygon misses every later, smaller polygon too, so each
    round only keeps the candidates that still cut.

    Returns:
        (polygon, number of clips applied)
    """
    tol = settings.DOMAIN_TOL if tol is None else tol
    remaining = list(sides)
    clips = 0
    while remaining and not polygon.is_empty:
        functionals = np.array([side.functional for side in remaining])
        scale = np.hypot(functionals[:, 1], functionals[:, 2])
        homogeneous = np.column_stack([np.ones(len(polygon)), polygon.vertices])
        values = (functionals @ homogeneous.T) / scale[:, None]
        cutting = np.flatnonzero(np.min(values, axis=1) < -tol)
        if len(cutting) == 0:
            break
        polygon = clip(polygon, remaining[cutting[0]], tol)
        clips += 1
        remaining = [remaining[i] for i in cutting[1:]]
    return polygon, clips


def describe_side(side: Optional[GeodesicSide]) -> str:
    if side is None:
        return "frame"
    if side.is_vertical:
        where = "right" if side.inside else "left"
        return f"{side.label()}: x = {side.center:.18g} ({where})"
    where = "inside" if side.inside else "outside"
    return f"{side.label()}: |z - {side.center:.18g}| = {side.radius:.18g} ({where})"
