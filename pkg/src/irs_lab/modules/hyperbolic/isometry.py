import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from irs_lab.core.exceptions import HyperbolicGeometryError
from irs_lab.settings import settings


@dataclass(frozen=True)
class Isometry:
    """An element of PSL(2,R).

    The matrix is rescaled to determinant one on construction and the sign is fixed so that
    a > 0, or a = 0 and b > 0. M and -M therefore build the same value, which makes equality
    and hashing sign-insensitive.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        a, b, c, d = float(self.a), float(self.b), float(self.c), float(self.d)
        det = a * d - b * c
        if not math.isfinite(det) or det <= 0.0:
            raise ValueError(f"Isometry needs a positive finite determinant, got {det!r}")
        scale = 1.0 / math.sqrt(det)
        a, b, c, d = a * scale, b * scale, c * scale, d * scale
        if a < 0.0 or (a == 0.0 and b < 0.0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_matrix(cls, matrix) -> "Isometry":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"Expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def entries(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def isclose(self, other: "Isometry", tol: float = 1e-9) -> bool:
        """Entrywise comparison up to tol, minimized over the global sign."""
        return frobenius_distance(self, other) <= tol

    def __repr__(self) -> str:
        return f"Isometry([[{self.a:.12g}, {self.b:.12g}], [{self.c:.12g}, {self.d:.12g}]])"


class IsometryType(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class IsometryClass:
    """Trace-trichotomy type of an isometry with its boundary data.

    fixed_points holds boundary points (math.inf stands for the point at infinity):
    (repelling, attracting) for hyperbolic elements, (p,) for parabolic ones.
    """

    tag: IsometryType
    fixed_points: Tuple[float, ...] = ()
    translation_length: float = 0.0

    @property
    def axis(self) -> Optional[Tuple[float, float]]:
        if self.tag is IsometryType.HYPERBOLIC:
            return self.fixed_points[0], self.fixed_points[1]
        return None

    @property
    def fixed_point(self) -> Optional[float]:
        if self.tag is IsometryType.PARABOLIC:
            return self.fixed_points[0]
        return None


IDENTITY = Isometry(1.0, 0.0, 0.0, 1.0)


def identity() -> Isometry:
    return IDENTITY


def compose(f: Isometry, g: Isometry) -> Isometry:
    """Matrix product f·g, renormalized and sign-canonicalized."""
    return Isometry(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
    )


def inverse(g: Isometry) -> Isometry:
    return g.inverse()


def trace(g: Isometry) -> float:
    return g.trace


def commutator(f: Isometry, g: Isometry) -> Isometry:
    return compose(compose(f, g), compose(f.inverse(), g.inverse()))


def commutator_trace(f: Isometry, g: Isometry) -> float:
    """Trace of f g f⁻¹ g⁻¹ in SL(2,R); its sign does not depend on the lifts of f and g."""
    m = f.matrix @ g.matrix @ f.inverse().matrix @ g.inverse().matrix
    return float(m[0, 0] + m[1, 1])


def conjugate(g: Isometry, h: Isometry) -> Isometry:
    """h·g·h⁻¹."""
    return compose(compose(h, g), h.inverse())


def frobenius_distance(f: Isometry, g: Isometry) -> float:
    """Frobenius norm of f - g, minimized over the sign of g."""
    plus = (f.a - g.a) ** 2 + (f.b - g.b) ** 2 + (f.c - g.c) ** 2 + (f.d - g.d) ** 2
    minus = (f.a + g.a) ** 2 + (f.b + g.b) ** 2 + (f.c + g.c) ** 2 + (f.d + g.d) ** 2
    return math.sqrt(min(plus, minus))


def translation(b: float) -> Isometry:
    """z ↦ z + b."""
    return Isometry(1.0, b, 0.0, 1.0)


def dilation(factor: float) -> Isometry:
    """z ↦ factor·z for factor > 0."""
    if factor <= 0.0:
        raise ValueError(f"Dilation factor must be positive, got {factor}")
    root = math.sqrt(factor)
    return Isometry(root, 0.0, 0.0, 1.0 / root)


def hyperbolic_along_imaginary_axis(length: float) -> Isometry:
    """Translation by `length` along the imaginary axis, i.e. diag(e^{l/2}, e^{-l/2})."""
    return dilation(math.exp(length))


def rotation_about_i(angle: float) -> Isometry:
    """Rotation by `angle` about i."""
    half = 0.5 * angle
    return Isometry(math.cos(half), math.sin(half), -math.sin(half), math.cos(half))


def translation_length(g: Isometry, tol: Optional[float] = None) -> float:
    """ℓ(g) = 2 arcosh(½·max(2, |tr g|)); zero for elliptic, parabolic and identity elements.

    Traces inside the parabolic band |tr| ≤ 2 + tol give exactly zero.
    """
    tol = settings.TRACE_TOL if tol is None else tol
    abs_trace = abs(g.trace)
    if abs_trace <= 2.0 + tol:
        return 0.0
    return 2.0 * math.acosh(0.5 * abs_trace)


def is_identity(g: Isometry, tol: float = 1e-9) -> bool:
    return abs(g.a - 1.0) <= tol and abs(g.b) <= tol and abs(g.c) <= tol and abs(g.d - 1.0) <= tol


def classify(g: Isometry, tol: Optional[float] = None) -> IsometryClass:
    """Classify g by the trace trichotomy.

    Args:
        g: The isometry to classify
        tol: Width of the parabolic band around |tr| = 2 (defaults to settings.TRACE_TOL)

    Returns:
        IsometryClass: the tag plus fixed points and translation length where meaningful
    """
    tol = settings.TRACE_TOL if tol is None else tol
    if tol <= 0.0:
        raise ValueError(f"Classification tolerance must be positive, got {tol}")

    if is_identity(g, tol):
        return IsometryClass(IsometryType.IDENTITY)

    abs_trace = abs(g.trace)
    if abs_trace > 2.0 + tol:
        return IsometryClass(
            IsometryType.HYPERBOLIC,
            _hyperbolic_fixed_points(g, tol),
            translation_length(g, tol),
        )
    if abs_trace >= 2.0 - tol:
        if abs(g.c) <= tol:
            fixed = math.inf
        else:
            fixed = (g.a - g.d) / (2.0 * g.c)
        return IsometryClass(IsometryType.PARABOLIC, (fixed,))
    return IsometryClass(IsometryType.ELLIPTIC)


def _hyperbolic_fixed_points(g: Isometry, tol: float) -> Tuple[float, float]:
    a, b, c, d = g.entries
    if abs(c) <= tol:
        finite = b / (d - a)
        # z ↦ (a/d)z + b/d attracts towards infinity when |a| > |d|
        if abs(a) > abs(d):
            return finite, math.inf
        return math.inf, finite

    # roots of c z² + (d - a) z - b = 0, stable form
    qb = d - a
    disc = math.sqrt(max(qb * qb + 4.0 * b * c, 0.0))
    q = -0.5 * (qb + math.copysign(disc, qb))
    roots = (q / c, -b / q) if q != 0.0 else ((a - d) / (2.0 * c),) * 2

    # the derivative at a fixed point z is 1/(cz + d)², so |cz + d| > 1 marks the attracting one
    first, second = roots
    if abs(c * first + d) > abs(c * second + d):
        return second, first
    return first, second


def _eigenvector(g: Isometry, eigenvalue: float) -> Tuple[float, float]:
    a, b, c, d = g.entries
    # both columns of adj(g - λ) are eigenvectors; take the better conditioned one
    first, second = (b, eigenvalue - a), (eigenvalue - d, c)
    if math.hypot(*first) >= math.hypot(*second):
        return first
    return second


def axis_frame(g: Isometry) -> Isometry:
    """F with F⁻¹·g·F diagonal, F(0) the repelling and F(∞) the attracting fixed point of g.

    F(i) is the point of the axis closest to i, so the frame depends continuously on g.

    The eigenvalues come from (|tr| + sqrt((|tr| - 2)(|tr| + 2)))/2, which stays accurate for
    short translation lengths where the fixed points nearly collide.

    Raises:
        HyperbolicGeometryError: If g is not hyperbolic
    """
    t = g.trace
    if abs(t) <= 2.0:
        raise HyperbolicGeometryError(f"axis frame needs a hyperbolic element, got trace {t!r}")
    big = math.copysign(0.5 * (abs(t) + math.sqrt((abs(t) - 2.0) * (abs(t) + 2.0))), t)
    attracting = _eigenvector(g, big)
    repelling = _eigenvector(g, 1.0 / big)
    det = attracting[0] * repelling[1] - repelling[0] * attracting[1]
    if det == 0.0:
        raise HyperbolicGeometryError(f"axis frame of {g!r}: eigenvectors are parallel")
    if det < 0.0:
        repelling = (-repelling[0], -repelling[1])
    frame = Isometry(attracting[0], repelling[0], attracting[1], repelling[1])
    # slide along the axis so that F(i) is the foot of the perpendicular from i, at |F⁻¹(i)|·i in frame coordinates
    a, b, c, d = frame.entries
    return compose(frame, dilation(math.hypot(b, d) / math.hypot(a, c)))
