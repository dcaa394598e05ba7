"""Conversions between the upper half-plane, the hyperboloid and the Klein disk.

The Klein disk is centred at i, so geodesics are straight chords and half-planes are
linear inequalities k ↦ n₀ + n₁k₁ + n₂k₂ ≥ 0. Boundary points ξ ∈ ℝ ∪ {∞} sit on the
unit circle with ∞ at (1, 0).
"""

import math
from typing import Tuple

import numpy as np


def minkowski(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """⟨u, v⟩ = u₀v₀ - u₁v₁ - u₂v₂ along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] - u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def to_hyperboloid(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    return np.stack([(r2 + 1.0) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y], axis=-1)


def hyperboloid_to_uhp(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = 1.0 / (X[..., 0] - X[..., 1])
    return X[..., 2] * y, y


def to_klein(x, y) -> Tuple[np.ndarray, np.ndarray]:
    X = to_hyperboloid(x, y)
    return X[..., 1] / X[..., 0], X[..., 2] / X[..., 0]


def klein_to_uhp(k1, k2) -> Tuple[np.ndarray, np.ndarray]:
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    # X₀ scaled to 1; the hyperboloid point is (1, k1, k2)/√(1 - |k|²)
    scale = np.sqrt(np.maximum(1.0 - k1 * k1 - k2 * k2, 0.0))
    y = scale / (1.0 - k1)
    return k2 * y / scale, y


def boundary_to_klein(xi: float) -> Tuple[float, float]:
    if math.isinf(xi):
        return 1.0, 0.0
    s = xi * xi + 1.0
    return (xi * xi - 1.0) / s, 2.0 * xi / s


def klein_to_boundary(k1: float, k2: float) -> float:
    """Inverse of boundary_to_klein for points on (or numerically near) the unit circle."""
    norm = math.hypot(k1, k2)
    k1, k2 = k1 / norm, k2 / norm
    if 1.0 - k1 <= 1e-15:
        return math.inf
    return k2 / (1.0 - k1)


def klein_functional(normal: np.ndarray) -> np.ndarray:
    """Coefficients (n₀, n₁, n₂) with ⟨X, N⟩ ∝ n₀ + n₁k₁ + n₂k₂ for X over k."""
    normal = np.asarray(normal, dtype=float)
    return np.array([normal[0], -normal[1], -normal[2]])


def normal_from_chord(p: Tuple[float, float], q: Tuple[float, float], inside: Tuple[float, float]) -> np.ndarray:
    """Unit space-like normal of the geodesic through Klein points p and q, facing `inside`."""
    d1, d2 = q[0] - p[0], q[1] - p[1]
    n1, n2 = -d2, d1
    n0 = -(n1 * p[0] + n2 * p[1])
    norm2 = n1 * n1 + n2 * n2 - n0 * n0
    if norm2 <= 0.0:
        raise ValueError("Chord does not meet the open disk")
    scale = 1.0 / math.sqrt(norm2)
    if n0 + n1 * inside[0] + n2 * inside[1] < 0.0:
        scale = -scale
    return np.array([n0 * scale, -n1 * scale, -n2 * scale])


def bisector_normal(W: np.ndarray) -> np.ndarray:
    """Normal of the perpendicular bisector between o = (1, 0, 0) and W, facing o."""
    W = np.asarray(W, dtype=float)
    cosh_d = max(float(W[0]), 1.0)
    two_sinh_half = math.sqrt(2.0 * (cosh_d - 1.0))
    if two_sinh_half == 0.0:
        raise ValueError("Bisector of a point with itself is undefined")
    origin = np.array([1.0, 0.0, 0.0])
    # d(X, o) ≤ d(X, W) iff ⟨X, o⟩ ≤ ⟨X, W⟩; ⟨W - o, W - o⟩ = -4sinh²(d/2)
    return (W - origin) / two_sinh_half


def lorentz_matrix(g) -> np.ndarray:
    """The linear map L on Minkowski space with to_hyperboloid(g·z) = L·to_hyperboloid(z).

    Solved from the images of i, 2i and 1 + i, which span the space.
    """
    xs = np.array([0.0, 0.0, 1.0])
    ys = np.array([1.0, 2.0, 1.0])
    den_re = g.c * xs + g.d
    den_im = g.c * ys
    den2 = den_re * den_re + den_im * den_im
    gx = ((g.a * xs + g.b) * den_re + g.a * g.c * ys * ys) / den2
    gy = ys / den2
    source = to_hyperboloid(xs, ys).T
    target = to_hyperboloid(gx, gy).T
    return np.linalg.solve(source.T, target.T).T


def apply_lorentz_klein(L: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Image of Klein points (n, 2) under L, acting on homogeneous coordinates (1, k₁, k₂)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    homogeneous = np.column_stack([np.ones(len(points)), points])
    image = homogeneous @ L.T
    return image[:, 1:] / image[:, :1]
