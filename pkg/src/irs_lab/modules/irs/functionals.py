"""Bounded, conjugation-continuous functions on subgroups, evaluated on snapshots.

All of them read only the displacements d(o, h·o) of nontrivial snapshot elements, so they
are invariant under rotations about the base point.
"""

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from irs_lab.modules.chabauty.snapshot import SubgroupSnapshot
from irs_lab.settings import settings


@dataclass(frozen=True)
class SoftCount:
    """Σ w(d(o, h·o)) over nontrivial h, saturated at cap; w is 1 on [0, r] and 0 past r + s."""

    r: float
    s: float
    cap: float = settings.SOFT_COUNT_CAP

    def __post_init__(self) -> None:
        if self.r < 0.0 or self.s <= 0.0 or self.cap <= 0.0:
            raise ValueError(f"SoftCount needs r ≥ 0, s > 0, cap > 0, got ({self.r}, {self.s}, {self.cap})")

    @property
    def name(self) -> str:
        return f"SoftCount({self.r:g},{self.s:g})"

    @property
    def sup(self) -> float:
        return self.cap

    @property
    def support_radius(self) -> float:
        return self.r + self.s

    def weights(self, displacements: np.ndarray) -> np.ndarray:
        return np.clip((self.r + self.s - np.asarray(displacements, dtype=float)) / self.s, 0.0, 1.0)

    def __call__(self, displacements: np.ndarray) -> float:
        return float(min(self.cap, np.sum(self.weights(displacements))))


@dataclass(frozen=True)
class ClippedInjRad:
    """min(s, ½·min d(o, h·o)) over nontrivial h: the injectivity radius at o, clipped."""

    s: float

    def __post_init__(self) -> None:
        if self.s <= 0.0:
            raise ValueError(f"ClippedInjRad needs s > 0, got {self.s}")

    @property
    def name(self) -> str:
        return f"ClippedInjRad({self.s:g})"

    @property
    def sup(self) -> float:
        return self.s

    @property
    def support_radius(self) -> float:
        return 2.0 * self.s

    def __call__(self, displacements: np.ndarray) -> float:
        displacements = np.asarray(displacements, dtype=float)
        if not len(displacements):
            return self.s
        return float(min(self.s, 0.5 * np.min(displacements)))


@dataclass(frozen=True)
class Constant:
    c: float = 1.0

    @property
    def name(self) -> str:
        return f"Constant({self.c:g})"

    @property
    def sup(self) -> float:
        return abs(self.c)

    @property
    def support_radius(self) -> float:
        return 0.0

    def __call__(self, displacements: np.ndarray) -> float:
        return float(self.c)


TestFunctional = Union[SoftCount, ClippedInjRad, Constant]

_PATTERN = re.compile(r"^\s*(SoftCount|ClippedInjRad|Constant)\s*\(([^)]*)\)\s*$")


def evaluate(functional: TestFunctional, snap: SubgroupSnapshot) -> float:
    """F(H) for the subgroup behind a snapshot.

    Raises:
        ValueError: If the snapshot radius does not cover the functional's support
    """
    check_support(functional, snap.radius)
    return functional(snap.displacements[snap.displacements > 0.0])


def parse_functional(text: str) -> TestFunctional:
    """Read "SoftCount(1,0.5)", "ClippedInjRad(1)" or "Constant(1)"."""
    match = _PATTERN.match(text)
    if not match:
        raise ValueError(f"Cannot parse functional {text!r}")
    kind, body = match.groups()
    try:
        args = [float(a) for a in body.split(",") if a.strip()]
    except ValueError as e:
        raise ValueError(f"Cannot parse functional {text!r}: {str(e)}") from e
    if kind == "SoftCount" and len(args) in (2, 3):
        return SoftCount(*args)
    if kind == "ClippedInjRad" and len(args) == 1:
        return ClippedInjRad(args[0])
    if kind == "Constant" and len(args) <= 1:
        return Constant(*args)
    raise ValueError(f"Wrong number of parameters in {text!r}")


def check_support(functional: TestFunctional, radius: float) -> None:
    if not math.isfinite(radius) or functional.support_radius >= radius:
        raise ValueError(f"{functional.name} has support radius {functional.support_radius}, needs R > it, got R = {radius}")
