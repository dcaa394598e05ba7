"""Conjugates of a lattice along a ray escaping into a cusp, and a bounded control run.

Along g_n = K·diag(e^{n/2}, e^{-n/2}), with K carrying ∞ to the cusp point, the base point
climbs the cusp and the snapshots of g_n⁻¹Γg_n shrink onto powers of one parabolic. Along
conjugators that return to a compact set mod Γ the snapshots stay conjugates of Γ's own.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from irs_lab.core.schedules import ESCAPE_RADIUS, ESCAPE_STEPS
from irs_lab.modules.chabauty.snapshot import SubgroupSnapshot, snapshot, snapshot_distance
from irs_lab.modules.domains.dirichlet import dirichlet_domain
from irs_lab.modules.domains.tiling import TileEnumerator
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.fuchsian.words import Word, invert_word, render_word
from irs_lab.modules.hyperbolic.isometry import (
    IDENTITY,
    Isometry,
    IsometryType,
    classify,
    compose,
    dilation,
    rotation_about_i,
)
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

COMMUTATOR_TOL = 1e-8
CONTROL_ROTATION = 0.7


@dataclass(frozen=True)
class EscapeStep:
    step: int
    size: int
    classes: int
    noncommuting_pairs: int


@dataclass(frozen=True)
class EscapeReport:
    """Per-step commuting structure of the escaping snapshots.

    terminal_defect is the largest commutator defect between the shortest nontrivial terminal
    element and the others; in a torsion-free discrete group commuting with one nontrivial
    element means lying in its cyclic group, so this decides pairwise commutation.
    """

    direction: str
    cusp_point: float
    cusp_width: float
    radius: float
    steps: Tuple[EscapeStep, ...]
    terminal_defect: float
    terminal_parabolic: bool
    abelian: bool
    control_distance: Optional[float] = None
    tolerance: float = COMMUTATOR_TOL

    @property
    def counts(self) -> List[int]:
        return [s.noncommuting_pairs for s in self.steps]

    @property
    def verdict(self) -> str:
        return "abelian horn" if self.abelian else "non-abelian"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "direction": self.direction,
            "cusp_point": self.cusp_point,
            "cusp_width": self.cusp_width,
            "radius": self.radius,
            "steps": [
                {"step": s.step, "size": s.size, "classes": s.classes, "noncommuting_pairs": s.noncommuting_pairs}
                for s in self.steps
            ],
            "terminal_defect": self.terminal_defect,
            "terminal_parabolic": self.terminal_parabolic,
            "abelian": self.abelian,
            "verdict": self.verdict,
            "control_distance": self.control_distance,
            "tolerance": self.tolerance,
        }


def _adjugate(stack: np.ndarray) -> np.ndarray:
    out = np.empty_like(stack)
    out[..., 0, 0] = stack[..., 1, 1]
    out[..., 1, 1] = stack[..., 0, 0]
    out[..., 0, 1] = -stack[..., 0, 1]
    out[..., 1, 0] = -stack[..., 1, 0]
    return out


def commutator_defects(x: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """Distance from [x, u] = x·u·x⁻¹·u⁻¹ to ±I for every u in the stack."""
    stack = np.asarray(stack, dtype=float).reshape(-1, 2, 2)
    x = np.asarray(x, dtype=float)
    products = x @ stack @ _adjugate(x) @ _adjugate(stack)
    eye = np.eye(2)
    plus = np.sqrt(np.sum((products - eye) ** 2, axis=(-2, -1)))
    minus = np.sqrt(np.sum((products + eye) ** 2, axis=(-2, -1)))
    return np.minimum(plus, minus)


def commuting_classes(matrices: np.ndarray, tol: float = COMMUTATOR_TOL) -> List[np.ndarray]:
    """Partition nontrivial elements into classes commuting with a representative."""
    remaining = np.arange(len(matrices))
    classes = []
    while len(remaining):
        rep = matrices[remaining[0]]
        members = commutator_defects(rep, matrices[remaining]) <= tol
        classes.append(remaining[members])
        remaining = remaining[~members]
    return classes


def noncommuting_pairs(sizes: List[int]) -> int:
    total = sum(sizes)
    return total * (total - 1) // 2 - sum(s * (s - 1) // 2 for s in sizes)


def _step_summary(step: int, snap: SubgroupSnapshot) -> EscapeStep:
    classes = commuting_classes(snap.nontrivial)
    sizes = [len(c) for c in classes]
    return EscapeStep(step, len(snap), len(classes), noncommuting_pairs(sizes))


def cusp_frame(group: FuchsianGroup, direction: Word) -> Tuple[Isometry, float]:
    """K with K·∞ the fixed point of the peripheral element, and that point.

    Raises:
        ValueError: If direction is not a declared peripheral word or is not parabolic
    """
    declared = set(group.peripheral_words) | {invert_word(w) for w in group.peripheral_words}
    if tuple(direction) not in declared:
        raise ValueError(f"{render_word(direction)} is not a peripheral word of {group.name}")
    kind = classify(group.evaluate(direction), settings.PARABOLIC_TOL)
    if kind.tag is not IsometryType.PARABOLIC:
        raise ValueError(f"{render_word(direction)} is {kind.tag.value}, expected parabolic")
    xi = kind.fixed_point
    if math.isinf(xi):
        return IDENTITY, xi
    # rotation_about_i(θ) sends ∞ to -cot(θ/2)
    return rotation_about_i(2.0 * math.atan2(1.0, -xi)), xi


def escape_snapshots(group: FuchsianGroup, direction: Word, steps: int, radius: float) -> List[SubgroupSnapshot]:
    """Snapshots of g_n⁻¹Γg_n for n = 0..steps, with g_n = K·diag(e^{n/2}, e^{-n/2}).

    They are taken in the cusp frame K⁻¹ΓK, where the cusp sits at ∞ with width b, from a
    Dirichlet domain whose base lies above height b; its tiles reach the climbing base point
    by translations only.
    """
    frame, _ = cusp_frame(group, direction)
    local = group.conjugated(frame.inverse(), name=f"{group.name} at cusp")
    width = abs(local.evaluate(direction).b)
    # above height b the cusp is precisely invariant, so ∞ is a vertex of the strip
    base = HPoint(0.0, max(1.0, 1.5 * width))
    domain = dirichlet_domain(local, base)
    levels = len(domain) * math.ceil(2.0 * math.exp(steps) * math.sinh(0.5 * radius) / width)
    tiles = TileEnumerator(domain, max_levels=levels + settings.MAX_WORD_LENGTH)
    return [snapshot(local, dilation(math.exp(n)), ORIGIN, radius, tiles) for n in range(steps + 1)]


def escape_dichotomy(
    group: FuchsianGroup,
    direction: Optional[Word] = None,
    steps: int = ESCAPE_STEPS,
    radius: float = ESCAPE_RADIUS,
    control: bool = True,
) -> EscapeReport:
    """Snapshots of g_n⁻¹Γg_n for g_n marching distance n into the cusp of `direction`.

    Args:
        group: A lattice
        direction: A peripheral word (defaults to the first declared one)
        steps: Number of unit steps along the ray
        radius: Snapshot radius R
        control: Also run the bounded conjugators A^n·r with A the first generator

    Returns:
        EscapeReport: per-step sizes and non-commuting pair counts, the terminal verdict

    Raises:
        ValueError: If the group is not a lattice, has no cusp, or the arguments are out of range
    """
    if not group.is_lattice or not group.peripheral_words:
        raise ValueError(f"Escape needs a cusped lattice, got {group.name}")
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    direction = group.peripheral_words[0] if direction is None else tuple(direction)

    frame, xi = cusp_frame(group, direction)
    local = group.conjugated(frame.inverse(), name=f"{group.name} at cusp")
    width = abs(local.evaluate(direction).b)
    logger.info(f"Escaping into the cusp of {render_word(direction)} at {xi:.6g}, width {width:.6g}")

    snaps = escape_snapshots(group, direction, steps, radius)
    summaries = []
    for n, snap in enumerate(snaps):
        summaries.append(_step_summary(n, snap))
        logger.debug(f"Escape step {n}: {len(snap)} elements, {summaries[-1].noncommuting_pairs} non-commuting pairs")

    nontrivial = snaps[-1].nontrivial
    if len(nontrivial):
        shortest = nontrivial[0]
        defect = float(np.max(commutator_defects(shortest, nontrivial)))
        traces = np.abs(nontrivial[:, 0, 0] + nontrivial[:, 1, 1])
        terminal_parabolic = bool(np.all(np.abs(traces - 2.0) <= settings.PARABOLIC_TOL))
    else:
        defect, terminal_parabolic = 0.0, False
    abelian = summaries[-1].classes <= 1 and defect <= COMMUTATOR_TOL

    control_distance = _control_distance(group, steps, radius) if control else None
    report = EscapeReport(
        direction=render_word(direction),
        cusp_point=xi,
        cusp_width=width,
        radius=radius,
        steps=tuple(summaries),
        terminal_defect=defect,
        terminal_parabolic=terminal_parabolic,
        abelian=abelian,
        control_distance=control_distance,
    )
    logger.info(f"Escape verdict: {report.verdict} (defect {defect:.3g}, control {control_distance})")
    return report


def _control_distance(group: FuchsianGroup, steps: int, radius: float) -> float:
    """Snapshot distance between A^n·r and r conjugates; zero up to rounding since A ∈ Γ."""
    domain = dirichlet_domain(group)
    tiles = TileEnumerator(domain)
    offset = rotation_about_i(CONTROL_ROTATION)
    conjugator = offset
    for _ in range(steps):
        conjugator = compose(group.generators[0], conjugator)
    moved = snapshot(group, conjugator, ORIGIN, radius, tiles)
    reference = snapshot(group, offset, ORIGIN, radius, tiles)
    return snapshot_distance(moved, reference)
