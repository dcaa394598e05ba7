import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from irs_lab.modules.chabauty.snapshot import (
    SubgroupSnapshot,
    check_compatible,
    inner_radius,
    nearest_gaps,
    snapshot_distance,
)
from irs_lab.settings import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    """A limit element and its worst match over the tail."""

    index: int
    displacement: float
    worst_gap: float
    matched: bool


@dataclass(frozen=True)
class Violation:
    """A tail element farther than ε from every limit element."""

    step: int
    displacement: float
    gap: float


@dataclass(frozen=True)
class ConvergenceReport:
    epsilon: float
    distances: Tuple[float, ...]
    tail_start: int
    witnesses: Tuple[Witness, ...]
    violations: Tuple[Violation, ...]
    c1_ok: bool
    c2_ok: bool

    @property
    def passed(self) -> bool:
        return self.c1_ok and self.c2_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "distances": list(self.distances),
            "tail_start": self.tail_start,
            "c1_ok": self.c1_ok,
            "c2_ok": self.c2_ok,
            "passed": self.passed,
            "witnesses": [asdict(w) for w in self.witnesses],
            "violations": [asdict(v) for v in self.violations],
        }


def check_convergence(
    sequence: Sequence[SubgroupSnapshot],
    limit: SubgroupSnapshot,
    epsilon: float,
    margin: Optional[float] = None,
    frequency: Optional[float] = None,
) -> ConvergenceReport:
    """Finite check of the two sequence criteria for Chabauty convergence.

    The tail is the last ⌈n/2⌉ snapshots. C1: every limit element within R - margin has a
    partner within ε in each tail snapshot. C2: elements farther than ε from the limit show
    up in fewer than `frequency` of the tail snapshots, so nothing accumulates outside it.

    Raises:
        RadiusMismatchError: If a snapshot was taken with other parameters than the limit
    """
    if not sequence:
        raise ValueError("Convergence check needs at least one snapshot")
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    frequency = settings.CLUSTER_FREQUENCY if frequency is None else frequency
    for s in sequence:
        check_compatible(s, limit)

    distances = tuple(snapshot_distance(s, limit, margin) for s in sequence)
    start = len(sequence) // 2
    tail = list(sequence[start:])
    inner = inner_radius(limit, margin)

    inner_mask = limit.displacements <= inner
    targets = limit.matrices[inner_mask]
    target_displacements = limit.displacements[inner_mask]
    worst = [0.0] * len(targets)
    for s in tail:
        gaps = nearest_gaps(targets, s.matrices)
        worst = [max(w, float(g)) for w, g in zip(worst, gaps)]
    witnesses = tuple(
        Witness(i, float(d), w, w <= epsilon) for i, (d, w) in enumerate(zip(target_displacements, worst))
    )
    c1_ok = all(w.matched for w in witnesses)

    far: List[Violation] = []
    far_steps = 0
    for offset, s in enumerate(tail):
        mask = s.displacements <= inner
        gaps = nearest_gaps(s.matrices[mask], limit.matrices)
        found = [
            Violation(start + offset, float(d), float(g))
            for d, g in zip(s.displacements[mask], gaps)
            if g > epsilon
        ]
        far_steps += bool(found)
        far.extend(found)
    c2_ok = far_steps < frequency * len(tail)
    violations = () if c2_ok else tuple(far)

    report = ConvergenceReport(epsilon, distances, start, witnesses, violations, c1_ok, c2_ok)
    last = distances[-1] if distances else math.nan
    logger.info(f"Convergence check at ε = {epsilon}: C1 {c1_ok}, C2 {c2_ok}, last distance {last:.3g}")
    return report
