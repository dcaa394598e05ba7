"""Experiments built on the estimator: degenerations, controls, L¹ convergence of domains,
separation of two lattices and the genus-two collision."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from irs_lab.core.exceptions import DiscretenessCheckError
from irs_lab.core.schedules import FIXTURE_PARAMETERS
from irs_lab.core.seeding import derive_seed
from irs_lab.modules.domains.dirichlet import certified_domain
from irs_lab.modules.domains.region import cut_region
from irs_lab.modules.fuchsian.constructions import GENUS_2, punctured_torus, thrice_punctured_sphere
from irs_lab.modules.fuchsian.families import DegenerationFamily
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.hyperbolic.area import AreaEstimate, area_region
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint
from irs_lab.modules.irs.estimator import IRSEstimate, estimate_functionals, estimate_mixture, prepare_group
from irs_lab.modules.irs.functionals import TestFunctional
from irs_lab.modules.surfaces.curve_system import collision_witness, mixture_weights
from irs_lab.modules.surfaces.signature import SurfaceSig
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

SIGMA_BAND = 3.0
SEPARATION_BAND = 5.0


def gap_band(a: IRSEstimate, b: IRSEstimate, sigmas: float = SIGMA_BAND) -> float:
    """k·sqrt(σ_a² + σ_b²) plus both truncation biases."""
    return sigmas * math.hypot(a.std_error, b.std_error) + a.bias_bound + b.bias_bound


def agree(a: IRSEstimate, b: IRSEstimate, sigmas: float = SIGMA_BAND) -> bool:
    return abs(a.mean - b.mean) <= gap_band(a, b, sigmas)


@dataclass(frozen=True)
class EstimateRow:
    t: float
    functional: str
    mean: float
    std_error: float
    bias_bound: float
    n: int
    seed: int

    @classmethod
    def from_estimate(cls, t: float, estimate: IRSEstimate) -> "EstimateRow":
        return cls(
            t, estimate.functional, estimate.mean, estimate.std_error, estimate.bias_bound, estimate.n_samples, estimate.seed
        )


@dataclass(frozen=True)
class DegenerationResult:
    """Per-t estimates, the target mixture and a verdict per functional."""

    family: str
    rows: Tuple[EstimateRow, ...]
    targets: Tuple[IRSEstimate, ...]
    verdicts: Dict[str, str]
    gaps: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v != FAIL for v in self.verdicts.values())

    def summary(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "schedule": sorted({row.t for row in self.rows}, reverse=True),
            "targets": {t.functional: t.to_dict() for t in self.targets},
            "gaps": self.gaps,
            "approaching": {name: gaps[-1] <= gaps[0] for name, gaps in self.gaps.items()},
            "verdicts": self.verdicts,
            "passed": self.passed,
        }


def check_schedule(schedule: Sequence[float]) -> Tuple[float, ...]:
    schedule = tuple(float(t) for t in schedule)
    if not schedule:
        raise ValueError("Empty schedule")
    if any(t <= 0.0 for t in schedule):
        raise ValueError(f"Schedule values must be positive, got {schedule}")
    if any(a <= b for a, b in zip(schedule, schedule[1:])):
        raise ValueError(f"Schedule must be strictly decreasing, got {schedule}")
    return schedule


def degeneration_experiment(
    family: DegenerationFamily,
    functionals: Sequence[TestFunctional],
    schedule: Optional[Sequence[float]] = None,
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> DegenerationResult:
    """Estimates along the pinch schedule against the χ-weighted mixture of the limit pieces.

    A functional passes when its estimate at the last t lies within
    3·sqrt(σ² + σ_target²) plus both bias bounds of the target.

    Raises:
        ValueError: If the schedule is empty or not strictly decreasing
        DiscretenessCheckError: If some group along the schedule fails certification
    """
    schedule = check_schedule(family.schedule if schedule is None else schedule)
    seed = settings.MASTER_SEED if seed is None else int(seed)
    logger.info(f"Degeneration {family.name}: schedule {list(schedule)}, target {family.target.weights}")

    targets = estimate_mixture(
        family.target, family.limit_groups, functionals, radius, delta, n, derive_seed(seed, "target"), workers
    )

    rows: List[EstimateRow] = []
    final: List[IRSEstimate] = []
    gaps: Dict[str, List[float]] = {f.name: [] for f in functionals}
    for t in schedule:
        try:
            group = family.group_at(t, certify=False)
            prepared = prepare_group(group, delta, radius)
        except DiscretenessCheckError as e:
            raise DiscretenessCheckError(f"discreteness check failed at t = {t:g}: {str(e)}") from e
        estimates = estimate_functionals(prepared, functionals, radius, None, n, derive_seed(seed, "t", t), workers)
        for estimate, target in zip(estimates, targets):
            rows.append(EstimateRow.from_estimate(t, estimate))
            gaps[estimate.functional].append(abs(estimate.mean - target.mean))
        final = estimates
        logger.info(f"{family.name} at t = {t:g}: " + ", ".join(f"{e.functional} = {e.mean:.5g}" for e in estimates))

    verdicts = {}
    for estimate, target in zip(final, targets):
        if len(schedule) < 2:
            logger.warning(f"Schedule of length {len(schedule)} for {family.name}: {estimate.functional} is inconclusive")
            verdicts[estimate.functional] = INCONCLUSIVE
        else:
            verdicts[estimate.functional] = PASS if agree(estimate, target) else FAIL
    logger.info(f"Degeneration {family.name} verdicts: {verdicts}")
    return DegenerationResult(family.name, tuple(rows), tuple(targets), verdicts, gaps)


@dataclass(frozen=True)
class ControlResult:
    """Replicate estimates of one fixed group; spread is the largest leave-one-out z-score."""

    t: float
    replicates: Tuple[Tuple[IRSEstimate, ...], ...]
    spread: Dict[str, float]


def control_run(
    family: DegenerationFamily,
    t: float,
    functionals: Sequence[TestFunctional],
    replicates: int = 3,
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> ControlResult:
    """Hold t fixed and rerun the estimator with independent seeds."""
    if replicates < 2:
        raise ValueError(f"A control run needs at least two replicates, got {replicates}")
    seed = settings.MASTER_SEED if seed is None else int(seed)
    prepared = prepare_group(family.group_at(t, certify=False), delta, radius)
    runs = tuple(
        tuple(estimate_functionals(prepared, functionals, radius, None, n, derive_seed(seed, "replicate", k), workers))
        for k in range(replicates)
    )
    spread = {}
    for j, functional in enumerate(functionals):
        means = np.array([run[j].mean for run in runs])
        errors = np.array([run[j].std_error for run in runs])
        z = []
        for k in range(replicates):
            others = np.delete(np.arange(replicates), k)
            pooled = float(np.mean(means[others]))
            pooled_error = float(np.sqrt(np.sum(errors[others] ** 2))) / len(others)
            scale = math.hypot(errors[k], pooled_error)
            z.append(0.0 if scale == 0.0 else abs(means[k] - pooled) / scale)
        spread[functional.name] = max(z)
    logger.info(f"Control run at t = {t:g}: spread {spread}")
    return ControlResult(t, runs, spread)


def symmetric_difference_area(
    group_t: FuchsianGroup,
    group_0: FuchsianGroup,
    base: HPoint = ORIGIN,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
) -> AreaEstimate:
    """Area of the symmetric difference of the two δ-cut Dirichlet domains based at `base`.

    Points are drawn by area from a box containing both regions; reusing the seed across a
    schedule keeps the estimates on common random numbers.
    """
    delta = settings.CUSP_DELTA if delta is None else float(delta)
    regions = [cut_region(certified_domain(g, base), delta) for g in (group_t, group_0)]
    box = (
        min(r.box[0] for r in regions),
        max(r.box[1] for r in regions),
        min(r.box[2] for r in regions),
        max(r.box[3] for r in regions),
    )

    def indicator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return regions[0].contains(x, y) ^ regions[1].contains(x, y)

    estimate = area_region(indicator, box, method="monte_carlo", n_samples=n, seed=seed)
    logger.info(f"Symmetric difference {group_t.name} / {group_0.name}: {estimate.value:.5g} ± {estimate.std_error:.2g}")
    return estimate


@dataclass(frozen=True)
class SeparationResult:
    first: IRSEstimate
    second: IRSEstimate

    @property
    def separation(self) -> float:
        """|m₁ - m₂| in combined standard errors."""
        scale = math.hypot(self.first.std_error, self.second.std_error)
        gap = abs(self.first.mean - self.second.mean)
        if scale == 0.0:
            return math.inf if gap > 0.0 else 0.0
        return gap / scale

    @property
    def separated(self) -> bool:
        return self.separation > SEPARATION_BAND


def linear_independence_witness(
    first: FuchsianGroup,
    second: FuchsianGroup,
    functional: TestFunctional,
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> SeparationResult:
    """Paired estimates of one functional on two lattices; a separation above 5σ exhibits a
    functional telling their invariant random subgroups apart."""
    seed = settings.MASTER_SEED if seed is None else int(seed)
    a = estimate_functionals(first, [functional], radius, delta, n, derive_seed(seed, "first"), workers)[0]
    b = estimate_functionals(second, [functional], radius, delta, n, derive_seed(seed, "second"), workers)[0]
    result = SeparationResult(a, b)
    logger.info(f"{functional.name} separates {first.name} and {second.name} by {result.separation:.3g}σ")
    return result


def limit_group(signature: SurfaceSig) -> FuchsianGroup:
    """The fixture lattice standing in for a component of the given type."""
    if signature == SurfaceSig(genus=0, punctures=3):
        return thrice_punctured_sphere()
    if signature == SurfaceSig(genus=1, punctures=1):
        params = FIXTURE_PARAMETERS["punctured_torus"]
        return punctured_torus(params["len_a"], params["len_b"], params["twist"])
    raise ValueError(f"No fixture lattice of signature ({signature.genus},{signature.punctures})")


@dataclass(frozen=True)
class CollisionResult:
    """Mixtures over two different genus-two decompositions with the same pieces."""

    sigma_1: Tuple[IRSEstimate, ...]
    sigma_2: Tuple[IRSEstimate, ...]
    plain: Tuple[IRSEstimate, ...]

    @property
    def verdicts(self) -> Dict[str, str]:
        out = {}
        for a, b, c in zip(self.sigma_1, self.sigma_2, self.plain):
            out[a.functional] = PASS if agree(a, b) and agree(a, c) and agree(b, c) else FAIL
        return out

    def summary(self) -> Dict[str, Any]:
        return {
            "sigma_1": [e.to_dict() for e in self.sigma_1],
            "sigma_2": [e.to_dict() for e in self.sigma_2],
            "plain": [e.to_dict() for e in self.plain],
            "verdicts": self.verdicts,
        }


def collision_experiment(
    functionals: Sequence[TestFunctional],
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> CollisionResult:
    """σ₁ has a separating curve and σ₂ does not, yet both cut genus two into two pants, so
    both mixtures reduce to the thrice-punctured sphere's invariant random subgroup."""
    seed = settings.MASTER_SEED if seed is None else int(seed)
    sigma_1, sigma_2 = collision_witness(GENUS_2)
    sphere = prepare_group(thrice_punctured_sphere(), delta, radius)
    results = []
    for label, cs in (("sigma_1", sigma_1), ("sigma_2", sigma_2)):
        spec = mixture_weights(cs)
        groups = [sphere if entry.component == sphere.group.signature else limit_group(entry.component) for entry in spec.entries]
        results.append(
            tuple(estimate_mixture(spec, groups, functionals, radius, delta, n, derive_seed(seed, label), workers))
        )
    plain = tuple(estimate_functionals(sphere, functionals, radius, None, n, derive_seed(seed, "plain"), workers))
    result = CollisionResult(results[0], results[1], plain)
    logger.info(f"Collision verdicts: {result.verdicts}")
    return result
