"""Monte Carlo integration of functionals against the invariant random subgroup of a lattice.

A sample of the normalized measure on Γ∖G is a point z of the δ-cut fundamental domain,
drawn by hyperbolic area, times a uniform rotation k about i. The subgroup it carries is
g⁻¹Γg with g = (move i to z)·k, and only its snapshot near i is ever looked at.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from irs_lab.core.seeding import child_rng, derive_seed
from irs_lab.modules.chabauty.snapshot import snapshot
from irs_lab.modules.domains.dirichlet import certified_domain
from irs_lab.modules.domains.polygon import HyperbolicPolygon
from irs_lab.modules.domains.region import CutRegion, cut_region
from irs_lab.modules.domains.tiling import TileEnumerator
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.hyperbolic.area import cusp_strip_area
from irs_lab.modules.hyperbolic.isometry import Isometry, compose, rotation_about_i, translation_length
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, move_i_to
from irs_lab.modules.irs.functionals import TestFunctional, check_support, evaluate
from irs_lab.modules.irs.sampler import sample_points, sample_rotations
from irs_lab.modules.surfaces.curve_system import MixtureSpec
from irs_lab.settings import settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IRSEstimate:
    """Sample mean of F(g⁻¹Γg) with its standard error and the cusp truncation bias bound."""

    functional: str
    mean: float
    std_error: float
    n_samples: int
    seed: int
    delta: float
    bias_bound: float
    source: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "functional": self.functional,
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "delta": self.delta,
            "bias_bound": self.bias_bound,
            "source": self.source,
        }


@dataclass(frozen=True, eq=False)
class PreparedGroup:
    """A certified lattice with its δ-cut domain and a tiling to read snapshots from."""

    group: FuchsianGroup
    domain: HyperbolicPolygon
    region: CutRegion
    tiles: TileEnumerator

    @property
    def delta(self) -> float:
        return self.region.delta

    def bias_bound(self, sup: float) -> float:
        """Mass of the removed cusp neighbourhoods, normalized by 2π|χ|, times sup|F|."""
        return self.region.cusp_cycles * cusp_strip_area(self.delta) * sup / self.group.target_area

    def conjugator(self, z: HPoint, theta: float) -> Isometry:
        return compose(move_i_to(z), rotation_about_i(theta))


def tile_levels(polygon: HyperbolicPolygon, radius: float, delta: float) -> int:
    """Initial search depth for a radius-R ball in the δ-cut domain.

    Outside the δ-horoballs each cusp stabilizer P moves points by at least δ, and a side
    pairing of translation length ℓ moves every point by at least ℓ, so at most
    sinh(R/2)/sinh(m/2) powers of either reach the ball, m the smaller of the two. Points close
    to an ideal vertex can need more levels than one pass around the polygon per power; the
    tiling search doubles its cap for those.
    """
    lengths = [translation_length(side.element) for side in polygon.real_sides if side.element is not None]
    shortest = min([delta] + [length for length in lengths if length > 0.0])
    powers = math.ceil(math.sinh(0.5 * radius) / math.sinh(0.5 * shortest))
    return settings.MAX_WORD_LENGTH + len(polygon) * powers


def prepare_group(
    group: FuchsianGroup, delta: Optional[float] = None, radius: Optional[float] = None
) -> PreparedGroup:
    """Certify a lattice, cut its cusps at δ and set up the tiling.

    Raises:
        ValueError: If the group is not a lattice
        DiscretenessCheckError: If the domain area misses 2π|χ|
    """
    if not group.is_lattice:
        raise ValueError(f"Invariant random subgroups need a lattice, got {group.name}")
    delta = settings.CUSP_DELTA if delta is None else float(delta)
    radius = settings.SNAPSHOT_RADIUS if radius is None else float(radius)
    domain = certified_domain(group)
    region = cut_region(domain, delta)
    tiles = TileEnumerator(domain, max_levels=tile_levels(domain, radius, delta))
    logger.info(f"Prepared {group.name}: cut area {region.area:.6g}, {region.cusp_cycles} cusps at δ = {delta:g}")
    return PreparedGroup(group, domain, region, tiles)


def block_sizes(n: int, block: Optional[int] = None) -> List[int]:
    block = settings.SAMPLE_BLOCK if block is None else int(block)
    if block <= 0:
        raise ValueError(f"Block size must be positive, got {block}")
    sizes = [block] * (n // block)
    if n % block:
        sizes.append(n % block)
    return sizes


def _run_block(task: Tuple[PreparedGroup, Tuple[TestFunctional, ...], float, int, int, int]) -> np.ndarray:
    prepared, functionals, radius, size, seed, index = task
    rng = child_rng(seed, "block", index)
    xs, ys = sample_points(prepared.region, size, rng)
    thetas = sample_rotations(size, rng)
    values = np.empty((size, len(functionals)))
    for i, (x, y, theta) in enumerate(zip(xs, ys, thetas)):
        g = prepared.conjugator(HPoint(float(x), float(y)), float(theta))
        snap = snapshot(prepared.group, g, ORIGIN, radius, prepared.tiles)
        values[i] = [evaluate(f, snap) for f in functionals]
    return values


def sample_values(
    prepared: PreparedGroup,
    functionals: Sequence[TestFunctional],
    radius: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """(n, len(functionals)) values on one shared set of samples, independent of `workers`."""
    tasks = [
        (prepared, tuple(functionals), radius, size, seed, index)
        for index, size in enumerate(block_sizes(n))
    ]
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            blocks = pool.map(_run_block, tasks)
    else:
        blocks = [_run_block(task) for task in tasks]
    return np.concatenate(blocks, axis=0) if blocks else np.empty((0, len(functionals)))


def estimate_functionals(
    group: Union[FuchsianGroup, PreparedGroup],
    functionals: Sequence[TestFunctional],
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[IRSEstimate]:
    """Estimate ∫ F dμ_Γ for several functionals from the same samples.

    Args:
        group: A lattice, or one already prepared
        functionals: Functionals whose support lies inside the snapshot radius
        radius: Snapshot radius R
        delta: Cusp cut δ (ignored for a prepared group)
        n: Number of samples
        seed: Master seed; blocks derive their own from it
        workers: Processes sampling blocks in parallel

    Returns:
        List[IRSEstimate]: one estimate per functional, in order

    Raises:
        ValueError: If a functional's support does not fit in R or n < 2
    """
    radius = settings.SNAPSHOT_RADIUS if radius is None else float(radius)
    n = settings.N_SAMPLES if n is None else int(n)
    seed = settings.MASTER_SEED if seed is None else int(seed)
    workers = settings.WORKERS if workers is None else int(workers)
    if n < 2:
        raise ValueError(f"Need at least two samples for a standard error, got {n}")
    if not functionals:
        raise ValueError("No functionals to estimate")
    for functional in functionals:
        check_support(functional, radius)

    prepared = group if isinstance(group, PreparedGroup) else prepare_group(group, delta, radius)
    values = sample_values(prepared, functionals, radius, n, seed, workers)

    estimates = []
    for column, functional in zip(values.T, functionals):
        estimate = IRSEstimate(
            functional=functional.name,
            mean=float(np.mean(column)),
            std_error=float(np.std(column, ddof=1) / math.sqrt(n)),
            n_samples=n,
            seed=seed,
            delta=prepared.delta,
            bias_bound=prepared.bias_bound(functional.sup),
            source=prepared.group.name,
        )
        logger.info(
            f"{estimate.functional} on {estimate.source}: {estimate.mean:.6g} ± {estimate.std_error:.3g} "
            f"(bias ≤ {estimate.bias_bound:.3g}, n = {n})"
        )
        estimates.append(estimate)
    return estimates


def estimate_functional(
    group: Union[FuchsianGroup, PreparedGroup],
    functional: TestFunctional,
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> IRSEstimate:
    return estimate_functionals(group, [functional], radius, delta, n, seed, workers)[0]


def component_seed(seed: int, index: int) -> int:
    return derive_seed(seed, "component", index)


def combine(estimates: Sequence[IRSEstimate], weights: Sequence[Fraction], source: str, seed: int) -> IRSEstimate:
    """Σ w·estimate, with independent errors added in quadrature and biases added."""
    w = [float(weight) for weight in weights]
    return IRSEstimate(
        functional=estimates[0].functional,
        mean=sum(wi * e.mean for wi, e in zip(w, estimates)),
        std_error=math.sqrt(sum((wi * e.std_error) ** 2 for wi, e in zip(w, estimates))),
        n_samples=sum(e.n_samples for e in estimates),
        seed=seed,
        delta=estimates[0].delta,
        bias_bound=sum(wi * e.bias_bound for wi, e in zip(w, estimates)),
        source=source,
    )


def estimate_mixture(
    spec: MixtureSpec,
    groups: Sequence[Union[FuchsianGroup, PreparedGroup]],
    functionals: Sequence[TestFunctional],
    radius: Optional[float] = None,
    delta: Optional[float] = None,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[IRSEstimate]:
    """Estimates of Σ χ(Σ')/χ(Σ)·∫ F dμ_{Σ'}, one group per mixture entry.

    Component i is sampled with seed component_seed(seed, i) and n samples.

    Raises:
        ValueError: If the groups do not match the entries in number or signature
    """
    seed = settings.MASTER_SEED if seed is None else int(seed)
    if len(groups) != len(spec.entries):
        raise ValueError(f"Mixture has {len(spec.entries)} components, got {len(groups)} groups")
    per_component = []
    for index, (entry, group) in enumerate(zip(spec.entries, groups)):
        g = group.group if isinstance(group, PreparedGroup) else group
        if g.signature != entry.component:
            raise ValueError(f"Component {entry.name} has signature {entry.component}, group {g.name} has {g.signature}")
        per_component.append(
            estimate_functionals(group, functionals, radius, delta, n, component_seed(seed, index), workers)
        )

    weights = [entry.weight for entry in spec.entries]
    source = " + ".join(f"{entry.weight}·{entry.name}" for entry in spec.entries)
    return [
        combine([component[k] for component in per_component], weights, source, seed)
        for k in range(len(functionals))
    ]
