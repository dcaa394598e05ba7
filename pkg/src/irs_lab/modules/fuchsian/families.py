"""Parametrized families of groups used by the convergence experiments."""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Tuple

from irs_lab.core.schedules import (
    ALGEBRAIC_BASE_LENGTH,
    ALGEBRAIC_CONVERGENCE,
    FIXTURE_PARAMETERS,
    GENUS_TWO_SEPARATING_PINCH,
    PUNCTURED_TORUS_PINCH,
)
from irs_lab.modules.fuchsian.constructions import (
    GENUS_2,
    PANTS,
    TORUS_1_1,
    assemble_surface,
    punctured_torus,
    thrice_punctured_sphere,
)
from irs_lab.modules.fuchsian.group import FuchsianGroup
from irs_lab.modules.surfaces.curve_system import (
    Component,
    Curve,
    CurveSystem,
    MixtureSpec,
    collision_witness,
    cut,
    forget_curves,
    mixture_weights,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegenerationFamily:
    """Groups assembled along a decomposition, with the pinched curves at length t.

    limit_groups realize the components of the cut along the pinched curves, in the order of
    `target.entries`.
    """

    name: str
    decomposition: CurveSystem
    pinched: Tuple[str, ...]
    limit_groups: Tuple[FuchsianGroup, ...]
    schedule: Tuple[float, ...]
    lengths: Dict[str, float] = field(default_factory=dict)
    twists: Dict[str, float] = field(default_factory=dict)

    @property
    def limit(self) -> CurveSystem:
        kept = set(self.pinched)
        return forget_curves(self.decomposition, [c for c in self.decomposition.curve_names if c not in kept])

    @property
    def target(self) -> MixtureSpec:
        return mixture_weights(self.limit)

    def group_at(self, t: float, certify: bool = True) -> FuchsianGroup:
        """The group with every pinched curve at length t.

        Raises:
            DiscretenessCheckError: If certify is set and the area certificate fails
        """
        if not t > 0.0:
            raise ValueError(f"Pinch length must be positive, got {t}")
        lengths = dict(self.lengths)
        lengths.update({name: float(t) for name in self.pinched})
        group = assemble_surface(self.decomposition, lengths, self.twists, certify=certify)
        return replace(group, name=f"{self.name}(t={t:g})")


def punctured_torus_pinch(twist: float = 0.0) -> DegenerationFamily:
    """Σ_{1,1} with the Fenchel–Nielsen length of a going to zero; the limit is Σ_{0,3}."""
    decomposition = cut(
        TORUS_1_1,
        [Curve(name="a", separating=False, sides=("P", "P"))],
        [Component(name="P", signature=PANTS)],
    )
    return DegenerationFamily(
        name="punctured_torus_pinch",
        decomposition=decomposition,
        pinched=("a",),
        limit_groups=(thrice_punctured_sphere(),),
        schedule=tuple(PUNCTURED_TORUS_PINCH),
        twists={"a": twist},
    )


def genus_two_separating_pinch(alpha: float = 1.0, gamma: float = 1.0) -> DegenerationFamily:
    """Σ_{2,0} with the separating curve β going to zero; the limit is two punctured tori."""
    sigma_1, _ = collision_witness(GENUS_2)
    return DegenerationFamily(
        name="genus_two_separating_pinch",
        decomposition=sigma_1,
        pinched=("beta",),
        limit_groups=(punctured_torus(alpha), punctured_torus(gamma)),
        schedule=tuple(GENUS_TWO_SEPARATING_PINCH),
        lengths={"alpha": alpha, "gamma": gamma},
    )


DEGENERATION_FAMILIES = {
    "punctured_torus_pinch": punctured_torus_pinch,
    "genus_two_separating_pinch": genus_two_separating_pinch,
}


def degeneration_family(name: str) -> DegenerationFamily:
    if name not in DEGENERATION_FAMILIES:
        raise ValueError(f"Unknown degeneration family {name!r}; known: {sorted(DEGENERATION_FAMILIES)}")
    return DEGENERATION_FAMILIES[name]()


def algebraic_family(t: float) -> FuchsianGroup:
    """Punctured torus with len_a = base + t; the generators converge at rate t as t → 0."""
    if t < 0.0:
        raise ValueError(f"Family parameter must be non-negative, got {t}")
    params = FIXTURE_PARAMETERS["punctured_torus"]
    group = punctured_torus(ALGEBRAIC_BASE_LENGTH + t, params["len_b"], params["twist"])
    return replace(group, name=f"algebraic(t={t:g})")


def algebraic_schedule() -> List[float]:
    return list(ALGEBRAIC_CONVERGENCE)
