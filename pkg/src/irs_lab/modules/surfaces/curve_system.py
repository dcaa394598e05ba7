import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from irs_lab.core.exceptions import InconsistentCurveSystemError
from irs_lab.modules.surfaces.signature import SurfaceSig, euler_char, pants_bound

logger = logging.getLogger(__name__)


class Curve(BaseModel):
    """A curve of a curve system, described by the components on its two sides."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Curve label, unique within its system")
    separating: bool = Field(..., description="Whether cutting along the curve alone disconnects the surface")
    sides: Tuple[str, str] = Field(..., description="Components on either side; equal for a non-separating loop")


class Component(BaseModel):
    """A connected piece of the cut surface."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Component label")
    signature: SurfaceSig = Field(..., description="Genus and puncture count, cut curves counted as punctures")


class CurveSystem(BaseModel):
    """A simplex σ of the curve complex together with the components c(σ) of Σ∖σ."""

    model_config = ConfigDict(frozen=True)

    surface: SurfaceSig
    curves: Tuple[Curve, ...] = ()
    components: Tuple[Component, ...] = ()

    def curve(self, name: str) -> Curve:
        for curve in self.curves:
            if curve.name == name:
                return curve
        raise KeyError(f"No curve named {name!r}")

    def component(self, name: str) -> Component:
        for component in self.components:
            if component.name == name:
                return component
        raise KeyError(f"No component named {name!r}")

    @property
    def component_signatures(self) -> List[SurfaceSig]:
        return [component.signature for component in self.components]

    @property
    def curve_names(self) -> List[str]:
        return [curve.name for curve in self.curves]


@dataclass(frozen=True)
class MixtureEntry:
    name: str
    component: SurfaceSig
    weight: Fraction


@dataclass(frozen=True)
class MixtureSpec:
    """χ-weighted convex combination Σ χ(Σ')/χ(Σ)·μ_{Σ'} over the components of a cut."""

    entries: Tuple[MixtureEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("A mixture needs at least one component")
        if any(entry.weight <= 0 for entry in self.entries):
            raise ValueError("Mixture weights must be positive")
        if sum(entry.weight for entry in self.entries) != 1:
            raise ValueError("Mixture weights must sum to one")

    @property
    def weights(self) -> List[float]:
        return [float(entry.weight) for entry in self.entries]

    @property
    def components(self) -> List[SurfaceSig]:
        return [entry.component for entry in self.entries]

    def regrouped(self) -> Dict[SurfaceSig, Fraction]:
        """Total weight per component type."""
        grouped: Dict[SurfaceSig, Fraction] = {}
        for entry in self.entries:
            grouped[entry.component] = grouped.get(entry.component, Fraction(0)) + entry.weight
        return grouped


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {item: item for item in items}

    def find(self, item: str) -> str:
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _connected(vertices: Sequence[str], edges: Sequence[Tuple[str, str]]) -> bool:
    if not vertices:
        return False
    uf = _UnionFind(vertices)
    for a, b in edges:
        uf.union(a, b)
    return len({uf.find(v) for v in vertices}) == 1


def _is_bridge(index: int, vertices: Sequence[str], edges: Sequence[Tuple[str, str]]) -> bool:
    a, b = edges[index]
    if a == b:
        return False
    rest = [edge for i, edge in enumerate(edges) if i != index]
    return not _connected(vertices, rest)


def cut(surface: SurfaceSig, curves: Sequence[Curve], components: Sequence[Component]) -> CurveSystem:
    """Cut `surface` along `curves` into the declared components and check the bookkeeping.

    The curves and components form an incidence graph (components are vertices, curves are
    edges). Gluing it back must give a connected surface of the right genus and puncture count,
    a curve is separating exactly when it is a bridge, and there are at most 3g - 3 + p curves.

    Args:
        surface: Signature of the surface being cut
        curves: Curve descriptors naming the components on their two sides
        components: Declared components with their signatures

    Returns:
        CurveSystem: the validated system

    Raises:
        InconsistentCurveSystemError: If any of the checks fails
    """
    curves = tuple(curves)
    components = tuple(components)
    names = [component.name for component in components]
    if len(set(names)) != len(names):
        raise InconsistentCurveSystemError(f"inconsistent curve system: duplicate component names {names}")
    curve_names = [curve.name for curve in curves]
    if len(set(curve_names)) != len(curve_names):
        raise InconsistentCurveSystemError(f"inconsistent curve system: duplicate curve names {curve_names}")
    for curve in curves:
        missing = [side for side in curve.sides if side not in names]
        if missing:
            raise InconsistentCurveSystemError(
                f"inconsistent curve system: curve {curve.name} bounds unknown components {missing}"
            )

    if len(curves) > pants_bound(surface):
        raise InconsistentCurveSystemError(
            f"inconsistent curve system: {len(curves)} curves exceed the pants bound {pants_bound(surface)}"
        )

    edges = [curve.sides for curve in curves]
    if not _connected(names, edges):
        raise InconsistentCurveSystemError("inconsistent curve system: the components do not glue to a connected surface")

    incidences = {name: 0 for name in names}
    for a, b in edges:
        incidences[a] += 1
        incidences[b] += 1
    for component in components:
        if incidences[component.name] > component.signature.punctures:
            raise InconsistentCurveSystemError(
                f"inconsistent curve system: component {component.name} meets {incidences[component.name]} curves "
                f"but has only {component.signature.punctures} boundary slots"
            )

    n_edges, n_vertices = len(edges), len(names)
    genus = sum(c.signature.genus for c in components) + n_edges - n_vertices + 1
    punctures = sum(c.signature.punctures for c in components) - 2 * n_edges
    if (genus, punctures) != (surface.genus, surface.punctures):
        raise InconsistentCurveSystemError(
            f"inconsistent curve system: components glue to genus {genus} with {punctures} punctures, "
            f"expected ({surface})"
        )

    for index, curve in enumerate(curves):
        if _is_bridge(index, names, edges) != curve.separating:
            kind = "separating" if curve.separating else "non-separating"
            raise InconsistentCurveSystemError(f"inconsistent curve system: curve {curve.name} is declared {kind}")

    chi_total = sum(euler_char(c.signature) for c in components)
    if chi_total != euler_char(surface):
        raise InconsistentCurveSystemError(
            f"inconsistent curve system: χ of the components sums to {chi_total}, expected {euler_char(surface)}"
        )

    logger.debug(f"Cut ({surface}) along {curve_names} into {[str(c.signature) for c in components]}")
    return CurveSystem(surface=surface, curves=curves, components=components)


def mixture_weights(cs: CurveSystem) -> MixtureSpec:
    """Weights χ(Σ')/χ(Σ) as exact fractions."""
    chi = euler_char(cs.surface)
    return MixtureSpec(
        tuple(
            MixtureEntry(component.name, component.signature, Fraction(euler_char(component.signature), chi))
            for component in cs.components
        )
    )


def forget_curves(cs: CurveSystem, names: Iterable[str]) -> CurveSystem:
    """The face σ' ⊆ σ obtained by forgetting curves; components joined by them merge."""
    forget = set(names)
    unknown = forget - set(cs.curve_names)
    if unknown:
        raise ValueError(f"Unknown curves: {sorted(unknown)}")

    uf = _UnionFind(c.name for c in cs.components)
    for curve in cs.curves:
        if curve.name in forget:
            uf.union(*curve.sides)

    groups: Dict[str, List[Component]] = {}
    for component in cs.components:
        groups.setdefault(uf.find(component.name), []).append(component)

    merged_name = {}
    merged: List[Component] = []
    for root, members in groups.items():
        member_names = {m.name for m in members}
        internal = [c for c in cs.curves if c.name in forget and c.sides[0] in member_names]
        genus = sum(m.signature.genus for m in members) + len(internal) - len(members) + 1
        punctures = sum(m.signature.punctures for m in members) - 2 * len(internal)
        name = "+".join(m.name for m in members)
        for member in members:
            merged_name[member.name] = name
        merged.append(Component(name=name, signature=SurfaceSig(genus=genus, punctures=punctures)))

    kept = []
    for curve in cs.curves:
        if curve.name in forget:
            continue
        kept.append(curve.model_copy(update={"sides": (merged_name[curve.sides[0]], merged_name[curve.sides[1]])}))
    return cut(cs.surface, kept, merged)


def collision_witness(s: SurfaceSig) -> Optional[Tuple[CurveSystem, CurveSystem]]:
    """Two genus-2 pants decompositions with the same components but different topology.

    σ₁ contains the separating curve β; all three curves of σ₂ are non-separating.
    Only the closed genus-2 surface is covered; other signatures return None.
    """
    if s != SurfaceSig(genus=2, punctures=0):
        return None
    pants = SurfaceSig(genus=0, punctures=3)
    pieces = [Component(name="P1", signature=pants), Component(name="P2", signature=pants)]
    sigma_1 = cut(
        s,
        [
            Curve(name="alpha", separating=False, sides=("P1", "P1")),
            Curve(name="beta", separating=True, sides=("P1", "P2")),
            Curve(name="gamma", separating=False, sides=("P2", "P2")),
        ],
        pieces,
    )
    sigma_2 = cut(
        s,
        [
            Curve(name="c1", separating=False, sides=("P1", "P2")),
            Curve(name="c2", separating=False, sides=("P1", "P2")),
            Curve(name="c3", separating=False, sides=("P1", "P2")),
        ],
        pieces,
    )
    return sigma_1, sigma_2


def format_curve_system(cs: CurveSystem) -> str:
    lines = [f"surface: {cs.surface}"]
    for curve in cs.curves:
        kind = "separating" if curve.separating else "nonseparating"
        lines.append(f"{curve.name}: {kind} -> {curve.sides[0]},{curve.sides[1]}")
    for component in cs.components:
        lines.append(f"{component.name}: {component.signature}")
    return "\n".join(lines) + "\n"


def parse_curve_system(text: str) -> CurveSystem:
    """Read the record written by format_curve_system and validate it with cut()."""
    surface: Optional[SurfaceSig] = None
    curves: List[Curve] = []
    components: List[Component] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"Line {number}: expected 'name: value', got {raw!r}")
        key, value = (part.strip() for part in line.split(":", 1))
        if key == "surface":
            surface = SurfaceSig.parse(value)
        elif "->" in value:
            kind, sides = (part.strip() for part in value.split("->", 1))
            if kind not in ("separating", "nonseparating"):
                raise ValueError(f"Line {number}: unknown curve kind {kind!r}")
            ends = tuple(side.strip() for side in sides.split(","))
            if len(ends) != 2:
                raise ValueError(f"Line {number}: a curve needs exactly two sides, got {sides!r}")
            curves.append(Curve(name=key, separating=kind == "separating", sides=ends))
        else:
            components.append(Component(name=key, signature=SurfaceSig.parse(value)))
    if surface is None:
        raise ValueError("Curve system record has no 'surface:' line")
    if not components:
        components = [Component(name="S", signature=surface)]
    return cut(surface, curves, components)
