from math import factorial, prod

from irs_lab.modules.surfaces.curve_system import CurveSystem
from irs_lab.modules.surfaces.signature import SurfaceSig


def fiber_bound(s: SurfaceSig) -> int:
    """B(Σ) = B₁·B₂ with B₁ = (|χ|+2)!^{|χ|} and B₂ = |χ|!.

    Bounds how many points of the augmented moduli space share one invariant random subgroup.
    The count does not use that each component group must have the component's topology.
    """
    n = s.abs_euler_char
    return factorial(n + 2) ** n * factorial(n)


def component_fiber_bound(cs: CurveSystem) -> int:
    """Per-simplex count ∏ p(Σ')! · (#c(σ))!, always at most fiber_bound(cs.surface)."""
    return prod(factorial(c.signature.punctures) for c in cs.components) * factorial(len(cs.components))
