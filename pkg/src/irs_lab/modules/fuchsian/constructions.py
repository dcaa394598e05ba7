"""Explicit generators for the groups used by the experiments.

Groups are built from trace coordinates, so every length target is met by construction and
then re-checked: peripheral words must come out parabolic and decomposition curves must have
their assigned translation length.
"""

import logging
import math
from dataclasses import replace
from typing import Mapping, Optional, Tuple

from irs_lab.core.exceptions import ConstructionError, HyperbolicGeometryError
from irs_lab.core.schedules import FIXTURE_PARAMETERS
from irs_lab.modules.fuchsian.group import FuchsianGroup, validate_group
from irs_lab.modules.fuchsian.words import commutator_word
from irs_lab.modules.hyperbolic.isometry import (
    IDENTITY,
    Isometry,
    axis_frame,
    commutator,
    commutator_trace,
    compose,
    conjugate,
    frobenius_distance,
    hyperbolic_along_imaginary_axis,
    translation_length,
)
from irs_lab.modules.surfaces.curve_system import CurveSystem
from irs_lab.modules.surfaces.signature import SurfaceSig

logger = logging.getLogger(__name__)

TRACE_CHECK_TOL = 1e-8
RELATION_TOL = 1e-9

TORUS_1_1 = SurfaceSig(genus=1, punctures=1)
PANTS = SurfaceSig(genus=0, punctures=3)
GENUS_2 = SurfaceSig(genus=2, punctures=0)

COMMUTATOR_AB = commutator_word((1,), (2,))


def _require_positive(**lengths: float) -> None:
    for key, value in lengths.items():
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"{key} must be a positive length, got {value}")


def _check_trace(label: str, actual: float, target: float) -> None:
    if abs(abs(actual) - abs(target)) > TRACE_CHECK_TOL * max(1.0, abs(target)):
        raise ConstructionError(f"construction failed: |tr {label}| = {abs(actual):.15g}, expected {abs(target):.15g}")


def _torus_from_traces(x: float, y: float, z: float, len_a: float) -> Tuple[Isometry, Isometry]:
    """A = diag(λ, 1/λ) and a symmetric B with tr B = y, tr AB = z."""
    lam = math.exp(0.5 * len_a)
    p = (z - y / lam) / (lam - 1.0 / lam)
    s = y - p
    off2 = p * s - 1.0
    if off2 < -TRACE_CHECK_TOL:
        raise ConstructionError(f"construction failed: traces ({x:.6g}, {y:.6g}, {z:.6g}) give intersecting-axis defect {off2:.3g}")
    off = math.sqrt(max(off2, 0.0))
    a = Isometry(lam, 0.0, 0.0, 1.0 / lam)
    b = Isometry(p, off, off, s)
    _check_trace("A", a.trace, x)
    _check_trace("B", b.trace, y)
    _check_trace("AB", compose(a, b).trace, z)
    return a, b


def one_holed_torus(len_a: float, twist: float = 0.0, boundary: float = 0.0) -> FuchsianGroup:
    """Torus with one hole in Fenchel–Nielsen coordinates (len_a, twist) around the curve a.

    The commutator trace is -2cosh(boundary/2); boundary = 0 gives the punctured torus.

    Args:
        len_a: Length of the curve a, the axis of A through i
        twist: Twist along a, in length units
        boundary: Length of the boundary geodesic, 0 for a cusp

    Returns:
        FuchsianGroup: generators (A, B) with [A, B] the boundary word
    """
    _require_positive(len_a=len_a)
    if not (math.isfinite(boundary) and boundary >= 0.0):
        raise ValueError(f"boundary must be a non-negative length, got {boundary}")

    half = 0.5 * len_a
    y0 = 2.0 * math.sqrt(1.0 + math.cosh(0.25 * boundary) ** 2 / math.sinh(half) ** 2)
    x = 2.0 * math.cosh(half)
    y = y0 * math.cosh(0.5 * twist)
    z = y0 * math.cosh(half + 0.5 * twist)
    a, b = _torus_from_traces(x, y, z, len_a)

    target = -2.0 * math.cosh(0.5 * boundary)
    actual = commutator_trace(a, b)
    if abs(actual - target) > TRACE_CHECK_TOL * abs(target):
        raise ConstructionError(f"construction failed: tr[A,B] = {actual:.15g}, expected {target:.15g}")

    cusped = boundary == 0.0
    group = FuchsianGroup(
        generators=(a, b),
        signature=TORUS_1_1,
        peripheral_words=(COMMUTATOR_AB,) if cusped else (),
        boundary_words=() if cusped else (COMMUTATOR_AB,),
        construction_params={"len_a": len_a, "twist": twist, "boundary": boundary},
        curve_words={"a": (1,), "b": (2,)},
        name="punctured_torus" if cusped else "one_holed_torus",
    )
    return validate_group(group)


def punctured_torus(len_a: float, len_b: Optional[float] = None, twist: float = 0.0) -> FuchsianGroup:
    """Punctured-torus lattice with tr[A, B] = -2.

    With len_b given, (len_a, len_b) fix the traces of A and B and the sign of twist picks the
    root of z² - xyz + x² + y² = 0 for z = tr AB. Without len_b, (len_a, twist) are read as
    Fenchel–Nielsen coordinates.

    Raises:
        ConstructionError: If the lengths violate sinh(len_a/2)·sinh(len_b/2) ≥ 1
    """
    if len_b is None:
        return one_holed_torus(len_a, twist, 0.0)

    _require_positive(len_a=len_a, len_b=len_b)
    x = 2.0 * math.cosh(0.5 * len_a)
    y = 2.0 * math.cosh(0.5 * len_b)
    collar = math.sinh(0.5 * len_a) * math.sinh(0.5 * len_b)
    if collar < 1.0 - 1e-12:
        raise ConstructionError(
            f"construction failed: sinh(len_a/2)·sinh(len_b/2) = {collar:.6g} < 1 for lengths ({len_a}, {len_b})"
        )
    disc = max(x * x * y * y - 4.0 * (x * x + y * y), 0.0)
    z = 0.5 * (x * y + math.copysign(math.sqrt(disc), twist if twist != 0.0 else 1.0))
    a, b = _torus_from_traces(x, y, z, len_a)

    if abs(commutator_trace(a, b) + 2.0) > TRACE_CHECK_TOL:
        raise ConstructionError(f"construction failed: tr[A,B] = {commutator_trace(a, b):.15g}, expected -2")

    group = FuchsianGroup(
        generators=(a, b),
        signature=TORUS_1_1,
        peripheral_words=(COMMUTATOR_AB,),
        construction_params={"len_a": len_a, "len_b": len_b, "twist": twist},
        curve_words={"a": (1,), "b": (2,)},
        name="punctured_torus",
    )
    return validate_group(group)


def torus_seed() -> FuchsianGroup:
    """The integral punctured torus A = [[1,1],[1,2]], B = [[1,-1],[-1,2]], all traces 3."""
    a = Isometry(1.0, 1.0, 1.0, 2.0)
    b = Isometry(1.0, -1.0, -1.0, 2.0)
    return validate_group(
        FuchsianGroup(
            generators=(a, b),
            signature=TORUS_1_1,
            peripheral_words=(COMMUTATOR_AB,),
            curve_words={"a": (1,), "b": (2,)},
            name="torus_seed",
        )
    )


def pair_of_pants(l1: float, l2: float, l3: float) -> FuchsianGroup:
    """Pants group with boundary lengths l1, l2, l3 for X, Y and (XY)⁻¹; zero lengths are cusps.

    X = [[x, -1], [1, 0]], Y = [[0, ζ], [-1/ζ, y]] with ζ = -e^{l3/2}, so that
    tr X = 2cosh(l1/2), tr Y = 2cosh(l2/2), tr XY = -2cosh(l3/2).
    """
    for key, value in (("l1", l1), ("l2", l2), ("l3", l3)):
        if not (math.isfinite(value) and value >= 0.0):
            raise ValueError(f"{key} must be a non-negative length, got {value}")

    x = 2.0 * math.cosh(0.5 * l1)
    y = 2.0 * math.cosh(0.5 * l2)
    zeta = -math.exp(0.5 * l3)
    gen_x = Isometry(x, -1.0, 1.0, 0.0)
    gen_y = Isometry(0.0, zeta, -1.0 / zeta, y)
    _check_trace("X", gen_x.trace, x)
    _check_trace("Y", gen_y.trace, y)
    _check_trace("XY", compose(gen_x, gen_y).trace, 2.0 * math.cosh(0.5 * l3))

    words = ((1,), (2,), (-2, -1))
    lengths = (l1, l2, l3)
    group = FuchsianGroup(
        generators=(gen_x, gen_y),
        signature=PANTS,
        peripheral_words=tuple(w for w, l in zip(words, lengths) if l == 0.0),
        boundary_words=tuple(w for w, l in zip(words, lengths) if l > 0.0),
        construction_params={"l1": l1, "l2": l2, "l3": l3},
        curve_words={f"c{i}": w for i, (w, l) in enumerate(zip(words, lengths), start=1) if l > 0.0},
        name="pants" if any(lengths) else "thrice_punctured_sphere",
    )
    return validate_group(group)


def thrice_punctured_sphere() -> FuchsianGroup:
    """Level-2 congruence group: X = [[1,2],[0,1]], Y = [[1,0],[-2,1]], tr XY = -2."""
    gen_x = Isometry(1.0, 2.0, 0.0, 1.0)
    gen_y = Isometry(1.0, 0.0, -2.0, 1.0)
    return validate_group(
        FuchsianGroup(
            generators=(gen_x, gen_y),
            signature=PANTS,
            peripheral_words=((1,), (2,), (-2, -1)),
            construction_params={"l1": 0.0, "l2": 0.0, "l3": 0.0},
            name="thrice_punctured_sphere",
        )
    )


def cyclic_group(length: float) -> FuchsianGroup:
    """⟨diag(e^{ℓ/2}, e^{-ℓ/2})⟩, elementary."""
    _require_positive(length=length)
    return FuchsianGroup(
        generators=(hyperbolic_along_imaginary_axis(length),),
        construction_params={"length": length},
        curve_words={"a": (1,)},
        name="cyclic",
    )


def conjugate_group(group: FuchsianGroup, h: Isometry) -> FuchsianGroup:
    return group.conjugated(h)


def genus_two(
    alpha: float,
    beta: float,
    gamma: float,
    twist_alpha: float = 0.0,
    twist_beta: float = 0.0,
    twist_gamma: float = 0.0,
) -> FuchsianGroup:
    """Closed genus-2 group from two one-holed tori glued along the separating curve β.

    The second torus is conjugated so that its commutator becomes the inverse of the first,
    and twisted by translating twist_beta along the common axis.
    """
    _require_positive(alpha=alpha, beta=beta, gamma=gamma)
    left = one_holed_torus(alpha, twist_alpha, beta)
    right = one_holed_torus(gamma, twist_gamma, beta)
    a1, b1 = left.generators
    a2, b2 = right.generators

    c1 = commutator(a1, b1)
    try:
        left_frame = axis_frame(c1.inverse())
        right_frame = axis_frame(commutator(a2, b2))
    except HyperbolicGeometryError as e:
        raise ConstructionError(f"construction failed: {str(e)}") from e

    # both frames diagonalize to diag(e^{β/2}, e^{-β/2}), which the twist commutes with
    h = compose(compose(left_frame, hyperbolic_along_imaginary_axis(twist_beta)), right_frame.inverse())
    a2, b2 = conjugate(a2, h), conjugate(b2, h)

    relation = compose(c1, commutator(a2, b2))
    defect = frobenius_distance(relation, IDENTITY)
    tolerance = RELATION_TOL * max(1.0, sum(x * x for x in c1.entries))
    if defect > tolerance:
        raise ConstructionError(f"construction failed: surface relation defect {defect:.3g}")

    group = FuchsianGroup(
        generators=(a1, b1, a2, b2),
        signature=GENUS_2,
        construction_params={
            "alpha": alpha,
            "beta": beta,
            "gamma": gamma,
            "twist_alpha": twist_alpha,
            "twist_beta": twist_beta,
            "twist_gamma": twist_gamma,
        },
        curve_words={"alpha": (1,), "beta": COMMUTATOR_AB, "gamma": (3,), "b1": (2,), "b2": (4,)},
        name="genus_two",
    )
    logger.debug(f"Glued genus two along beta = {beta} with defect {defect:.3g}")
    return group


def assemble_surface(
    cs: CurveSystem,
    lengths: Mapping[str, float],
    twists: Optional[Mapping[str, float]] = None,
    certify: bool = True,
) -> FuchsianGroup:
    """Realize a decomposition with assigned lengths and twists.

    Supported: Σ_{1,1} cut along one non-separating curve, and Σ_{2,0} cut along a separating
    curve plus one non-separating loop on each side.

    Args:
        cs: The curve system; curve names key `lengths` and `twists`
        lengths: Positive length per curve
        twists: Twist per curve (default 0)
        certify: Run the Dirichlet-area certificate on the result

    Raises:
        ValueError: If a curve has no positive length
        ConstructionError: For unsupported decompositions
        DiscretenessCheckError: If the area certificate fails
    """
    twists = dict(twists or {})
    for curve in cs.curves:
        if curve.name not in lengths:
            raise ValueError(f"No length given for curve {curve.name}")
        _require_positive(**{curve.name: float(lengths[curve.name])})

    curves = {curve.name: curve for curve in cs.curves}
    if cs.surface == TORUS_1_1 and len(cs.curves) == 1 and not cs.curves[0].separating:
        name = cs.curves[0].name
        group = punctured_torus(float(lengths[name]), twist=float(twists.get(name, 0.0)))
        group = replace(group, curve_words={name: (1,), "b": (2,)})
    elif cs.surface == GENUS_2 and len(cs.curves) == 3:
        separating = [c for c in cs.curves if c.separating]
        loops = {c.sides[0]: c for c in cs.curves if not c.separating and c.sides[0] == c.sides[1]}
        if len(separating) != 1 or len(loops) != 2 or set(loops) != set(separating[0].sides):
            raise ConstructionError(f"construction failed: unsupported decomposition {sorted(curves)}")
        beta = separating[0]
        alpha, gamma = loops[beta.sides[0]], loops[beta.sides[1]]
        group = genus_two(
            float(lengths[alpha.name]),
            float(lengths[beta.name]),
            float(lengths[gamma.name]),
            float(twists.get(alpha.name, 0.0)),
            float(twists.get(beta.name, 0.0)),
            float(twists.get(gamma.name, 0.0)),
        )
        words = dict(group.curve_words)
        words[alpha.name], words[beta.name], words[gamma.name] = words.pop("alpha"), words.pop("beta"), words.pop("gamma")
        group = replace(group, curve_words=words)
    else:
        raise ConstructionError(f"construction failed: unsupported decomposition of ({cs.surface}) along {sorted(curves)}")

    for curve in cs.curves:
        measured = translation_length(group.evaluate(group.curve_words[curve.name]))
        if abs(measured - float(lengths[curve.name])) > TRACE_CHECK_TOL * max(1.0, measured):
            raise ConstructionError(
                f"construction failed: curve {curve.name} has length {measured:.12g}, expected {lengths[curve.name]}"
            )

    if certify:
        # imported here: domains builds on this package
        from irs_lab.modules.domains.dirichlet import certify_group

        certify_group(group)
    return group


def named_group(name: str, params: Optional[Mapping[str, float]] = None) -> FuchsianGroup:
    """Build one of the named fixtures, overriding its default parameters."""
    if name == "torus_seed":
        return torus_seed()
    if name == "thrice_punctured_sphere" and not params:
        return thrice_punctured_sphere()
    if name not in FIXTURE_PARAMETERS:
        raise ValueError(f"Unknown group fixture {name!r}; known: {sorted(FIXTURE_PARAMETERS) + ['torus_seed']}")
    merged = dict(FIXTURE_PARAMETERS[name])
    unknown = set(params or {}) - set(merged)
    if unknown:
        raise ValueError(f"Unknown parameters {sorted(unknown)} for fixture {name!r}")
    merged.update(params or {})
    if name == "punctured_torus":
        return punctured_torus(merged["len_a"], merged["len_b"], merged["twist"])
    if name in ("pants", "thrice_punctured_sphere"):
        return pair_of_pants(merged["l1"], merged["l2"], merged["l3"])
    if name == "genus_two":
        return genus_two(merged["alpha"], merged["beta"], merged["gamma"])
    return cyclic_group(merged["length"])
