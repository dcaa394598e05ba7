from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings, strategies as st
from pydantic import ValidationError

from irs_lab.core.exceptions import InconsistentCurveSystemError
from irs_lab.modules.surfaces.bounds import component_fiber_bound, fiber_bound
from irs_lab.modules.surfaces.curve_system import (
    Component,
    Curve,
    collision_witness,
    cut,
    forget_curves,
    format_curve_system,
    mixture_weights,
    parse_curve_system,
)
from irs_lab.modules.surfaces.signature import SurfaceSig, euler_char, pants_bound

PANTS = SurfaceSig(genus=0, punctures=3)
TORUS_1_1 = SurfaceSig(genus=1, punctures=1)
GENUS_2 = SurfaceSig(genus=2, punctures=0)


def separating_genus_two():
    return cut(
        GENUS_2,
        [Curve(name="beta", separating=True, sides=("A", "B"))],
        [Component(name="A", signature=TORUS_1_1), Component(name="B", signature=TORUS_1_1)],
    )


class TestSignature:
    def test_euler_char(self):
        assert euler_char(PANTS) == -1
        assert euler_char(TORUS_1_1) == -1
        assert euler_char(GENUS_2) == -2

    def test_rejects_non_hyperbolic(self):
        for genus, punctures in [(0, 0), (0, 2), (1, 0)]:
            with pytest.raises(ValidationError):
                SurfaceSig(genus=genus, punctures=punctures)

    def test_parse(self):
        assert SurfaceSig.parse("2,0") == GENUS_2
        assert str(TORUS_1_1) == "1,1"

    def test_pants_bound(self):
        assert pants_bound(GENUS_2) == 3
        assert pants_bound(PANTS) == 0


class TestCut:
    def test_separating_genus_two(self):
        cs = separating_genus_two()
        assert cs.component_signatures == [TORUS_1_1, TORUS_1_1]

    def test_punctured_torus(self):
        cs = cut(TORUS_1_1, [Curve(name="a", separating=False, sides=("P", "P"))], [Component(name="P", signature=PANTS)])
        assert cs.component_signatures == [PANTS]

    def test_pants_decompositions(self):
        sigma_1, sigma_2 = collision_witness(GENUS_2)
        assert sigma_1.component_signatures == [PANTS, PANTS]
        assert sigma_2.component_signatures == [PANTS, PANTS]
        assert sigma_1.curve("beta").separating
        assert not any(curve.separating for curve in sigma_2.curves)

    def test_wrong_genus(self):
        with pytest.raises(InconsistentCurveSystemError):
            cut(GENUS_2, [Curve(name="a", separating=False, sides=("P", "P"))], [Component(name="P", signature=PANTS)])

    def test_separating_tag_must_match(self):
        with pytest.raises(InconsistentCurveSystemError):
            cut(
                GENUS_2,
                [Curve(name="beta", separating=False, sides=("A", "B"))],
                [Component(name="A", signature=TORUS_1_1), Component(name="B", signature=TORUS_1_1)],
            )

    def test_disconnected(self):
        with pytest.raises(InconsistentCurveSystemError):
            cut(GENUS_2, [], [Component(name="A", signature=TORUS_1_1), Component(name="B", signature=TORUS_1_1)])

    def test_pants_bound_violation(self):
        curves = [Curve(name=f"c{i}", separating=False, sides=("P", "P")) for i in range(2)]
        with pytest.raises(InconsistentCurveSystemError):
            cut(TORUS_1_1, curves, [Component(name="P", signature=SurfaceSig(genus=0, punctures=5))])

    def test_too_many_incidences(self):
        with pytest.raises(InconsistentCurveSystemError):
            cut(
                SurfaceSig(genus=2, punctures=1),
                [Curve(name="a", separating=False, sides=("P", "P")), Curve(name="b", separating=False, sides=("P", "P"))],
                [Component(name="P", signature=SurfaceSig(genus=0, punctures=3))],
            )

    def test_uncut_surface(self):
        cs = cut(GENUS_2, [], [Component(name="S", signature=GENUS_2)])
        assert mixture_weights(cs).weights == [1.0]


class TestMixtureWeights:
    def test_separating_genus_two(self):
        assert mixture_weights(separating_genus_two()).weights == [0.5, 0.5]

    def test_pinched_torus(self):
        cs = cut(TORUS_1_1, [Curve(name="a", separating=False, sides=("P", "P"))], [Component(name="P", signature=PANTS)])
        assert mixture_weights(cs).weights == [1.0]

    def test_genus_three(self):
        cs = cut(
            SurfaceSig(genus=3, punctures=1),
            [Curve(name="c", separating=True, sides=("A", "B"))],
            [
                Component(name="A", signature=SurfaceSig(genus=1, punctures=2)),
                Component(name="B", signature=SurfaceSig(genus=2, punctures=1)),
            ],
        )
        spec = mixture_weights(cs)
        assert [entry.weight for entry in spec.entries] == [Fraction(2, 5), Fraction(3, 5)]
        assert sum(entry.weight for entry in spec.entries) == 1

    def test_collision_regroups_to_pants(self):
        sigma_1, sigma_2 = collision_witness(GENUS_2)
        assert mixture_weights(sigma_1).regrouped() == mixture_weights(sigma_2).regrouped() == {PANTS: Fraction(1)}


class TestForgetCurves:
    def test_forget_everything(self):
        sigma_1, _ = collision_witness(GENUS_2)
        face = forget_curves(sigma_1, ["alpha", "beta", "gamma"])
        assert face.component_signatures == [GENUS_2]

    def test_forget_loops_gives_separating_cut(self):
        sigma_1, _ = collision_witness(GENUS_2)
        face = forget_curves(sigma_1, ["alpha", "gamma"])
        assert face.component_signatures == [TORUS_1_1, TORUS_1_1]
        assert face.curve("beta").separating

    def test_merged_weights_add_up(self):
        sigma_1, _ = collision_witness(GENUS_2)
        face = forget_curves(sigma_1, ["alpha"])
        weights = {entry.component: entry.weight for entry in mixture_weights(face).entries}
        assert weights == {TORUS_1_1: Fraction(1, 2), PANTS: Fraction(1, 2)}

    def test_unknown_curve(self):
        with pytest.raises(ValueError):
            forget_curves(separating_genus_two(), ["nope"])


class TestFiberBound:
    def test_values(self):
        assert fiber_bound(TORUS_1_1) == 6
        assert fiber_bound(PANTS) == 6
        assert fiber_bound(GENUS_2) == 1152

    def test_monotone(self):
        assert fiber_bound(SurfaceSig(genus=2, punctures=1)) > fiber_bound(GENUS_2)

    def test_component_bound_is_dominated(self):
        for cs in [separating_genus_two(), *collision_witness(GENUS_2)]:
            assert component_fiber_bound(cs) <= fiber_bound(cs.surface)


class TestCollisionWitness:
    def test_other_signatures(self):
        assert collision_witness(TORUS_1_1) is None
        assert collision_witness(SurfaceSig(genus=0, punctures=4)) is None


class TestRecordFormat:
    def test_round_trip(self):
        sigma_1, _ = collision_witness(GENUS_2)
        assert parse_curve_system(format_curve_system(sigma_1)) == sigma_1

    def test_parse_record(self):
        text = """
        # punctured torus pinch
        surface: 1,1
        a: nonseparating -> P,P
        P: 0,3
        """
        cs = parse_curve_system(text)
        assert cs.component_signatures == [PANTS]

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            parse_curve_system("surface: 1,1\na: sometimes -> P,P\nP: 0,3\n")


@hsettings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.data())
def test_separating_cuts_are_consistent(genus, data):
    """Every separating curve of a closed surface splits it into two one-holed pieces."""
    left = data.draw(st.integers(min_value=1, max_value=genus - 1))
    cs = cut(
        SurfaceSig(genus=genus, punctures=0),
        [Curve(name="c", separating=True, sides=("L", "R"))],
        [
            Component(name="L", signature=SurfaceSig(genus=left, punctures=1)),
            Component(name="R", signature=SurfaceSig(genus=genus - left, punctures=1)),
        ],
    )
    spec = mixture_weights(cs)
    assert sum(entry.weight for entry in spec.entries) == 1
    assert spec.entries[0].weight == Fraction(2 * left - 1, 2 * genus - 2)
    assert component_fiber_bound(cs) <= fiber_bound(cs.surface)
