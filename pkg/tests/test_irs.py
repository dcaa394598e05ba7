import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from conftest import random_isometry
from irs_lab.core.exceptions import RejectionStallError
from irs_lab.core.seeding import child_rng
from irs_lab.modules.chabauty.snapshot import snapshot
from irs_lab.modules.domains.region import BoxRegion
from irs_lab.modules.fuchsian.constructions import cyclic_group, pair_of_pants, punctured_torus, thrice_punctured_sphere
from irs_lab.modules.fuchsian.families import (
    algebraic_family,
    algebraic_schedule,
    genus_two_separating_pinch,
    punctured_torus_pinch,
)
from irs_lab.modules.hyperbolic.area import cusp_strip_area
from irs_lab.modules.hyperbolic.isometry import compose, dilation, rotation_about_i
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint
from irs_lab.modules.irs.estimator import (
    block_sizes,
    component_seed,
    estimate_functional,
    estimate_functionals,
    estimate_mixture,
    prepare_group,
)
from irs_lab.modules.irs.experiments import (
    INCONCLUSIVE,
    PASS,
    agree,
    check_schedule,
    collision_experiment,
    control_run,
    degeneration_experiment,
    limit_group,
    linear_independence_witness,
    symmetric_difference_area,
)
from irs_lab.modules.irs.export import CSV_COLUMNS, format_json, format_rows, write_json, write_rows
from irs_lab.modules.irs.functionals import (
    ClippedInjRad,
    Constant,
    SoftCount,
    check_support,
    evaluate,
    parse_functional,
)
from irs_lab.modules.irs.sampler import sample_point, sample_points, sample_rotations
from irs_lab.modules.surfaces.curve_system import mixture_weights
from irs_lab.modules.surfaces.signature import SurfaceSig

INJ = ClippedInjRad(1.0)
SOFT = SoftCount(1.0, 0.5)


@pytest.fixture(scope="module")
def sphere():
    return prepare_group(thrice_punctured_sphere())


@pytest.fixture(scope="module")
def torus():
    return prepare_group(punctured_torus(2.0, 2.0))


class EmptyRegion:
    box = (0.0, 1.0, 1.0, 2.0)

    def contains(self, x, y):
        return np.zeros(np.shape(x), dtype=bool)


class TestSampler:
    def test_mean_height_in_a_box(self):
        # normalized area on [0,1]×[1,2] has density 2/y², so E[y] = 2 ln 2 and E[y²] = 2
        n = 20_000
        _, y = sample_points(BoxRegion(((0.0, 1.0, 1.0, 2.0),)), n, child_rng(1, "box"))
        expected = 2.0 * math.log(2.0)
        sigma = math.sqrt((2.0 - expected**2) / n)
        assert abs(float(np.mean(y)) - expected) <= 4.0 * sigma

    def test_congruent_boxes_split_evenly(self):
        n = 20_000
        region = BoxRegion(((0.0, 1.0, 1.0, 2.0), (2.0, 3.0, 1.0, 2.0)))
        x, _ = sample_points(region, n, child_rng(2, "boxes"))
        share = float(np.mean(x < 1.5))
        assert abs(share - 0.5) <= 4.0 * math.sqrt(0.25 / n)

    def test_points_lie_in_the_region(self, sphere):
        x, y = sample_points(sphere.region, 2000, child_rng(3, "region"))
        assert len(x) == 2000
        assert np.all(sphere.region.contains(x, y))

    def test_single_point(self, sphere):
        z = sample_point(sphere.region, seed=7)
        assert isinstance(z, HPoint)
        assert bool(sphere.region.contains(z.x, z.y))
        assert sample_point(sphere.region, seed=7) == z

    def test_stall(self):
        with pytest.raises(RejectionStallError):
            sample_points(EmptyRegion(), 10, child_rng(4), max_proposals=1000)

    def test_rotations_cover_the_circle(self):
        thetas = sample_rotations(10_000, child_rng(5))
        assert np.all((thetas >= 0.0) & (thetas < 2.0 * math.pi))
        assert abs(float(np.mean(thetas)) - math.pi) < 0.1

    def test_zero_points(self, sphere):
        x, y = sample_points(sphere.region, 0, child_rng(6))
        assert len(x) == len(y) == 0


class TestFunctionals:
    def test_soft_count_cutoff(self):
        f = SoftCount(1.0, 0.5)
        np.testing.assert_allclose(f.weights(np.array([0.5, 1.0, 1.25, 1.5, 2.0])), [1.0, 1.0, 0.5, 0.0, 0.0])
        assert f(np.array([0.5, 1.25])) == pytest.approx(1.5)

    def test_soft_count_saturates(self):
        f = SoftCount(1.0, 0.5, cap=2.0)
        assert f(np.full(10, 0.1)) == 2.0
        assert f.sup == 2.0

    def test_clipped_injectivity_radius(self):
        f = ClippedInjRad(1.0)
        assert f(np.array([])) == 1.0
        assert f(np.array([0.8, 3.0])) == pytest.approx(0.4)
        assert f(np.array([2.5])) == 1.0

    @hsettings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=20), st.floats(0.0, 0.05))
    def test_lipschitz_in_displacements(self, values, shift):
        d = np.array(values)
        f = ClippedInjRad(1.0)
        g = SoftCount(1.0, 0.5, cap=100.0)
        assert abs(f(d + shift) - f(d)) <= 0.5 * shift + 1e-12
        assert abs(g(d + shift) - g(d)) <= len(d) * shift / 0.5 + 1e-9

    def test_support_check(self):
        check_support(SoftCount(1.0, 0.5), 2.5)
        with pytest.raises(ValueError):
            check_support(SoftCount(2.0, 0.5), 2.5)
        with pytest.raises(ValueError):
            check_support(ClippedInjRad(1.25), 2.5)

    def test_evaluate_skips_identity(self):
        snap = snapshot(thrice_punctured_sphere(), radius=2.5)
        assert evaluate(Constant(3.0), snap) == 3.0
        assert evaluate(INJ, snap) == pytest.approx(min(1.0, 0.5 * float(np.min(snap.displacements[1:]))))

    def test_parse(self):
        assert parse_functional("SoftCount(1, 0.5)") == SoftCount(1.0, 0.5)
        assert parse_functional("ClippedInjRad(1)") == ClippedInjRad(1.0)
        assert parse_functional("Constant()") == Constant(1.0)
        assert parse_functional(SOFT.name) == SOFT
        for bad in ("SoftCount(1)", "Foo(1)", "ClippedInjRad(x)", "ClippedInjRad(-1)"):
            with pytest.raises(ValueError):
                parse_functional(bad)


class TestEstimator:
    def test_constant_is_normalized(self, sphere):
        estimate = estimate_functional(sphere, Constant(), n=100, seed=1)
        assert estimate.mean == 1.0
        assert estimate.std_error == 0.0

    def test_samples_near_cusp_vertices(self):
        prepared = prepare_group(punctured_torus(1.0), 0.2, 2.5)
        estimate = estimate_functional(prepared, INJ, 2.5, n=200, seed=41)
        assert estimate.n_samples == 200
        assert 0.0 < estimate.mean <= 1.0

    def test_nothing_below_the_systole(self, sphere):
        estimate = estimate_functional(sphere, SoftCount(0.02, 0.03), n=200, seed=2)
        assert estimate.mean == 0.0
        assert estimate.std_error == 0.0

    def test_bias_bound(self, sphere):
        assert sphere.region.cusp_cycles == 3
        estimate = estimate_functional(sphere, INJ, n=50, seed=3)
        assert estimate.bias_bound == pytest.approx(3.0 * cusp_strip_area(0.2) * 1.0 / (2.0 * math.pi))
        assert 0.0 < estimate.mean <= 1.0

    def test_rotation_fiber_is_irrelevant(self, sphere):
        z = sample_point(sphere.region, seed=11)
        values = []
        for theta in np.linspace(0.0, 2.0 * math.pi, 9):
            snap = snapshot(sphere.group, sphere.conjugator(z, float(theta)), ORIGIN, 2.5, sphere.tiles)
            values.append(evaluate(INJ, snap))
        assert np.ptp(values) <= 1e-9

    def test_samples_are_conjugates(self, sphere):
        """Every sampled snapshot is a conjugate of the group, so traces stay integral."""
        z = sample_point(sphere.region, seed=12)
        snap = snapshot(sphere.group, sphere.conjugator(z, 0.3), ORIGIN, 2.5, sphere.tiles)
        traces = np.abs(snap.matrices[:, 0, 0] + snap.matrices[:, 1, 1])
        np.testing.assert_allclose(traces, np.round(traces), atol=1e-7)

    def test_conjugation_invariance(self, sphere):
        h = compose(dilation(1.3), rotation_about_i(0.4))
        conjugate = thrice_punctured_sphere().conjugated(h)
        a = estimate_functionals(sphere, [INJ, SOFT], n=400, seed=5)
        b = estimate_functionals(conjugate, [INJ, SOFT], n=400, seed=6)
        for x, y in zip(a, b):
            assert agree(x, y)

    @pytest.mark.slow
    def test_conjugation_invariance_random(self, rng):
        base = punctured_torus(2.0, 2.0)
        reference = estimate_functionals(base, [INJ, SOFT], n=10_000, seed=7)
        for k in range(10):
            h = random_isometry(rng, scale=0.6)
            moved = estimate_functionals(base.conjugated(h), [INJ, SOFT], n=10_000, seed=100 + k)
            for x, y in zip(reference, moved):
                assert agree(x, y)

    def test_workers_do_not_change_results(self, sphere):
        one = estimate_functionals(sphere, [INJ, SOFT], n=600, seed=9, workers=1)
        two = estimate_functionals(sphere, [INJ, SOFT], n=600, seed=9, workers=2)
        assert one == two

    def test_blocks(self):
        assert block_sizes(1200, 500) == [500, 500, 200]
        assert block_sizes(500, 500) == [500]
        with pytest.raises(ValueError):
            block_sizes(10, 0)

    def test_rejects_bad_input(self, sphere):
        with pytest.raises(ValueError):
            estimate_functional(sphere, SoftCount(2.0, 1.0), radius=2.5, n=10)
        with pytest.raises(ValueError):
            estimate_functional(sphere, INJ, n=1)
        with pytest.raises(ValueError):
            prepare_group(cyclic_group(1.0))
        with pytest.raises(ValueError):
            prepare_group(pair_of_pants(1.0, 1.0, 1.0))


class TestMixture:
    def test_single_component(self, sphere):
        spec = punctured_torus_pinch().target
        assert len(spec.entries) == 1
        mixed = estimate_mixture(spec, [sphere], [INJ], n=200, seed=21)[0]
        plain = estimate_functional(sphere, INJ, n=200, seed=component_seed(21, 0))
        assert mixed.mean == plain.mean
        assert mixed.std_error == pytest.approx(plain.std_error, rel=1e-12)
        assert mixed.bias_bound == pytest.approx(plain.bias_bound, rel=1e-12)

    def test_identical_halves(self, torus):
        spec = genus_two_separating_pinch().target
        assert [float(e.weight) for e in spec.entries] == [0.5, 0.5]
        mixed = estimate_mixture(spec, [torus, torus], [INJ], n=200, seed=22)[0]
        single = estimate_functional(torus, INJ, n=200, seed=23)
        assert agree(mixed, single)

    def test_groups_must_match(self, sphere, torus):
        spec = punctured_torus_pinch().target
        with pytest.raises(ValueError):
            estimate_mixture(spec, [torus], [INJ], n=10)
        with pytest.raises(ValueError):
            estimate_mixture(spec, [sphere, sphere], [INJ], n=10)

    def test_weights_sum_to_one(self):
        for family in (punctured_torus_pinch(), genus_two_separating_pinch()):
            assert sum(e.weight for e in family.target.entries) == 1

    def test_collision(self):
        result = collision_experiment([INJ], n=300, seed=24)
        assert result.verdicts == {INJ.name: PASS}
        assert result.sigma_1[0].std_error == pytest.approx(result.plain[0].std_error / math.sqrt(2.0), rel=0.5)

    def test_limit_groups(self):
        assert limit_group(SurfaceSig(genus=0, punctures=3)).signature == SurfaceSig(genus=0, punctures=3)
        assert limit_group(SurfaceSig(genus=1, punctures=1)).signature == SurfaceSig(genus=1, punctures=1)
        with pytest.raises(ValueError):
            limit_group(SurfaceSig(genus=2, punctures=0))


class TestExperiments:
    def test_schedule_checks(self):
        assert check_schedule([1, 0.5]) == (1.0, 0.5)
        for bad in ([], [0.5, 1.0], [1.0, 1.0], [1.0, 0.0]):
            with pytest.raises(ValueError):
                check_schedule(bad)

    def test_short_degeneration(self):
        result = degeneration_experiment(punctured_torus_pinch(), [INJ, SOFT], schedule=[1.0, 0.25], n=100, seed=31)
        assert len(result.rows) == 4
        assert [row.t for row in result.rows] == [1.0, 1.0, 0.25, 0.25]
        assert set(result.verdicts) == {INJ.name, SOFT.name}
        gaps = result.gaps[INJ.name]
        assert len(gaps) == 2
        assert gaps[1] < gaps[0]
        assert result.summary()["approaching"][INJ.name]
        assert result.summary()["schedule"] == [1.0, 0.25]

    def test_single_step_is_inconclusive(self, caplog):
        result = degeneration_experiment(punctured_torus_pinch(), [INJ], schedule=[0.5], n=50, seed=32)
        assert result.verdicts == {INJ.name: INCONCLUSIVE}
        assert result.passed
        assert "inconclusive" in caplog.text

    def test_control_run(self):
        result = control_run(punctured_torus_pinch(), 0.5, [INJ], replicates=3, n=200, seed=33)
        assert len(result.replicates) == 3
        assert result.spread[INJ.name] < 4.0

    @pytest.mark.slow
    def test_punctured_torus_pinch(self):
        result = degeneration_experiment(punctured_torus_pinch(), [INJ, SOFT], n=10_000, seed=34)
        assert result.verdicts == {INJ.name: PASS, SOFT.name: PASS}
        assert len(result.rows) == 10

    @pytest.mark.slow
    def test_genus_two_separating_pinch(self):
        result = degeneration_experiment(genus_two_separating_pinch(), [INJ], n=10_000, seed=35)
        assert result.verdicts == {INJ.name: PASS}

    def test_symmetric_difference_of_equal_groups(self):
        g = algebraic_family(0.0)
        estimate = symmetric_difference_area(g, g, n=2000, seed=36)
        assert estimate.value == 0.0
        assert estimate.std_error == 0.0

    def test_symmetric_difference_shrinks(self):
        limit = algebraic_family(0.0)
        areas = [symmetric_difference_area(algebraic_family(t), limit, n=40_000, seed=37).value for t in (0.25, 0.0625)]
        assert areas[0] > areas[1] > 0.0
        assert areas[0] <= 4.0 * math.pi

    @pytest.mark.slow
    def test_symmetric_difference_along_schedule(self):
        limit = algebraic_family(0.0)
        estimates = [
            symmetric_difference_area(algebraic_family(t), limit, n=200_000, seed=38) for t in algebraic_schedule()
        ]
        values = [e.value for e in estimates]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.05

    def test_linear_independence(self):
        result = linear_independence_witness(punctured_torus(1.0), punctured_torus(2.0), INJ, n=400, seed=39)
        assert result.separated
        assert result.separation > 5.0


class TestExport:
    def test_csv(self, tmp_path):
        result = degeneration_experiment(punctured_torus_pinch(), [Constant()], schedule=[1.0, 0.5], n=20, seed=41)
        text = format_rows(result.rows)
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].startswith("1,Constant(1),1,0,")
        path = write_rows(result.rows, tmp_path / "out" / "rows.csv")
        assert path.read_text(encoding="utf-8") == text

    def test_json_is_stable(self, tmp_path):
        data = {"b": 1.5, "a": [1, 2], "verdicts": {"F": PASS}}
        assert format_json(data) == format_json(dict(reversed(list(data.items()))))
        path = write_json(data, tmp_path / "summary.json")
        assert path.read_text(encoding="utf-8").startswith('{\n  "a"')

    def test_mixture_weights_regroup(self):
        spec = mixture_weights(genus_two_separating_pinch().limit)
        assert [e.component for e in spec.entries] == [SurfaceSig(genus=1, punctures=1)] * 2
