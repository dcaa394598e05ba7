import math

import numpy as np
import pytest

from irs_lab.core.exceptions import RadiusMismatchError
from irs_lab.modules.chabauty.convergence import check_convergence
from irs_lab.modules.chabauty.escape import (
    commutator_defects,
    commuting_classes,
    escape_dichotomy,
    escape_snapshots,
    noncommuting_pairs,
)
from irs_lab.modules.chabauty.snapshot import (
    conjugation_budget,
    hausdorff,
    quiet_margin,
    snapshot,
    snapshot_distance,
)
from irs_lab.modules.domains.dirichlet import dirichlet_domain
from irs_lab.modules.domains.tiling import TileEnumerator
from irs_lab.modules.fuchsian.constructions import cyclic_group, punctured_torus, thrice_punctured_sphere
from irs_lab.modules.fuchsian.diagnostics import systole_at
from irs_lab.modules.fuchsian.enumeration import enumerate_ball
from irs_lab.modules.fuchsian.families import algebraic_family, algebraic_schedule
from irs_lab.modules.hyperbolic.isometry import (
    Isometry,
    compose,
    dilation,
    frobenius_distance,
    rotation_about_i,
    translation,
)
from irs_lab.modules.hyperbolic.plane import ORIGIN, HPoint, apply, distance

RADIUS = 2.5


@pytest.fixture(scope="module")
def torus():
    return punctured_torus(2.0, 2.0)


@pytest.fixture(scope="module")
def torus_tiles(torus):
    return TileEnumerator(dirichlet_domain(torus))


class TestSnapshot:
    def test_identity_conjugator_is_the_ball(self, torus):
        snap = snapshot(torus, radius=RADIUS)
        ball = enumerate_ball(torus, ORIGIN, RADIUS)
        assert len(snap) == len(ball)
        assert all(snap.contains(g) for g in ball.isometries)

    def test_cyclic_group(self):
        snap = snapshot(cyclic_group(1.0), radius=2.5)
        assert len(snap) == 5
        assert snap.displacements.tolist() == pytest.approx([0.0, 1.0, 1.0, 2.0, 2.0])
        assert len(snapshot(cyclic_group(2.0), radius=2.5)) == 3

    def test_identity_comes_first(self, torus):
        snap = snapshot(torus, rotation_about_i(0.4), radius=RADIUS)
        assert snap.displacements[0] == 0.0
        np.testing.assert_allclose(snap.matrices[0], np.eye(2), atol=1e-9)
        assert np.all(np.diff(snap.displacements) >= -1e-9)

    def test_inverse_closed(self, torus):
        snap = snapshot(torus, translation(0.3), radius=RADIUS)
        assert all(snap.contains(g.inverse(), tol=1e-8) for g in snap.elements)

    def test_product_closed_within_radius(self, torus):
        snap = snapshot(torus, radius=RADIUS)
        elements = snap.elements
        for g in elements:
            for h in elements:
                gh = compose(g, h)
                if distance(ORIGIN, apply(gh, ORIGIN)) <= RADIUS - 1e-6:
                    assert snap.contains(gh, tol=1e-8)

    def test_below_systole_only_identity(self, torus):
        systole = systole_at(torus, ORIGIN, 4.0)
        snap = snapshot(torus, radius=0.5 * systole)
        assert len(snap) == 1

    def test_conjugate_groups_agree(self, torus):
        h = compose(dilation(1.3), rotation_about_i(1.1))
        g = translation(0.3)
        direct = snapshot(torus, g, radius=RADIUS)
        moved = snapshot(torus.conjugated(h), compose(h, g), radius=RADIUS)
        assert len(direct) == len(moved)
        assert snapshot_distance(direct, moved, margin=0.0) <= 1e-8

    def test_tiling_matches_ball_route(self, torus, torus_tiles):
        g = compose(translation(0.8), dilation(2.5))
        by_ball = snapshot(torus, g, radius=RADIUS)
        by_tiles = snapshot(torus, g, radius=RADIUS, tiles=torus_tiles)
        assert snapshot_distance(by_ball, by_tiles) <= 1e-8

    def test_budget(self):
        g = dilation(math.e)
        assert conjugation_budget(ORIGIN, g, 2.0) == pytest.approx(4.0)

    def test_bad_radius(self, torus):
        with pytest.raises(ValueError):
            snapshot(torus, radius=0.0)


class TestSnapshotDistance:
    def test_zero_on_itself(self, torus):
        a = snapshot(torus, radius=RADIUS)
        b = snapshot(torus, radius=RADIUS)
        assert snapshot_distance(a, a) == 0.0
        assert snapshot_distance(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_metric_axioms(self):
        a, b, c = (snapshot(algebraic_family(t), radius=RADIUS) for t in (0.25, 0.1, 0.0))
        assert snapshot_distance(a, b) == pytest.approx(snapshot_distance(b, a), abs=1e-15)
        assert snapshot_distance(a, c) <= snapshot_distance(a, b) + snapshot_distance(b, c) + 1e-12

    def test_hausdorff_of_empty(self):
        empty = np.zeros((0, 2, 2))
        assert hausdorff(empty, empty) == 0.0
        assert hausdorff(np.eye(2)[None], empty) == math.inf

    def test_sign_is_ignored(self):
        g = Isometry(2.0, 1.0, 1.0, 1.0).matrix
        assert hausdorff(g[None], -g[None]) == 0.0

    def test_radius_mismatch(self, torus):
        with pytest.raises(RadiusMismatchError):
            snapshot_distance(snapshot(torus, radius=2.0), snapshot(torus, radius=2.5))
        with pytest.raises(RadiusMismatchError):
            snapshot_distance(
                snapshot(torus, radius=2.0),
                snapshot(torus, base=HPoint(0.1, 1.0), radius=2.0),
            )

    def test_quiet_margin_avoids_the_spectrum(self):
        limit = snapshot(algebraic_family(0.0), radius=RADIUS)
        margin = quiet_margin(limit)
        assert 0.0 < margin <= 1.2
        inner = RADIUS - margin
        assert np.min(np.abs(limit.displacements - inner)) > 1e-3

    def test_quiet_margin_keeps_a_nontrivial_element(self):
        limit = snapshot(algebraic_family(0.0), radius=RADIUS)
        inner = RADIUS - quiet_margin(limit)
        assert len(limit.within(inner)) > 1
        moved = snapshot(algebraic_family(0.125), radius=RADIUS)
        assert snapshot_distance(moved, limit, quiet_margin(limit)) > 0.0

    def test_quiet_margin_needs_a_nontrivial_element(self):
        with pytest.raises(ValueError):
            quiet_margin(snapshot(algebraic_family(0.0), radius=0.5))

    def test_linear_rate_along_generator_convergence(self):
        schedule = algebraic_schedule()
        limit = snapshot(algebraic_family(0.0), radius=RADIUS)
        margin = quiet_margin(limit)
        distances = [snapshot_distance(snapshot(algebraic_family(t), radius=RADIUS), limit, margin) for t in schedule]
        assert all(a > b for a, b in zip(distances, distances[1:]))
        slopes = [d / t for d, t in zip(distances, schedule)]
        assert max(slopes) / min(slopes) < 3.0


class TestConvergence:
    def test_constant_sequence(self, torus):
        limit = snapshot(torus, radius=RADIUS)
        report = check_convergence([limit] * 4, limit, 1e-12)
        assert report.passed
        assert report.distances == (0.0, 0.0, 0.0, 0.0)
        assert report.violations == ()

    def test_algebraic_family_passes(self):
        schedule = algebraic_schedule()
        limit_group = algebraic_family(0.0)
        limit = snapshot(limit_group, radius=RADIUS)
        margin = quiet_margin(limit)
        seq = [snapshot(algebraic_family(t), radius=RADIUS) for t in schedule]
        tail_group = algebraic_family(schedule[len(schedule) // 2])
        perturbation = max(frobenius_distance(g, h) for g, h in zip(tail_group.generators, limit_group.generators))
        report = check_convergence(seq, limit, 10.0 * perturbation, margin=margin)
        assert report.c1_ok and report.c2_ok
        assert all(w.matched for w in report.witnesses)

    def test_monotone_in_epsilon(self):
        limit = snapshot(algebraic_family(0.0), radius=RADIUS)
        margin = quiet_margin(limit)
        seq = [snapshot(algebraic_family(t), radius=RADIUS) for t in algebraic_schedule()]
        verdicts = [check_convergence(seq, limit, eps, margin=margin).passed for eps in (1e-6, 1e-3, 1e-2, 0.1, 1.0, 10.0)]
        first = verdicts.index(True) if True in verdicts else len(verdicts)
        assert all(verdicts[first:])

    def test_escaping_sequence_fails_c1(self, torus):
        seq = escape_snapshots(torus, torus.peripheral_words[0], 4, 3.0)
        limit = snapshot(torus, radius=3.0)
        report = check_convergence(seq, limit, 1e-3)
        assert not report.c1_ok
        assert not report.passed

    def test_report_serializes(self, torus):
        limit = snapshot(torus, radius=RADIUS)
        data = check_convergence([limit], limit, 0.1).to_dict()
        assert data["passed"] is True
        assert data["tail_start"] == 0

    def test_rejects_empty_and_mismatched(self, torus):
        limit = snapshot(torus, radius=RADIUS)
        with pytest.raises(ValueError):
            check_convergence([], limit, 0.1)
        with pytest.raises(ValueError):
            check_convergence([limit], limit, 0.0)
        with pytest.raises(RadiusMismatchError):
            check_convergence([snapshot(torus, radius=2.0)], limit, 0.1)


class TestCommutators:
    def test_commuting_powers(self):
        g = Isometry(1.0, 1.0, 0.0, 1.0).matrix
        powers = np.array([np.linalg.matrix_power(g, k) for k in range(1, 5)])
        assert np.max(commutator_defects(g, powers)) == 0.0
        assert len(commuting_classes(powers)) == 1

    def test_noncommuting_pair(self):
        x = Isometry(1.0, 2.0, 0.0, 1.0).matrix
        y = Isometry(1.0, 0.0, -2.0, 1.0).matrix
        assert commutator_defects(x, y[None])[0] > 1.0
        assert len(commuting_classes(np.array([x, y]))) == 2

    def test_pair_count(self):
        assert noncommuting_pairs([3]) == 0
        assert noncommuting_pairs([2, 1]) == 2
        assert noncommuting_pairs([1, 1, 1]) == 3


class TestEscape:
    def test_cusp_of_punctured_torus(self, torus):
        report = escape_dichotomy(torus, steps=6, radius=3.0)
        assert report.abelian
        assert report.verdict == "abelian horn"
        assert report.terminal_parabolic
        assert report.terminal_defect <= 1e-8
        assert report.control_distance <= 1e-6

    def test_counts_settle(self, torus):
        counts = escape_dichotomy(torus, steps=6, radius=3.0, control=False).counts
        assert counts[0] > 0
        settled = counts.index(0)
        assert all(c == 0 for c in counts[settled:])

    def test_no_steps_is_not_abelian(self, torus):
        report = escape_dichotomy(torus, steps=0, radius=3.0, control=False)
        assert not report.abelian
        assert report.counts[0] > 0

    def test_cusp_at_infinity(self):
        sphere = thrice_punctured_sphere()
        report = escape_dichotomy(sphere, (1,), steps=5, radius=3.0, control=False)
        assert math.isinf(report.cusp_point)
        assert report.cusp_width == pytest.approx(2.0)
        assert report.abelian
        assert report.terminal_defect == pytest.approx(0.0, abs=1e-12)

    def test_terminal_size_matches_cusp_width(self):
        sphere = thrice_punctured_sphere()
        report = escape_dichotomy(sphere, (1,), steps=5, radius=3.0, control=False)
        # translations by 2k at height e^5 displace by 2 asinh(|k| e^{-5})
        expected = 2 * math.floor(math.exp(5) * math.sinh(1.5)) + 1
        assert report.steps[-1].size == expected

    @pytest.mark.slow
    def test_full_schedule(self, torus):
        report = escape_dichotomy(torus, steps=8, radius=3.0)
        assert report.abelian
        assert report.control_distance <= 1e-6

    def test_rejects_bad_input(self, torus):
        with pytest.raises(ValueError):
            escape_dichotomy(cyclic_group(1.0))
        with pytest.raises(ValueError):
            escape_dichotomy(torus, direction=(1,))
        with pytest.raises(ValueError):
            escape_dichotomy(torus, steps=-1)

    def test_report_serializes(self):
        report = escape_dichotomy(thrice_punctured_sphere(), (1,), steps=1, radius=2.0, control=False)
        data = report.to_dict()
        assert [s["step"] for s in data["steps"]] == [0, 1]
        assert data["verdict"] == report.verdict
