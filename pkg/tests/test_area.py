import math

import numpy as np
import pytest

from irs_lab.core.exceptions import UnboundedRegionError
from irs_lab.core.schedules import CUSP_DELTA_GRID, FUNNEL_GRID
from irs_lab.modules.hyperbolic.area import (
    area_region,
    ball_area,
    check_ball_area,
    check_cusp_area,
    check_funnel_area,
    cusp_strip_area,
    cusp_strip_height,
    funnel_area,
    funnel_area_bound,
    half_collar_area,
    thin_part_area_bound,
)


def box_indicator(x0, x1, y0, y1):
    def indicator(x, y):
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)

    return indicator


class TestClosedForms:
    def test_cusp_strip(self):
        assert cusp_strip_area(2.0) == pytest.approx(2.0 * math.sinh(1.0))
        assert cusp_strip_height(2.0) * cusp_strip_area(2.0) == pytest.approx(1.0)

    def test_funnel(self):
        alpha = math.asin(math.sinh(0.5) / math.sinh(1.0))
        assert alpha == pytest.approx(0.45940, abs=1e-5)
        assert funnel_area(1.0, 2.0) == pytest.approx(1.0 / math.tan(alpha))
        assert funnel_area(1.0, 2.0) == pytest.approx(2.0214, abs=1e-4)
        assert funnel_area(1.0, 2.0) <= funnel_area_bound(2.0)

    def test_funnel_requires_ordered_parameters(self):
        with pytest.raises(ValueError):
            funnel_area(2.0, 1.0)

    def test_ball_area(self):
        assert ball_area(0.0) == 0.0
        assert ball_area(1.0) == pytest.approx(2.0 * math.pi * (math.cosh(1.0) - 1.0))
        assert ball_area(1.0) == pytest.approx(3.41228, abs=1e-4)
        assert ball_area(2.0) > ball_area(1.0)
        with pytest.raises(ValueError):
            ball_area(-1.0)

    def test_thin_part_and_collar(self):
        assert thin_part_area_bound(3, 0.2) == pytest.approx(6.0 * math.sinh(0.1))
        assert half_collar_area(1.0) == pytest.approx(1.0 / math.sinh(0.5))


class TestAreaRegion:
    def test_empty_region(self):
        est = area_region(lambda x, y: np.zeros(np.shape(x), dtype=bool), (0.0, 1.0, 0.5, 2.0), resolution=50)
        assert est.value == 0.0

    def test_rectangle(self):
        """A box [0,1]×[1,2] has area ∫∫ dy/y² = 1/2."""
        est = area_region(box_indicator(0.0, 1.0, 1.0, 2.0), (-0.5, 1.5, 0.8, 2.5), resolution=400)
        assert est.value == pytest.approx(0.5, rel=1e-3)

    def test_unbounded_region(self):
        with pytest.raises(UnboundedRegionError):
            area_region(lambda x, y: y > 1.0, (0.0, 1.0, 0.5, 10.0), resolution=50)

    def test_box_validation(self):
        with pytest.raises(ValueError):
            area_region(box_indicator(0, 1, 1, 2), (0.0, 1.0, 0.0, 2.0))
        with pytest.raises(ValueError):
            area_region(box_indicator(0, 1, 1, 2), (1.0, 0.0, 1.0, 2.0))

    def test_monte_carlo(self):
        est = area_region(
            box_indicator(0.0, 1.0, 1.0, 2.0),
            (-0.5, 1.5, 0.8, 2.5),
            method="monte_carlo",
            n_samples=20_000,
            seed=7,
        )
        assert est.std_error > 0.0
        assert abs(est.value - 0.5) <= 4.0 * est.std_error

    def test_monte_carlo_is_seeded(self):
        kwargs = dict(method="monte_carlo", n_samples=2_000, seed=11)
        first = area_region(box_indicator(0.0, 1.0, 1.0, 2.0), (-0.5, 1.5, 0.8, 2.5), **kwargs)
        second = area_region(box_indicator(0.0, 1.0, 1.0, 2.0), (-0.5, 1.5, 0.8, 2.5), **kwargs)
        assert first == second


class TestThinPartChecks:
    @pytest.mark.parametrize("delta", CUSP_DELTA_GRID)
    def test_cusp_strip(self, delta):
        check = check_cusp_area(delta)
        assert check.relative_error <= 1e-4
        assert check.passed

    @pytest.mark.parametrize("delta_0,delta", FUNNEL_GRID)
    def test_funnel_sector(self, delta_0, delta):
        check = check_funnel_area(delta_0, delta)
        assert check.relative_error <= 1e-4
        assert check.numeric <= funnel_area_bound(delta)
        assert check.passed

    def test_ball_cross_check(self):
        check = check_ball_area(1.0)
        assert check.relative_error <= 1e-3

    def test_zero_tolerance_fails(self):
        assert not check_funnel_area(1.0, 2.0, resolution=200, tolerance=0.0).passed
