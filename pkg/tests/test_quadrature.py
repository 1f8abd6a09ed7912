"""Exp-sinh radial quadrature against closed forms."""

import math

import numpy as np
import pytest

from fockberezin import (RadialSymbol, integrate_radial, integrate_radial_log,
                         radial_moment, unit_symbol)


class TestClosedForms:
    def test_gaussian_first_moment(self):
        res = integrate_radial(unit_symbol(), 1.0, 2.0, 1.0)
        assert res.value == pytest.approx(0.5, rel=1e-12)
        assert res.converged

    def test_quartic_third_moment(self):
        res = integrate_radial(unit_symbol(), 1.0, 4.0, 3.0)
        assert res.value == pytest.approx(0.25, rel=1e-12)

    def test_gamma_factor_instance(self):
        res = integrate_radial(unit_symbol(), 3.0, 4.0, 3.0)
        assert res.value == pytest.approx(1.0 / 12.0, rel=1e-12)

    def test_oracle_grid_and_honesty(self):
        for c in (0.5, 1.0, 2.0, 5.0, 10.0):
            for m in (1.0, 2.0, 3.0, 4.0, 6.0):
                for n in range(5):
                    res = integrate_radial(unit_symbol(), c, m, 2.0 * n + 1.0)
                    want = math.exp(radial_moment(c, m, n)) / (2.0 * math.pi)
                    assert res.converged
                    assert abs(res.value - want) / want <= 1e-11
                    assert abs(res.value - want) <= 3.0 * res.abs_error_estimate

    def test_converged_implies_tolerance(self):
        res = integrate_radial(unit_symbol(), 2.0, 3.0, 2.0,
                               tol_rel=1e-12, tol_abs=1e-300)
        assert res.converged
        assert res.abs_error_estimate <= max(1e-300, 1e-12 * abs(res.value))

    def test_fractional_power_endpoint(self):
        # integrable singularity u^(q-1) with q < 1 after substitution
        res = integrate_radial(unit_symbol(), 1.0, 4.0, 0.0)
        assert res.value == pytest.approx(math.gamma(0.25) / 4.0, rel=1e-11)


class TestSignedAndDecaying:
    def test_signed_integrand(self):
        g = RadialSymbol(lambda r: math.cos(r), 1.0,
                         eval_array=lambda r: np.cos(r))
        res = integrate_radial(g, 1.0, 2.0, 1.0)
        # int_0^inf r cos(r) e^{-r^2} dr, reference from 40-digit quadrature
        want = 0.2877818082489888520329788
        assert res.converged
        assert res.value == pytest.approx(want, rel=1e-11)

    def test_monotone_nonneg(self):
        g = RadialSymbol(lambda r: 1.0 / (1.0 + r), 1.0,
                         eval_array=lambda r: 1.0 / (1.0 + r))
        res = integrate_radial(g, 1.0, 1.0, 0.0)
        assert res.value >= 0.0
        assert res.converged

    def test_sup_bound_violation_raises(self):
        g = RadialSymbol(lambda r: 2.0, 1.0, eval_array=lambda r: np.full_like(r, 2.0))
        with pytest.raises(ValueError):
            integrate_radial(g, 1.0, 2.0, 1.0)

    def test_nan_symbol_raises(self):
        g = RadialSymbol(lambda r: math.nan,
                         1.0, eval_array=lambda r: np.full_like(r, np.nan))
        with pytest.raises(ValueError):
            integrate_radial(g, 1.0, 2.0, 1.0)


class TestLogVariant:
    def test_huge_gamma_scale(self):
        # power 401 at m=2 gives Gamma(201)/2, far outside double range
        log_val, sign, rel, _, converged = integrate_radial_log(
            unit_symbol(), 1.0, 2.0, 401.0)
        assert converged
        assert sign == 1.0
        want = math.lgamma(201.0) - math.log(2.0)
        assert log_val == pytest.approx(want, rel=1e-13)
        assert rel <= 1e-10

    def test_matches_linear(self):
        log_val, sign, rel, _, _ = integrate_radial_log(unit_symbol(), 2.0, 3.0, 4.0)
        lin = integrate_radial(unit_symbol(), 2.0, 3.0, 4.0)
        assert sign * math.exp(log_val) == pytest.approx(lin.value, rel=1e-13)


class TestValidation:
    @pytest.mark.parametrize("c,m,power", [(-1.0, 2.0, 1.0), (0.0, 2.0, 1.0),
                                           (1.0, 0.0, 1.0), (1.0, 2.0, -1.0),
                                           (math.inf, 2.0, 1.0)])
    def test_bad_arguments(self, c, m, power):
        with pytest.raises(ValueError):
            integrate_radial(unit_symbol(), c, m, power)

    def test_radial_moment_examples(self):
        assert radial_moment(1.0, 2.0, 0) == pytest.approx(math.log(math.pi), rel=1e-14)
        assert radial_moment(2.0, 2.0, 1) == pytest.approx(math.log(math.pi / 4.0), rel=1e-13)
        assert radial_moment(1.0, 4.0, 0) == pytest.approx(
            math.log(math.pi ** 1.5 / 2.0), rel=1e-13)

    def test_radial_moment_validation(self):
        with pytest.raises(ValueError):
            radial_moment(0.0, 2.0, 0)
        with pytest.raises(ValueError):
            radial_moment(1.0, 2.0, -1)
