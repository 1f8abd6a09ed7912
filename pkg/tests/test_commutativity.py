"""Nested transforms, commutator defects, and the certification probes."""

import math

import numpy as np
import pytest

from fockberezin import (UCache, asymptotic_slopes, defect,
                         derivative_identity_check, lemma1_witness,
                         nested_at_zero, nested_by_composition,
                         tt_identities_m2, u_function)
from fockberezin._reference import (DEFECT_M4_1_2_D1, NESTED_M4_BWD_2_1_D1,
                                    NESTED_M4_FWD_1_2_D1, U_GAP_M4_12, U_M4)


@pytest.fixture(scope="module")
def cache():
    return UCache()


class TestUFunction:
    def test_m2_closed_form(self, cache):
        # U(n) = pi alpha^{2n} / (alpha+beta)^{n+1} at m=2
        u = u_function(1.0, 1.0, 2.0, 0, cache=cache)
        assert u.value == pytest.approx(math.pi / 2.0, rel=1e-12)
        u = u_function(2.0, 1.0, 2.0, 1, cache=cache)
        assert u.value == pytest.approx(4.0 * math.pi / 9.0, rel=1e-12)

    def test_m4_reference_values(self, cache):
        for (a, b, n), want in U_M4.items():
            u = u_function(a, b, 4.0, n, cache=cache)
            assert u.value == pytest.approx(want, rel=1e-11)
            assert abs(u.value - want) <= 3.0 * max(u.error, 1e-15 * want)

    def test_positive(self, cache):
        for n in (0, 3, 10):
            assert u_function(1.5, 0.7, 3.0, n, cache=cache).value > 0.0

    def test_validation(self, cache):
        with pytest.raises(ValueError):
            u_function(1.0, 1.0, 2.0, -1, cache=cache)
        with pytest.raises(ValueError):
            u_function(0.0, 1.0, 2.0, 0, cache=cache)
        with pytest.raises(ValueError):
            u_function(1.0, 1.0, -2.0, 0, cache=cache)


class TestNested:
    def test_m2_closed_form(self, cache):
        nv = nested_at_zero(1.0, 2.0, 2.0, 1.0, cache=cache)
        assert nv.value == pytest.approx(0.4, rel=1e-9)
        assert abs(nv.value - 0.4) <= 10.0 * nv.error_bound

    def test_delta_zero_is_unit(self, cache):
        for a, b, m in [(1.0, 2.0, 2.0), (0.5, 1.5, 4.0), (2.0, 1.0, 3.0)]:
            nv = nested_at_zero(a, b, m, 0.0, cache=cache)
            assert nv.value == pytest.approx(1.0, rel=1e-11)

    def test_m4_reference(self, cache):
        nf = nested_at_zero(1.0, 2.0, 4.0, 1.0, cache=cache)
        nb = nested_at_zero(2.0, 1.0, 4.0, 1.0, cache=cache)
        assert nf.value == pytest.approx(NESTED_M4_FWD_1_2_D1, rel=1e-11)
        assert nb.value == pytest.approx(NESTED_M4_BWD_2_1_D1, rel=1e-11)

    def test_range_and_monotonicity(self, cache):
        vals = [nested_at_zero(1.0, 2.0, 3.0, d, cache=cache).value
                for d in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert all(0.0 < v <= 1.0 + 1e-12 for v in vals)
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_matches_composition(self, cache):
        for a, b, m, d in [(1.0, 2.0, 2.0, 1.0), (0.5, 1.0, 2.0, 0.5),
                           (1.0, 2.0, 4.0, 1.0), (1.0, 2.0, 3.0, 0.5)]:
            nv = nested_at_zero(a, b, m, d, cache=cache)
            comp = nested_by_composition(a, b, m, d)
            assert nv.value == pytest.approx(comp.value, rel=1e-7)

    def test_delta_validation(self, cache):
        with pytest.raises(ValueError):
            nested_at_zero(1.0, 2.0, 2.0, -1.0, cache=cache)


class TestDefect:
    def test_m2_not_significant(self, cache):
        rep = defect(1.0, 2.0, 2.0, 1.0, cache=cache)
        assert abs(rep.defect) <= 1e-9
        assert not rep.significant
        assert rep.forward.value == pytest.approx(0.4, rel=1e-9)

    def test_equal_scales_exactly_zero(self, cache):
        rep = defect(1.5, 1.5, 4.0, 1.0, cache=cache)
        assert rep.defect == 0.0
        assert not rep.significant

    def test_m4_significant_and_matches_reference(self, cache):
        rep = defect(1.0, 2.0, 4.0, 1.0, cache=cache)
        assert rep.significant
        assert rep.defect == pytest.approx(DEFECT_M4_1_2_D1, rel=1e-9)

    def test_antisymmetry_exact(self, cache):
        a = defect(1.0, 2.0, 4.0, 1.0, cache=cache)
        b = defect(2.0, 1.0, 4.0, 1.0, cache=cache)
        assert a.defect == -b.defect

    def test_kappa_policy(self, cache):
        rep = defect(1.0, 2.0, 4.0, 1.0, kappa=1e308, cache=cache)
        assert not rep.significant
        assert rep.kappa == 1e308


class TestLemma1:
    def test_m4_gaps_match_reference(self, cache):
        gaps = lemma1_witness(1.0, 2.0, 4.0, cache=cache)
        assert [n for n, _, _ in gaps] == [0, 1]
        for n, g, err in gaps:
            assert g == pytest.approx(U_GAP_M4_12[n], rel=1e-5)
            assert abs(g) > 10.0 * err  # certifies non-commutativity

    def test_m2_symmetric(self, cache):
        gaps = lemma1_witness(1.0, 3.0, 2.0, cache=cache)
        assert len(gaps) == 1
        assert abs(gaps[0][1]) <= 1e-10 * math.pi / 4.0

    def test_index_range_follows_half_m(self, cache):
        assert [n for n, _, _ in lemma1_witness(1.0, 1.2, 1.0, cache=cache)] == [0]
        assert [n for n, _, _ in lemma1_witness(1.0, 1.2, 3.0, cache=cache)] == [0, 1]
        assert [n for n, _, _ in lemma1_witness(1.0, 1.2, 6.0, cache=cache)] == [0, 1, 2]

    def test_equal_scales_zero(self, cache):
        assert all(g == 0.0 for _, g, _ in lemma1_witness(2.0, 2.0, 4.0, cache=cache))


class TestIdentitiesM2:
    def test_example_pair(self, cache):
        rows = tt_identities_m2(1.0, 2.0, cache=cache)
        assert all(r.passed for r in rows)
        # the first-order gap equals (alpha-beta) pi/(alpha+beta) = -pi/3
        assert rows[1].lhs == pytest.approx(-math.pi / 3.0, rel=1e-10)

    def test_equal_pair_degenerate(self, cache):
        rows = tt_identities_m2(1.0, 1.0, cache=cache)
        assert all(r.passed for r in rows)

    def test_extreme_ratio(self, cache):
        rows = tt_identities_m2(5.0, 0.5, cache=cache)
        assert all(r.rel_gap <= 1e-9 for r in rows)


class TestDerivativeIdentity:
    def test_m2_closed_form_rhs(self, cache):
        lhs, rhs, gap = derivative_identity_check(1.0, 2.0, 2.0, 0, cache=cache)
        assert rhs == pytest.approx(-math.pi / 9.0, rel=1e-11)
        assert gap <= 1e-5

    def test_m2_second_example(self, cache):
        lhs, rhs, gap = derivative_identity_check(2.0, 1.0, 2.0, 1, cache=cache)
        assert rhs == pytest.approx(-(math.pi * 16.0 / 27.0) / 2.0, rel=1e-11)
        assert gap <= 1e-5

    def test_m4(self, cache):
        _, _, gap = derivative_identity_check(1.0, 1.0, 4.0, 0, cache=cache)
        assert gap <= 1e-5

    def test_second_order_convergence(self, cache):
        _, _, g1 = derivative_identity_check(1.0, 2.0, 2.0, 0, h_rel=1e-4, cache=cache)
        _, _, g2 = derivative_identity_check(1.0, 2.0, 2.0, 0, h_rel=5e-5, cache=cache)
        assert 3.0 <= g1 / g2 <= 5.0

    def test_requires_even_m(self, cache):
        with pytest.raises(ValueError):
            derivative_identity_check(1.0, 1.0, 3.0, 0, cache=cache)


class TestAsymptotics:
    def test_m4_slopes(self, cache):
        s0, sp = asymptotic_slopes(4.0, 1.0, np.geomspace(1e3, 1e5, 7), cache=cache)
        assert s0 == pytest.approx(-0.5, abs=0.05)
        assert sp == pytest.approx(-1.5, abs=0.05)

    def test_m6_slope(self, cache):
        s0, _ = asymptotic_slopes(6.0, 1.0, np.geomspace(1e3, 1e5, 7), cache=cache)
        assert s0 == pytest.approx(-1.0 / 3.0, abs=0.05)

    def test_m2_sanity(self, cache):
        s0, _ = asymptotic_slopes(2.0, 1.0, np.geomspace(1e3, 1e5, 7), cache=cache)
        assert s0 == pytest.approx(-1.0, abs=0.05)

    def test_grid_validation(self, cache):
        with pytest.raises(ValueError):
            asymptotic_slopes(4.0, 1.0, [1e3, 2e3, 4e3], cache=cache)  # < 2 decades
        with pytest.raises(ValueError):
            asymptotic_slopes(3.0, 1.0, np.geomspace(1e3, 1e5, 7), cache=cache)


class TestUGrowthBound:
    def test_bounded_ratio(self, cache):
        vals = [u_function(1.0, 2.0, 4.0, n, cache=cache).value for n in range(101)]
        n_star = int(np.argmax(vals))
        assert n_star <= 50
        assert max(vals[50:]) <= 1.01 * max(vals)
