import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from oamaoa.bessel import MAX_ARGUMENT, MAX_ORDER, bessel_j

J0_FIRST_ZERO = 2.404825557695773


class TestValues:
    def test_j0_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0

    @pytest.mark.parametrize("n", [1, 2, 5, 16, 64])
    def test_higher_orders_vanish_at_zero(self, n):
        assert bessel_j(n, 0.0) == 0.0
        assert bessel_j(-n, 0.0) == 0.0

    def test_first_zero_of_j0(self):
        assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-8

    def test_scalar_in_scalar_out(self):
        assert isinstance(bessel_j(3, 2.5), float)

    def test_vector_shape(self):
        x = np.linspace(0, 30, 17).reshape(1, 17)
        assert bessel_j(2, x).shape == (1, 17)

    @pytest.mark.parametrize("n", [0, 1, 4, 9, 20, 40, 64])
    @pytest.mark.parametrize("x", [1e-6, 0.3, 0.99, 1.0, 3.7, 8.635, 25.0, 99.9, 750.0, 1e4])
    def test_against_mpmath(self, n, x):
        expected = float(mpmath.besselj(n, x))
        got = bessel_j(n, x)
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-300)

    def test_matches_scipy_on_dense_grid(self):
        x = np.linspace(0, 100, 2001)
        for n in range(0, 17):
            ref = special.jv(n, x)
            got = bessel_j(n, x)
            # absolute check against an independent double-precision library
            np.testing.assert_allclose(got, ref, rtol=0, atol=1e-13)

    def test_negative_argument_parity(self):
        for n in range(6):
            assert bessel_j(n, -4.2) == pytest.approx((-1) ** n * bessel_j(n, 4.2), rel=1e-15)


class TestDomain:
    def test_order_out_of_range(self):
        with pytest.raises(ValueError):
            bessel_j(MAX_ORDER + 1, 1.0)

    def test_argument_out_of_range(self):
        with pytest.raises(ValueError):
            bessel_j(0, MAX_ARGUMENT * 1.01)

    def test_non_integer_order(self):
        with pytest.raises((TypeError, ValueError)):
            bessel_j(1.5, 1.0)


class TestIdentities:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, MAX_ORDER), st.floats(0.0, 1e3))
    def test_reflection(self, n, x):
        assert bessel_j(-n, x) == (-1) ** n * bessel_j(n, x)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 40), st.floats(0.1, 100.0))
    def test_three_term_recurrence(self, n, x):
        lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
        rhs = 2 * n / x * bessel_j(n, x)
        scale = max(abs(lhs), abs(rhs), abs(bessel_j(n - 1, x)), abs(bessel_j(n + 1, x)))
        assert abs(lhs - rhs) <= 1e-8 * scale + 1e-300

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 30.0))
    def test_sum_of_squares_is_one(self, x):
        # orders beyond 64 are negligible for x <= 30
        total = sum(bessel_j(k, x) ** 2 for k in range(-MAX_ORDER, MAX_ORDER + 1))
        assert total == pytest.approx(1.0, abs=1e-12)
