import math

import numpy as np
import pytest

from u2ucell.errors import ConvergenceError, DomainError
from u2ucell.specfun import (
    FunctionAccuracy,
    _series_2f1,
    gamma_fn,
    gauss_2f1,
    lower_incomplete_gamma,
    pochhammer,
)


class TestGamma:
    def test_known_values(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-13)
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_recurrence_on_grid(self):
        for x in np.linspace(0.1, 20.0, 120):
            assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)
        with pytest.raises(DomainError):
            gamma_fn(-1.3)


class TestLowerIncompleteGamma:
    def test_exponential_case(self):
        for x in [0.0, 0.3, 1.0, 7.5, 40.0]:
            assert lower_incomplete_gamma(1.0, x) == pytest.approx(
                -math.expm1(-x), rel=1e-12, abs=1e-13
            )

    def test_zero(self):
        assert lower_incomplete_gamma(2.7, 0.0) == 0.0

    def test_quadrature_value(self):
        # integral of t^1.32 e^-t over [0, 1.7], high-precision reference
        assert lower_incomplete_gamma(2.32, 1.7) == pytest.approx(
            0.48550440562864575, rel=1e-10
        )

    def test_monotone_and_limit(self):
        for a in [0.4, 1.0, 2.32, 6.0]:
            values = [lower_incomplete_gamma(a, x) for x in np.linspace(0.0, 8 * a, 40)]
            assert all(b >= a_ for a_, b in zip(values, values[1:]))
            assert lower_incomplete_gamma(a, 50.0 * a) == pytest.approx(
                gamma_fn(a), rel=1e-8
            )

    def test_domain(self):
        with pytest.raises(DomainError):
            lower_incomplete_gamma(0.0, 1.0)
        with pytest.raises(DomainError):
            lower_incomplete_gamma(1.0, -0.1)


class TestPochhammer:
    def test_values(self):
        assert pochhammer(3.0, 0) == 1.0
        assert pochhammer(3.0, 4) == 360.0
        assert pochhammer(-0.8, 3) == pytest.approx(-0.192, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)


class TestGauss2F1:
    def test_constant_term(self):
        assert gauss_2f1(1.7, -0.3, 2.2, 0.0) == 1.0

    def test_log_closed_form(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z
        assert gauss_2f1(1.0, 1.0, 2.0, -0.5) == pytest.approx(
            0.8109302162163288, rel=1e-10
        )

    def test_transformed_reference_value(self):
        # frozen from a 30-digit series evaluation after mapping into the disc
        assert gauss_2f1(6.0, -0.0909, 0.9091, -3.2) == pytest.approx(
            1.3787118658811129, rel=1e-10
        )

    def test_symmetry_in_first_arguments(self, rng):
        for _ in range(60):
            a = rng.uniform(0.2, 8.0)
            b = rng.uniform(-1.0, 2.0)
            c = rng.uniform(0.4, 6.0)
            z = -(10.0 ** rng.uniform(-2, 4))
            left = gauss_2f1(a, b, c, z)
            right = gauss_2f1(b, a, c, z)
            assert left == pytest.approx(right, rel=1e-12, abs=1e-300)

    def test_pfaff_agrees_with_direct_series(self, rng):
        # overlap band where both expansions converge
        for _ in range(40):
            a = rng.uniform(0.5, 7.0)
            b = rng.uniform(-0.5, 1.5)
            c = rng.uniform(0.5, 5.0)
            z = rng.uniform(-1.0, -0.5)
            direct, _ = _series_2f1(a, b, c, np.asarray(z), FunctionAccuracy())
            pfaff, _ = _series_2f1(a, c - b, c, np.asarray(z / (z - 1.0)), FunctionAccuracy())
            pfaff = (1.0 - z) ** (-a) * pfaff
            assert float(direct) == pytest.approx(float(pfaff), rel=1e-9)

    def test_vectorized_matches_scalar(self):
        z = np.array([-0.1, -2.0, -50.0, -1e6])
        vec = gauss_2f1(3.0, 0.4, 1.4, z)
        for zi, vi in zip(z, vec):
            assert gauss_2f1(3.0, 0.4, 1.4, float(zi)) == pytest.approx(vi, rel=1e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, 0.0, -0.5)
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, -2.0, -0.5)
        with pytest.raises(DomainError):
            gauss_2f1(1.0, 1.0, 2.0, 0.5)

    def test_convergence_error_carries_partial_state(self):
        acc = FunctionAccuracy(rel_tol=1e-12, max_terms=4)
        with pytest.raises(ConvergenceError) as err:
            gauss_2f1(2.0, 1.0, 3.0, -0.85, acc)
        assert err.value.terms_used == 4
        assert err.value.partial_value is not None


class TestAccuracyRecord:
    def test_validation(self):
        with pytest.raises(DomainError):
            FunctionAccuracy(rel_tol=0.0)
        with pytest.raises(DomainError):
            FunctionAccuracy(max_terms=0)
