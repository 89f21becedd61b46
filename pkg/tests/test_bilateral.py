import cmath

import pytest

from conftest import rand_disc, relerr
from eshg.bilateral import (
    BilateralParams,
    GeometricProgression,
    bilateral_p51,
    bilateral_p52,
    even_common_denominator,
    progression_limit_check,
    _shell_signatures,
)
from eshg.csymbols import CSymbolContext, d_sym
from eshg.errors import BalancingError, DomainError, HypothesisError
from eshg.integrals import (
    ContinuousParams,
    QuadratureSpec,
    monomial_handle,
    selberg_form,
)
from eshg.partitions import binom2
from eshg.qsymbols import Nome, theta

Q = 0.15 + 0.05j
T = 0.2 + 0.03j
X = cmath.exp(0.3j)

ALPHA_TRIPLE_A = (-0.4, 0.0, 0.0, 0.2, 0.6, 0.6)
ALPHA_TRIPLE_B = (-5 / 12, 1 / 12, 1 / 12, 1 / 12, 7 / 12, 7 / 12)
ALPHA_DEEP = (-2 / 3, 1 / 3, 1 / 3, 1 / 3, 1 / 3, 1 / 3)

LEADING = (0.8, 0.5 + 0.1j, 0.6, 0.7 - 0.2j, 0.9)


def qlevel_params(n, q=Q, t=T, leading=LEADING):
    return ContinuousParams.solve(n, 0, Nome(0.0, q, t), leading, p_free=True)


class TestGeometricProgression:
    def test_p_value(self):
        geo = GeometricProgression(X, 10, 3)
        assert abs(geo.p(Q) - (X * Q**3) ** 10) < 1e-15
        assert abs(geo.p(Q)) < 1.0
        assert geo.with_k(5).k == 5

    def test_validation(self):
        with pytest.raises(DomainError):
            GeometricProgression(1.1, 10, 3)
        with pytest.raises(DomainError):
            GeometricProgression(X, 5, 3)
        with pytest.raises(DomainError):
            GeometricProgression(X, 10, 0)

    def test_even_common_denominator(self):
        assert even_common_denominator(ALPHA_TRIPLE_A) == 10
        assert even_common_denominator(ALPHA_TRIPLE_B) == 12
        assert even_common_denominator(ALPHA_DEEP) == 6
        assert even_common_denominator((0.5, 0.5, 0.0, 0.0, 0.0, 0.0)) == 2

    def test_theta_rewrite_along_progression(self, rng):
        # theta(p^a y; q) = theta(x^(da) y; q) (-x^(da) y)^(-dka) q^(-binom(dka,2))
        # once p = (x q^k)^d and a is a multiple of 1/d.
        d, k = 10, 3
        for num in (-4, -2, 1, 3):
            # p^a along the progression means ((x q^k)^d)^(num/d) with the
            # branch given by the progression itself, i.e. (x q^k)^num
            y = rand_disc(rng, 0.5, 1.5)
            lhs = theta((X * Q**k) ** num * y, Q)
            m = num * k  # = d k a
            rhs = (
                theta(X**num * y, Q)
                * (-(X**num) * y) ** (-m)
                * Q ** (-binom2(m))
            )
            assert relerr(lhs, rhs) < 1e-10

    def test_shell_signatures_cover_box(self):
        for n in (1, 2, 3):
            listed = []
            for s in range(9):
                for lam in _shell_signatures(s, n):
                    assert all(lam[i] >= lam[i + 1] for i in range(n - 1))
                    assert abs(lam[0]) + abs(lam[-1]) == s
                    listed.append(lam)
            assert len(listed) == len(set(listed))
            expect = 0
            import itertools

            for tup in itertools.product(range(-8, 9), repeat=n):
                if all(tup[i] >= tup[i + 1] for i in range(n - 1)):
                    if abs(tup[0]) + abs(tup[-1]) <= 8:
                        expect += 1
            assert len(listed) == expect


class TestTripleCase:
    @pytest.mark.parametrize("alpha,d", [(ALPHA_TRIPLE_A, 10), (ALPHA_TRIPLE_B, 12)])
    @pytest.mark.parametrize("n", [1, 2])
    def test_unit_value(self, alpha, d, n):
        # the elliptic form with f = g = 1 is identically 1 on the
        # balanced locus, so every limit of it must equal 1 as well
        geo = GeometricProgression(X, d, 3)
        v = bilateral_p51(alpha, qlevel_params(n), geo)
        assert abs(v - 1.0) < 1e-12

    def test_combination_invariance(self, rng):
        # value unchanged under (t_a, x) -> (t_a s^(-beta d), x s);
        # here a = 0, beta = -1/5, d = 10, so s^(-beta d) = s^2
        geo = GeometricProgression(X, 10, 3)
        params = qlevel_params(1)
        lc = lambda y: y
        v0 = bilateral_p51(ALPHA_TRIPLE_A, params, geo, lc_f=lc, lc_g=lc)
        for _ in range(10):
            s = cmath.exp(2j * cmath.pi * rng.random())
            rotated = list(params.t_params)
            rotated[0] *= s**2
            params2 = BilateralParams(1, Nome(0.0, Q, T), tuple(rotated))
            v1 = bilateral_p51(
                ALPHA_TRIPLE_A, params2, GeometricProgression(X * s, 10, 3),
                lc_f=lc, lc_g=lc,
            )
            assert relerr(v0, v1) < 1e-9

    def test_combination_invariance_n2(self, rng):
        geo = GeometricProgression(X, 10, 3)
        params = qlevel_params(2)
        v0 = bilateral_p51(ALPHA_TRIPLE_A, params, geo)
        s = cmath.exp(2j * cmath.pi * rng.random())
        rotated = list(params.t_params)
        rotated[0] *= s**2
        v1 = bilateral_p51(
            ALPHA_TRIPLE_A,
            BilateralParams(2, Nome(0.0, Q, T), tuple(rotated)),
            GeometricProgression(X * s, 10, 3),
        )
        assert relerr(v0, v1) < 1e-9

    def test_hypothesis_rejection(self):
        geo = GeometricProgression(X, 10, 3)
        with pytest.raises(HypothesisError):
            bilateral_p51((0.0, 0.0, 0.0, 0.0, 0.5, 0.5), qlevel_params(1),
                          GeometricProgression(X, 2, 3))
        with pytest.raises(HypothesisError):
            # exponents do not sum to 1
            bilateral_p51((0.1,) * 6, qlevel_params(1), geo)

    def test_denominator_mismatch(self):
        # d = 4 does not clear fifths
        with pytest.raises(DomainError):
            bilateral_p51(ALPHA_TRIPLE_A, qlevel_params(1),
                          GeometricProgression(X, 4, 3))

    def test_requires_qlevel_balancing(self):
        nome = Nome(0.05 + 0.02j, Q, T)
        elliptic = ContinuousParams.solve(1, 0, nome, LEADING)
        with pytest.raises(BalancingError):
            bilateral_p51(ALPHA_TRIPLE_A, elliptic, GeometricProgression(X, 10, 3))


class TestDeepCase:
    @pytest.mark.parametrize("n", [1, 2])
    def test_unit_value(self, n):
        geo = GeometricProgression(X, 6, 3)
        v = bilateral_p52(ALPHA_DEEP, qlevel_params(n), geo)
        assert abs(v - 1.0) < 1e-12

    def test_combination_invariance(self, rng):
        # a = 0, beta = -1/6, d = 6, so s^(-beta d) = s
        params = qlevel_params(1)
        v0 = bilateral_p52(ALPHA_DEEP, params, GeometricProgression(X, 6, 3))
        for _ in range(10):
            s = cmath.exp(2j * cmath.pi * rng.random())
            rotated = list(params.t_params)
            rotated[0] *= s
            v1 = bilateral_p52(
                ALPHA_DEEP,
                BilateralParams(1, Nome(0.0, Q, T), tuple(rotated)),
                GeometricProgression(X * s, 6, 3),
            )
            assert relerr(v0, v1) < 1e-9

    def test_hypothesis_rejection(self):
        with pytest.raises(HypothesisError):
            bilateral_p52(ALPHA_TRIPLE_A, qlevel_params(1),
                          GeometricProgression(X, 10, 3))

    def test_univariate_reduction_trivial_dsym(self):
        # at n = 1 the D-symbol is an empty product, so the sum is a
        # genuine one-variable bilateral series
        ctx = CSymbolContext(Nome(0.0, Q, T), 1)
        assert d_sym((5,), Q, ctx, elliptic=False) == 1.0 + 0j
        assert d_sym((-3,), T, ctx, elliptic=False) == 1.0 + 0j

    def test_dsym_finite_for_negative_parts(self):
        # the closed-form symbols it replaces individually vanish when
        # the smallest part is negative; the ratio stays finite
        ctx = CSymbolContext(Nome(0.0, Q, T), 3)
        v = d_sym((4, 0, -3), Q, ctx, elliptic=False)
        assert v == v and abs(v) > 0


class TestProgressionCheck:
    def test_exact_toy_passes(self):
        rhs = 2.0 + 1.0j
        report = progression_limit_check(
            lambda k: rhs + 0.4**k, rhs, range(3, 7), threshold=1e-2
        )
        assert report.passed
        errs = report.errors()
        assert len(errs) == 4 and errs[-1] < errs[0]

    def test_perturbed_rhs_fails(self):
        rhs = 2.0 + 1.0j
        report = progression_limit_check(
            lambda k: rhs + 0.4**k, rhs * 1.1, range(3, 7), threshold=1e-2
        )
        assert not report.passed

    def test_per_k_errors_recorded(self):
        def lhs(k):
            if k == 4:
                raise ValueError("boom")
            return 1.0 + 0.5**k

        report = progression_limit_check(lhs, 1.0, range(3, 7), threshold=1e-1)
        notes = {k: note for k, _, _, note in report.rows}
        assert "ValueError" in notes[4]
        assert len(report.errors()) == 3
        assert report.passed

    def test_elliptic_form_converges_to_triple_case_limit(self):
        # n = 1 comparison of the contour form along p = (x q^k)^10
        # against the bilateral limit, with first-degree monomial test
        # functions (leading coefficient z after the p^(alpha_a - beta)
        # recentering, valuation alpha_a - beta each)
        q = 0.45 + 0.1j
        params = qlevel_params(1, q=q)
        geo = GeometricProgression(X, 10, 1)
        lc = lambda y: y
        rhs = bilateral_p51(ALPHA_TRIPLE_A, params, geo, lc_f=lc, lc_g=lc)
        gamma = -0.2  # alpha_a - beta
        f = monomial_handle((1,))

        def lhs(k):
            p = geo.with_k(k).p(q)
            shifted = tuple(
                tr * p**a for tr, a in zip(params.t_params, ALPHA_TRIPLE_A)
            )
            pr = ContinuousParams(1, 0, Nome(p, q, T), shifted)
            return selberg_form(
                f, f, pr, QuadratureSpec(4096), p_power=2 * gamma,
                residue_correction=True, conv_tol=1e-4,
            )

        report = progression_limit_check(lhs, rhs, range(3, 7), threshold=1e-2)
        assert report.passed
        errs = report.errors()
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-2
