"""Tests for the multivariate C/D/Delta symbols: dual evaluation paths,
shift identities under p-multiplication, ellipticity invariances, the
box-complement identity, and the univariate closed forms."""

import cmath

import pytest

from conftest import rand_disc, rand_partition, rand_signature, relerr
from eshg.errors import DomainError
from eshg.csymbols import (
    CSymbolContext,
    c_ell,
    c_tilde,
    d_sym,
    delta,
    delta0,
    delta_tilde,
    log_c_ell,
    log_delta,
    log_delta0,
)
from eshg.partitions import complement, nstat, nstat_conj, subpartitions, weight
from eshg.qsymbols import Nome, qpoch_fin, theta, theta_poch


def rand_ctx(rng, n=3):
    nome = Nome(
        rand_disc(rng, 0.05, 0.4), rand_disc(rng, 0.1, 0.45), rand_disc(rng, 0.1, 0.45)
    )
    return CSymbolContext(nome, n)


class TestCEll:
    def test_empty_is_one(self, rng):
        ctx = rand_ctx(rng)
        for kind in "0-+":
            assert c_ell(kind, (), 0.7, ctx) == 1.0

    def test_single_box(self, rng):
        ctx = rand_ctx(rng)
        x = rand_disc(rng, 0.3, 1.5)
        assert relerr(c_ell("0", (1,), x, ctx), theta(x, ctx.nome.p)) < 1e-14

    def test_dual_path_agreement(self, rng):
        for _ in range(60):
            ctx = rand_ctx(rng)
            x = rand_disc(rng, 0.3, 1.5)
            lam = rand_partition(rng, 4, 3)
            for kind in "0-+":
                a = c_ell(kind, lam, x, ctx, method="box")
                b = c_ell(kind, lam, x, ctx, method="closed")
                assert relerr(a, b) < 1e-11

    def test_length_exceeds_ambient(self, rng):
        ctx = rand_ctx(rng, n=2)
        with pytest.raises(DomainError):
            c_ell("0", (1, 1, 1), 0.5, ctx)

    def test_shift_identities(self, rng):
        # p-multiplication of the argument, for partitions and signatures
        for _ in range(60):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            x = rand_disc(rng, 0.3, 1.5)
            lam = (
                rand_partition(rng, 4, 3)
                if _ % 2
                else rand_signature(rng, -3, 3, 3)
            )
            w, nl, nlc = weight(lam), nstat(lam), nstat_conj(lam)
            c0 = c_ell("0", lam, x, ctx)
            cm = c_ell("-", lam, x, ctx)
            cp = c_ell("+", lam, x, ctx)
            assert relerr(
                c_ell("0", lam, p * x, ctx), c0 * (-1 / x) ** w * q ** (-nlc) * t**nl
            ) < 1e-10
            assert relerr(
                c_ell("-", lam, p * x, ctx), cm * (-1 / x) ** w * q ** (-nlc) * t ** (-nl)
            ) < 1e-10
            assert relerr(
                c_ell("+", lam, p * x, ctx),
                cp * (-1 / (q * x)) ** w * q ** (-3 * nlc) * t ** (3 * nl),
            ) < 1e-10


class TestCTilde:
    def test_empty_is_one(self):
        assert c_tilde("0", (), 0.4, 0.3, 0.2, 2) == 1.0

    def test_single_box(self):
        assert c_tilde("0", (1,), 0.4, 0.3, 0.2, 1) == pytest.approx(0.6)

    def test_dual_path_agreement(self, rng):
        for _ in range(60):
            q = rand_disc(rng, 0.1, 0.45)
            t = rand_disc(rng, 0.1, 0.45)
            x = rand_disc(rng, 0.3, 1.5)
            lam = rand_partition(rng, 4, 3)
            for kind in "0-+":
                a = c_tilde(kind, lam, x, q, t, 3, method="box")
                b = c_tilde(kind, lam, x, q, t, 3, method="closed")
                assert relerr(a, b) < 1e-12


class TestDSym:
    def test_constant_signature_is_one(self, rng):
        ctx = rand_ctx(rng)
        assert d_sym((2, 2, 2), 0.7, ctx) == 1.0

    def test_finite_on_negative_parts(self, rng):
        ctx = rand_ctx(rng, n=2)
        val = d_sym((0, -2), ctx.nome.q, ctx)
        assert cmath.isfinite(val)

    def test_quotient_of_c_symbols(self, rng):
        # D(x) = C0(t^{n-1} x) / C-(x) on partitions
        for _ in range(40):
            ctx = rand_ctx(rng)
            t = ctx.nome.t
            x = rand_disc(rng, 0.3, 1.5)
            lam = rand_partition(rng, 3, 3)
            want = c_ell("0", lam, t**2 * x, ctx) / c_ell("-", lam, x, ctx)
            assert relerr(d_sym(lam, x, ctx), want) < 1e-11
            want_q = c_tilde("0", lam, t**2 * x, ctx.nome.q, t, 3) / c_tilde(
                "-", lam, x, ctx.nome.q, t, 3
            )
            assert relerr(d_sym(lam, x, ctx, elliptic=False), want_q) < 1e-11


class TestDelta0:
    def test_empty(self, rng):
        ctx = rand_ctx(rng)
        assert delta0((), 0.8, [0.5, 0.6], ctx) == 1.0

    def test_single_box_single_b(self, rng):
        ctx = rand_ctx(rng)
        p, q = ctx.nome.p, ctx.nome.q
        a, b = 0.8, 0.5
        want = theta(b, p) / theta(p * q * a / b, p)
        assert relerr(delta0((1,), a, [b], ctx), want) < 1e-13

    def test_b_shift(self, rng):
        for _ in range(60):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(3)]
            lam = rand_partition(rng, 4, 3)
            w, nl, nlc = weight(lam), nstat(lam), nstat_conj(lam)
            lhs = delta0(lam, a, [p * bs[0]] + bs[1:], ctx)
            rhs = delta0(lam, a, bs, ctx) * (1 / (a * q)) ** w * q ** (-2 * nlc) * t ** (
                2 * nl
            )
            assert relerr(lhs, rhs) < 1e-10

    def test_a_shift(self, rng):
        for _ in range(60):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            r = rng.randint(1, 4)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(r)]
            lam = rand_partition(rng, 4, 3)
            w, nl, nlc = weight(lam), nstat(lam), nstat_conj(lam)
            prod_b = 1.0
            for b in bs:
                prod_b *= b
            lhs = delta0(lam, a / p, bs, ctx)
            rhs = delta0(lam, a, bs, ctx) * (prod_b / (-a * q) ** r) ** w * q ** (
                -r * nlc
            ) * t ** (r * nl)
            assert relerr(lhs, rhs) < 1e-10

    def test_p_ellipticity(self, rng):
        # r even with prod(b) = (apq)^{r/2}: invariant under balanced p-shifts
        for _ in range(30):
            ctx = rand_ctx(rng)
            p, q = ctx.nome.p, ctx.nome.q
            a = rand_disc(rng, 0.5, 1.5)
            b1, b3 = rand_disc(rng, 0.4, 1.2), rand_disc(rng, 0.4, 1.2)
            b2 = a * p * q / b1
            b4 = a * p * q / b3
            lam = rand_partition(rng, 3, 3)
            base = delta0(lam, a, [b1, b2, b3, b4], ctx)
            shifted = delta0(lam, a, [p * b1, b2 / p, b3, b4], ctx)
            assert relerr(base, shifted) < 1e-10


class TestDelta:
    def test_empty(self, rng):
        ctx = rand_ctx(rng)
        assert delta((), 0.8, [0.5], ctx) == 1.0

    def test_univariate_very_well_poised(self, rng):
        for _ in range(40):
            ctx = rand_ctx(rng, n=1)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            r = rng.randint(1, 4)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(r)]
            l = rng.randint(0, 4)
            lhs = delta((l,), a, bs, ctx)
            rhs = (
                theta(a * p * q ** (2 * l), p)
                / theta(a * p, p)
                * theta_poch(a * p, q, p, l)
                * theta_poch(a * p * p * q / t, q, p, l)
                / (theta_poch(q, q, p, l) * theta_poch(t / p, q, p, l))
                * q**l
            )
            for b in bs:
                rhs *= theta_poch(b, q, p, l) / theta_poch(p * q * a / b, q, p, l)
            assert relerr(lhs, rhs) < 1e-11

    def test_b_shift(self, rng):
        for _ in range(40):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(3)]
            lam = rand_partition(rng, 4, 3)
            w, nl, nlc = weight(lam), nstat(lam), nstat_conj(lam)
            lhs = delta(lam, a, [p * bs[0]] + bs[1:], ctx)
            rhs = delta(lam, a, bs, ctx) * (1 / (a * q)) ** w * q ** (-2 * nlc) * t ** (
                2 * nl
            )
            assert relerr(lhs, rhs) < 1e-10

    def test_a_shift(self, rng):
        for _ in range(40):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            r = rng.randint(1, 4)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(r)]
            lam = rand_partition(rng, 4, 3)
            w, nl, nlc = weight(lam), nstat(lam), nstat_conj(lam)
            prod_b = 1.0
            for b in bs:
                prod_b *= b
            lhs = delta(lam, a / p, bs, ctx)
            rhs = delta(lam, a, bs, ctx) * (
                (p * q / t) * prod_b / (-a * q) ** (r - 2)
            ) ** w * q ** ((2 - r) * nlc) * t ** ((r - 2) * nl)
            assert relerr(lhs, rhs) < 1e-10

    def test_p_ellipticity(self, rng):
        # balancing pq*prod(b) = t*(apq)^k: invariant under balanced p-shifts
        for _ in range(30):
            ctx = rand_ctx(rng)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            a = rand_disc(rng, 0.5, 1.5)
            k = 2
            b1, b2, b3 = (rand_disc(rng, 0.4, 1.2) for _ in range(3))
            b4 = t * (a * p * q) ** k / (p * q * b1 * b2 * b3)
            lam = rand_partition(rng, 3, 3)
            base = delta(lam, a, [b1, b2, b3, b4], ctx)
            shifted = delta(lam, a, [p * b1, b2 / p, b3, b4], ctx)
            assert relerr(base, shifted) < 1e-10


class TestComplementIdentity:
    def test_box_complement(self, rng):
        for _ in range(20):
            ctx = rand_ctx(rng, n=3)
            p, q, t = ctx.nome.p, ctx.nome.q, ctx.nome.t
            x = rand_disc(rng, 0.4, 1.3)
            N, n = 2, 3
            full = c_ell("0", (N,) * n, x, ctx)
            for mu in subpartitions(N, n):
                comp = complement(mu, N, n)
                lhs = c_ell("0", mu, x, ctx) * c_ell(
                    "0", comp, p * q ** (1 - N) * t ** (n - 1) / x, ctx
                )
                assert relerr(lhs, full) < 1e-10


class TestDeltaTilde:
    def test_empty(self):
        assert delta_tilde((), 2, 0.8, 0.3, 0.25) == 1.0

    def test_univariate_display(self, rng):
        for _ in range(40):
            q = rand_disc(rng, 0.1, 0.45)
            a = rand_disc(rng, 0.5, 1.5)
            l = rng.randint(0, 5)
            lhs = delta_tilde((l,), 1, a, q, 0.77)
            rhs = (
                (1 - a * q ** (2 * l))
                / (1 - a)
                * qpoch_fin(a, q, l)
                / qpoch_fin(q, q, l)
                * (-1 / (a * a * q * q)) ** l
                * q ** (-3 * (l * (l - 1) // 2))
            )
            assert relerr(lhs, rhs) < 1e-12

    def test_too_long_vanishes(self):
        assert delta_tilde((1, 1, 1), 2, 0.8, 0.3, 0.25) == 0.0


class TestLogVariants:
    def test_log_matches_plain(self, rng):
        for _ in range(30):
            ctx = rand_ctx(rng)
            x = rand_disc(rng, 0.4, 1.3)
            a = rand_disc(rng, 0.5, 1.5)
            bs = [rand_disc(rng, 0.4, 1.2) for _ in range(2)]
            lam = rand_partition(rng, 3, 3)
            for kind in "0-+":
                assert relerr(
                    cmath.exp(log_c_ell(kind, lam, x, ctx)), c_ell(kind, lam, x, ctx)
                ) < 1e-11
            assert relerr(
                cmath.exp(log_delta0(lam, a, bs, ctx)), delta0(lam, a, bs, ctx)
            ) < 1e-11
            assert relerr(
                cmath.exp(log_delta(lam, a, bs, ctx)), delta(lam, a, bs, ctx)
            ) < 1e-10
