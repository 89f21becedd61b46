"""The finitely supported bilinear form on partitions inside an N^n box,
its higher-m generalization, and the closed-form q-level limit weights.

The elliptic weight w_mu is a quotient of Delta-symbols subject to two
balancing conditions.  Substituting t_r -> t_r p^{alpha_r} and letting
p -> 0 produces q-level weights whose closed forms split into branches
according to the position of alpha in its fundamental domain; those
closed forms are implemented here, the alpha-vector combinatorics
(fundamental domains, valuation brackets, vanishing cases) live in
:mod:`eshg.classifier`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .csymbols import CSymbolContext, c_tilde, delta, delta0
from .errors import BalancingError, DomainError, HypothesisError
from .partitions import (
    double_square,
    is_partition,
    nstat,
    nstat_conj,
    subpartitions,
    weight,
)
from .qsymbols import DEFAULT_POLICY, Nome

__all__ = [
    "DiscreteParams",
    "HigherMParams",
    "discrete_weight",
    "discrete_bilinear",
    "limit_weight",
    "higher_m_weight",
    "higher_m_limit_weight",
    "shift_alpha_params",
]

_BAL_TOL = 1e-12
_SNAP = 1e-9


def _check_balanced(got, want, label):
    if abs(got - want) > _BAL_TOL * abs(want):
        raise BalancingError(
            f"balancing violated for {label}: {got} != {want}"
        )


@dataclass(frozen=True)
class DiscreteParams:
    """Parameters of the N^n-supported bilinear form.

    ``p_free=False`` (the default) validates the elliptic balancing
    t^{n-1} t0 t1 = q^{-N} and t^{n-1} t2 t3 u0 u1 = p q^{N+1}.
    ``p_free=True`` marks the parameter set as the p -> 0 limit data,
    where the second condition loses its factor p.
    """

    n: int
    N: int
    nome: Nome
    t0: complex
    t1: complex
    t2: complex
    t3: complex
    u0: complex
    u1: complex

    p_free: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be positive")
        if self.N < 0:
            raise DomainError("N must be nonnegative")
        q, t = self.nome.q, self.nome.t
        _check_balanced(
            t ** (self.n - 1) * self.t0 * self.t1, q ** (-self.N), "t0*t1"
        )
        fac = 1.0 if self.p_free else self.nome.p
        _check_balanced(
            t ** (self.n - 1) * self.t2 * self.t3 * self.u0 * self.u1,
            fac * q ** (self.N + 1),
            "t2*t3*u0*u1",
        )

    @classmethod
    def solve(cls, n, N, nome, t0, t2, t3, u0, p_free=False):
        """Construct parameters by solving the balancing conditions for
        t1 and u1."""
        q, t = nome.q, nome.t
        t1 = q ** (-N) * t ** (1 - n) / t0
        fac = 1.0 if p_free else nome.p
        u1 = fac * q ** (N + 1) * t ** (1 - n) / (t2 * t3 * u0)
        return cls(n, N, nome, t0, t1, t2, t3, u0, u1, p_free=p_free)

    @property
    def ts(self):
        """(t0, t1, t2, t3, t4, t5) with t4 = u0 and t5 = u1."""
        return (self.t0, self.t1, self.t2, self.t3, self.u0, self.u1)


@dataclass(frozen=True)
class HigherMParams:
    """Parameters of the higher-m series: 2m+6 parameters t_r with
    t^{n-1} t0 t1 = q^{-N} and t^{2(n-1)} prod_r t_r = (pq)^{m+1}
    (``p_free=True`` drops the p from the second condition)."""

    n: int
    N: int
    m: int
    nome: Nome
    t: tuple
    p_free: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be positive")
        if self.N < 0:
            raise DomainError("N must be nonnegative")
        if self.m < 0:
            raise DomainError("m must be nonnegative")
        object.__setattr__(self, "t", tuple(complex(v) for v in self.t))
        if len(self.t) != 2 * self.m + 6:
            raise DomainError(
                f"need {2 * self.m + 6} parameters, got {len(self.t)}"
            )
        q, tt = self.nome.q, self.nome.t
        _check_balanced(
            tt ** (self.n - 1) * self.t[0] * self.t[1], q ** (-self.N), "t0*t1"
        )
        prod = 1.0 + 0j
        for v in self.t:
            prod *= v
        fac = 1.0 if self.p_free else self.nome.p ** (self.m + 1)
        _check_balanced(
            tt ** (2 * (self.n - 1)) * prod,
            fac * q ** (self.m + 1),
            "prod t_r",
        )

    @classmethod
    def solve(cls, n, N, m, nome, t0, middle, p_free=False):
        """Construct parameters from t0 and the 2m+3 parameters
        t2..t_{2m+4}, solving the balancing conditions for t1 and the
        final parameter t_{2m+5}."""
        middle = tuple(complex(v) for v in middle)
        if len(middle) != 2 * m + 3:
            raise DomainError(f"need {2 * m + 3} middle parameters")
        q, tt = nome.q, nome.t
        t1 = q ** (-N) * tt ** (1 - n) / t0
        fac = 1.0 if p_free else nome.p ** (m + 1)
        prod = t0 * t1
        for v in middle:
            prod *= v
        last = fac * q ** (m + 1) * tt ** (2 * (1 - n)) / prod
        return cls(n, N, m, nome, (t0, t1) + middle + (last,), p_free=p_free)


def _require_in_box(mu, N, n):
    mu = tuple(int(v) for v in mu)
    mu = mu + (0,) * (n - len(mu))
    if len(mu) > n or not is_partition(mu) or (mu and mu[0] > N):
        raise DomainError(f"mu={mu} is not contained in the {N}^{n} box")
    return mu


@lru_cache(maxsize=256)
def _weight_denominator(params: DiscreteParams):
    """The mu-independent normalizing Delta^0_{N^n} of the weight."""
    nome = params.nome
    n, N = params.n, params.N
    t, pq = nome.t, nome.p * nome.q
    t1, u0 = params.t1, params.u0
    ctx = CSymbolContext(nome, n)
    return delta0(
        (N,) * n,
        t ** (n - 1) * t1 / u0,
        [t1 / params.t0, pq / (u0 * params.t2), pq / (u0 * params.t3),
         pq / (u0 * params.u1)],
        ctx,
    )


def discrete_weight(mu, params: DiscreteParams):
    """The elliptic weight w_mu: a Delta-symbol quotient supported on
    partitions inside the N^n box."""
    if params.p_free:
        raise DomainError("discrete_weight needs elliptic (p-dependent) parameters")
    mu = _require_in_box(mu, params.N, params.n)
    nome = params.nome
    n = params.n
    t = nome.t
    t0 = params.t0
    ctx = CSymbolContext(nome, n)
    num = delta(
        mu,
        t ** (2 * (n - 1)) * t0 ** 2,
        [t ** n] + [t ** (n - 1) * t0 * tr for tr in params.ts[1:]],
        ctx,
    )
    return num / _weight_denominator(params)


def support_point(mu, params):
    """The evaluation point (t0 t^{n-i} q^{mu_i})_{i=1..n} of the form."""
    nome = params.nome
    n = params.n
    mu = _require_in_box(mu, params.N, n)
    t0 = params.t[0] if isinstance(params, HigherMParams) else params.t0
    return tuple(
        t0 * nome.t ** (n - i) * nome.q ** mu[i - 1] for i in range(1, n + 1)
    )


def discrete_bilinear(f, g, params: DiscreteParams):
    """<f, g> = sum_{mu in N^n box} f(z_mu) g(z_mu) w_mu, with z_mu the
    support point of mu."""
    total = 0.0 + 0j
    for mu in subpartitions(params.N, params.n):
        z = support_point(mu, params)
        total += complex(f(z)) * complex(g(z)) * discrete_weight(mu, params)
    return total


def shift_alpha_params(params, alpha, p):
    """The elliptic parameter set (t_r p^{alpha_r}) at nome p built from a
    p-free limit parameter set and an admissible alpha-vector."""
    if not params.p_free:
        raise DomainError("shift_alpha_params starts from p-free parameters")
    nome = Nome(p, params.nome.q, params.nome.t)
    if isinstance(params, HigherMParams):
        shifted = tuple(
            tr * p ** ar for tr, ar in zip(params.t, alpha)
        )
        return HigherMParams(params.n, params.N, params.m, nome, shifted)
    shifted = [tr * p ** ar for tr, ar in zip(params.ts, alpha)]
    return DiscreteParams(params.n, params.N, nome, *shifted)


# ---------------------------------------------------------------------------
# q-level limit weights
# ---------------------------------------------------------------------------


def _near(x, y):
    return abs(x - y) <= _SNAP


def _check_limit_hypotheses(alpha):
    """The admissibility conditions for the m=0 q-level weights."""
    if len(alpha) != 6:
        raise HypothesisError("need a 6-component exponent vector")
    a0 = alpha[0]
    rest = alpha[2:]
    if not (-0.5 - _SNAP <= a0 <= _SNAP):
        raise HypothesisError("need -1/2 <= alpha_0 <= 0")
    if not _near(alpha[1], -a0):
        raise HypothesisError("need alpha_1 = -alpha_0")
    for ar in rest:
        if not (a0 - _SNAP <= ar <= a0 + 1 + _SNAP):
            raise HypothesisError("need alpha_0 <= alpha_r <= alpha_0 + 1")
    for i in range(4):
        for j in range(i + 1, 4):
            if rest[i] + rest[j] > 1 + _SNAP:
                raise HypothesisError("need alpha_r + alpha_s <= 1")
    if not _near(sum(rest), 1.0):
        raise HypothesisError("need alpha_2+alpha_3+alpha_4+alpha_5 = 1")
    neg = sum(a0 + ar for ar in rest if a0 + ar < -_SNAP)
    if not _near(neg, 2 * a0):
        raise HypothesisError(
            "need sum of negative alpha_0+alpha_r to equal 2 alpha_0"
        )


def limit_weight(mu, alpha, params: DiscreteParams):
    """The q-level weight: the p -> 0 leading coefficient of w_mu with
    t_r p^{alpha_r} substituted, in closed form per alpha_0 branch."""
    if not params.p_free:
        raise DomainError("limit_weight needs p-free parameters")
    _check_limit_hypotheses(alpha)
    n, N = params.n, params.N
    mu = _require_in_box(mu, N, n)
    q, t = params.nome.q, params.nome.t
    t0, t1 = params.t0, params.t1
    trs = params.ts[2:]
    ars = tuple(alpha[2:])
    a0 = alpha[0]
    Nn = (N,) * n
    w = weight(mu)
    nl = nstat(mu)
    nlc = nstat_conj(mu)

    def c0mu(x):
        return c_tilde("0", mu, x, q, t, n)

    def c0Nn(x):
        return c_tilde("0", Nn, x, q, t, n)

    pair_factor = 1.0 + 0j
    for i in range(4):
        for j in range(i + 1, 4):
            if _near(ars[i] + ars[j], 1.0):
                pair_factor /= c0Nn(q / (trs[i] * trs[j]))

    if _near(a0, 0.0):
        out = (
            c_tilde("0", double_square(mu), q * t ** (2 * (n - 1)) * t0 ** 2,
                    q, t, 2 * n)
            * c0mu(t ** n) * c0mu(q ** (-N))
            * (1.0 / (q * t ** (4 * (n - 1)) * t0 ** 3 * t1)) ** w
            * q ** (-2 * nlc) * t ** (4 * nl)
            / (
                c0mu(q * t ** (n - 2) * t0 ** 2)
                * c0mu(q * t ** (n - 1) * t0 / t1)
                * c_tilde("-", mu, q, q, t, n)
                * c_tilde("-", mu, t, q, t, n)
                * c_tilde("+", mu, t ** (2 * (n - 1)) * t0 ** 2, q, t, n)
                * c_tilde("+", mu, q * t ** (2 * n - 3) * t0 ** 2, q, t, n)
                * c0Nn(t1 / t0)
            )
        )
        for tr, ar in zip(trs, ars):
            if _near(ar, 0.0):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    * c0Nn(t ** (n - 1) * t1 * tr)
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                    * (-q * t ** (n - 1) * t0 / tr) ** w
                    * q ** nlc * t ** (-nl)
                )
            elif _near(ar, 1.0):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    * c0Nn(q ** (1 - N) / (t1 * tr))
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                    * (-t ** (n - 1) * t0 * tr) ** (-w)
                    * q ** (-nlc) * t ** nl
                )
        return out * pair_factor

    if _near(a0, -0.5):
        out = (
            c_tilde("0", double_square(mu), q * t ** (2 * (n - 1)) * t0 ** 2,
                    q, t, 2 * n)
            * c0mu(t ** n) * c0mu(q ** (-N))
            * (q * t0 / t1) ** w * q ** (2 * nlc)
            / (
                c0mu(q * t ** (n - 2) * t0 ** 2)
                * c0mu(q * t ** (n - 1) * t0 / t1)
                * c_tilde("-", mu, q, q, t, n)
                * c_tilde("-", mu, t, q, t, n)
                * c_tilde("+", mu, t ** (2 * (n - 1)) * t0 ** 2, q, t, n)
                * c_tilde("+", mu, q * t ** (2 * n - 3) * t0 ** 2, q, t, n)
                * c0Nn(q ** (1 - N) * t ** (n - 1) * t0 / t1)
            )
        )
        for tr, ar in zip(trs, ars):
            if _near(ar, -0.5):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    * c0Nn(t ** (n - 1) * t1 * tr)
                    * (-q * t ** (n - 1) * t0 / tr) ** w
                    * q ** nlc * t ** (-nl)
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                )
            elif _near(ar, 0.5):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    * c0Nn(q ** (1 - N) / (t1 * tr))
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                    * (-t ** (n - 1) * t0 * tr) ** (-w)
                    * q ** (-nlc) * t ** nl
                )
        return out * pair_factor

    # -1/2 < alpha_0 < 0
    out = (
        c0mu(t ** n) * c0mu(q ** (-N))
        * (t0 ** 2 * t ** (2 * (n - 1))) ** (-w)
        * q ** (-2 * nlc) * t ** (4 * nl)
        / (c_tilde("-", mu, q, q, t, n) * c_tilde("-", mu, t, q, t, n))
    )
    for tr, ar in zip(trs, ars):
        if _near(ar, a0):
            out *= (
                (q * t ** (2 * (n - 1)) * t0 ** 2) ** w
                * q ** (2 * nlc) * t ** (-2 * nl)
                / c0mu(q * t ** (n - 1) * t0 / tr)
                * c0Nn(t ** (n - 1) * t1 * tr)
            )
        elif _near(ar, -a0):
            out *= c0mu(t ** (n - 1) * t0 * tr)
        elif _near(ar, 1 + a0):
            out *= c0Nn(q * t ** (n - 1) * t0 / tr) / c0mu(
                q * t ** (n - 1) * t0 / tr
            )
        elif a0 < ar < -a0:
            out *= (-(t ** (n - 1)) * t0 * tr) ** w * q ** nlc * t ** (-nl)
    return out * pair_factor


def higher_m_weight(mu, params: HigherMParams):
    """The higher-m elliptic summand: a single Delta-symbol (no
    normalizing quotient)."""
    if params.p_free:
        raise DomainError("higher_m_weight needs elliptic (p-dependent) parameters")
    mu = _require_in_box(mu, params.N, params.n)
    nome = params.nome
    n = params.n
    t = nome.t
    t0 = params.t[0]
    ctx = CSymbolContext(nome, n)
    return delta(
        mu,
        t ** (2 * (n - 1)) * t0 ** 2,
        [t ** n] + [t ** (n - 1) * t0 * tr for tr in params.t[1:]],
        ctx,
    )


def higher_m_limit_weight(mu, alpha, params: HigherMParams):
    """Leading coefficient of the higher-m summand with t_r p^{alpha_r}
    substituted, in closed form per branch.

    The caller is responsible for checking the vanishing-case list
    before summing these over mu (see :mod:`eshg.classifier`)."""
    if not params.p_free:
        raise DomainError("higher_m_limit_weight needs p-free parameters")
    n, N, m = params.n, params.N, params.m
    if len(alpha) != 2 * m + 6:
        raise HypothesisError(f"need a {2 * m + 6}-component exponent vector")
    mu = _require_in_box(mu, N, n)
    q, t = params.nome.q, params.nome.t
    t0 = params.t[0]
    trs = params.t[2:]
    ars = tuple(alpha[2:])
    a0 = alpha[0]
    if not (-0.5 - _SNAP <= a0 <= _SNAP) or not _near(alpha[1], -a0):
        raise HypothesisError("alpha not in the fundamental domain")
    w = weight(mu)
    nl = nstat(mu)
    nlc = nstat_conj(mu)
    A = sum(1 for ar in ars if ar < -a0 - _SNAP)
    B = sum(1 for ar in ars if ar > 1 + a0 + _SNAP)

    def c0mu(x):
        return c_tilde("0", mu, x, q, t, n)

    def big_q():
        return (
            c_tilde("0", double_square(mu), q * t ** (2 * (n - 1)) * t0 ** 2,
                    q, t, 2 * n)
            * c0mu(t ** n) * c0mu(q ** (-N))
            / (
                c0mu(q * t ** (n - 2) * t0 ** 2)
                * c0mu(q ** (N + 1) * t ** (2 * (n - 1)) * t0 ** 2)
                * c_tilde("-", mu, q, q, t, n)
                * c_tilde("-", mu, t, q, t, n)
                * c_tilde("+", mu, t ** (2 * (n - 1)) * t0 ** 2, q, t, n)
                * c_tilde("+", mu, q * t ** (2 * n - 3) * t0 ** 2, q, t, n)
            )
        )

    if _near(a0, 0.0):
        out = (
            big_q()
            * (q ** (N - 1) * t ** (-3 * (n - 1)) * t0 ** (-2)) ** w
            * q ** (-2 * nlc) * t ** (4 * nl)
            * (
                (q * t ** (2 * (n - 1)) * t0 ** 2) ** w
                * q ** (2 * nlc) * t ** (-2 * nl)
            ) ** (A - B)
        )
        for tr, ar in zip(trs, ars):
            if _near(ar, 0.0):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                    * (-q * t ** (n - 1) * t0 / tr) ** w
                    * q ** nlc * t ** (-nl)
                )
            elif _near(ar, 1.0):
                out *= (
                    c0mu(t ** (n - 1) * t0 * tr)
                    / c0mu(q * t ** (n - 1) * t0 / tr)
                    * (-1.0 / (t ** (n - 1) * t0 * tr)) ** w
                    * q ** (-nlc) * t ** nl
                )
        return out

    base = c0mu(t ** n) * c0mu(q ** (-N)) / (
        c_tilde("-", mu, q, q, t, n) * c_tilde("-", mu, t, q, t, n)
    )

    a2 = min(ars)
    if _near(a0, -0.5):
        if _near(a2, -0.5):
            out = big_q() * q ** w * t ** (2 * nl)
            for tr in trs:
                out *= c0mu(t ** (n - 1) * t0 * tr) / c0mu(
                    q * t ** (n - 1) * t0 / tr
                )
            return out
        out = (
            big_q()
            * q ** (-B * w)
            * (-(t ** (n - 1)) * t0) ** ((A - B - 2) * w)
            * q ** ((A - B - 2) * nlc)
            * t ** ((B + 4 - A) * nl)
        )
        z = 1.0 + 0j
        for tr, ar in zip(trs, ars):
            if _near(ar, 0.5):
                out *= c0mu(t ** (n - 1) * t0 * tr) / c0mu(
                    q * t ** (n - 1) * t0 / tr
                )
            else:
                z *= tr
        return out * z ** w

    # -1/2 < alpha_0 < 0
    if a2 <= a0 + _SNAP:
        out = base * t ** (2 * nl) * q ** w
        i2 = ars.index(a2)
        if _near(a2, a0):
            out /= c0mu(q * t ** (n - 1) * t0 / trs[i2])
        for i, (tr, ar) in enumerate(zip(trs, ars)):
            if i == i2:
                continue
            if _near(ar, -a0):
                out *= c0mu(t ** (n - 1) * t0 * tr)
            elif _near(ar, 1 + a0):
                out /= c0mu(q * t ** (n - 1) * t0 / tr)
        return out
    out = (
        base
        * (-(t ** (n - 1)) * t0) ** ((A - B - 2) * w)
        * q ** (-B * w)
        * q ** ((A - B - 2) * nlc)
        * t ** ((B - A + 4) * nl)
    )
    z = 1.0 + 0j
    for tr, ar in zip(trs, ars):
        if _near(ar, -a0):
            out *= c0mu(t ** (n - 1) * t0 * tr)
        elif _near(ar, 1 + a0):
            out /= c0mu(q * t ** (n - 1) * t0 / tr)
        if ar < -a0 - _SNAP or ar > 1 + a0 + _SNAP:
            z *= tr
    return out * z ** w
