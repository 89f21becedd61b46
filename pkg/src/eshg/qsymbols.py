"""Univariate q-symbols: q-Pochhammer symbols, theta functions, theta
Pochhammer symbols, double products and the elliptic gamma function.

All evaluations are double-precision complex with a controlled truncation
of the infinite products: a product is cut at the first factor whose
deviation from 1 is below ``tail_tol``.  With the default bases
(moduli <= 0.5) the omitted tail is bounded by a small multiple of
``tail_tol``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, PoleError, TruncationError

__all__ = [
    "Nome",
    "TruncationPolicy",
    "DEFAULT_POLICY",
    "qpoch_inf",
    "qpoch_fin",
    "theta",
    "theta_poch",
    "double_poch",
    "elliptic_gamma",
    "multiplicative_eval",
    "pm",
    "log_qpoch_inf",
    "log_theta",
    "log_theta_poch",
    "log_double_poch",
    "log_elliptic_gamma",
]

_ZERO_EPS = 1e-280  # denominators below this modulus count as vanished
_POLE_RTOL = 1e-12  # relative proximity to a structural pole that errors


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation control for infinite products.

    tail_tol: bound on the modulus of the first omitted factor's
        deviation from 1.
    max_factors: cap on the number of factors per product axis.
    """

    tail_tol: float = 1e-17
    max_factors: int = 500

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")
        if self.max_factors < 1:
            raise DomainError("max_factors must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class Nome:
    """The bases p, q, t of the elliptic hierarchy."""

    p: complex
    q: complex
    t: complex = 0.0

    def require_pq_in_disc(self):
        if not (0 < abs(self.p) < 1 and 0 < abs(self.q) < 1):
            raise DomainError("need 0 < |p| < 1 and 0 < |q| < 1")


def qpoch_inf(x, q, policy=DEFAULT_POLICY):
    """Infinite q-Pochhammer symbol (x;q) = prod_{r>=0} (1 - x q^r)."""
    if abs(q) >= 1:
        raise DomainError(f"|q| must be < 1 for (x;q), got |q|={abs(q)}")
    prod = 1.0 + 0j
    cur = complex(x)
    mag = abs(x)
    aq = abs(q)
    for _ in range(policy.max_factors):
        if mag < policy.tail_tol:
            return prod
        prod *= 1.0 - cur
        cur *= q
        mag *= aq
    if mag < policy.tail_tol:
        return prod
    raise TruncationError(
        f"(x;q) needed more than {policy.max_factors} factors (|x|={abs(x)}, |q|={aq})"
    )


def qpoch_fin(x, q, m, policy=DEFAULT_POLICY):
    """Finite q-Pochhammer symbol (x;q)_m.

    For m >= 0 this is prod_{r=0}^{m-1}(1 - x q^r); the negative index
    follows the reciprocal convention (x;q)_{-m} = 1/prod_{i=1}^{m}(1 - x q^{-i}).
    """
    m = int(m)
    if m >= 0:
        prod = 1.0 + 0j
        cur = complex(x)
        for _ in range(m):
            prod *= 1.0 - cur
            cur *= q
        return prod
    den = 1.0 + 0j
    cur = complex(x)
    for _ in range(-m):
        cur /= q
        den *= 1.0 - cur
    if abs(den) < _ZERO_EPS:
        raise PoleError(f"(x;q)_{m} has a vanishing denominator factor at x={x}")
    return 1.0 / den


@lru_cache(maxsize=1 << 18)
def _theta_cached(x, p, policy):
    return qpoch_inf(x, p, policy) * qpoch_inf(p / x, p, policy)


def theta(x, p, policy=DEFAULT_POLICY):
    """Theta function theta(x;p) = (x;p)(p/x;p)."""
    if x == 0:
        raise DomainError("theta(x;p) requires x != 0")
    if abs(p) >= 1:
        raise DomainError("theta(x;p) requires |p| < 1")
    return _theta_cached(complex(x), complex(p), policy)


def theta_poch(x, q, p, m, policy=DEFAULT_POLICY):
    """Theta Pochhammer symbol theta(x;q;p)_m.

    For m >= 0 this is prod_{r=0}^{m-1} theta(x q^r;p); negative m uses
    the reciprocal convention theta(x;p)_{-m} = 1/prod_{i=1}^m theta(x q^{-i};p).
    """
    m = int(m)
    if q == 0:
        raise DomainError("theta_poch requires q != 0")
    if m >= 0:
        prod = 1.0 + 0j
        cur = complex(x)
        for _ in range(m):
            prod *= theta(cur, p, policy)
            cur *= q
        return prod
    den = 1.0 + 0j
    cur = complex(x)
    for _ in range(-m):
        cur /= q
        den *= theta(cur, p, policy)
    if abs(den) < _ZERO_EPS:
        raise PoleError(f"theta(x;q;p)_{m} has a vanishing denominator theta factor")
    return 1.0 / den


def double_poch(x, nome, policy=DEFAULT_POLICY):
    """Double infinite product (x;p,q) = prod_{r,s>=0} (1 - x p^r q^s)."""
    p, q = nome.p, nome.q
    if abs(p) >= 1 or abs(q) >= 1:
        raise DomainError("(x;p,q) requires |p| < 1 and |q| < 1")
    prod = 1.0 + 0j
    cur = complex(x)
    mag = abs(x)
    ap = abs(p)
    for _ in range(policy.max_factors):
        if mag < policy.tail_tol:
            return prod
        prod *= qpoch_inf(cur, q, policy)
        cur *= p
        mag *= ap
    if mag < policy.tail_tol:
        return prod
    raise TruncationError(
        f"(x;p,q) needed more than {policy.max_factors} p-factors (|x|={abs(x)})"
    )


def _check_gamma_pole(x, p, q):
    """Raise PoleError when x is within relative tolerance of p^{-i}q^{-j}."""
    ax = abs(x)
    if ax < 0.5:
        return
    ap, aq = abs(p), abs(q)
    cur_p = complex(x)
    mag = ax
    while mag > 0.5:
        cur = cur_p
        m = mag
        while m > 0.5:
            if abs(cur - 1.0) < _POLE_RTOL:
                raise PoleError(f"elliptic gamma pole: x={x} within 1e-12 of p^-i q^-j")
            cur *= q
            m *= aq
        cur_p *= p
        mag *= ap


def elliptic_gamma(x, nome, policy=DEFAULT_POLICY):
    """Elliptic gamma function
    Gamma(x;p,q) = prod_{i,j>=0} (1 - p^{i+1}q^{j+1}/x) / (1 - p^i q^j x).
    """
    if x == 0:
        raise DomainError("elliptic gamma requires x != 0")
    p, q = nome.p, nome.q
    if abs(p) >= 1 or abs(q) >= 1:
        raise DomainError("elliptic gamma requires |p| < 1 and |q| < 1")
    _check_gamma_pole(x, p, q)
    return double_poch(p * q / x, nome, policy) / double_poch(x, nome, policy)


@dataclass(frozen=True)
class pm:
    """A factor specification base * prod_i y_i^{±1} for multiplicative_eval."""

    base: complex
    plus_minus: tuple

    def expand(self):
        args = [complex(self.base)]
        for y in self.plus_minus:
            args = [a * y for a in args] + [a / y for a in args]
        return args


def multiplicative_eval(symbol, args):
    """Product of ``symbol`` over a list of factor specifications.

    Each element of ``args`` is either a plain complex argument or a
    :class:`pm` specification; a spec with two ± markers expands into
    four arguments.
    """
    prod = 1.0 + 0j
    for a in args:
        if isinstance(a, pm):
            for z in a.expand():
                prod *= symbol(z)
        else:
            prod *= symbol(a)
    return prod


# ---------------------------------------------------------------------------
# Logarithmic variants.  These return log of the symbol (principal-ish
# branch, only meaningful modulo 2*pi*i) and tolerate arguments of huge
# modulus, where the plain products would overflow.  A vanishing factor
# maps to -inf, which exponentiates back to 0.
# ---------------------------------------------------------------------------


def _log1f(z):
    """log(1 - z) without overflow for large |z|."""
    if z == 1.0:
        return complex("-inf")
    if abs(z) > 1e100:
        return cmath.log(-z)
    return cmath.log(1.0 - z)


def log_qpoch_inf(x, q, policy=DEFAULT_POLICY):
    if abs(q) >= 1:
        raise DomainError("log (x;q) requires |q| < 1")
    total = 0.0 + 0j
    cur = complex(x)
    mag = abs(x)
    aq = abs(q)
    for _ in range(policy.max_factors):
        if mag < policy.tail_tol:
            return total
        total += _log1f(cur)
        cur *= q
        mag *= aq
    if mag < policy.tail_tol:
        return total
    raise TruncationError("log (x;q) exceeded max_factors")


def log_theta(x, p, policy=DEFAULT_POLICY):
    return log_qpoch_inf(x, p, policy) + log_qpoch_inf(p / x, p, policy)


def log_theta_poch(x, q, p, m, policy=DEFAULT_POLICY):
    m = int(m)
    total = 0.0 + 0j
    if m >= 0:
        cur = complex(x)
        for _ in range(m):
            total += log_theta(cur, p, policy)
            cur *= q
        return total
    cur = complex(x)
    for _ in range(-m):
        cur /= q
        total -= log_theta(cur, p, policy)
    return total


def log_double_poch(x, nome, policy=DEFAULT_POLICY):
    p = nome.p
    total = 0.0 + 0j
    cur = complex(x)
    mag = abs(x)
    ap = abs(p)
    for _ in range(policy.max_factors):
        if mag < policy.tail_tol:
            return total
        total += log_qpoch_inf(cur, nome.q, policy)
        cur *= p
        mag *= ap
    if mag < policy.tail_tol:
        return total
    raise TruncationError("log (x;p,q) exceeded max_factors")


def log_elliptic_gamma(x, nome, policy=DEFAULT_POLICY):
    if x == 0:
        raise DomainError("log elliptic gamma requires x != 0")
    _check_gamma_pole(x, nome.p, nome.q)
    return log_double_poch(nome.p * nome.q / x, nome, policy) - log_double_poch(
        x, nome, policy
    )
