"""Multivariate building blocks: the elliptic C-symbols and their q-level
tilde versions, the D-symbols, and the Delta-symbols.

Two evaluation paths are provided for the C-symbols: the product over
Young-diagram boxes (partitions only) and the closed-form products of
(theta) Pochhammer symbols, which extend the definition to arbitrary
weakly decreasing integer signatures via the reciprocal convention for
negative indices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .partitions import (
    conjugate,
    double_square,
    is_partition,
    is_signature,
    normalize,
    nstat,
    nstat_conj,
    weight,
)
from .qsymbols import (
    DEFAULT_POLICY,
    Nome,
    log_theta_poch,
    qpoch_fin,
    theta,
    theta_poch,
)

__all__ = [
    "CSymbolContext",
    "c_ell",
    "c_tilde",
    "d_sym",
    "delta0",
    "delta",
    "delta_tilde",
    "log_c_ell",
    "log_delta0",
    "log_delta",
]

_KINDS = ("0", "-", "+")


@dataclass(frozen=True)
class CSymbolContext:
    nome: Nome
    ambient_n: int
    policy: "object" = DEFAULT_POLICY

    def __post_init__(self):
        if self.ambient_n < 0:
            raise DomainError("ambient_n must be nonnegative")


def _padded(lam, n):
    lam = tuple(int(part) for part in lam)
    if len(lam) > n:
        raise DomainError(f"signature {lam} longer than ambient_n={n}")
    lam = lam + (0,) * (n - len(lam))
    if not is_signature(lam):
        raise DomainError(f"{lam} is not weakly decreasing at ambient length {n}")
    return lam


def _box_product(kind, lam, factor, q, t):
    """Product over the boxes of a partition; ``factor`` maps the box
    monomial (without x) times x to a scalar."""
    lam = normalize(lam)
    if not is_partition(lam):
        raise DomainError("box-product path requires a partition")
    conj = conjugate(lam)
    prod = 1.0 + 0j
    for i, part in enumerate(lam, start=1):
        for j in range(1, part + 1):
            if kind == "0":
                mono = q ** (j - 1) * t ** (1 - i)
            elif kind == "-":
                mono = q ** (lam[i - 1] - j) * t ** (conj[j - 1] - i)
            else:
                mono = q ** (lam[i - 1] + j - 1) * t ** (2 - conj[j - 1] - i)
            prod *= factor(mono)
    return prod


def _closed_form(kind, lam, x, q, t, n, poch):
    """Closed-form products valid for any signature; ``poch(y, m)`` is the
    finite Pochhammer of the appropriate (elliptic or q-level) flavor."""
    lam = _padded(lam, n)
    prod = 1.0 + 0j
    if kind == "0":
        for i in range(1, n + 1):
            prod *= poch(t ** (1 - i) * x, lam[i - 1])
        return prod
    if kind == "-":
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                m = lam[i - 1] - lam[j - 1]
                prod *= poch(t ** (j - 1 - i) * x, m) / poch(t ** (j - i) * x, m)
            prod *= poch(t ** (n - i) * x, lam[i - 1])
        return prod
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            m = lam[i - 1] + lam[j - 1]
            prod *= poch(t ** (2 - j - i) * x, m) / poch(t ** (3 - j - i) * x, m)
        prod *= poch(t ** (2 - 2 * i) * x, 2 * lam[i - 1]) / poch(
            t ** (2 - n - i) * x, lam[i - 1]
        )
    return prod


def _closed_form_log(kind, lam, x, q, t, n, logpoch):
    """Additive mirror of :func:`_closed_form`; ``logpoch(y, m)`` returns
    the log of the finite Pochhammer factor."""
    lam = _padded(lam, n)
    total = 0.0 + 0j
    if kind == "0":
        for i in range(1, n + 1):
            total += logpoch(t ** (1 - i) * x, lam[i - 1])
        return total
    if kind == "-":
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                m = lam[i - 1] - lam[j - 1]
                total += logpoch(t ** (j - 1 - i) * x, m) - logpoch(t ** (j - i) * x, m)
            total += logpoch(t ** (n - i) * x, lam[i - 1])
        return total
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            m = lam[i - 1] + lam[j - 1]
            total += logpoch(t ** (2 - j - i) * x, m) - logpoch(t ** (3 - j - i) * x, m)
        total += logpoch(t ** (2 - 2 * i) * x, 2 * lam[i - 1]) - logpoch(
            t ** (2 - n - i) * x, lam[i - 1]
        )
    return total


def c_ell(kind, lam, x, ctx: CSymbolContext, method="auto"):
    """Elliptic C-symbol C^kind_lambda(x; q,t; p).

    ``method``: "box" (partitions only), "closed" (any signature), or
    "auto" (box for partitions, closed otherwise).
    """
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}")
    _padded(lam, ctx.ambient_n)
    nome = ctx.nome
    p, q, t = nome.p, nome.q, nome.t
    pol = ctx.policy
    if method == "auto":
        method = "box" if is_partition(tuple(lam)) else "closed"
    if method == "box":
        return _box_product(kind, lam, lambda mono: theta(mono * x, p, pol), q, t)
    if method == "closed":
        return _closed_form(
            kind, lam, x, q, t, ctx.ambient_n,
            lambda y, m: theta_poch(y, q, p, m, pol),
        )
    raise DomainError(f"unknown method {method!r}")


def c_tilde(kind, lam, x, q, t, ambient_n, method="auto"):
    """q-level C-symbol with factors (1 - .) in place of theta(.)."""
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}")
    _padded(lam, ambient_n)
    if method == "auto":
        method = "box" if is_partition(tuple(lam)) else "closed"
    if method == "box":
        return _box_product(kind, lam, lambda mono: 1.0 - mono * x, q, t)
    if method == "closed":
        return _closed_form(
            kind, lam, x, q, t, ambient_n, lambda y, m: qpoch_fin(y, q, m)
        )
    raise DomainError(f"unknown method {method!r}")


def d_sym(lam, x, ctx: CSymbolContext, elliptic=True):
    """D-symbol D_lambda(x) = prod_{i<j} poch(t^{j-i}x)_{l_i-l_j} /
    poch(t^{j-1-i}x)_{l_i-l_j}; finite for every signature since only
    nonnegative indices l_i - l_j occur."""
    nome = ctx.nome
    q, t = nome.q, nome.t
    n = ctx.ambient_n
    lam = _padded(lam, n)
    if elliptic:
        poch = lambda y, m: theta_poch(y, q, nome.p, m, ctx.policy)
    else:
        poch = lambda y, m: qpoch_fin(y, q, m)
    prod = 1.0 + 0j
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            m = lam[i - 1] - lam[j - 1]
            prod *= poch(t ** (j - i) * x, m) / poch(t ** (j - 1 - i) * x, m)
    return prod


def delta0(lam, a, bs, ctx: CSymbolContext):
    """Delta^0_lambda(a | b_1,...,b_r) = prod_s C^0(b_s)/C^0(pq a / b_s)."""
    pq = ctx.nome.p * ctx.nome.q
    prod = 1.0 + 0j
    for b in bs:
        prod *= c_ell("0", lam, b, ctx) / c_ell("0", lam, pq * a / b, ctx)
    return prod


def delta(lam, a, bs, ctx: CSymbolContext):
    """Delta_lambda(a | b_1,...,b_r), the very-well-poised summand."""
    nome = ctx.nome
    pq = nome.p * nome.q
    t = nome.t
    ctx2 = CSymbolContext(nome, 2 * ctx.ambient_n, ctx.policy)
    num = c_ell("0", double_square(_padded(lam, ctx.ambient_n)), pq * a, ctx2)
    den = (
        c_ell("-", lam, pq, ctx)
        * c_ell("-", lam, t, ctx)
        * c_ell("+", lam, a, ctx)
        * c_ell("+", lam, pq * a / t, ctx)
    )
    return delta0(lam, a, bs, ctx) * num / den


def log_c_ell(kind, lam, x, ctx: CSymbolContext):
    """log of the elliptic C-symbol (closed-form path), overflow-safe for
    signatures whose value exceeds double-precision range."""
    if kind not in _KINDS:
        raise DomainError(f"kind must be one of {_KINDS}")
    nome = ctx.nome
    p, q, t = nome.p, nome.q, nome.t
    pol = ctx.policy
    return _closed_form_log(
        kind, lam, x, q, t, ctx.ambient_n,
        lambda y, m: log_theta_poch(y, q, p, m, pol),
    )


def log_delta0(lam, a, bs, ctx: CSymbolContext):
    """log of Delta^0_lambda(a | b_1,...,b_r)."""
    pq = ctx.nome.p * ctx.nome.q
    total = 0.0 + 0j
    for b in bs:
        total += log_c_ell("0", lam, b, ctx) - log_c_ell("0", lam, pq * a / b, ctx)
    return total


def log_delta(lam, a, bs, ctx: CSymbolContext):
    """log of Delta_lambda(a | b_1,...,b_r)."""
    nome = ctx.nome
    pq = nome.p * nome.q
    t = nome.t
    ctx2 = CSymbolContext(nome, 2 * ctx.ambient_n, ctx.policy)
    num = log_c_ell("0", double_square(_padded(lam, ctx.ambient_n)), pq * a, ctx2)
    den = (
        log_c_ell("-", lam, pq, ctx)
        + log_c_ell("-", lam, t, ctx)
        + log_c_ell("+", lam, a, ctx)
        + log_c_ell("+", lam, pq * a / t, ctx)
    )
    return log_delta0(lam, a, bs, ctx) + num - den


def delta_tilde(lam, n, a, q, t):
    """q-level summand Delta~^(n)_lambda(a; q,t).

    Returns 0 when the partition is longer than n, consistent with
    Delta_lambda(a | t^n) vanishing identically in that case.
    """
    lam = tuple(lam)
    if len(normalize(lam)) > n:
        return 0.0 + 0j
    num = c_tilde("0", double_square(_padded(lam, n)), a * q, q, t, 2 * n) * c_tilde(
        "0", lam, t**n, q, t, n
    )
    den = (
        c_tilde("0", lam, a * q / t**n, q, t, n)
        * c_tilde("-", lam, q, q, t, n)
        * c_tilde("-", lam, t, q, t, n)
        * c_tilde("+", lam, a, q, t, n)
        * c_tilde("+", lam, a * q / t, q, t, n)
    )
    k = weight(lam)
    mono = (-1.0 / (a * a * q * q * t ** (n - 1))) ** k * q ** (
        -3 * nstat_conj(lam)
    ) * t ** (5 * nstat(lam))
    return num / den * mono
