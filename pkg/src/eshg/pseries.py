"""The p -> 0 calculus: closed-form valuations and leading coefficients
of theta symbols, C-symbols and Delta_lambda(a p^alpha | t^n), together
with sample-and-fit estimators that recover val and lc numerically.

The closed forms are exact piecewise expressions in the exponent alpha;
inputs within 1e-9 of an integer snap to the integer branch.  The
estimators exist as an independent cross-check: they see only a black-box
evaluator of p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csymbols import CSymbolContext, c_tilde, delta_tilde
from .errors import ConvergenceError, DomainError
from .partitions import normalize, nstat, nstat_conj, weight
from .qsymbols import Nome

__all__ = [
    "ValLc",
    "SNAP_TOL",
    "val_lc_theta",
    "val_lc_c",
    "val_lc_delta_tn",
    "estimate_valuation",
    "estimate_lc",
]

SNAP_TOL = 1e-9


@dataclass(frozen=True)
class ValLc:
    valuation: float
    lc_value: complex


def snap_floor(alpha, tol=SNAP_TOL):
    """floor(alpha) with inputs within tol of an integer snapped first."""
    r = round(alpha)
    if abs(alpha - r) < tol:
        return int(r)
    return int(math.floor(alpha))


def is_near_integer(alpha, tol=SNAP_TOL):
    return abs(alpha - round(alpha)) < tol


def theta_valuation(alpha):
    """val(theta(x p^alpha; p)) = {a}({a}-1)/2 - a(a-1)/2."""
    if is_near_integer(alpha):
        alpha = round(alpha)
    frac = alpha - math.floor(alpha)
    return 0.5 * frac * (frac - 1.0) - 0.5 * alpha * (alpha - 1.0)


def val_lc_theta(x, alpha, p_free_nome: Nome | None = None) -> ValLc:
    """Valuation and leading coefficient of theta(x p^alpha; p)."""
    if x == 0:
        raise DomainError("val_lc_theta requires x != 0")
    val = theta_valuation(alpha)
    if is_near_integer(alpha):
        k = int(round(alpha))
        lc = (1.0 - x) * (-1.0 / x) ** k
    else:
        lc = (-1.0 / x) ** math.floor(alpha)
    return ValLc(val, lc)


def val_lc_c(kind, lam, x, alpha, ctx: CSymbolContext) -> ValLc:
    """Valuation and leading coefficient of C^kind_lambda(x p^alpha).

    The exponent is reduced to [0,1) by the integer p-shift identities of
    the C-symbols; within the reduced window val is |lambda| times the
    theta valuation and lc is the tilde symbol (alpha = 0) or 1.
    """
    lam = tuple(lam)
    w = weight(lam)
    nl = nstat(lam)
    nlc = nstat_conj(lam)
    q, t = ctx.nome.q, ctx.nome.t
    k = snap_floor(alpha)
    a2 = alpha - k  # in [0, 1)
    val = w * theta_valuation(alpha)
    if is_near_integer(a2):
        base = c_tilde(kind, lam, x, q, t, ctx.ambient_n)
    else:
        base = 1.0 + 0j
    if kind == "0":
        shift = (-1.0 / x) ** (k * w) * q ** (-k * nlc) * t ** (k * nl)
    elif kind == "-":
        shift = (-1.0 / x) ** (k * w) * q ** (-k * nlc) * t ** (-k * nl)
    elif kind == "+":
        shift = (-1.0 / (q * x)) ** (k * w) * q ** (-3 * k * nlc) * t ** (3 * k * nl)
    else:
        raise DomainError(f"unknown kind {kind!r}")
    return ValLc(val, shift * base)


def val_lc_delta_tn(lam, a, alpha, n, q, t) -> ValLc:
    """Valuation and leading coefficient of Delta_lambda(a p^alpha | t^n)."""
    lam = tuple(lam)
    if len(normalize(lam)) > n:
        raise DomainError("signature longer than n")
    w = weight(lam)
    nl = nstat(lam)
    nlc = nstat_conj(lam)
    k = snap_floor(alpha)
    a2 = alpha - k
    if is_near_integer(a2):
        a2 = 0.0
    # Peel integer p-shifts off the first argument, tracking the p-power
    # they contribute (vex) and the p-free monomial (lcf) separately.
    vex = 0.0
    lcf = 1.0 + 0j
    if k > 0:
        for i in range(k):
            vex += -(a2 + i + 2) * w
            lcf *= (-a * q * q * t ** (n - 1)) ** (-w) * q ** (-nlc) * t**nl
    else:
        for i in range(0, k, -1):
            vex += (a2 + i + 1) * w
            lcf *= (-a * q * q * t ** (n - 1)) ** w * q**nlc * t ** (-nl)
    val = -2.0 * a2 * w + vex
    if a2 == 0.0:
        base = delta_tilde(lam, n, a, q, t)
    else:
        base = (
            c_tilde("0", lam, t**n, q, t, n)
            / (c_tilde("-", lam, q, q, t, n) * c_tilde("-", lam, t, q, t, n))
            * (-1.0 / (a * a * q * q * t ** (n - 1))) ** w
            * q ** (-3 * nlc)
            * t ** (5 * nl)
        )
    return ValLc(val, lcf * base)


# ---------------------------------------------------------------------------
# Sample-and-fit estimators
# ---------------------------------------------------------------------------


def _prony_limit(w):
    """Limit of a sequence w_k = c + sum_m A_m rho_m^k with |rho_m| < 1.

    On a geometric p-schedule every power correction p^e becomes a
    geometric mode rho = ratio^e, so extracting the amplitude of the
    rho = 1 mode recovers the limit even when the corrections decay
    slowly.  Fits linear recurrences of increasing order and keeps the
    model with the smallest residual.
    """
    w = np.asarray(w, dtype=complex)
    n = len(w)
    scale = np.max(np.abs(w)) + 1e-300
    best_val = complex(w[-1])
    best_res = np.inf
    for order in range(1, 13):
        rows = n - order
        if rows < order + 2:
            break
        mat = np.stack([w[j : j + rows] for j in range(order)], axis=1)
        rhs = w[order : order + rows]
        try:
            coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        except np.linalg.LinAlgError:
            continue
        # roots of z^order - coef[order-1] z^{order-1} - ... - coef[0]
        poly = np.concatenate(([1.0 + 0j], -coef[::-1]))
        roots = np.roots(poly)
        if len(roots) == 0:
            continue
        i1 = int(np.argmin(np.abs(roots - 1.0)))
        if abs(roots[i1] - 1.0) > 0.5:
            continue
        roots[i1] = 1.0  # the limit mode is exactly constant
        roots = roots[np.abs(roots) < 1.0 + 1e-8]
        if not np.any(roots == 1.0):
            continue
        vand = np.stack([roots**k for k in range(n)], axis=0)
        amps, *_ = np.linalg.lstsq(vand, w, rcond=None)
        resid = np.max(np.abs(vand @ amps - w)) / scale
        if resid < best_res:
            best_res = resid
            best_val = complex(amps[int(np.argmax(roots == 1.0))])
    return best_val, best_res


def _prony_dominant_root(w, lo, hi):
    """Largest-modulus recurrence root of w within the window (lo, hi).

    Fits linear recurrences of increasing order and, for the best-fitting
    model, returns the largest root whose modulus lies in the window and
    whose amplitude is non-negligible.  Returns (root, residual); root is
    None when no model admits such a root.
    """
    w = np.asarray(w, dtype=complex)
    n = len(w)
    scale = np.max(np.abs(w)) + 1e-300
    best_root = None
    best_res = np.inf
    for order in range(1, 13):
        rows = n - order
        if rows < order + 2:
            break
        mat = np.stack([w[j : j + rows] for j in range(order)], axis=1)
        rhs = w[order : order + rows]
        try:
            coef, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        except np.linalg.LinAlgError:
            continue
        poly = np.concatenate(([1.0 + 0j], -coef[::-1]))
        roots = np.roots(poly)
        if len(roots) == 0:
            continue
        vand = np.stack([roots**k for k in range(n)], axis=0)
        try:
            amps, *_ = np.linalg.lstsq(vand, w, rcond=None)
        except np.linalg.LinAlgError:
            continue
        res = np.max(np.abs(vand @ amps - w)) / scale
        cand = [
            z
            for z, a in zip(roots, amps)
            if lo < abs(z) < hi and abs(a) > 1e-9 * scale
        ]
        if not cand:
            continue
        if res < best_res:
            best_res = res
            best_root = max(cand, key=abs)
    return best_root, best_res


def estimate_valuation(f, p0, ratio, samples) -> float:
    """Valuation estimate on the geometric schedule p_k = p0 * ratio^k.

    Starts from the least-squares slope of log|f(p_k)| against log|p_k|
    and refines it by a linear-recurrence (Prony) fit of the rescaled
    sequence f(p_k) p_k^{-slope}: on a geometric schedule every power
    correction becomes a geometric mode, and the dominant recurrence root
    rho recovers the slope error as log(rho)/log(ratio)."""
    if not (0 < ratio < 1):
        raise DomainError("ratio must lie in (0,1)")
    if samples < 3:
        raise DomainError("need at least 3 samples")
    ps = [p0 * ratio**k for k in range(samples)]
    fs = [complex(f(p)) for p in ps]
    if any(v == 0 for v in fs):
        raise ConvergenceError("f vanished at a sample point")
    if not all(math.isfinite(abs(v)) for v in fs):
        raise ConvergenceError("f overflowed at a sample point")
    ls = np.log(np.abs(ps))
    lf = np.log(np.abs(fs))
    slope, intercept = np.polyfit(ls, lf, 1)
    resid = lf - (slope * ls + intercept)
    if np.max(np.abs(resid)) < 1e-9 or samples < 8:
        if np.sqrt(np.mean(resid**2)) > 0.1:
            raise ConvergenceError("valuation fit residual exceeds 0.1")
        return float(slope)
    w = [v * p ** (-slope) for v, p in zip(fs, ps)]
    root, res = _prony_dominant_root(w, ratio**0.75, ratio**-0.75)
    if root is None or res > 0.05:
        raise ConvergenceError("valuation extrapolation residual exceeds 0.05")
    return float(slope + math.log(abs(root)) / math.log(ratio))


def estimate_lc(f, valuation, p_samples) -> complex:
    """Richardson-style limit of f(p_k) p_k^{-valuation} along the sample
    schedule (geometric schedules give the most reliable extrapolation).

    Raises ConvergenceError when the rescaled sequence diverges — i.e.
    when no convergent geometric-mode model fits it and its successive
    values still differ by more than 10% at the end of the schedule."""
    ps = [complex(p) for p in p_samples]
    if len(ps) < 3:
        raise DomainError("need at least 3 sample points")
    w = np.array([complex(f(p)) * p ** (-valuation) for p in ps])
    scale = np.max(np.abs(w))
    if scale == 0:
        raise ConvergenceError("f vanished at all sample points")
    if not np.all(np.isfinite(np.abs(w))):
        raise ConvergenceError("rescaled samples overflowed")
    if np.max(np.abs(np.diff(w))) <= 1e-11 * scale:
        return complex(np.mean(w[len(w) // 2 :]))
    val, res = _prony_limit(w)
    if res > 0.05 and abs(w[-1] - w[-2]) > 0.10 * abs(w[-1]):
        raise ConvergenceError("rescaled samples differ by more than 10%")
    return val
