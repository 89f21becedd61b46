"""Contour-integral bilinear form, its higher-order companion, and the
regime limits of both.

The central object is a BC_n-symmetric bilinear form given by an
n-dimensional contour integral against an elliptic-gamma weight with six
(or, for the higher-order companion, ``2m+6``) parameters tied by the
balancing condition ``t^{2(n-1)} prod_r t_r = (pq)^{m+1}``.  Attaching a
geometric decay exponent ``alpha_r`` to each parameter and letting the
outer base ``p`` shrink to zero produces, depending on the regime the
exponent vector falls into, a purely q-level integral (regimes PI, IP2,
IP3) or a q-level sum over partitions (regime SUM).  This module
evaluates the elliptic form by quadrature on the unit torus (n <= 2) and
implements the limiting integrals and sums directly, so that the decay
claims can be verified numerically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classifier import (
    AlphaVector,
    classify_continuous,
    _match_ip3,
    _zeta_of,
)
from .csymbols import c_tilde, delta_tilde
from .errors import (
    BalancingError,
    ContourError,
    ConvergenceError,
    DomainError,
    HypothesisError,
    TruncationError,
)
from .partitions import nstat, nstat_conj, weight as part_weight
from .qsymbols import (
    DEFAULT_POLICY,
    Nome,
    TruncationPolicy,
    log_qpoch_inf,
    log_theta,
    theta,
)

__all__ = [
    "ContinuousParams",
    "FunctionHandle",
    "QuadratureSpec",
    "constant_handle",
    "monomial_handle",
    "selberg_form",
    "ii_m",
    "limit_PI",
    "limit_IP2",
    "limit_IP3",
    "limit_SUM",
    "limit_sum_with_tail",
    "symmetry_break_check",
]

_BAL_RTOL = 1e-12
_SNAP = 1e-9


# ---------------------------------------------------------------------------
# vectorised log-products over quadrature grids
# ---------------------------------------------------------------------------


def _log1m(x):
    """Elementwise log(1 - x); -inf at exact grid zeros is intentional."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(1.0 - x)


def _log_qpoch_vec(x, q, policy=DEFAULT_POLICY):
    """log (x;q) elementwise for a complex array x."""
    x = np.asarray(x, dtype=complex)
    total = np.zeros_like(x)
    cur = np.array(x, dtype=complex)
    mag = float(np.max(np.abs(cur))) if cur.size else 0.0
    aq = abs(q)
    count = 0
    while mag > policy.tail_tol:
        total = total + _log1m(cur)
        cur = cur * q
        mag *= aq
        count += 1
        if count > policy.max_factors:
            raise TruncationError(
                f"log (x;q) did not converge within {policy.max_factors} factors"
            )
    return total


def _log_double_vec(x, p, q, policy=DEFAULT_POLICY):
    """log (x;p,q) elementwise for a complex array x."""
    x = np.asarray(x, dtype=complex)
    total = np.zeros_like(x)
    cur = np.array(x, dtype=complex)
    mag = float(np.max(np.abs(cur))) if cur.size else 0.0
    ap = abs(p)
    count = 0
    while mag > policy.tail_tol:
        total = total + _log_qpoch_vec(cur, q, policy)
        cur = cur * p
        mag *= ap
        count += 1
        if count > policy.max_factors:
            raise TruncationError(
                f"log (x;p,q) did not converge within {policy.max_factors} factors"
            )
    return total


def _log_gamma_vec(x, p, q, policy=DEFAULT_POLICY):
    """log Gamma(x;p,q) elementwise.

    Computed as log (pq/x;p,q) - log (x;p,q); the subtraction keeps the
    zeros of 1/Gamma exact when x hits 1 on the quadrature grid (the log
    becomes +/-inf and exponentiates to an exact 0 in the integrand).
    """
    x = np.asarray(x, dtype=complex)
    return _log_double_vec(p * q / x, p, q, policy) - _log_double_vec(x, p, q, policy)


def _log_theta_q_vec(x, q, policy=DEFAULT_POLICY):
    """log theta(x;q) elementwise (single-base theta)."""
    x = np.asarray(x, dtype=complex)
    return _log_qpoch_vec(x, q, policy) + _log_qpoch_vec(q / x, q, policy)


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuousParams:
    """Parameters of the contour bilinear form / its companion integral.

    ``t_params`` has length ``2m+6`` and must satisfy the balancing
    condition ``t^{2(n-1)} prod_r t_r = (pq)^{m+1}`` (elliptic level) or
    ``= q^{m+1}`` when ``p_free`` is set (the q-level limit data).
    """

    n: int
    m: int
    nome: Nome
    t_params: tuple
    p_free: bool = False

    def __post_init__(self):
        object.__setattr__(self, "t_params", tuple(complex(x) for x in self.t_params))
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.m < 0:
            raise DomainError("m must be >= 0")
        want_len = 2 * self.m + 6
        if len(self.t_params) != want_len:
            raise DomainError(
                f"expected {want_len} parameters for m={self.m}, got {len(self.t_params)}"
            )
        p, q, t = self.nome.p, self.nome.q, self.nome.t
        got = t ** (2 * (self.n - 1))
        for tr in self.t_params:
            got *= tr
        want = (q if self.p_free else p * q) ** (self.m + 1)
        if abs(got - want) > _BAL_RTOL * max(abs(want), 1e-300):
            raise BalancingError(
                f"balancing violated: t^(2(n-1)) prod t_r = {got}, expected {want}"
            )

    @classmethod
    def solve(cls, n, m, nome, leading, p_free=False):
        """Fill in the final parameter from the first 2m+5 via balancing."""
        leading = tuple(complex(x) for x in leading)
        if len(leading) != 2 * m + 5:
            raise DomainError(f"need 2m+5={2*m+5} leading parameters, got {len(leading)}")
        p, q, t = nome.p, nome.q, nome.t
        want = (q if p_free else p * q) ** (m + 1)
        got = t ** (2 * (n - 1))
        for tr in leading:
            got *= tr
        return cls(n, m, nome, leading + (want / got,), p_free=p_free)


@dataclass(frozen=True)
class QuadratureSpec:
    """Equispaced product-trapezoid rule on the unit torus."""

    points_per_circle: int = 1024

    def __post_init__(self):
        pts = self.points_per_circle
        if pts < 8 or (pts & (pts - 1)) != 0:
            raise DomainError("points_per_circle must be a power of two, >= 8")


@dataclass(frozen=True)
class FunctionHandle:
    """A BC_n-symmetric integrand factor.

    ``evaluator`` maps n complex arguments (scalars or broadcastable
    numpy arrays) to values.  ``pole_param_index``/``pole_order`` declare
    a pole sequence attached to one of the integral's parameters (order
    0 = holomorphic); ``p_abelian`` records whether the function is
    invariant under multiplying an argument by the outer base p.
    """

    evaluator: object
    arity: int = 1
    pole_param_index: int | None = None
    pole_order: int = 0
    p_abelian: bool = True
    label: str = ""

    def __call__(self, *zs):
        if len(zs) != self.arity:
            raise DomainError(f"handle expects {self.arity} arguments, got {len(zs)}")
        return self.evaluator(*zs)

    def check_symmetry(self, rng, p=None, tol=1e-9, draws=8):
        """Sample-check invariance under sign flips and permutations of
        the arguments (and z -> pz when the handle declares p-abelian
        behaviour and p is supplied).  Returns the worst residual."""
        worst = 0.0
        for _ in range(draws):
            zs = [
                complex(rng.uniform(0.5, 1.5))
                * complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
                for _ in range(self.arity)
            ]
            base = complex(self(*zs))
            scale = max(1.0, abs(base))
            for k in range(self.arity):
                flipped = list(zs)
                flipped[k] = 1.0 / flipped[k]
                worst = max(worst, abs(complex(self(*flipped)) - base) / scale)
            if self.arity > 1:
                perm = list(zs)
                perm[0], perm[1] = perm[1], perm[0]
                worst = max(worst, abs(complex(self(*perm)) - base) / scale)
            if self.p_abelian and p is not None:
                shifted = list(zs)
                shifted[0] = shifted[0] * p
                worst = max(worst, abs(complex(self(*shifted)) - base) / scale)
        if worst > tol:
            raise HypothesisError(f"declared symmetry fails by {worst:.3e}")
        return worst


def constant_handle(n=1):
    """The constant function 1 in n variables."""
    return FunctionHandle(
        evaluator=lambda *zs: np.ones_like(np.asarray(zs[0], dtype=complex))
        if hasattr(zs[0], "shape")
        else 1.0 + 0j,
        arity=n,
        p_abelian=True,
        label="1",
    )


def monomial_handle(exponents):
    """Symmetrized Laurent monomial sum_{signs, perms} prod_i z_i^{±e_i}.

    Invariant under sign flips and permutations but not under z -> pz,
    so it is only admissible where no p-invariance is required.
    """
    exps = tuple(int(e) for e in exponents)
    n = len(exps)

    def ev(*zs):
        arrs = [np.asarray(z, dtype=complex) for z in zs]
        total = None
        for perm in set(itertools.permutations(exps)):
            for signs in itertools.product((1, -1), repeat=n):
                term = None
                for z, e, s in zip(arrs, perm, signs):
                    f = z ** (s * e)
                    term = f if term is None else term * f
                total = term if total is None else total + term
        return total

    return FunctionHandle(
        evaluator=ev, arity=n, p_abelian=False, label=f"m{exps}"
    )


# ---------------------------------------------------------------------------
# elliptic-level quadrature
# ---------------------------------------------------------------------------


def _grid(P):
    return np.exp(2j * np.pi * np.arange(P) / P)


def _effective_params(params, f, g):
    """Shift parameters by the declared pole orders of the handles."""
    tt = list(params.t_params)
    q = params.nome.q
    for h in (f, g):
        if h is not None and h.pole_order:
            idx = h.pole_param_index
            if idx is None or not 0 <= idx < len(tt):
                raise DomainError("pole_param_index out of range")
            tt[idx] = tt[idx] * q ** (-h.pole_order)
    return tuple(tt)


def _elliptic_log_weight(z, tt, nome, policy):
    """Per-point log of prod_r Gamma(t_r z^{±1}) / Gamma(z^{±2})."""
    p, q = nome.p, nome.q
    total = np.zeros_like(np.asarray(z, dtype=complex))
    for tr in tt:
        total = total + _log_gamma_vec(tr * z, p, q, policy)
        total = total + _log_gamma_vec(tr / z, p, q, policy)
    total = total - _log_gamma_vec(z * z, p, q, policy)
    total = total - _log_gamma_vec(1.0 / (z * z), p, q, policy)
    return total


def _elliptic_log_cross(z, nome, policy):
    """log of Gamma(t w)Gamma(t/w)/(Gamma(w)Gamma(1/w)) at w = z."""
    p, q, t = nome.p, nome.q, nome.t
    total = _log_gamma_vec(t * z, p, q, policy)
    total = total + _log_gamma_vec(t / z, p, q, policy)
    total = total - _log_gamma_vec(z, p, q, policy)
    total = total - _log_gamma_vec(1.0 / z, p, q, policy)
    return total


def _torus_mean(point_values, n, P):
    """Full-grid and half-grid means of precomputed point values."""
    if n == 1:
        full = np.mean(point_values)
        half = np.mean(point_values[::2])
    else:
        full = np.mean(point_values)
        half = np.mean(point_values[::2, ::2])
    return full, half


def _check_convergence(full, half, tol, label):
    scale = max(abs(full), 1e-300)
    if abs(full - half) > tol * scale:
        raise ConvergenceError(
            f"{label}: halving the grid changes the value by "
            f"{abs(full - half) / scale:.3e} (tol {tol:.1e})"
        )


def _contour_poles_outside(tt, nome, bound=1.0 + 1e-9):
    """Pole locations z = p^i q^j t_r with modulus > 1 (unit-contour
    obstructions), with a guard against poles pinching the circle."""
    p, q = nome.p, nome.q
    out = []
    for r, tr in enumerate(tt):
        if abs(tr) <= 1.0:
            continue
        i = 0
        while abs(p**i * tr) > 1.0:
            j = 0
            while True:
                w = p**i * q**j * tr
                if abs(w) <= 1.0:
                    break
                if abs(w) < bound:
                    raise ContourError(
                        f"pole at {w} pinches the unit circle (parameter {r})"
                    )
                out.append(w)
                j += 1
            i += 1
    return out


def _numeric_residue(w, other_fn, policy, points=64, rel_radius=1e-3):
    """Residue of other_fn(z) at the simple pole z = w via a small-circle
    trapezoid rule; other_fn returns integrand values (not logs)."""
    delta = rel_radius * abs(w)
    th = np.exp(2j * np.pi * np.arange(points) / points)
    zs = w + delta * th
    vals = other_fn(zs)
    return complex(np.mean(vals * delta * th))


def _log_prefactor_selberg(params, policy):
    """log of the normalising prefactor of the bilinear form (m = 0)."""
    nome = params.nome
    p, q, t = nome.p, nome.q, nome.t
    n = params.n
    tt = params.t_params

    def lg(x):
        return complex(_log_gamma_vec(np.asarray([x]), p, q, policy)[0])

    total = n * (log_qpoch_inf(q, q, policy) + log_qpoch_inf(p, p, policy))
    total += n * lg(t)
    total -= n * math.log(2.0) + math.log(math.factorial(n))
    for j in range(1, n + 1):
        total -= lg(t**j)
        for r in range(len(tt)):
            for s in range(r + 1, len(tt)):
                total -= lg(t ** (n - j) * tt[r] * tt[s])
    return total


def _log_prefactor_iim(params, policy):
    """log of the normalising prefactor of the companion integral."""
    nome = params.nome
    p, q, t = nome.p, nome.q, nome.t
    n = params.n
    tt = params.t_params

    def lg(x):
        return complex(_log_gamma_vec(np.asarray([x]), p, q, policy)[0])

    def ldp(x):
        return complex(_log_double_vec(np.asarray([x]), p, q, policy)[0])

    total = n * (log_qpoch_inf(q, q, policy) + log_qpoch_inf(p, p, policy))
    total += n * lg(t)
    total -= n * math.log(2.0) + math.log(math.factorial(n))
    for i in range(1, n + 1):
        for r in range(len(tt)):
            for s in range(r + 1, len(tt)):
                total += ldp(t ** (i - 1) * tt[r] * tt[s])
    return total


def _elliptic_integral(params, tt, f, g, quad, log_pref, p_power, policy, conv_tol,
                       residue_correction):
    """Shared quadrature core for the bilinear form and its companion."""
    nome = params.nome
    n = params.n
    P = quad.points_per_circle
    if n > 2:
        raise DomainError("quadrature is implemented for n <= 2 only")

    outside = _contour_poles_outside(tt, nome)
    if outside and not residue_correction:
        raise ContourError(
            f"{len(outside)} integrand pole(s) lie outside the unit torus; "
            "the unit-contour value is not the analytic continuation "
            "(n=1 residue correction available)"
        )
    if outside and n != 1:
        raise ContourError("residue correction is implemented for n = 1 only")

    shift = log_pref - p_power * np.log(complex(nome.p))
    z = _grid(P)
    logw = _elliptic_log_weight(z, tt, nome, policy)

    if n == 1:
        fv = f(z) if f is not None else 1.0
        gv = g(z) if g is not None else 1.0
        with np.errstate(invalid="ignore", over="ignore"):
            vals = np.exp(logw + shift) * fv * gv
        vals = np.where(np.isnan(vals), 0.0, vals)
        full, half = _torus_mean(vals, 1, P)
    else:
        logc = _elliptic_log_cross(z, nome, policy)
        a = np.arange(P)
        apb = (a[:, None] + a[None, :]) % P
        amb = (a[:, None] - a[None, :]) % P
        logint = (
            logw[:, None]
            + logw[None, :]
            + logc[apb]
            + logc[amb]
            + shift
        )
        Z1 = z[:, None]
        Z2 = z[None, :]
        fv = f(Z1, Z2) if f is not None else 1.0
        gv = g(Z1, Z2) if g is not None else 1.0
        with np.errstate(invalid="ignore", over="ignore"):
            vals = np.exp(logint) * fv * gv
        vals = np.where(np.isnan(vals), 0.0, vals)
        full, half = _torus_mean(vals, 2, P)

    if conv_tol is not None and not outside:
        _check_convergence(full, half, conv_tol, "torus quadrature")

    total = complex(full)
    if outside:
        # analytic continuation off the unit contour: each pole crossed
        # contributes twice its residue (the reciprocal pole inside the
        # circle contributes equally by z -> 1/z symmetry)
        def integrand(zs):
            lw = _elliptic_log_weight(zs, tt, nome, policy)
            fv = f(zs) if f is not None else 1.0
            gv = g(zs) if g is not None else 1.0
            return np.exp(lw + shift) * fv * gv / zs

        if conv_tol is not None:
            _check_convergence(full, half, conv_tol, "torus quadrature")
        for w in outside:
            total += 2.0 * _numeric_residue(w, integrand, policy)
    return total


def selberg_form(f, g, params: ContinuousParams, quad: QuadratureSpec = QuadratureSpec(),
                 p_power=0.0, conv_tol=1e-6, residue_correction=False,
                 policy=DEFAULT_POLICY):
    """The elliptic bilinear form <f, g> evaluated by torus quadrature.

    ``p_power`` rescales the returned value by p^{-p_power} (applied in
    log space so extreme parameter regimes stay finite).  When a
    parameter leaves the unit disc the unit-torus value is corrected by
    residues (n = 1 only) if ``residue_correction`` is set.
    """
    if params.m != 0:
        raise DomainError("the bilinear form has m = 0; use ii_m for m > 0")
    if params.p_free:
        raise DomainError("elliptic evaluation requires elliptic-level parameters")
    tt = _effective_params(params, f, g)
    log_pref = _log_prefactor_selberg(params, policy)
    return _elliptic_integral(
        params, tt, f, g, quad, log_pref, p_power, policy, conv_tol, residue_correction
    )


def ii_m(params: ContinuousParams, quad: QuadratureSpec = QuadratureSpec(),
         p_power=0.0, conv_tol=1e-6, residue_correction=False,
         policy=DEFAULT_POLICY):
    """The higher-order companion integral (holomorphic normalisation)."""
    if params.p_free:
        raise DomainError("elliptic evaluation requires elliptic-level parameters")
    log_pref = _log_prefactor_iim(params, policy)
    return _elliptic_integral(
        params, params.t_params, None, None, quad, log_pref, p_power, policy,
        conv_tol, residue_correction
    )


# ---------------------------------------------------------------------------
# q-level limit integrals
# ---------------------------------------------------------------------------


def _as_alpha(alpha, params):
    if isinstance(alpha, AlphaVector):
        if alpha.kind != "continuous" or alpha.m != params.m:
            raise DomainError("alpha vector does not match the parameter set")
        return alpha
    return AlphaVector(tuple(float(a) for a in alpha), m=params.m, kind="continuous")


def _require_regime(alpha, params, tag):
    av = _as_alpha(alpha, params)
    label = classify_continuous(av)
    if label.tag != tag:
        raise HypothesisError(
            f"exponent vector classifies as {label.tag}, not {tag} ({label.detail})"
        )
    return av, label


def _near(x, y, tol=_SNAP):
    return abs(x - y) <= tol


def _limit_quadrature(params, quad, log_weight_fn, log_cross_fns, log_pref,
                      conv_tol, policy, label, f=None, g=None):
    """Quadrature core for the q-level limit integrals.

    ``log_cross_fns`` is a pair (F_minus, F_plus) of per-index log cross
    factors evaluated at omega^c, applied at indices (a-b)%P and
    (a+b)%P; either may be None.  ``f``/``g`` are optional handles whose
    leading coefficients multiply the limit integrand.
    """
    n = params.n
    P = quad.points_per_circle
    if n > 2:
        raise DomainError("quadrature is implemented for n <= 2 only")
    z = _grid(P)
    logw = log_weight_fn(z)
    if n == 1:
        fv = f(z) if f is not None else 1.0
        gv = g(z) if g is not None else 1.0
        with np.errstate(invalid="ignore", over="ignore"):
            vals = np.exp(logw + log_pref) * fv * gv
        vals = np.where(np.isnan(vals), 0.0, vals)
        full, half = _torus_mean(vals, 1, P)
    else:
        fm, fp = log_cross_fns
        a = np.arange(P)
        logint = logw[:, None] + logw[None, :] + log_pref
        if fm is not None:
            cm = fm(z)
            logint = logint + cm[(a[:, None] - a[None, :]) % P]
        if fp is not None:
            cp = fp(z)
            logint = logint + cp[(a[:, None] + a[None, :]) % P]
        Z1, Z2 = z[:, None], z[None, :]
        fv = f(Z1, Z2) if f is not None else 1.0
        gv = g(Z1, Z2) if g is not None else 1.0
        with np.errstate(invalid="ignore", over="ignore"):
            vals = np.exp(logint) * fv * gv
        vals = np.where(np.isnan(vals), 0.0, vals)
        full, half = _torus_mean(vals, 2, P)
    if conv_tol is not None:
        _check_convergence(full, half, conv_tol, label)
    return complex(full)


def limit_PI(alpha, params: ContinuousParams, quad: QuadratureSpec = QuadratureSpec(),
             conv_tol=1e-6, policy=DEFAULT_POLICY, f=None, g=None):
    """Small-p limit in the principal regime (all exponents in [0,1])."""
    if not params.p_free:
        raise DomainError("limit evaluation requires p-free parameters")
    av, _ = _require_regime(alpha, params, "PI")
    al = av.entries
    nome = params.nome
    q, t = nome.q, nome.t
    n = params.n
    tt = params.t_params

    zero_idx = [r for r, a in enumerate(al) if _near(a, 0.0)]
    one_idx = [r for r, a in enumerate(al) if _near(a, 1.0)]
    for r in zero_idx:
        if abs(tt[r]) >= 1.0 - 1e-12:
            raise ContourError(f"|t_{r}| must be < 1 for a zero exponent")

    def lq(x):
        return log_qpoch_inf(x, q, policy)

    log_pref = n * lq(q) - n * math.log(2.0) - math.log(math.factorial(n)) - n * lq(t)
    if params.m == 0:
        for j in range(1, n + 1):
            log_pref += lq(t**j)
            for r in range(len(tt)):
                for s in range(r + 1, len(tt)):
                    if _near(al[r] + al[s], 0.0):
                        log_pref += lq(t ** (n - j) * tt[r] * tt[s])
                    if _near(al[r] + al[s], 1.0):
                        log_pref -= lq(q * t ** (j - n) / (tt[r] * tt[s]))
    else:
        for j in range(1, n + 1):
            for r in zero_idx:
                for s in zero_idx:
                    if s > r:
                        log_pref += lq(t ** (j - 1) * tt[r] * tt[s])

    def log_weight(z):
        total = _log_qpoch_vec(z * z, q, policy) + _log_qpoch_vec(1.0 / (z * z), q, policy)
        for r in one_idx:
            total = total + _log_qpoch_vec(q * z / tt[r], q, policy)
            total = total + _log_qpoch_vec(q / (tt[r] * z), q, policy)
        for r in zero_idx:
            total = total - _log_qpoch_vec(tt[r] * z, q, policy)
            total = total - _log_qpoch_vec(tt[r] / z, q, policy)
        return total

    def log_cross(z):
        return (
            _log_qpoch_vec(z, q, policy)
            + _log_qpoch_vec(1.0 / z, q, policy)
            - _log_qpoch_vec(t * z, q, policy)
            - _log_qpoch_vec(t / z, q, policy)
        )

    return _limit_quadrature(
        params, quad, log_weight, (log_cross, log_cross), log_pref, conv_tol,
        policy, "principal-regime limit", f=f, g=g
    )


def limit_IP2(alpha, params: ContinuousParams, v,
              quad: QuadratureSpec = QuadratureSpec(), conv_tol=1e-6,
              policy=DEFAULT_POLICY, f=None, g=None):
    """Small-p limit with a negative exponent pair; ``v`` is a free
    nonzero parameter the value is independent of."""
    if not params.p_free:
        raise DomainError("limit evaluation requires p-free parameters")
    av, label = _require_regime(alpha, params, "IP2")
    al = av.entries
    a_idx, b_idx = label.witnesses
    zeta = al[a_idx]
    half = _near(zeta, -0.5)
    nome = params.nome
    q, t = nome.q, nome.t
    n = params.n
    tt = params.t_params
    v = complex(v)
    if v == 0:
        raise DomainError("v must be nonzero")
    pair = (a_idx, b_idx)
    rest = [r for r in range(len(tt)) if r not in pair]
    minus_idx = [r for r in rest if _near(al[r], -zeta)]
    top_idx = [r for r in rest if _near(al[r], 1 + zeta)]
    for r in (a_idx, b_idx, *minus_idx):
        if abs(tt[r]) >= 1.0 - 1e-12:
            raise ContourError(f"|t_{r}| must be < 1 for the unit contour")

    def lq(x):
        return log_qpoch_inf(x, q, policy)

    log_pref = n * lq(q) - math.log(math.factorial(n)) - n * lq(t)
    for j in range(1, n + 1):
        if params.m == 0:
            log_pref += lq(t**j)
        if half:
            log_pref += lq(t ** (n - j) * tt[a_idx] * tt[b_idx])
        for r in minus_idx:
            log_pref += lq(t ** (n - j) * tt[r] * tt[a_idx])
            log_pref += lq(t ** (n - j) * tt[r] * tt[b_idx])
        if params.m == 0:
            for r in range(len(tt)):
                for s in range(r + 1, len(tt)):
                    if _near(al[r] + al[s], 1.0):
                        log_pref -= lq(q * t ** (j - n) / (tt[r] * tt[s]))
        log_pref -= log_theta(t ** (n - j) * tt[a_idx] * v, q, policy)
        log_pref -= log_theta(t ** (n - j) * tt[b_idx] * v, q, policy)

    theta_arg2 = q / (t ** (n - 1) * v * tt[a_idx] * tt[b_idx])

    def log_weight(z):
        total = np.zeros_like(np.asarray(z, dtype=complex))
        for r in top_idx:
            total = total + _log_qpoch_vec(q * z / tt[r], q, policy)
        total = total - _log_qpoch_vec(tt[a_idx] / z, q, policy)
        total = total - _log_qpoch_vec(tt[b_idx] / z, q, policy)
        for r in minus_idx:
            total = total - _log_qpoch_vec(tt[r] * z, q, policy)
        if half:
            total = total + _log_qpoch_vec(z * z, q, policy)
            total = total - _log_qpoch_vec(tt[a_idx] * z, q, policy)
            total = total - _log_qpoch_vec(tt[b_idx] * z, q, policy)
            total = total - _log_qpoch_vec(q * z * z, q, policy)
        total = total + _log_theta_q_vec(v * z, q, policy)
        total = total + _log_theta_q_vec(theta_arg2 * z, q, policy)
        return total

    def log_cross_minus(z):
        return (
            _log_qpoch_vec(z, q, policy)
            + _log_qpoch_vec(1.0 / z, q, policy)
            - _log_qpoch_vec(t * z, q, policy)
            - _log_qpoch_vec(t / z, q, policy)
        )

    def log_cross_plus(z):
        return (
            _log_qpoch_vec(z, q, policy)
            + _log_qpoch_vec(q * z / t, q, policy)
            - _log_qpoch_vec(t * z, q, policy)
            - _log_qpoch_vec(q * z, q, policy)
        )

    return _limit_quadrature(
        params, quad, log_weight,
        (log_cross_minus, log_cross_plus if half else None),
        log_pref, conv_tol, policy, "pair-regime limit", f=f, g=g
    )


def limit_IP3(alpha, params: ContinuousParams,
              quad: QuadratureSpec = QuadratureSpec(), conv_tol=1e-6,
              policy=DEFAULT_POLICY, f=None, g=None):
    """Small-p limit with a negative exponent triple."""
    if not params.p_free:
        raise DomainError("limit evaluation requires p-free parameters")
    av = _as_alpha(alpha, params)
    al = av.entries
    # a vector can satisfy the triple-regime hypotheses while classifying
    # into the pair regime (shared boundary); match the triple directly
    label = classify_continuous(av)
    if label.tag == "IP3":
        T = tuple(label.witnesses)
    else:
        T = _match_ip3(al, _zeta_of(al))
        if T is None:
            raise HypothesisError(
                f"exponent vector admits no negative triple (classified {label.tag})"
            )
        T = tuple(T)
    zeta = sum(al[r] for r in T)
    half = _near(zeta, -0.5)
    nome = params.nome
    q, t = nome.q, nome.t
    n = params.n
    tt = params.t_params
    rest = [r for r in range(len(tt)) if r not in T]

    def lq(x):
        return log_qpoch_inf(x, q, policy)

    log_pref = n * lq(q) - math.log(math.factorial(n)) - n * lq(t)
    for j in range(1, n + 1):
        if params.m == 0:
            log_pref += lq(t**j)
        for ri, r in enumerate(T):
            for s in T[ri + 1:]:
                if _near(al[r] + al[s], -1.0):
                    log_pref += lq(t ** (n - j) * tt[r] * tt[s])
                if _near(al[r] + al[s], 0.0):
                    log_pref -= lq(q * t ** (j - n) / (tt[r] * tt[s]))
        for r in T:
            for s in rest:
                if _near(al[r] + al[s], 0.0):
                    log_pref += lq(t ** (n - j) * tt[r] * tt[s])
        if params.m == 0:
            for r in range(len(tt)):
                for s in range(r + 1, len(tt)):
                    if _near(al[r] + al[s], 1.0):
                        log_pref -= lq(q * t ** (j - n) / (tt[r] * tt[s]))

    prod_T = tt[T[0]] * tt[T[1]] * tt[T[2]]
    theta_arg = q * t ** (1 - n) / prod_T

    def log_weight(z):
        total = np.zeros_like(np.asarray(z, dtype=complex))
        for r in T:
            if _near(al[r], -zeta):
                total = total + _log_qpoch_vec(q / (tt[r] * z), q, policy)
            if _near(al[r], zeta):
                total = total - _log_qpoch_vec(tt[r] / z, q, policy)
        for r in rest:
            if _near(al[r], 1 + zeta):
                total = total + _log_qpoch_vec(q * z / tt[r], q, policy)
            if _near(al[r], -zeta):
                total = total - _log_qpoch_vec(tt[r] * z, q, policy)
        if half:
            total = total + _log_qpoch_vec(z * z, q, policy)
            total = total - _log_qpoch_vec(q * z * z, q, policy)
            for r in T:
                if _near(al[r], 0.5):
                    total = total + _log_qpoch_vec(q * z / tt[r], q, policy)
                if _near(al[r], -0.5):
                    total = total - _log_qpoch_vec(tt[r] * z, q, policy)
        total = total + _log_theta_q_vec(theta_arg * z, q, policy)
        return total

    def log_cross_minus(z):
        return (
            _log_qpoch_vec(z, q, policy)
            + _log_qpoch_vec(1.0 / z, q, policy)
            - _log_qpoch_vec(t * z, q, policy)
            - _log_qpoch_vec(t / z, q, policy)
        )

    def log_cross_plus(z):
        return (
            _log_qpoch_vec(z, q, policy)
            + _log_qpoch_vec(q * z / t, q, policy)
            - _log_qpoch_vec(t * z, q, policy)
            - _log_qpoch_vec(q * z, q, policy)
        )

    return _limit_quadrature(
        params, quad, log_weight,
        (log_cross_minus, log_cross_plus if half else None),
        log_pref, conv_tol, policy, "triple-regime limit", f=f, g=g
    )


# ---------------------------------------------------------------------------
# q-level limit sums
# ---------------------------------------------------------------------------


def _partitions_of(w, max_parts, max_part):
    """Partitions of w with at most max_parts parts, each <= max_part."""
    if w == 0:
        yield ()
        return

    def rec(remaining, parts_left, cap):
        if remaining == 0:
            yield ()
            return
        if parts_left == 0:
            return
        top = min(cap, remaining)
        for first in range(top, 0, -1):
            for tail in rec(remaining - first, parts_left - 1, first):
                yield (first,) + tail

    yield from rec(w, max_parts, min(max_part, w))


def limit_sum_with_tail(alpha, params: ContinuousParams,
                        trunc: TruncationPolicy = TruncationPolicy(1e-14, 400),
                        max_part=60, policy=DEFAULT_POLICY):
    """Small-p limit in the sum regime (one exponent in [-1/2, 0)).

    Returns (value, tail_certificate) where the certificate is the last
    partition shell's contribution relative to the accumulated value.
    """
    if not params.p_free:
        raise DomainError("limit evaluation requires p-free parameters")
    av, label = _require_regime(alpha, params, "SUM")
    al = av.entries
    (a_idx,) = label.witnesses
    aa = al[a_idx]
    half = _near(aa, -0.5)
    nome = params.nome
    q, t = nome.q, nome.t
    n = params.n
    tt = params.t_params
    ta = tt[a_idx]
    rest = [r for r in range(len(tt)) if r != a_idx]
    A = sum(1 for r in rest if al[r] < -aa - _SNAP)
    minus_idx = [r for r in rest if _near(al[r], -aa)]
    top_idx = [r for r in rest if _near(al[r], 1 + aa)]
    below_prod = 1.0 + 0j
    for r in rest:
        if al[r] + aa < -_SNAP:
            below_prod *= tt[r]

    def lq(x):
        return log_qpoch_inf(x, q, policy)

    log_pref = 0.0 + 0j
    for j in range(n):
        if params.m > 0:
            log_pref -= lq(t ** (n - j))
        for r in top_idx:
            log_pref += lq(q * t**j * ta / tt[r])
        if half:
            log_pref -= lq(q * t ** (n - 1 + j) * ta * ta)
        if params.m == 0:
            for r in range(len(tt)):
                for s in range(r + 1, len(tt)):
                    if _near(al[r] + al[s], 1.0):
                        log_pref -= lq(q / (t**j * tt[r] * tt[s]))
    pref = complex(np.exp(log_pref))

    geom = (
        (-1.0) ** (A + 1)
        * t ** ((n - 1) * (A + 3))
        * ta ** (A + 2)
        * q**2
        * below_prod
    )

    def term(lam):
        k = part_weight(lam)
        npr = nstat(lam)
        npc = nstat_conj(lam)
        if half:
            val = delta_tilde(lam, n, t ** (2 * (n - 1)) * ta * ta, q, t)
        else:
            num = c_tilde("0", lam, t**n, q, t, n)
            den = c_tilde("-", lam, q, q, t, n) * c_tilde("-", lam, t, q, t, n)
            val = (
                num
                / den
                * (-(t ** (5 * (n - 1))) * ta**4 * q**2) ** (-k)
                * q ** (-3 * npc)
                * t ** (5 * npr)
            )
        for r in minus_idx:
            val *= c_tilde("0", lam, t ** (n - 1) * ta * tt[r], q, t, n)
        for r in top_idx:
            val /= c_tilde("0", lam, q * t ** (n - 1) * ta / tt[r], q, t, n)
        val *= geom**k * q ** ((A + 1) * npc) * t ** (-(A + 1) * npr)
        return val

    total = 0.0 + 0j
    scale = 0.0
    tail = math.inf
    quiet = 0
    for w in range(trunc.max_factors + 1):
        shell = 0.0 + 0j
        shell_max = 0.0
        for lam in _partitions_of(w, n, max_part):
            tv = term(lam)
            shell += tv
            shell_max = max(shell_max, abs(tv))
        total += shell
        scale = max(scale, abs(total), shell_max)
        tail = abs(shell) / max(scale, 1e-300)
        if shell_max <= trunc.tail_tol * max(scale, 1e-300):
            quiet += 1
            if quiet >= 2:
                return pref * total, tail
        else:
            quiet = 0
    raise TruncationError(
        f"sum-regime series not converged after {trunc.max_factors} shells"
    )


def limit_SUM(alpha, params: ContinuousParams,
              trunc: TruncationPolicy = TruncationPolicy(1e-14, 400),
              max_part=60, policy=DEFAULT_POLICY):
    """Small-p limit in the sum regime; see limit_sum_with_tail."""
    value, _ = limit_sum_with_tail(alpha, params, trunc, max_part, policy)
    return value


# ---------------------------------------------------------------------------
# symmetry-breaking theta identity
# ---------------------------------------------------------------------------


def symmetry_break_check(v, z, t, q, p=None, policy=DEFAULT_POLICY):
    """Evaluate both sides of the sign-sum theta identity.

    For parameters v_0..v_3 with t^{n-1} v_0 v_1 v_2 v_3 = q, the sum
    over sign vectors sigma of the theta cross and weight factors
    collapses to a product independent of z.  Returns (lhs, rhs).
    The base of every theta here is q; ``p`` is accepted for signature
    uniformity and unused.
    """
    v = tuple(complex(x) for x in v)
    z = tuple(complex(x) for x in z)
    if len(v) != 4:
        raise DomainError("need exactly four parameters v_0..v_3")
    n = len(z)
    q = complex(q)
    t = complex(t)
    bal = t ** (n - 1) * v[0] * v[1] * v[2] * v[3]
    if abs(bal - q) > _BAL_RTOL * max(abs(q), 1e-300):
        raise BalancingError(f"t^(n-1) v0 v1 v2 v3 = {bal}, expected {q}")

    lhs = 0.0 + 0j
    for signs in itertools.product((1, -1), repeat=n):
        zs = [z[i] ** signs[i] for i in range(n)]
        term = 1.0 + 0j
        for i in range(n):
            for j in range(i + 1, n):
                term *= theta(t * zs[i] * zs[j], q, policy) / theta(
                    zs[i] * zs[j], q, policy
                )
        for i in range(n):
            for vr in v:
                term *= theta(vr * zs[i], q, policy)
            term /= theta(zs[i] * zs[i], q, policy)
        lhs += term

    rhs = 1.0 + 0j
    for i in range(n):
        ti = t**i
        rhs *= theta(ti * v[0] * v[1], q, policy)
        rhs *= theta(ti * v[0] * v[2], q, policy)
        rhs *= theta(ti * v[1] * v[2], q, policy)
    return lhs, rhs
