"""Piecewise-quadratic decay exponents controlling the contour integrand.

When the integration variables are written ``z_i = x_i p^{zeta_i}`` with
unimodular ``x_i`` and the parameters carry decay exponents ``alpha_r``,
the integrand admits two-sided bounds of the shape
``C_1 <= |I(z)| |q|^(l^2 c(zeta)) d^l <= C_2`` with ``l = log_|q| |p|``.
The exponent functions ``c`` are explicit piecewise quadratics in the
``zeta_i``, nonpositive on their respective exponent polytopes; their
strict negativity away from explicit equality loci is what makes the
residue-sum and bilateral limits converge.

This module implements the three exponent functions (for the polytopes
P^_II, P_IV and P_V), membership checks and vertex data for the
polytopes, the equality-locus and degenerate-configuration predicates,
low-discrepancy (Halton) samplers over the polytopes, and the
constructive constants of the elementary Pochhammer bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import DomainError, MembershipError
from .qsymbols import DEFAULT_POLICY, qpoch_inf

__all__ = [
    "ZetaVector",
    "c_hat_PII",
    "c_IV",
    "c_V",
    "check_PII_hat",
    "check_PIV",
    "check_PV",
    "degenerate_PII",
    "degenerate_PIV",
    "degenerate_PV",
    "equality_locus_PII",
    "equality_locus_PIV",
    "equality_locus_PV",
    "halton",
    "nonpositivity_scan",
    "pochhammer_bound_constants",
    "sample_PII_hat",
    "sample_PIV",
    "sample_PV",
    "sample_zeta",
    "vertices_PIV",
    "vertices_PV",
]

_TOL = 1e-9


@dataclass(frozen=True)
class ZetaVector:
    """Exponents of the integration variables, kept sorted ascending.

    The exponent functions are symmetric in the entries; sorting fixes a
    canonical representative.
    """

    entries: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(sorted(float(z) for z in self.entries))
        )
        if not self.entries:
            raise DomainError("need at least one entry")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _alpha_entries(alpha):
    entries = tuple(float(a) for a in getattr(alpha, "entries", alpha))
    if len(entries) != 6:
        raise DomainError(f"expected 6 exponents, got {len(entries)}")
    return entries


def _zeta_entries(zeta, alpha0, tol=_TOL):
    entries = tuple(zeta.entries if isinstance(zeta, ZetaVector) else
                    sorted(float(z) for z in zeta))
    for z in entries:
        if z < alpha0 - tol or z > -alpha0 + tol:
            raise MembershipError(
                f"zeta entry {z} outside [{alpha0}, {-alpha0}]"
            )
    return entries


# ---------------------------------------------------------------------------
# polytope membership
# ---------------------------------------------------------------------------

def check_PII_hat(alpha, tol=_TOL):
    """Membership in the exponent polytope with a distinguished negative
    alpha_0 balanced by the subcritical pair sums (strict variant)."""
    a = _alpha_entries(alpha)
    if abs(sum(a) - 1.0) > tol:
        raise MembershipError("exponents must sum to 1")
    a0 = a[0]
    if not (-0.5 - tol <= a0 < -tol):
        raise MembershipError("need -1/2 <= alpha_0 < 0 (strictly negative)")
    for r in range(1, 6):
        if not (a0 + tol < a[r] <= 1 + a0 + tol):
            raise MembershipError(f"need alpha_0 < alpha_{r} <= 1 + alpha_0")
    for r, s in itertools.combinations(range(1, 6), 2):
        if not (-tol <= a[r] + a[s] <= 1 + tol):
            raise MembershipError(f"need 0 <= alpha_{r} + alpha_{s} <= 1")
    balance = sum(a[r] + a0 for r in range(1, 6) if a[r] + a0 < -tol)
    if abs(balance - 2 * a0) > tol:
        raise MembershipError(
            "need 2 alpha_0 = sum of the negative pair sums alpha_r + alpha_0"
        )
    return a


def check_PIV(alpha, tol=_TOL):
    a = _alpha_entries(alpha)
    if abs(sum(a) - 1.0) > tol:
        raise MembershipError("exponents must sum to 1")
    if a[4] + a[5] < 1 - tol:
        raise MembershipError("need alpha_4 + alpha_5 >= 1")
    for r, s in itertools.combinations(range(1, 4), 2):
        if a[r] + a[s] < -tol:
            raise MembershipError(f"need alpha_{r} + alpha_{s} >= 0")
    for r in (4, 5):
        if a[0] + a[r] < -tol:
            raise MembershipError(f"need alpha_0 + alpha_{r} >= 0")
    return a


def check_PV(alpha, tol=_TOL):
    a = _alpha_entries(alpha)
    if abs(sum(a) - 1.0) > tol:
        raise MembershipError("exponents must sum to 1")
    if a[0] > -0.5 + tol:
        raise MembershipError("need alpha_0 <= -1/2")
    for r in range(1, 6):
        if a[r] > 0.5 + tol:
            raise MembershipError(f"need alpha_{r} <= 1/2")
    return a


# ---------------------------------------------------------------------------
# exponent functions
# ---------------------------------------------------------------------------

def c_hat_PII(zeta, alpha):
    """Decay exponent on the distinguished-negative-exponent polytope."""
    a = check_PII_hat(alpha)
    a0 = a[0]
    zs = _zeta_entries(zeta, a0)
    base = sum((a[r] + a0) ** 2 for r in range(1, 6) if a[r] < -a0)
    total = 0.0
    for z in zs:
        az = abs(z)
        h = 2 * z * z - 2 * a0 * a0 + base
        for r in range(1, 6):
            ar = a[r]
            if ar < -az:
                h -= 2 * ar * ar + 2 * z * z
            elif ar < az:
                h -= (ar - az) ** 2
        total += h
    return 0.5 * total


def c_IV(zeta, alpha):
    """Decay exponent on the polytope with a dominant exponent pair."""
    a = check_PIV(alpha)
    a0 = a[0]
    zs = _zeta_entries(zeta, a0)
    base = sum((a[r] + a0) ** 2 for r in range(1, 6) if a[r] < -a0)
    pair = (1 - a[4] - a[5]) ** 2
    total = 0.0
    for z in zs:
        az = abs(z)
        h = 2 * z * z - 2 * a0 * a0 - pair
        if 1 + a0 < az:
            h -= (az - a0 - 1) ** 2
        h += base
        for r in range(1, 6):
            ar = a[r]
            if ar > 1 - az:
                h += (az + ar - 1) ** 2
            if ar < -az:
                h -= 2 * ar * ar + 2 * z * z
            elif ar < az:
                h -= (ar - az) ** 2
        total += h
    return 0.5 * total


def c_V(zeta, alpha):
    """Decay exponent on the polytope with a deep single exponent."""
    a = check_PV(alpha)
    a0 = a[0]
    zs = _zeta_entries(zeta, a0)
    total = 0.0
    for z in zs:
        az = abs(z)
        h = 4 * z * z - (a0 - az) ** 2
        if a0 + az < 0:
            h -= (a0 + az) ** 2
        if 1 + a0 < az:
            h -= (1 + a0 - az) ** 2
        if 1 + a0 + az < 0:
            h -= (1 + a0 + az) ** 2
        if 2 + a0 < az:
            h -= (2 + a0 - az) ** 2
        for r in range(1, 6):
            ar = a[r]
            h += (ar + a0) ** 2
            if ar + az < 0:
                h -= (ar + az) ** 2
            if ar < az:
                h -= (ar - az) ** 2
            if 1 + ar < az:
                h -= (1 + ar - az) ** 2
            if 1 - ar < az:
                h += (1 - ar - az) ** 2
        total += h
    return 0.5 * total


# ---------------------------------------------------------------------------
# equality loci and degenerate configurations
# ---------------------------------------------------------------------------

def degenerate_PII(alpha, tol=_TOL):
    """Some pair sum alpha_r + alpha_s (r, s >= 1) vanishes; the exponent
    is then identically zero in zeta."""
    a = _alpha_entries(alpha)
    return any(
        abs(a[r] + a[s]) <= tol
        for r, s in itertools.combinations(range(1, 6), 2)
    )


def equality_locus_PII(zeta, alpha, tol=_TOL):
    a = _alpha_entries(alpha)
    if degenerate_PII(alpha, tol):
        return True
    zs = zeta.entries if isinstance(zeta, ZetaVector) else tuple(zeta)
    return all(abs(abs(z) + a[0]) <= tol for z in zs)


def degenerate_PIV(alpha, tol=_TOL):
    """Configurations where the exponent vanishes on a whole band:
    alpha_4 = alpha_5 = -alpha_0 (vanishing on |zeta_i| >= alpha_1 +
    alpha_2 + alpha_3), or a vanishing pair sum among alpha_1..alpha_3
    (vanishing on |zeta_i| <= alpha_1 + alpha_2 + alpha_3)."""
    a = _alpha_entries(alpha)
    if abs(a[4] + a[0]) <= tol and abs(a[5] + a[0]) <= tol:
        return True
    return any(
        abs(a[r] + a[s]) <= tol
        for r, s in itertools.combinations(range(1, 4), 2)
    )


def equality_locus_PIV(zeta, alpha, tol=_TOL):
    a = _alpha_entries(alpha)
    s123 = a[1] + a[2] + a[3]
    zs = zeta.entries if isinstance(zeta, ZetaVector) else tuple(zeta)
    if all(abs(abs(z) - abs(s123)) <= tol for z in zs):
        return True
    if abs(a[4] + a[0]) <= tol and abs(a[5] + a[0]) <= tol:
        return all(abs(z) >= s123 - tol for z in zs)
    if any(abs(a[r] + a[s]) <= tol
           for r, s in itertools.combinations(range(1, 4), 2)):
        return all(abs(z) <= s123 + tol for z in zs)
    return False


def degenerate_PV(alpha, tol=_TOL):
    """At least four of the bounding equalities alpha_0 = -1/2,
    alpha_r = 1/2 hold."""
    a = _alpha_entries(alpha)
    hits = int(abs(a[0] + 0.5) <= tol)
    hits += sum(1 for r in range(1, 6) if abs(a[r] - 0.5) <= tol)
    return hits >= 4


def equality_locus_PV(zeta, alpha, tol=_TOL):
    zs = zeta.entries if isinstance(zeta, ZetaVector) else tuple(zeta)
    if all(min(abs(abs(z) - 0.5), abs(abs(z) - 1.5)) <= tol for z in zs):
        return True
    return degenerate_PV(alpha, tol)


# ---------------------------------------------------------------------------
# polytope vertices and low-discrepancy samplers
# ---------------------------------------------------------------------------

def vertices_PIV():
    """Vertices: orbits of (0,0,0,0,0,1), (-1/2,-1/2,1/2,1/2,1/2,1/2) and
    (-1,0,0,0,1,1) under permuting entries 1..3 and entries 4..5."""
    out = set()
    for base in ((0, 0, 0, 0, 0, 1), (-0.5, -0.5, 0.5, 0.5, 0.5, 0.5),
                 (-1, 0, 0, 0, 1, 1)):
        for mid in set(itertools.permutations(base[1:4])):
            for tail in set(itertools.permutations(base[4:6])):
                out.add((float(base[0]),) + tuple(map(float, mid))
                        + tuple(map(float, tail)))
    return sorted(out)


def vertices_PV():
    """Vertices: orbits of (-1/2,-1/2,1/2,1/2,1/2,1/2) and
    (-3/2,1/2,1/2,1/2,1/2,1/2) under permuting entries 1..5."""
    out = set()
    for base in ((-0.5, -0.5, 0.5, 0.5, 0.5, 0.5),
                 (-1.5, 0.5, 0.5, 0.5, 0.5, 0.5)):
        for tail in set(itertools.permutations(base[1:])):
            out.add((float(base[0]),) + tuple(map(float, tail)))
    return sorted(out)


_HALTON_BASES = (2, 3, 5, 7, 11, 13, 17, 19)


def _radical_inverse(i, base):
    f, result = 1.0, 0.0
    while i > 0:
        f /= base
        result += f * (i % base)
        i //= base
    return result


def halton(dim, count, start=1):
    """The first ``count`` points of the ``dim``-dimensional Halton
    sequence (prime bases 2, 3, 5, ...)."""
    if dim > len(_HALTON_BASES):
        raise DomainError(f"at most {len(_HALTON_BASES)} dimensions supported")
    bases = _HALTON_BASES[:dim]
    return [
        tuple(_radical_inverse(i, b) for b in bases)
        for i in range(start, start + count)
    ]


def _simplex_weights(u):
    """Map a uniform tuple to barycentric weights via sorted spacings."""
    cuts = sorted(u)
    pts = [cuts[0]] + [b - a for a, b in zip(cuts, cuts[1:])] + [1.0 - cuts[-1]]
    return pts


def _convex_samples(vertices, count, start):
    k = len(vertices)
    out = []
    for u in halton(k - 1, count, start):
        w = _simplex_weights(u)
        out.append(tuple(
            sum(w[j] * vertices[j][r] for j in range(k)) for r in range(6)
        ))
    return out


def sample_PIV(count, start=1):
    """Low-discrepancy points of the dominant-pair polytope (convex
    combinations of its vertices with Halton barycentric weights)."""
    return _convex_samples(vertices_PIV(), count, start)


def sample_PV(count, start=1):
    return _convex_samples(vertices_PV(), count, start)


def sample_PII_hat(count, start=1, margin=5e-3):
    """Low-discrepancy points of the strict polytope, on the generic
    chart where exactly the exponents alpha_1, alpha_2, alpha_3 form the
    negative pair sums (so alpha_1+alpha_2+alpha_3 = -alpha_0 and
    alpha_4 + alpha_5 = 1); other charts are its coordinate images."""
    out = []
    idx = start
    while len(out) < count:
        batch = halton(4, 4 * (count - len(out)) + 64, idx)
        idx += len(batch)
        for u in batch:
            a0 = -0.5 + margin + u[0] * (0.5 - 2 * margin)
            lo, hi = a0 + margin, -a0 - margin
            a1 = lo + u[1] * (hi - lo)
            a2 = lo + u[2] * (hi - lo)
            a3 = -a0 - a1 - a2
            if not (lo <= a3 <= hi):
                continue
            a4 = -a0 + margin + u[3] * (1 + 2 * a0 - 2 * margin)
            a5 = 1.0 - a4
            cand = (a0, a1, a2, a3, a4, a5)
            try:
                check_PII_hat(cand)
            except MembershipError:
                continue
            out.append(cand)
            if len(out) == count:
                break
    return out


def sample_zeta(alpha, u):
    """Map uniform coordinates to a zeta vector in [alpha_0, -alpha_0]^n."""
    a0 = _alpha_entries(alpha)[0]
    return ZetaVector(tuple(a0 + (-2 * a0) * ui for ui in u))


def nonpositivity_scan(which, count, n=2, start=1):
    """Evaluate one of the exponent functions over ``count``
    low-discrepancy (alpha, zeta) samples; returns (max value, argmax).

    ``which`` is "PII", "PIV" or "PV".
    """
    table = {
        "PII": (sample_PII_hat, c_hat_PII),
        "PIV": (sample_PIV, c_IV),
        "PV": (sample_PV, c_V),
    }
    if which not in table:
        raise DomainError(f"which must be one of {sorted(table)}")
    sampler, fn = table[which]
    alphas = sampler(count, start=start)
    zmix = halton(n, count, start + 7)
    best, arg = -math.inf, None
    for alpha, u in zip(alphas, zmix):
        zeta = sample_zeta(alpha, u)
        val = fn(zeta, alpha)
        if val > best:
            best, arg = val, (zeta, alpha)
    return best, arg


# ---------------------------------------------------------------------------
# elementary Pochhammer bound constants
# ---------------------------------------------------------------------------

def pochhammer_bound_constants(M, q, exclusion_eps, policy=DEFAULT_POLICY):
    """Constructive constants (C1, C2) with C1 <= |(z;q)| <= C2 for all
    |z| <= M away (by ``exclusion_eps``) from the zeros of (z;q).

    Inside |z| <= |q|^(1/2) the bounds are the alternating products
    (|q|^(1/2);|q|) and (-|q|^(1/2);|q|); each further annulus
    |q|^(1/2-m) >= |z| >= |q|^(3/2-m) contributes a factor chain with an
    ``exclusion_eps`` lower bound.
    """
    if not (0 < abs(q) < 1):
        raise DomainError("need 0 < |q| < 1")
    if M <= 0 or exclusion_eps <= 0:
        raise DomainError("need M > 0 and exclusion_eps > 0")
    aq = abs(q)
    c1 = qpoch_inf(math.sqrt(aq), aq, policy).real
    c2 = qpoch_inf(-math.sqrt(aq), aq, policy).real
    if M <= math.sqrt(aq):
        return c1, c2
    # number of annuli needed so that M <= |q|^(-n-1/2)
    nshell = max(0, math.ceil(-math.log(M) / math.log(aq) - 0.5))
    lo, hi = c1, c2
    for m in range(1, nshell + 1):
        cand_lo = exclusion_eps * ((-1) ** m) * qpoch_inf(
            aq ** (0.5 - m), aq, policy
        ).real
        cand_hi = qpoch_inf(-(aq ** (-m - 0.5)), aq, policy).real
        lo = min(lo, cand_lo)
        hi = max(hi, cand_hi)
    return lo, hi
