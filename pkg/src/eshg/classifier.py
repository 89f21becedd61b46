"""Exponent-vector machinery for the p -> 0 limits: fundamental-domain
reduction under the discrete symmetry groups, the piecewise-linear
valuation functions a(alpha) and b(alpha), the vanishing criterion for
the limit weights, and polytope membership / regime selection for the
continuous limits.

Exponent vectors are plain floats; all branch comparisons snap with
tolerance 1e-9, which is far below the spacing of the small-denominator
rationals these vectors are made of in practice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    BalancingError,
    ConvergenceError,
    DomainError,
    HypothesisError,
)

__all__ = [
    "AlphaVector",
    "RegimeLabel",
    "SNAP_TOL",
    "apply_group_word",
    "reduce_fd_m0",
    "reduce_fd_general",
    "a_of_alpha",
    "b_of_alpha",
    "valuation_bracket",
    "zero_criterion",
    "constructive_zero_solution",
    "vanishing_case",
    "classify_continuous",
]

SNAP_TOL = 1e-9
_BAL_TOL = 1e-12
_KINDS = ("discrete", "continuous")


def _near(x, y, tol=SNAP_TOL):
    return abs(x - y) <= tol


def _near_int(x, tol=SNAP_TOL):
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class AlphaVector:
    """Exponent vector attached to the parameter list (t_0,...,t_{2m+5}).

    discrete kind: alpha_0 + alpha_1 = 0 and sum_{r>=2} alpha_r = m+1.
    continuous kind: sum_r alpha_r = m+1.
    """

    entries: tuple
    m: int = 0
    kind: str = "discrete"

    def __post_init__(self):
        entries = tuple(float(a) for a in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}")
        if self.m < 0:
            raise DomainError("m must be nonnegative")
        if len(entries) != 2 * self.m + 6:
            raise DomainError(
                f"expected {2 * self.m + 6} entries for m={self.m}, "
                f"got {len(entries)}"
            )
        if self.kind == "discrete":
            if abs(entries[0] + entries[1]) > _BAL_TOL:
                raise BalancingError("alpha_0 + alpha_1 must vanish")
            if abs(sum(entries[2:]) - (self.m + 1)) > _BAL_TOL:
                raise BalancingError(
                    "sum of alpha_r for r >= 2 must equal m + 1"
                )
        else:
            if abs(sum(entries) - (self.m + 1)) > _BAL_TOL:
                raise BalancingError("sum of all alpha_r must equal m + 1")

    @property
    def tail(self):
        return self.entries[2:]

    def replace_entries(self, entries):
        return AlphaVector(tuple(entries), self.m, self.kind)


@dataclass(frozen=True)
class RegimeLabel:
    """Outcome of continuous-regime classification."""

    tag: str
    zeta: float
    witnesses: tuple = ()
    detail: str = ""


# ---------------------------------------------------------------------------
# Group action and fundamental-domain reduction
# ---------------------------------------------------------------------------
#
# Group words are sequences of primitive moves:
#   ("t1", k)          alpha_0 += k, alpha_1 -= k               (integer k)
#   ("pair", r, s, k)  alpha_r += k, alpha_s -= k               (r, s >= 2)
#   ("swap01",)        interchange alpha_0 and alpha_1          (m = 0 only)
#   ("perm", sigma)    tail permutation: new_tail[i] = tail[sigma[i]]
#   ("half0", s)       s in {1,-1}: alpha_0 += s/2, alpha_1 -= s/2,
#                      alpha_2, alpha_3 += s/2, alpha_4, alpha_5 -= s/2
#   ("half", s)        s in {1,-1}: alpha_0 -= s/2, alpha_1 += s/2,
#                      tail[0:m+2] += s/2, tail[m+2:] -= s/2


def apply_group_word(alpha: AlphaVector, word) -> AlphaVector:
    """Apply a sequence of symmetry-group moves to an exponent vector."""
    e = list(alpha.entries)
    m = alpha.m
    for move in word:
        op = move[0]
        if op == "t1":
            k = move[1]
            e[0] += k
            e[1] -= k
        elif op == "pair":
            _, r, s, k = move
            if r < 2 or s < 2:
                raise DomainError("pair shifts act on indices >= 2")
            e[r] += k
            e[s] -= k
        elif op == "swap01":
            e[0], e[1] = e[1], e[0]
        elif op == "perm":
            sigma = move[1]
            tail = e[2:]
            if sorted(sigma) != list(range(len(tail))):
                raise DomainError("perm move is not a tail permutation")
            e[2:] = [tail[i] for i in sigma]
        elif op == "half0":
            if m != 0:
                raise DomainError("half0 is the m=0 half-integer shift")
            s = 0.5 * move[1]
            e[0] += s
            e[1] -= s
            e[2] += s
            e[3] += s
            e[4] -= s
            e[5] -= s
        elif op == "half":
            s = 0.5 * move[1]
            e[0] -= s
            e[1] += s
            for i in range(2, m + 4):
                e[i] += s
            for i in range(m + 4, 2 * m + 6):
                e[i] -= s
        else:
            raise DomainError(f"unknown group move {op!r}")
    return alpha.replace_entries(e)


def _sort_perm(tail):
    """Stable ascending sort permutation of the tail, or None if sorted."""
    order = sorted(range(len(tail)), key=lambda i: (tail[i], i))
    for i in range(len(tail) - 1):
        if tail[i] > tail[i + 1] + SNAP_TOL:
            return tuple(order)
    return None


def _reduce(alpha: AlphaVector, next_move) -> tuple[AlphaVector, list]:
    word = []
    cur = alpha
    for _ in range(64):
        move = next_move(cur)
        if move is None:
            return cur, word
        word.append(move)
        cur = apply_group_word(cur, [move])
    raise ConvergenceError(
        "fundamental-domain reduction did not stabilize in 64 moves"
    )


def reduce_fd_m0(alpha: AlphaVector) -> tuple[AlphaVector, list]:
    """Reduce an m=0 discrete exponent vector to the fundamental domain

        -1/2 <= alpha_0 <= 0,  alpha_1 = -alpha_0,
        alpha_2 <= alpha_3 <= alpha_4 <= alpha_5,  alpha_4 + alpha_5 <= 1,

    returning the representative and the group word that maps the input
    onto it.  The group is generated by the integer shifts, one
    half-integer shift, tail permutations and the (alpha_0, alpha_1)
    interchange.
    """
    if alpha.kind != "discrete" or alpha.m != 0:
        raise DomainError("reduce_fd_m0 requires a discrete m=0 vector")

    def next_move(cur):
        e = cur.entries
        perm = _sort_perm(e[2:])
        if perm is not None:
            return ("perm", perm)
        if e[5] > e[2] + 1 + SNAP_TOL:
            return ("pair", 2, 5, 1)
        if e[4] + e[5] > 1 + SNAP_TOL:
            return ("half0", 1)
        if abs(e[0]) > 0.5 + SNAP_TOL:
            return ("t1", -round(e[0]))
        if e[0] > SNAP_TOL:
            return ("swap01",)
        return None

    out, word = _reduce(alpha, next_move)
    _check_fd(out, interchange=True)
    return out, word


def reduce_fd_general(alpha: AlphaVector) -> tuple[AlphaVector, list]:
    """Reduce a discrete exponent vector (any m) to the fundamental domain

        -1/2 <= alpha_0 <= 0,  alpha_1 = -alpha_0,
        alpha_2 <= ... <= alpha_{2m+5} <= alpha_2 + 1,

    under the group generated by balanced integer shifts, the
    half-integer shift and tail permutations (no (alpha_0, alpha_1)
    interchange).  In this domain alpha_2 >= -1/2 and
    alpha_{2m+5} <= 3/2 automatically.
    """
    if alpha.kind != "discrete":
        raise DomainError("reduce_fd_general requires a discrete vector")
    last = 2 * alpha.m + 5

    def next_move(cur):
        e = cur.entries
        perm = _sort_perm(e[2:])
        if perm is not None:
            return ("perm", perm)
        if e[last] > e[2] + 1 + SNAP_TOL:
            return ("pair", 2, last, 1)
        if abs(e[0]) > 0.5 + SNAP_TOL:
            return ("t1", -round(e[0]))
        if e[0] > SNAP_TOL:
            return ("half", 1)
        return None

    out, word = _reduce(alpha, next_move)
    _check_fd(out, interchange=False)
    e = out.entries
    if e[2] < -0.5 - SNAP_TOL or e[last] > 1.5 + SNAP_TOL:
        raise ConvergenceError("reduced vector escaped the stated bounds")
    return out, word


def _check_fd(alpha: AlphaVector, interchange):
    e = alpha.entries
    ok = -0.5 - SNAP_TOL <= e[0] <= SNAP_TOL
    tail = e[2:]
    ok = ok and all(
        tail[i] <= tail[i + 1] + SNAP_TOL for i in range(len(tail) - 1)
    )
    if interchange:
        ok = ok and e[4] + e[5] <= 1 + SNAP_TOL
    else:
        ok = ok and tail[-1] <= tail[0] + 1 + SNAP_TOL
    if not ok:
        raise ConvergenceError("reduction terminated outside the domain")


# ---------------------------------------------------------------------------
# Piecewise-linear valuation data
# ---------------------------------------------------------------------------


def _require_fd_m0(alpha):
    if alpha.kind != "discrete" or alpha.m != 0:
        raise DomainError("expected a discrete m=0 vector")
    _check_fd(alpha, interchange=True)


def a_of_alpha(alpha: AlphaVector) -> float:
    """Coefficient of |mu| in the valuation of the m=0 weights, for alpha
    in the fundamental domain of reduce_fd_m0."""
    _require_fd_m0(alpha)
    e = alpha.entries
    a0 = e[0]
    total = -2.0 * a0
    for r in range(1, 6):
        if e[r] + a0 < 0:
            total += a0 + e[r]
        if a0 > e[r]:
            total += a0 - e[r]
    return total


def b_of_alpha(alpha: AlphaVector) -> float:
    """Coefficient of N*n in the valuation of the m=0 weights; always
    nonpositive on the fundamental domain."""
    _require_fd_m0(alpha)
    e = alpha.entries
    a1 = e[1]
    total = 0.0
    for r in range(2, 6):
        if a1 + e[r] < 0:
            total += a1 + e[r]
        if a1 + e[r] > 1:
            total += 1 - a1 - e[r]
    return total


def valuation_bracket(alpha: AlphaVector) -> float:
    """The per-|mu| valuation bracket of the general-m weights for alpha
    in the fundamental domain of reduce_fd_general."""
    if alpha.kind != "discrete":
        raise DomainError("expected a discrete vector")
    e = alpha.entries
    a0 = e[0]
    total = -2.0 * a0
    for r in range(2, len(e)):
        ar = e[r]
        if ar <= a0:
            total += 2.0 * a0
        elif ar < -a0:
            total += a0 + ar
        if 1 + a0 < ar < 1 - a0:
            total += ar - 1 - a0
        elif ar >= 1 - a0:
            total += -2.0 * a0
    return total


def _counts(alpha):
    e = alpha.entries
    a0 = e[0]
    count_a = sum(1 for r in range(2, len(e)) if e[r] < -a0 - SNAP_TOL)
    count_b = sum(1 for r in range(2, len(e)) if e[r] > 1 + a0 + SNAP_TOL)
    return count_a, count_b


def zero_criterion(alpha: AlphaVector) -> tuple[bool, int, int]:
    """Whether the valuation bracket vanishes identically, together with
    the counts A = #{r >= 2: alpha_r < -alpha_0} and
    B = #{r >= 2: alpha_r > 1 + alpha_0}.

    True exactly when one of the following holds:
      - alpha_0 = 0 or alpha_0 = -1/2;
      - alpha_2 <= alpha_0 and -alpha_0 <= alpha_r <= 1 + alpha_0 for r >= 3;
      - alpha_0 < alpha_r < 1 - alpha_0 for all r >= 2 with 2 <= A <= m+3,
        B <= m+1 and the middle entries summing to
        (m+1-B) + (A-2-B) alpha_0.
    """
    if alpha.kind != "discrete":
        raise DomainError("expected a discrete vector")
    e = alpha.entries
    m = alpha.m
    a0 = e[0]
    count_a, count_b = _counts(alpha)
    if _near(a0, 0.0) or _near(a0, -0.5):
        return True, count_a, count_b
    tail = e[2:]
    srt = sorted(tail)
    if srt[0] <= a0 + SNAP_TOL:
        rest = srt[1:]
        ok = all(-a0 - SNAP_TOL <= ar <= 1 + a0 + SNAP_TOL for ar in rest)
        return ok, count_a, count_b
    if all(a0 + SNAP_TOL < ar < 1 - a0 - SNAP_TOL for ar in tail):
        if 2 <= count_a <= m + 3 and count_b <= m + 1:
            mid = sum(
                ar
                for ar in tail
                if -a0 - SNAP_TOL <= ar <= 1 + a0 + SNAP_TOL
            )
            want = (m + 1 - count_b) + (count_a - 2 - count_b) * a0
            return _near(mid, want), count_a, count_b
    return False, count_a, count_b


def constructive_zero_solution(m, count_a, count_b, alpha0) -> AlphaVector:
    """Exponent vector with the prescribed counts (A, B) solving the
    vanishing condition: A tail entries at -alpha_0 + (2+c) alpha_0 / A,
    B at 1 + alpha_0 - c alpha_0 / B and the remaining 2m+4-A-B at the
    common middle value, where c = 2B(A-1)/(A+B)."""
    if not 2 <= count_a <= m + 3:
        raise DomainError("need 2 <= A <= m + 3")
    if not 0 <= count_b <= m + 1:
        raise DomainError("need 0 <= B <= m + 1")
    if not -0.5 < alpha0 < 0:
        raise DomainError("need -1/2 < alpha_0 < 0")
    c = 2.0 * count_b * (count_a - 1) / (count_a + count_b)
    tail = [-alpha0 + (2.0 + c) * alpha0 / count_a] * count_a
    n_mid = 2 * m + 4 - count_a - count_b
    if n_mid:
        mid = ((m + 1 - count_b) + (count_a - 2 - count_b) * alpha0) / n_mid
        tail += [mid] * n_mid
    if count_b:
        tail += [1 + alpha0 - c * alpha0 / count_b] * count_b
    tail.sort()
    return AlphaVector((alpha0, -alpha0, *tail), m, "discrete")


def vanishing_case(alpha: AlphaVector) -> bool:
    """Whether the sum of the limit weights degenerates to zero, i.e.
    alpha matches one of the four exceptional configurations for which
    the termwise limit of the weight sum vanishes."""
    ok, count_a, count_b = zero_criterion(alpha)
    if not ok:
        raise HypothesisError("vanishing_case requires zero_criterion true")
    e = alpha.entries
    m = alpha.m
    a0 = e[0]
    tail = sorted(e[2:])
    if _near(a0, 0.0):
        return (
            count_a == 1
            and count_b == 0
            and all(not _near_int(ar) for ar in tail)
        )
    if _near(a0, -0.5):
        return (
            tail[0] > -0.5 + SNAP_TOL
            and count_a == m + 3
            and count_b == m + 1
        )
    if -0.5 < a0 < 0:
        if count_a == m + 3 and count_b == m + 1:
            return True
        if tail[0] < a0 - SNAP_TOL:
            return all(
                -a0 + SNAP_TOL < ar < 1 + a0 - SNAP_TOL for ar in tail[1:]
            )
    return False


# ---------------------------------------------------------------------------
# Continuous-regime classification
# ---------------------------------------------------------------------------


def _zeta_of(entries):
    """zeta in [-1/2, 0] via |zeta + 1/2| = min(1/2, alpha_r + 1/2,
    alpha_r + alpha_s + alpha_t + 1/2)."""
    best = 0.5
    best = min(best, min(a + 0.5 for a in entries))
    for trip in itertools.combinations(entries, 3):
        best = min(best, sum(trip) + 0.5)
    return -0.5 + max(0.0, best)


def _in_p0(entries):
    if any(a < -0.5 - SNAP_TOL for a in entries):
        return False
    for a, b in itertools.combinations(entries, 2):
        if abs(a - b) > 1 + SNAP_TOL or a + b > 1 + SNAP_TOL:
            return False
    return True


def _match_ip2(entries, zeta):
    if zeta >= -SNAP_TOL:
        return None
    idx = range(len(entries))
    for a, b in itertools.combinations(idx, 2):
        if not (_near(entries[a], zeta) and _near(entries[b], zeta)):
            continue
        if all(
            -zeta - SNAP_TOL <= entries[r] <= 1 + zeta + SNAP_TOL
            for r in idx
            if r not in (a, b)
        ):
            return (a, b)
    return None


def _match_ip3(entries, zeta):
    if zeta >= -SNAP_TOL:
        return None
    idx = range(len(entries))
    for trip in itertools.combinations(idx, 3):
        if not _near(sum(entries[r] for r in trip), zeta, 3 * SNAP_TOL):
            continue
        if not all(
            zeta - SNAP_TOL <= entries[r] <= -zeta + SNAP_TOL for r in trip
        ):
            continue
        if all(
            -zeta - SNAP_TOL <= entries[r] <= 1 + zeta + SNAP_TOL
            for r in idx
            if r not in trip
        ):
            return trip
    return None


def _match_sum(entries):
    idx = range(len(entries))
    for a in idx:
        aa = entries[a]
        if not -0.5 - SNAP_TOL <= aa < -SNAP_TOL:
            continue
        rest = [r for r in idx if r != a]
        if not all(
            aa + SNAP_TOL < entries[r] <= 1 + aa + SNAP_TOL for r in rest
        ):
            continue
        if not all(
            SNAP_TOL < entries[r] + entries[s] <= 1 + SNAP_TOL
            for r, s in itertools.combinations(rest, 2)
        ):
            continue
        neg = sum(
            entries[r] + aa for r in rest if entries[r] + aa < -SNAP_TOL
        )
        if _near(2 * aa, neg, len(entries) * SNAP_TOL):
            return (a,)
    return None


def _match_p_iv(entries):
    """Assignment (a; middle three; top pair b, c) putting the vector in
    the bilateral-series polytope with a distinguished index and a pair
    of large entries."""
    idx = range(len(entries))
    for b, c in itertools.combinations(idx, 2):
        if entries[b] + entries[c] < 1 - SNAP_TOL:
            continue
        for a in idx:
            if a in (b, c):
                continue
            if entries[a] + entries[b] < -SNAP_TOL:
                continue
            if entries[a] + entries[c] < -SNAP_TOL:
                continue
            mids = [r for r in idx if r not in (a, b, c)]
            if all(
                entries[r] + entries[s] >= -SNAP_TOL
                for r, s in itertools.combinations(mids, 2)
            ):
                return (a, b, c)
    return None


def _match_p_v(entries):
    idx = range(len(entries))
    for a in idx:
        if entries[a] > -0.5 + SNAP_TOL:
            continue
        if all(entries[r] <= 0.5 + SNAP_TOL for r in idx if r != a):
            return (a,)
    return None


def _uncovered_interior(entries):
    """Special index for which the vector lies strictly inside the
    subpolytope with one negative entry, or None."""
    idx = range(len(entries))
    for a in idx:
        aa = entries[a]
        if not -0.5 + SNAP_TOL < aa < -SNAP_TOL:
            continue
        rest = [r for r in idx if r != a]
        if not all(
            aa + SNAP_TOL < entries[r] < 1 + aa - SNAP_TOL for r in rest
        ):
            continue
        if all(
            SNAP_TOL < entries[r] + entries[s] < 1 - SNAP_TOL
            for r, s in itertools.combinations(rest, 2)
        ):
            return a
    return None


def classify_continuous(alpha: AlphaVector) -> RegimeLabel:
    """Select the limit regime of the continuous bilinear form for the
    given exponent vector.

    Within the main polytope the tags are PI (all entries nonnegative),
    IP2 (two entries at zeta < 0), IP3 (three entries summing to zeta),
    SUM (single negative entry with the balanced-negative-pairs
    condition), or NONE inside the uncovered interior.  Outside the main
    polytope the bilateral-series polytopes give BILATERAL_IV and
    BILATERAL_V.  Boundary points with a vanishing pair sum among the
    non-negative entries route to IP3 rather than SUM.
    """
    if alpha.kind != "continuous":
        raise DomainError("classify_continuous requires a continuous vector")
    e = alpha.entries
    if alpha.m == 0 and not _in_p0(e):
        w = _match_p_iv(e)
        if w is not None:
            return RegimeLabel("BILATERAL_IV", _zeta_of(e), w)
        w = _match_p_v(e)
        if w is not None:
            return RegimeLabel("BILATERAL_V", _zeta_of(e), w)
        return RegimeLabel(
            "NONE", _zeta_of(e), (), "outside every supported polytope"
        )
    zeta = _zeta_of(e)
    if all(a >= -SNAP_TOL for a in e):
        return RegimeLabel("PI", 0.0)
    w = _match_ip2(e, zeta)
    if w is not None:
        return RegimeLabel("IP2", zeta, w)
    w = _match_ip3(e, zeta)
    if w is not None:
        return RegimeLabel("IP3", zeta, w)
    w = _match_sum(e)
    if w is not None:
        return RegimeLabel("SUM", zeta, w)
    if alpha.m == 0:
        a = _uncovered_interior(e)
        if a is not None:
            return RegimeLabel(
                "NONE",
                zeta,
                (a,),
                "interior of the uncovered subpolytope "
                f"(negative index {a})",
            )
    return RegimeLabel("NONE", zeta, (), "no regime hypothesis matched")
