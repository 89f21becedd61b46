"""Partitions and weakly decreasing integer signatures.

Signatures are plain tuples of integers, weakly decreasing; the ambient
length is the tuple length.  Partitions are signatures with nonnegative
parts; trailing zeros are allowed (and meaningful in fixed-n contexts).
"""

from __future__ import annotations

from .errors import DomainError

__all__ = [
    "is_signature",
    "is_partition",
    "normalize",
    "weight",
    "nstat",
    "nstat_conj",
    "binom2",
    "conjugate",
    "complement",
    "double_square",
    "subpartitions",
]


def is_signature(lam) -> bool:
    return all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def is_partition(lam) -> bool:
    return is_signature(lam) and all(part >= 0 for part in lam)


def normalize(lam):
    """Strip trailing zeros (canonical form for length-insensitive equality)."""
    lam = tuple(lam)
    n = len(lam)
    while n > 0 and lam[n - 1] == 0:
        n -= 1
    return lam[:n]


def weight(lam) -> int:
    """|lambda| = sum of parts."""
    return sum(lam)


def nstat(lam) -> int:
    """n(lambda) = sum_i lambda_i * (i-1), 1-based i."""
    return sum(part * i for i, part in enumerate(lam))


def binom2(k: int) -> int:
    """binomial(k, 2) = k(k-1)/2 for every integer k (negative included)."""
    return k * (k - 1) // 2


def nstat_conj(lam) -> int:
    """n(lambda') = sum_i binom(lambda_i, 2), defined for any signature."""
    return sum(binom2(part) for part in lam)


def conjugate(lam):
    """Conjugate partition: lambda'_j = #{i : lambda_i >= j}."""
    if not is_partition(lam):
        raise DomainError("conjugate requires a partition (nonnegative parts)")
    lam = normalize(lam)
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part >= j) for j in range(1, lam[0] + 1))


def complement(lam, m: int, n: int):
    """Complementary partition inside the m^n box: (m^n - lam)_i = m - lam_{n+1-i}."""
    lam = tuple(lam)
    if len(lam) > n or any(part < 0 for part in lam) or (lam and lam[0] > m):
        raise DomainError(f"partition {lam} does not fit in the {m}^{n} box")
    padded = lam + (0,) * (n - len(lam))
    return tuple(m - padded[n - 1 - i] for i in range(n))


def double_square(lam):
    """The partition 2*lambda^2 with parts 2*lambda_{ceil(i/2)} (each part
    doubled and repeated twice)."""
    out = []
    for part in lam:
        out.append(2 * part)
        out.append(2 * part)
    return tuple(out)


def subpartitions(N: int, n: int):
    """Iterate over all partitions mu inside the N^n box, padded to length n.

    Yields each of the binomial(N+n, n) partitions exactly once, in
    lexicographically decreasing order of the padded tuple.
    """
    if N < 0 or n < 0:
        raise DomainError("subpartitions requires N, n >= 0")

    def rec(prefix, bound, remaining):
        if remaining == 0:
            yield tuple(prefix)
            return
        for part in range(bound, -1, -1):
            prefix.append(part)
            yield from rec(prefix, part, remaining - 1)
            prefix.pop()

    yield from rec([], N, n)
