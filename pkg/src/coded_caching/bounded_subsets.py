"""Gap-vector representation of subsets of Z_K and bounded-subset counting.

A subset A of Z_K = {0, ..., K-1} is described, for each of its elements k,
by the circular gaps between consecutive members starting at k.  A subset is
*ell-bounded* when its largest circular gap is at least ``ell``; these
subsets index the packets and delivery messages of the caching scheme.

Subsets are represented as strictly increasing tuples of ints, which is also
their canonical form.  Canonical order is lexicographic order on those tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import ParameterError, checked

UserSubset = tuple[int, ...]


@dataclass(frozen=True)
class SchemeParams:
    """Validated scheme parameters (K users, packet subsets of size m, bound ell)."""

    K: int
    m: int
    ell: int

    def __post_init__(self) -> None:
        for name in ("K", "m", "ell"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if not 2 <= self.m <= self.K - 1:
            raise ParameterError(f"need 2 <= m <= K-1, got K={self.K}, m={self.m}")
        if not 1 <= self.ell <= self.K - self.m + 1:
            raise ParameterError(
                f"need 1 <= ell <= K-m+1 = {self.K - self.m + 1}, got ell={self.ell}"
            )

    @classmethod
    def from_tn(cls, K: int, t: int, n: int) -> SchemeParams:
        """Build from cache level ``t = K*M/N`` and polynomial degree ``n``."""
        if not 0 <= n <= t:
            raise ParameterError(f"need 0 <= n <= t, got t={t}, n={n}")
        m = K - t
        return cls(K, m, K - m + 1 - n)

    @property
    def t(self) -> int:
        return self.K - self.m

    @property
    def n(self) -> int:
        return self.K - self.m + 1 - self.ell

    @property
    def cache_ratio(self) -> Fraction:
        return Fraction(self.t, self.K)


@dataclass(frozen=True)
class GapVector:
    """An anchor in Z_K followed by the circular gaps to the next members."""

    anchor: int
    gaps: tuple[int, ...]

    def validate(self, K: int) -> None:
        if not 0 <= self.anchor < K:
            raise ParameterError(f"anchor {self.anchor} not in Z_{K}")
        if not self.gaps:
            raise ParameterError("gap vector needs at least one gap")
        if any(a < 1 for a in self.gaps):
            raise ParameterError(f"gaps must be >= 1, got {self.gaps}")
        if sum(self.gaps) != K:
            raise ParameterError(f"gaps must sum to K={K}, got {sum(self.gaps)}")

    @property
    def max_gap(self) -> int:
        return max(self.gaps)


def canonical(elements: Iterable[int], K: int) -> UserSubset:
    """Return ``elements`` as a sorted tuple after checking membership in Z_K."""
    subset = tuple(sorted(set(elements)))
    if subset and (subset[0] < 0 or subset[-1] >= K):
        raise ParameterError(f"subset {subset} is not contained in Z_{K}")
    return subset


def expand(v: GapVector, K: int) -> UserSubset:
    """Map a gap vector to the subset it represents."""
    v.validate(K)
    members = []
    position = v.anchor
    # the last gap only closes the circle, so it contributes no new member
    for a in v.gaps:
        members.append(position % K)
        position += a
    return tuple(sorted(members))


def decompose(A: Iterable[int], k: int, K: int) -> GapVector:
    """Gap vector of ``A`` anchored at its member ``k``."""
    A = canonical(A, K)
    if k not in A:
        raise ParameterError(f"anchor {k} is not a member of {A}")
    i0 = A.index(k)
    rotated = A[i0:] + A[:i0]
    gaps = [(rotated[(i + 1) % len(A)] - rotated[i]) % K for i in range(len(A))]
    if len(A) == 1:
        gaps = [K]
    return GapVector(k, tuple(gaps))


def fiber(A: Iterable[int], K: int) -> list[GapVector]:
    """All gap vectors representing ``A``, one per member, in anchor order."""
    A = canonical(A, K)
    if not A:
        raise ParameterError("fiber of the empty set is undefined")
    return [decompose(A, k, K) for k in A]


def max_gap(A: UserSubset, K: int) -> int:
    """Largest circular gap between consecutive members of a canonical subset."""
    if len(A) == 1:
        return K
    inner = max(b - a for a, b in zip(A, A[1:]))
    return max(inner, K + A[0] - A[-1])


def is_bounded(A: Iterable[int], ell: int, K: int) -> bool:
    """True iff ``A`` has a circular gap of length at least ``ell``.

    Every gap vector of ``A`` carries the same multiset of gaps, so testing a
    single fiber element decides membership.
    """
    A = canonical(A, K)
    if not A:
        raise ParameterError("boundedness of the empty set is undefined")
    return decompose(A, A[0], K).max_gap >= ell


def _check_count_args(K: int, s: int, ell: int) -> None:
    if K < 1:
        raise ParameterError(f"need K >= 1, got {K}")
    if not 1 <= s <= K:
        raise ParameterError(f"need 1 <= size <= K, got size={s}, K={K}")
    if not 1 <= ell <= K - s + 1:
        raise ParameterError(f"need 1 <= ell <= K-size+1 = {K - s + 1}, got ell={ell}")


def enumerate_bounded(K: int, s: int, ell: int) -> list[UserSubset]:
    """All ell-bounded ``s``-subsets of Z_K in lexicographic order."""
    _check_count_args(K, s, ell)
    # itertools.combinations emits sorted tuples in lexicographic order
    return [A for A in itertools.combinations(range(K), s) if max_gap(A, K) >= ell]


def binomial(a: int, b: int) -> int:
    """Binomial coefficient with C(a, b) = 0 whenever b < 0, b > a or a < 0."""
    if a < 0 or b < 0 or b > a:
        return 0
    return checked(math.comb(a, b))


def _bounded_sum(K: int, s: int, ell: int) -> int:
    total = 0
    for i in range(1, s + 1):
        term = checked(binomial(s, i) * binomial(K - 1 - i * (ell - 1), s - 1))
        total = checked(total + term if i % 2 == 1 else total - term)
    return total


def count_containing(K: int, s: int, ell: int) -> int:
    """Number of ell-bounded ``s``-subsets of Z_K containing a fixed element."""
    _check_count_args(K, s, ell)
    return _bounded_sum(K, s, ell)


def count_bounded_closed(K: int, s: int, ell: int) -> int:
    """Closed-form number of ell-bounded ``s``-subsets of Z_K."""
    _check_count_args(K, s, ell)
    numerator = checked(K * _bounded_sum(K, s, ell))
    quotient, remainder = divmod(numerator, s)
    assert remainder == 0, (K, s, ell)
    return quotient


def forbidden_composition_count(s: int, cap: int, total: int) -> int:
    """Number of ``s``-tuples with entries in ``[0, cap)`` summing to ``total``."""
    if s < 1 or cap < 1 or total < 0:
        raise ParameterError(f"need s >= 1, cap >= 1, total >= 0; got {s}, {cap}, {total}")
    count = 0
    for i in range(s + 1):
        term = checked(binomial(s, i) * binomial(total + s - 1 - i * cap, s - 1))
        count = checked(count - term if i % 2 else count + term)
    return count


def count_bounded_upper(K: int, s: int, ell: int) -> int:
    """Upper bound ``K * C(K - ell + 1, s)`` on the number of bounded subsets."""
    _check_count_args(K, s, ell)
    return checked(K * binomial(K - ell + 1, s))
