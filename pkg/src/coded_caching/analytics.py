"""Exact subpacketization, rate and memory figures plus the Maddah-Ali-Niesen baseline."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .bounded_subsets import (
    SchemeParams,
    binomial,
    count_bounded_closed,
    count_containing,
)
from .errors import ParameterError, checked

SWEEP_HEADER = ("n", "ell", "F", "log2_F", "R_num", "R_den", "R_decimal", "F_upper")


@dataclass(frozen=True)
class SchemeMetrics:
    F: int
    R: Fraction
    cache_ratio: Fraction
    F_upper: int
    n: int


@dataclass(frozen=True)
class BaselineMetrics:
    F_mn: int
    R_mn: Fraction


def closed_form_rate(params: SchemeParams) -> Fraction:
    """Rate as (m/(m-1)) times the ratio of the two containing-element sums."""
    K, m, ell = params.K, params.m, params.ell
    return Fraction(m, m - 1) * Fraction(count_containing(K, m - 1, ell), count_containing(K, m, ell))


def metrics(params: SchemeParams) -> SchemeMetrics:
    K, m, ell = params.K, params.m, params.ell
    F = count_bounded_closed(K, m, ell)
    R = Fraction(count_bounded_closed(K, m - 1, ell), F)
    if R != closed_form_rate(params):
        raise ArithmeticError(f"rate mismatch for {params}: {R} vs {closed_form_rate(params)}")
    # (1 - M/N) K = m, so the bound is K * C(m + n, n)
    F_upper = checked(K * binomial(m + params.n, params.n))
    return SchemeMetrics(F=F, R=R, cache_ratio=params.cache_ratio, F_upper=F_upper, n=params.n)


def mn_baseline(K: int, t: int) -> BaselineMetrics:
    if not 1 <= t <= K - 1:
        raise ParameterError(f"need 1 <= t <= K-1, got K={K}, t={t}")
    # K (1 - t/K) / (1 + t) = (K - t) / (1 + t)
    return BaselineMetrics(F_mn=binomial(K, t), R_mn=Fraction(K - t, 1 + t))


def mn_equivalence_threshold(K: int, t: int) -> int:
    """Smallest n with ``n > t - K/(K-t)``, clamped to ``[0, t]``."""
    if not 1 <= t <= K - 2:
        raise ParameterError(f"need 1 <= t <= K-2, got K={K}, t={t}")
    bound = t - Fraction(K, K - t)
    return min(max(math.floor(bound) + 1, 0), t)


def log2_exact(x: int) -> float:
    """log2 of a positive integer without first rounding it to a float."""
    if x <= 0:
        raise ParameterError(f"log2 needs a positive integer, got {x}")
    shift = max(x.bit_length() - 53, 0)
    return shift + math.log2(x >> shift)


def decimal(x: Fraction | float, digits: int = 12) -> str:
    return f"{float(x):.{digits}g}"


@dataclass(frozen=True)
class SweepRow:
    n: int
    ell: int
    F: int
    log2_F: float
    R: Fraction
    F_upper: int

    def as_csv(self) -> list[str]:
        return [
            str(self.n),
            str(self.ell),
            str(self.F),
            decimal(self.log2_F),
            str(self.R.numerator),
            str(self.R.denominator),
            decimal(self.R),
            str(self.F_upper),
        ]


def sweep(K: int, t: int, n_min: int = 0, n_max: int | None = None) -> list[SweepRow]:
    """One row per n in ``[n_min, n_max]`` (inclusive); empty when ``n_min > n_max``."""
    m = K - t
    if m < 2 or t < 1:
        raise ParameterError(f"need t >= 1 and m = K - t >= 2, got K={K}, t={t}")
    if n_max is None:
        n_max = t
    if n_min > n_max:
        return []
    if n_min < 0 or n_max > t:
        raise ParameterError(f"n range [{n_min}, {n_max}] not within [0, {t}]")
    rows = []
    for n in range(n_min, n_max + 1):
        params = SchemeParams.from_tn(K, t, n)
        mt = metrics(params)
        rows.append(SweepRow(n, params.ell, mt.F, log2_exact(mt.F), mt.R, mt.F_upper))
    return rows


def monotonicity_violations(rows: Iterable[SweepRow]) -> list[str]:
    """Adjacent rows where F decreases or R increases as n grows."""
    rows = list(rows)
    problems = []
    for prev, cur in zip(rows, rows[1:]):
        if cur.F < prev.F:
            problems.append(f"F decreases from n={prev.n} to n={cur.n}: {prev.F} -> {cur.F}")
        if cur.R > prev.R:
            problems.append(f"R increases from n={prev.n} to n={cur.n}: {prev.R} -> {cur.R}")
    return problems


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()
