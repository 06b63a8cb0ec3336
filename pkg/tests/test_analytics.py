import csv
import io
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coded_caching.analytics import (
    SWEEP_HEADER,
    closed_form_rate,
    log2_exact,
    metrics,
    mn_baseline,
    mn_equivalence_threshold,
    monotonicity_violations,
    sweep,
    sweep_csv,
)
from coded_caching.bounded_subsets import SchemeParams
from coded_caching.errors import ParameterError

from oracles import bounded_by_definition


def test_metrics_small():
    mt = metrics(SchemeParams(6, 3, 3))
    assert (mt.F, mt.R, mt.cache_ratio, mt.n) == (18, Fraction(5, 6), Fraction(1, 2), 1)
    assert mt.F == len(bounded_by_definition(6, 3, 3))
    assert mt.R == Fraction(len(bounded_by_definition(6, 2, 3)), 18)
    assert mt.F_upper == 24


def test_metrics_mn_regime():
    mt = metrics(SchemeParams(50, 25, 2))
    assert mt.F == math.comb(50, 25)
    assert mt.R == Fraction(25, 26) == mn_baseline(50, 25).R_mn


@pytest.mark.parametrize("K,m", [(6, 3), (10, 4), (50, 25), (30, 2)])
def test_linear_endpoint(K, m):
    mt = metrics(SchemeParams(K, m, K - m + 1))
    assert mt.n == 0 and mt.F_upper == K and mt.F <= K


def test_mn_baseline():
    b = mn_baseline(6, 3)
    assert (b.F_mn, b.R_mn) == (20, Fraction(3, 4))
    assert mn_baseline(9, 8).R_mn == Fraction(1, 9)
    assert mn_baseline(50, 25).R_mn == Fraction(25, 26)
    with pytest.raises(ParameterError):
        mn_baseline(6, 6)


def test_threshold_examples():
    assert mn_equivalence_threshold(50, 25) == 24
    assert mn_equivalence_threshold(6, 3) == 2
    assert metrics(SchemeParams.from_tn(6, 3, 1)).F == 18
    assert metrics(SchemeParams.from_tn(6, 3, 2)).F == 20
    assert mn_equivalence_threshold(7, 1) == 0
    with pytest.raises(ParameterError):
        mn_equivalence_threshold(6, 5)


@pytest.mark.parametrize("K", range(3, 31))
def test_threshold_is_exactly_where_mn_starts(K):
    for t in range(1, K - 1):
        base = mn_baseline(K, t)
        threshold = mn_equivalence_threshold(K, t)
        for n in range(t + 1):
            mt = metrics(SchemeParams.from_tn(K, t, n))
            same = mt.F == base.F_mn and mt.R == base.R_mn
            assert same == (n >= threshold), (K, t, n)


@given(st.integers(3, 60).flatmap(lambda K: st.tuples(st.just(K), st.integers(2, K - 1))).flatmap(
    lambda km: st.tuples(st.just(km[0]), st.just(km[1]), st.integers(1, km[0] - km[1] + 1))
))
def test_metrics_invariants(case):
    params = SchemeParams(*case)
    mt = metrics(params)
    assert mt.F <= mt.F_upper
    assert math.gcd(mt.R.numerator, mt.R.denominator) == 1
    assert mt.R == closed_form_rate(params)


@pytest.mark.parametrize("x", [1, 2, 3, 1023, 2**53 + 1, math.comb(50, 25), 3**200])
def test_log2_exact(x):
    assert log2_exact(x) == pytest.approx(math.log2(x), rel=1e-15)


def test_log2_exact_powers_of_two():
    for e in (0, 1, 52, 53, 54, 300):
        assert log2_exact(2**e) == e


def test_sweep_small():
    rows = sweep(6, 3)
    assert [(r.n, r.ell, r.F) for r in rows] == [(0, 4, 6), (1, 3, 18), (2, 2, 20), (3, 1, 20)]
    assert rows[-1].R == Fraction(3, 4)
    assert monotonicity_violations(rows) == []
    assert sweep(6, 3, 5, 4) == []
    with pytest.raises(ParameterError):
        sweep(6, 3, 0, 4)
    with pytest.raises(ParameterError):
        sweep(6, 5)


def test_monotonicity_report():
    rows = sweep(6, 3)
    assert len(monotonicity_violations(rows[::-1])) == 4


def test_sweep_csv_schema():
    text = sweep_csv(sweep(6, 3))
    assert text.startswith("n,ell,F,log2_F,R_num,R_den,R_decimal,F_upper\n")
    assert "\r" not in text and text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == SWEEP_HEADER
    assert rows[2] == ["1", "3", "18", "4.16992500144", "5", "6", "0.833333333333", "24"]
    assert sweep_csv([]) == ",".join(SWEEP_HEADER) + "\n"
