import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from cuttree import ProbWeights
from cuttree.stats import (
    Verdict,
    chi_square,
    empirical_tv,
    exact_span_law,
    exact_tree_law,
    four_point_ok,
    ks_statistic,
    ks_two_sample,
)
from cuttree.randomness import make_rng


def test_chi_square_matches_scipy_without_pooling():
    counts = {"a": 30, "b": 50, "c": 20}
    law = {"a": 0.25, "b": 0.5, "c": 0.25}
    res = chi_square(counts, law)
    ref = sps.chisquare([30, 50, 20], [25, 50, 25])
    assert res.statistic == pytest.approx(ref.statistic)
    assert res.pvalue == pytest.approx(ref.pvalue)
    assert res.df == 2


def test_chi_square_pools_small_classes():
    law = {0: 0.9, 1: 0.05, 2: 0.03, 3: 0.02}
    res = chi_square({0: 90, 1: 5, 2: 3, 3: 2}, law)
    assert res.n_classes == 3
    assert res.statistic == pytest.approx(0.0)


def test_chi_square_outside_support():
    res = chi_square({"z": 1, "a": 9}, {"a": 1.0})
    assert res.pvalue == 0.0
    with pytest.raises(ValueError):
        chi_square({}, {"a": 1.0})


def test_ks_matches_scipy():
    x = make_rng(1).normal(size=500)
    res = ks_statistic(x, sps.norm.cdf)
    ref = sps.kstest(x, "norm")
    assert res.statistic == pytest.approx(ref.statistic, abs=1e-12)
    assert res.pvalue == pytest.approx(ref.pvalue, rel=0.05)


def test_ks_two_sample_matches_scipy_with_ties():
    rng = make_rng(2)
    a = rng.integers(0, 10, 400)
    b = rng.integers(0, 11, 300)
    res = ks_two_sample(a, b)
    assert res.statistic == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_input_errors():
    with pytest.raises(ValueError, match="at least 30"):
        ks_statistic([0.1, 0.2], sps.norm.cdf)
    with pytest.raises(ValueError, match="NaN"):
        ks_statistic([math.nan] * 40, sps.norm.cdf)
    with pytest.raises(ValueError, match="empty"):
        ks_two_sample([], [1.0] * 40)


def test_empirical_tv():
    assert empirical_tv([1, 1, 2, 2], {1: 0.5, 2: 0.5}) == 0.0
    assert empirical_tv([1, 1, 1, 1], {1: 0.5, 2: 0.5}) == pytest.approx(0.5)
    assert empirical_tv([3], {1: 1.0}) == pytest.approx(1.0)


def test_exact_laws_small():
    w = ProbWeights([0.7, 0.3])
    law = exact_tree_law(w)
    assert sorted(law.values()) == pytest.approx([0.3, 0.7])
    # span size 1 iff V is the root: p1*p1 + p2*p2
    span = exact_span_law(w)
    assert span[1] == pytest.approx(0.49 + 0.09)
    assert span[2] == pytest.approx(1 - 0.58)
    w4 = ProbWeights([0.4, 0.3, 0.2, 0.1])
    assert math.fsum(exact_tree_law(w4).values()) == pytest.approx(1.0, abs=1e-12)
    assert len(exact_tree_law(w4)) == 64


def test_four_point():
    pts = make_rng(3).random(6)
    # points on a line form a tree metric
    d = np.abs(pts[:, None] - pts[None, :])
    assert four_point_ok(d)
    cyc = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], dtype=float)
    assert not four_point_ok(cyc)
    assert not four_point_ok(np.array([[0, 1], [2, 0]]))


def test_verdict_serialization():
    v = Verdict("x", 0.1, 0.2, True, 7, 100, {"a": 1}, {"runtime_s": 3.0})
    assert list(v.to_dict()) == ["name", "statistic", "threshold", "pass", "seed",
                                 "n_samples", "details"]
    assert "runtime_s" not in v.to_json()
    assert v.line().startswith("PASS x:")
