import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuttree import ProbWeights, reroot, sample_ptree
from cuttree.icrt import (
    HorizonWarning,
    RealTree,
    ThetaParam,
    TreePoint,
    build_pn,
    cdf_eta1,
    first_separation,
    gamma_walk,
    genealogy_matrix,
    line_break,
    one_cut_distance_matrix,
    poisson_cut_trace,
    restricted_cut_measure,
    simulate_cuts,
    survival_eta1,
)
from cuttree.ptree import span
from cuttree.randomness import make_rng
from cuttree.shuffle import rewire_tau, shuff_one
from cuttree.stats import four_point_ok

from .strategies import random_weights, tree_and_weights

BROWNIAN = ThetaParam(1.0)
HALF = ThetaParam(math.sqrt(0.5), (math.sqrt(0.5),))
MIXED = ThetaParam(0.6, (0.64, 0.48))


def test_theta_validation():
    with pytest.raises(ValueError, match="parameter outside supported class"):
        ThetaParam(0.0, (1.0,))
    with pytest.raises(ValueError, match="nonincreasing"):
        ThetaParam(0.6, (0.48, 0.64))
    with pytest.raises(ValueError, match="not 1"):
        ThetaParam(0.5)


def test_theta_parse_rescales_small_deviation():
    with pytest.warns(UserWarning, match="rescaling"):
        th = ThetaParam.parse([0.6 * (1 + 1e-9), 0.8 * (1 + 1e-9)])
    assert abs(th.norm2 - 1.0) < 1e-12
    with pytest.raises(ValueError):
        ThetaParam.parse([0.6, 0.81])
    assert ThetaParam.parse([0.6, 0.48, 0.64]).thetas == (0.64, 0.48)
    assert ThetaParam.parse(1.0).to_list() == [1.0]


def test_survival_values():
    assert survival_eta1(BROWNIAN, 1.0) == pytest.approx(0.6065306597126334, rel=1e-15)
    assert survival_eta1(BROWNIAN, 0.0) == 1.0
    r = math.sqrt(2)
    expect = math.exp(-0.5) * 2.0 * math.exp(-1.0)
    assert survival_eta1(HALF, r) == pytest.approx(expect, rel=1e-14)
    assert expect == pytest.approx(0.4463, abs=5e-5)
    with pytest.raises(ValueError):
        survival_eta1(BROWNIAN, -1.0)


@given(st.floats(0, 20), st.floats(0, 20))
def test_survival_monotone(a, b):
    lo, hi = sorted((a, b))
    for th in (BROWNIAN, HALF, MIXED):
        assert survival_eta1(th, hi) <= survival_eta1(th, lo) + 1e-15
        assert 0.0 <= cdf_eta1(th, hi) <= 1.0


def test_survival_vectorized():
    r = np.linspace(0, 3, 7)
    v = survival_eta1(MIXED, r)
    assert v.shape == r.shape
    assert v == pytest.approx([survival_eta1(MIXED, float(x)) for x in r])


def test_build_pn_example():
    w = build_pn(HALF, 10001)
    assert w.sigma == pytest.approx(math.sqrt(2) / 101, rel=1e-12)
    assert w[1] == pytest.approx(1 / 101, rel=1e-12)
    assert w[1] / w.sigma == pytest.approx(HALF.thetas[0], rel=1e-12)


def test_build_pn_minimal_n():
    with pytest.raises(ValueError, match="minimal n is 2"):
        build_pn(HALF, 1)
    with pytest.raises(ValueError, match="minimal n is 3"):
        build_pn(ThetaParam(0.8, (0.6,)), 2)
    assert build_pn(ThetaParam(0.8, (0.6,)), 3).n == 3
    assert build_pn(BROWNIAN, 1).n == 1


@pytest.mark.parametrize("theta", [BROWNIAN, HALF, MIXED])
def test_line_break_single_leaf(theta):
    rt = line_break(theta, 1, make_rng(2))
    assert rt.n_vertices == 2
    assert rt.distance(0, 1) == pytest.approx(rt.cutpoints[0])


@pytest.mark.parametrize("theta", [BROWNIAN, HALF, MIXED])
@pytest.mark.parametrize("k", [2, 5, 20])
def test_line_break_invariants(theta, k):
    rng = make_rng(k)
    for _ in range(20):
        rt = line_break(theta, k, rng)
        assert list(rt.cutpoints) == sorted(rt.cutpoints)
        assert rt.total_length == pytest.approx(rt.cutpoints[-1])
        assert rt.n_vertices <= 2 * k
        for leaf in rt.leaves:
            assert rt.children[leaf] == []
        for v in range(k + 1, rt.n_vertices):
            assert len(rt.children[v]) >= 2
        assert rt.distance(0, 1) == pytest.approx(rt.cutpoints[0])
        for j in range(1, k):
            c = rt.joinpoints[j - 1]
            assert c < rt.cutpoints[j]
        for a in rt.atoms:
            assert 0 <= a.point.up < rt.length[a.point.vertex]
        again = RealTree.from_dict(rt.to_dict(), rt.theta0)
        assert np.allclose(again.distance_matrix(), rt.distance_matrix())


def test_line_break_first_cut_law():
    rng = make_rng(31)
    eta = np.array([line_break(HALF, 1, rng).cutpoints[0] for _ in range(20000)])
    frac = float(np.mean(eta > math.sqrt(2)))
    assert abs(frac - survival_eta1(HALF, math.sqrt(2))) < 0.015


def test_line_break_rejects_k0():
    with pytest.raises(ValueError):
        line_break(BROWNIAN, 0)


def test_cut_measure_mass():
    rt = line_break(MIXED, 6, make_rng(4))
    cm = restricted_cut_measure(rt)
    expect = 0.36 * rt.total_length + sum(a.weight for a in rt.atoms)
    assert cm.mass == pytest.approx(expect)


def test_cut_count_matches_mass():
    rt = line_break(MIXED, 4, make_rng(6))
    mass = restricted_cut_measure(rt).mass
    rng = make_rng(7)
    counts = np.array([len(simulate_cuts(rt, 1.5, rng)) for _ in range(4000)])
    assert abs(counts.mean() - 1.5 * mass) < 4 * math.sqrt(1.5 * mass / 4000)
    void = float(np.mean(counts == 0))
    assert abs(void - math.exp(-1.5 * mass)) < 0.03


def test_simulate_cuts_window():
    rt = line_break(BROWNIAN, 3, make_rng(1))
    cp = simulate_cuts(rt, 5.0, make_rng(2), start=2.0)
    assert all(2.0 < t <= 5.0 for t in cp.times)
    assert list(cp.times) == sorted(set(cp.times))
    with pytest.raises(ValueError):
        simulate_cuts(rt, 1.0, make_rng(2), start=1.0)


def _on_path_brute(rt, x, a, b):
    d = rt.point_distance
    pa, pb = TreePoint(a), TreePoint(b)
    return abs(d(pa, x) + d(x, pb) - d(pa, pb)) < 1e-9


def test_first_separation_brute_force():
    rng = make_rng(12)
    for _ in range(40):
        rt = line_break(MIXED, 5, rng)
        cp = simulate_cuts(rt, 1.0, rng)
        for x in cp.points:
            for a in range(rt.n_vertices):
                for b in range(rt.n_vertices):
                    assert rt.on_path(x, a, b) == _on_path_brute(rt, x, a, b)
        for i in rt.leaves:
            for j in rt.leaves:
                got = first_separation(rt, cp, i, j)
                want = next(((t, x) for t, x in zip(cp.times, cp.points)
                             if _on_path_brute(rt, x, i, j)), None)
                assert got == want
    with pytest.raises(ValueError, match="unmarked leaf"):
        first_separation(rt, cp, 1, 99)


def test_genealogy_metric():
    rng = make_rng(3)
    for th in (BROWNIAN, MIXED):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HorizonWarning)
            res = genealogy_matrix(th, 4, 100, rng=rng)
        d = res.matrix
        assert d.shape == (5, 5)
        assert np.array_equal(d, d.T) and np.all(np.diag(d) == 0)
        assert four_point_ok(d)
        assert np.all(res.L_inf > 0)
        assert np.allclose(d[0, 1:], res.L_inf)


def test_genealogy_short_horizon_warns():
    with pytest.warns(HorizonWarning):
        res = genealogy_matrix(BROWNIAN, 2, 100, horizon=1e-6, rng=make_rng(0))
    assert res.residual.max() > 0
    assert res.horizon == 1e-6


def test_genealogy_argument_errors():
    with pytest.raises(ValueError):
        genealogy_matrix(BROWNIAN, 0)
    with pytest.raises(ValueError):
        genealogy_matrix(BROWNIAN, 1, m=0)


@given(tree_and_weights(1, 40), st.data())
def test_one_cut_distances_are_exact(data, d):
    t, w, rng = data
    v = d.draw(st.integers(1, w.n))
    xi = d.draw(st.lists(st.integers(1, w.n), min_size=1, max_size=5))
    trace = poisson_cut_trace(t, w, v, rng)
    h = trace.record.tree
    cd = one_cut_distance_matrix(trace, xi)
    pts = cd.points
    want = np.array([[h.distance(a, b) for b in pts] for a in pts])
    assert np.array_equal(cd.matrix, want)
    assert len(trace.effective) == trace.record.n_cuts
    assert trace.L(math.inf) == trace.record.n_cuts


def test_trace_times_increase():
    rng = make_rng(8)
    w = random_weights(rng, 30)
    tr = poisson_cut_trace(sample_ptree(w, rng), w, 5, rng)
    assert list(tr.times) == sorted(tr.times)
    assert tr.L(0.0) == 0


def _path_edges(t, a, b):
    c = t.lca(a, b)
    out = set()
    for x in (a, b):
        while x != c:
            out.add(frozenset((x, t.parent[x])))
            x = t.parent[x]
    return out


def test_gamma_walk_matches_shuffle_and_counts_rewired_edges():
    rng = make_rng(17)
    for _ in range(150):
        n = int(rng.integers(2, 60))
        w = random_weights(rng, n)
        h = sample_ptree(w, rng)
        u = w.draw(rng)
        xi = [w.draw(rng) for _ in range(4)]
        s = int(rng.integers(2**62))
        g = gamma_walk(h, w, u, xi, make_rng(s))
        t = shuff_one(h, w, u, make_rng(s))
        d = np.array([[t.distance(a, b) for b in xi] for a in xi])
        assert np.array_equal(g.gamma, d)
        assert t == reroot(rewire_tau(h, (u,), g.marks), g.new_root)
        rewired = {frozenset((h.parent[x], m)) for x, m in g.marks.items()}
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert g.mg[i, j] == len(_path_edges(t, xi[i], xi[j]) & rewired)


def test_gamma_walk_bad_vertex():
    w = ProbWeights.uniform(3)
    h = sample_ptree(w, make_rng(0))
    with pytest.raises(ValueError):
        gamma_walk(h, w, 7, [1, 2])
