from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuttree import ProbWeights, RootedTree, sample_ptree, span
from cuttree.cutting import (
    CompleteCutRecord,
    KCutRecord,
    _k_cutting,
    canonical_order,
    coupled_cut_family,
    cut_complete,
    cut_k,
    cut_one,
    record_from_dict,
)
from cuttree.ptree import subtree_above
from cuttree.randomness import make_rng
from cuttree.shuffle import reverse_exact
from cuttree.stats import chi_square

from .oracles import enumerate_run, ptree_law
from .strategies import random_weights, tree_and_weights

SKEW4 = ProbWeights([0.4, 0.3, 0.2, 0.1])


def test_single_vertex():
    w = ProbWeights([1.0])
    t = RootedTree({}, 1)
    rec = cut_one(t, w, 1, make_rng(0))
    assert rec.cuts == (1,) and rec.marks == () and len(rec.tree) == 1
    g = cut_complete(t, w, make_rng(0))
    assert g.cuts == (1,) and len(g.tree) == 1


def test_two_vertices_one_cut_law():
    # the first cut is v itself with probability p_v
    w = ProbWeights([0.7, 0.3])
    t = RootedTree({2: 1}, 1)
    law = enumerate_run(lambda pick: cut_k(t, w, (2,), pick=pick).cuts, w)
    assert law == pytest.approx({(2,): 0.3, (1, 2): 0.7})


def test_errors():
    t = RootedTree({2: 1, 3: 1}, 1)
    w = ProbWeights.uniform(3)
    with pytest.raises(ValueError, match="not a vertex"):
        cut_one(t, w, 9)
    with pytest.raises(ValueError, match="need at least one target"):
        cut_k(t, w, ())
    with pytest.raises(ValueError, match="incompatible dimensions"):
        cut_complete(t, ProbWeights.uniform(4))


def test_one_cut_duality_exact():
    pt = ptree_law(SKEW4)
    law = {}
    for t, q in pt.items():
        for v in SKEW4.labels:
            sub = enumerate_run(lambda pick: cut_k(t, SKEW4, (v,), pick=pick).tree.key(), SKEW4)
            for k, r in sub.items():
                law[(k, v)] = law.get((k, v), 0.0) + q * SKEW4[v] * r
    for t, q in pt.items():
        for v in SKEW4.labels:
            assert law.get((t.key(), v), 0.0) == pytest.approx(q * SKEW4[v], abs=1e-12)


def test_two_cut_duality_exact():
    w = ProbWeights([0.5, 0.3, 0.2])
    pt = ptree_law(w)
    law = {}
    for t, q in pt.items():
        for a in w.labels:
            for b in w.labels:
                sub = enumerate_run(lambda pick: cut_k(t, w, (a, b), pick=pick).tree.key(), w)
                for k, r in sub.items():
                    key = (k, a, b)
                    law[key] = law.get(key, 0.0) + q * w[a] * w[b] * r
    assert sum(law.values()) == pytest.approx(1.0)
    for t, q in pt.items():
        for a in w.labels:
            for b in w.labels:
                assert law.get((t.key(), a, b), 0.0) == pytest.approx(q * w[a] * w[b], abs=1e-12)


def test_complete_cut_tree_law_exact():
    pt = ptree_law(SKEW4)
    law = {}
    for t, q in pt.items():
        for k, r in enumerate_run(lambda pick: cut_complete(t, SKEW4, pick=pick).tree.key(),
                                  SKEW4).items():
            law[k] = law.get(k, 0.0) + q * r
    for t, q in pt.items():
        assert law[t.key()] == pytest.approx(q, abs=1e-12)


def test_one_cut_sampler_matches_law():
    w = ProbWeights([0.5, 0.3, 0.2])
    t = RootedTree({2: 1, 3: 2}, 1)
    exact = enumerate_run(lambda pick: cut_k(t, w, (3,), pick=pick).tree.key(), w)
    rng = make_rng(11)
    counts = Counter(cut_one(t, w, 3, rng).tree.key() for _ in range(20000))
    assert chi_square(counts, exact).pvalue > 1e-3


@given(tree_and_weights(1, 40), st.data())
def test_kernel_matches_generic_k1(data, d):
    t, w, _ = data
    v = d.draw(st.integers(1, w.n))
    s = d.draw(st.integers(0, 2**32))
    a = cut_one(t, w, v, make_rng(s))
    b = cut_k(t, w, (v,), make_rng(s))
    assert a.cuts == b.cuts
    assert a.tree == b.tree
    assert a.marks_by_successor() == b.marks


@given(tree_and_weights(1, 40), st.data())
def test_one_cut_reversal(data, d):
    t, w, rng = data
    rec = cut_one(t, w, d.draw(st.integers(1, w.n)), rng)
    assert reverse_exact(rec) == t
    assert rec.cuts[-1] == rec.target
    assert rec.tree.path_to_root(rec.target)[::-1] == list(rec.cuts)


@given(tree_and_weights(1, 30), st.data())
def test_k_cut_structure_and_reversal(data, d):
    t, w, rng = data
    vs = d.draw(st.lists(st.integers(1, w.n), min_size=1, max_size=5))
    rec = cut_k(t, w, vs, rng)
    h = rec.tree
    assert h.vertices == t.vertices
    assert rec.backbone == span(h, vs)
    assert set(vs) <= set(rec.cuts)
    for x, u in rec.marks.items():
        assert u in subtree_above(h, x)
        assert t.distance(rec.backbone.parent[x], u) == 1
    assert reverse_exact(rec) == t
    again = record_from_dict(rec.to_dict())
    assert isinstance(again, KCutRecord) and reverse_exact(again) == t


@given(tree_and_weights(1, 30))
def test_complete_cut_genealogy(data):
    t, w, rng = data
    rec = cut_complete(t, w, rng)
    g = rec.tree
    order = {x: i for i, x in enumerate(rec.cuts)}
    assert sorted(rec.cuts) == list(range(1, w.n + 1))
    assert g.root == rec.cuts[0]
    for c, q in g.parent.items():
        assert order[q] < order[c]
    back = reverse_exact(rec)
    assert back.edges() == t.edges()
    again = record_from_dict(rec.to_dict())
    assert isinstance(again, CompleteCutRecord)
    assert reverse_exact(again).edges() == t.edges()


def test_complete_equals_k_cutting_with_all_targets():
    rng = make_rng(5)
    for _ in range(50):
        w = random_weights(rng, 12)
        t = sample_ptree(w, rng)
        s = int(rng.integers(2**32))
        a = cut_complete(t, w, make_rng(s))
        b = cut_k(t, w, tuple(w.labels), make_rng(s))
        assert a.cuts == b.cuts
        assert a.tree == b.backbone == b.tree


def test_coupled_family_nests():
    rng = make_rng(9)
    for _ in range(200):
        w = random_weights(rng, 25)
        t = sample_ptree(w, rng)
        vs = [w.draw(rng) for _ in range(4)]
        fam = coupled_cut_family(t, w, vs, rng)
        for k in range(1, 4):
            assert fam[k - 1].backbone == span(fam[k].backbone, vs[:k])


def test_canonical_order():
    t = RootedTree({2: 1, 3: 2, 4: 1, 5: 4}, 1)
    assert canonical_order(t, (3, 5)) == (2, 3, 4, 5)
    assert canonical_order(t, (5, 3)) == (4, 5, 2, 3)
    assert canonical_order(t, (1,)) == ()


def test_record_json_rejects_unknown_kind():
    d = RootedTree({2: 1}, 1).to_dict()
    d["kind"] = "weird"
    with pytest.raises(ValueError, match="unknown record kind"):
        record_from_dict(d)
