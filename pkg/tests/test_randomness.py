import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuttree import ProbWeights
from cuttree.randomness import (
    REJECTION_MASS,
    alias_table,
    draw_restricted,
    make_rng,
    resolve_seed,
    run_chunked,
)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=40))
def test_alias_table_reproduces_the_vector(raw):
    p = np.array(raw) / np.sum(raw)
    prob, alias = alias_table(p)
    n = len(p)
    # mass each column hands to each label must add back up to p
    mass = prob / n
    np.add.at(mass, alias, (1.0 - prob) / n)
    assert np.allclose(mass, p, atol=1e-12)


def test_alias_draw_frequencies():
    w = ProbWeights([0.5, 0.3, 0.15, 0.05])
    rng = make_rng(1)
    counts = np.bincount([w.draw(rng) for _ in range(40000)], minlength=5)[1:]
    assert np.allclose(counts / 40000, w.p, atol=0.01)


def test_restricted_draw_uses_both_regimes():
    w = ProbWeights([0.4, 0.3, 0.2, 0.1])
    rng = make_rng(2)
    for members in ([1, 2], [3, 4], [4]):
        mass = sum(w[m] for m in members)
        assert (mass >= REJECTION_MASS) == (members != [4])
        got = [draw_restricted(w._lab_list, members, set(members).__contains__, rng,
                               w._prob_list, w._alias_list) for _ in range(20000)]
        for m in members:
            assert abs(got.count(m) / len(got) - w[m] / mass) < 0.015


def test_chunked_results_ignore_thread_count():
    fn = lambda rng, c: rng.random(c).tolist()
    a = run_chunked(fn, 2500, 9, (3,), threads=1, chunk=300)
    b = run_chunked(fn, 2500, 9, (3,), threads=4, chunk=300)
    assert a == b
    assert len(a) == 2500


def test_substreams_differ():
    assert make_rng(1, (0,)).random() != make_rng(1, (1,)).random()


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("CUTTREE_SEED", "77")
    assert resolve_seed(None) == 77
    assert resolve_seed(5) == 5
    monkeypatch.delenv("CUTTREE_SEED")
    assert isinstance(resolve_seed(None), int)


def test_weights_validation():
    with pytest.raises(ValueError):
        ProbWeights([0.5, 0.6])
    with pytest.raises(ValueError):
        ProbWeights([1.0, 0.0])
    with pytest.raises(ValueError):
        ProbWeights([])
    w = ProbWeights.from_json(ProbWeights([0.25, 0.75]).to_json())
    assert list(w.p) == [0.25, 0.75]
