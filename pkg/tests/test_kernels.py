import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuttree import _pykernels, kernels
from cuttree.randomness import make_rng

from .strategies import weights

compiled = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")


@compiled
@given(weights(1, 60), st.integers(0, 2**32 - 1))
def test_walk_backends_agree(w, seed):
    a = kernels.compiled.ab_walk(w.prob, w.alias, make_rng(seed), 10**9)
    b = _pykernels.ab_walk(w.prob, w.alias, make_rng(seed), 10**9)
    assert a[1] == b[1]
    assert np.array_equal(a[0], b[0])


@compiled
@given(weights(1, 60), st.integers(0, 2**32 - 1), st.data())
def test_cut_backends_agree_and_leave_stream_in_step(w, seed, data):
    parent, root = _pykernels.ab_walk(w.prob, w.alias, make_rng(seed), 10**9)
    v = data.draw(st.integers(1, w.n))
    r1 = make_rng(seed + 1)
    r2 = make_rng(seed + 1)
    a = kernels.compiled.cut_one(parent, root, v, w.by_label, w.prob, w.alias, r1)
    b = _pykernels.cut_one(parent, root, v, w.by_label, w.prob, w.alias, r2)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert r1.random() == r2.random()


@pytest.mark.parametrize("mod", [_pykernels, kernels.compiled] if kernels.compiled else [_pykernels])
def test_walk_cap(mod):
    prob = np.ones(3)
    alias = np.arange(3)
    with pytest.raises(RuntimeError, match="walk did not cover support"):
        mod.ab_walk(prob, alias, make_rng(0), 0)


def test_selected_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
