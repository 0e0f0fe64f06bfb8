"""Timing of the compiled kernels against the pure-Python fallback."""
import time

from . import kernels
from .ptree import ProbWeights
from .randomness import make_rng


def _time(fn, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def run_benchmark(n=2000, replicas=20, seed=None):
    """Seconds per call of each kernel on a uniform tree of size ``n``."""
    w = ProbWeights.uniform(n)
    backends = [("python", kernels.python)]
    if kernels.compiled is not None:
        backends.insert(0, ("cython", kernels.compiled))
    parent, root = kernels.python.ab_walk(w.prob, w.alias, make_rng(seed), 10**9)
    timings = []
    for name, mod in backends:
        rng = make_rng(seed)
        timings.append({"kernel": "ab_walk", "backend": name, "seconds": _time(
            lambda: mod.ab_walk(w.prob, w.alias, rng, 10**9), replicas)})
        rng = make_rng(seed)
        timings.append({"kernel": "cut_one", "backend": name, "seconds": _time(
            lambda: mod.cut_one(parent, root, 1, w.by_label, w.prob, w.alias, rng), replicas)})
    return {"n": n, "replicas": replicas, "active": kernels.BACKEND, "timings": timings}
