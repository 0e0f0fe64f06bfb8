"""Seeding, stream splitting and the discrete samplers shared by every module.

All randomness flows through ``numpy.random.Generator`` objects backed by
Philox.  Replicated experiments are split into fixed-size chunks and every
chunk gets its own stream derived from ``(seed, key, chunk)``, so results do
not depend on how many worker threads run the chunks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_SEED = 20131104
SEED_ENV = "CUTTREE_SEED"
CHUNK = 1000

# Restricted draws reject against the global alias table when the allowed
# set carries at least this much mass; below it a linear inverse-CDF scan
# is cheaper.  The compiled kernels use the same rule.
REJECTION_MASS = 0.25


def resolve_seed(seed=None) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env)
    return DEFAULT_SEED


def make_rng(seed=None, key=()) -> np.random.Generator:
    """Philox generator for ``seed``; ``key`` selects an independent substream."""
    ss = np.random.SeedSequence(resolve_seed(seed), spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)


def run_chunked(fn, n_replicas, seed, key=(), threads=1, chunk=CHUNK):
    """Call ``fn(rng, count)`` on consecutive chunks and concatenate the lists.

    Chunk ``c`` always draws from ``make_rng(seed, key + (c,))`` whatever the
    thread count.
    """
    jobs = []
    start = 0
    c = 0
    while start < n_replicas:
        count = min(chunk, n_replicas - start)
        jobs.append((c, count))
        start += count
        c += 1

    def one(job):
        c, count = job
        return fn(make_rng(seed, tuple(key) + (c,)), count)

    if threads and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    out = []
    for part in parts:
        out.extend(part)
    return out


def alias_table(p):
    """Vose alias table for the probability vector ``p`` (0-based)."""
    p = np.asarray(p, dtype=np.float64)
    n = len(p)
    prob = np.ones(n, dtype=np.float64)
    alias = np.arange(n, dtype=np.int64)
    scaled = [float(x) * n for x in p]
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    return prob, alias


def alias_draw(prob, alias, n, rng) -> int:
    """One label in ``1..n`` from an alias table given as Python lists."""
    x = rng.random() * n
    i = int(x)
    if i >= n:
        i = n - 1
    if x - i < prob[i]:
        return i + 1
    return alias[i] + 1


def draw_restricted(p, members, contains, rng, prob, alias):
    """Draw from ``p`` conditioned on the sorted label list ``members``.

    ``p`` is indexed by label (``p[0]`` unused), ``contains`` tests
    membership and ``prob``/``alias`` is the global alias table.
    """
    mass = 0.0
    for w in members:
        mass += p[w]
    if mass <= 0.0:
        raise ValueError("restricted set has zero mass")
    if mass >= REJECTION_MASS:
        n = len(prob)
        while True:
            w = alias_draw(prob, alias, n, rng)
            if contains(w):
                return w
    u = rng.random() * mass
    acc = 0.0
    for w in members:
        acc += p[w]
        if u < acc:
            return w
    return members[-1]
