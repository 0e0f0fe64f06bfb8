"""Named statistical and exactness checks, shared by the CLI and the tests."""
from __future__ import annotations

import math
import time
import warnings
from collections import Counter

import numpy as np

from .cutting import coupled_cut_family, cut_complete, cut_one
from .icrt import ThetaParam, build_pn, cdf_eta1, gamma_walk, genealogy_matrix, line_break
from .ptree import ProbWeights, enumerate_parent_arrays, repeat_times, sample_ptree, span, subtree_above
from .randomness import make_rng, resolve_seed, run_chunked
from .shuffle import reverse_exact, rewire_tau, shuff_one
from .stats import (
    Verdict,
    chi_square,
    empirical_tv,
    exact_span_law,
    exact_tree_law,
    four_point_ok,
    ks_statistic,
    ks_two_sample,
)

SUITES = {}


def suite(name):
    def deco(fn):
        fn.key = len(SUITES)
        SUITES[name] = fn
        return fn
    return deco


def run_suite(name, seed=None, threads=1, scale=1.0):
    """Run one suite (or ``"all"``) and return a list of verdicts.

    ``scale`` shrinks replica counts for smoke runs; criteria are only
    meaningful at ``scale=1``.
    """
    if name == "all":
        out = []
        for n in SUITES:
            out.extend(run_suite(n, seed, threads, scale))
        return out
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    seed = resolve_seed(seed)
    return [fn(seed, (fn.key,), threads, scale)]


def _count(n, scale):
    return max(30, int(round(n * scale)))


def _random_weights(rng, n, floor=0.05):
    w = rng.random(n) + floor
    return ProbWeights.normalized(w)


@suite("cayley")
def _cayley(seed, key, threads, scale):
    t0 = time.perf_counter()
    rng = make_rng(seed, key)
    worst = 0.0
    for n in range(1, 8):
        parents = list(enumerate_parent_arrays(n))
        counts = np.zeros((len(parents), n + 1), dtype=np.int64)
        for r, (par, root) in enumerate(parents):
            for c in range(1, n + 1):
                if c != root:
                    counts[r, par[c]] += 1
        for _ in range(5):
            p = _random_weights(rng, n).by_label
            total = math.fsum(np.prod(p[1:] ** counts[:, 1:], axis=1).tolist())
            worst = max(worst, abs(total - 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 30
    return Verdict("cayley", worst, 1e-9, ok, seed, 35, timing={"runtime_s": elapsed})


@suite("sampler-law")
def _sampler_law(seed, key, threads, scale):
    t0 = time.perf_counter()
    w = ProbWeights.uniform(4)
    N = _count(200_000, scale)
    keys = run_chunked(lambda rng, c: [sample_ptree(w, rng).key() for _ in range(c)],
                       N, seed, key, threads, chunk=10_000)
    res = chi_square(Counter(keys), exact_tree_law(w))
    elapsed = time.perf_counter() - t0
    ok = res.pvalue > 1e-3 and elapsed < 10
    return Verdict("sampler-law", res.pvalue, 1e-3, ok, seed, N,
                   {"chi2": res.statistic, "df": res.df,
                    "compare": "pvalue > threshold"}, {"runtime_s": elapsed})


A3_WEIGHTS = (0.4, 0.25, 0.15, 0.12, 0.08)


@suite("span-law")
def _span_law(seed, key, threads, scale):
    t0 = time.perf_counter()
    w = ProbWeights(A3_WEIGHTS)
    N = _count(100_000, scale)

    def job(rng, c):
        out = []
        for _ in range(c):
            t = sample_ptree(w, rng)
            out.append(cut_one(t, w, w.draw(rng), rng).n_cuts)
        return out

    L = run_chunked(job, N, seed, key, threads, chunk=10_000)
    tv = empirical_tv(L, exact_span_law(w))
    elapsed = time.perf_counter() - t0
    ok = tv < 0.01 and elapsed < 20
    return Verdict("span-law", tv, 0.01, ok, seed, N, timing={"runtime_s": elapsed})


@suite("cut-tree-law")
def _cut_tree_law(seed, key, threads, scale):
    w = ProbWeights.uniform(4)
    N = _count(200_000, scale)

    def job(rng, c):
        return [cut_complete(sample_ptree(w, rng), w, rng).tree.key() for _ in range(c)]

    keys = run_chunked(job, N, seed, key, threads, chunk=10_000)
    res = chi_square(Counter(keys), exact_tree_law(w))
    return Verdict("cut-tree-law", res.pvalue, 1e-3, res.pvalue > 1e-3, seed, N,
                   {"chi2": res.statistic, "df": res.df, "compare": "pvalue > threshold"})


A5_WEIGHTS = (0.4, 0.3, 0.2, 0.1)


@suite("one-duality")
def _one_duality(seed, key, threads, scale):
    w = ProbWeights(A5_WEIGHTS)
    N = _count(200_000, scale)

    def job(rng, c):
        out = []
        for _ in range(c):
            t = sample_ptree(w, rng)
            v = w.draw(rng)
            out.append((shuff_one(t, w, v, rng).key(), v))
        return out

    pairs = run_chunked(job, N, seed, key, threads, chunk=10_000)
    law = {(k, v): q * w[v] for k, q in exact_tree_law(w).items() for v in w.labels}
    res = chi_square(Counter(pairs), law)

    M = _count(10_000, scale)

    def rev(rng, c):
        bad = 0
        for _ in range(c):
            n = int(rng.integers(1, 41))
            ww = _random_weights(rng, n)
            t = sample_ptree(ww, rng)
            rec = cut_one(t, ww, ww.draw(rng), rng)
            bad += reverse_exact(rec) != t
        return [bad]

    failures = sum(run_chunked(rev, M, seed, key + (1,), threads))
    ok = res.pvalue > 1e-3 and failures == 0
    return Verdict("one-duality", res.pvalue, 1e-3, ok, seed, N,
                   {"chi2": res.statistic, "df": res.df, "reversal_runs": M,
                    "reversal_failures": failures, "compare": "pvalue > threshold"})


@suite("coupling")
def _coupling(seed, key, threads, scale):
    N = _count(10_000, scale)

    def job(rng, c):
        bad = 0
        for _ in range(c):
            w = _random_weights(rng, 30)
            t = sample_ptree(w, rng)
            vs = [w.draw(rng) for _ in range(4)]
            fam = coupled_cut_family(t, w, vs, rng)
            for k in range(1, 4):
                if fam[k - 1].backbone != span(fam[k].backbone, vs[:k]):
                    bad += 1
                    break
        return [bad]

    failures = sum(run_chunked(job, N, seed, key, threads))
    return Verdict("coupling", failures, 0, failures == 0, seed, N)


@suite("rewire-tree")
def _rewire(seed, key, threads, scale):
    N = _count(100_000, scale)

    def job(rng, c):
        bad = 0
        for _ in range(c):
            n = int(rng.integers(1, 11))
            w = _random_weights(rng, n)
            h = sample_ptree(w, rng)
            vs = [int(x) for x in rng.integers(1, n + 1, size=int(rng.integers(1, 5)))]
            marks = {}
            for x in span(h, vs).parent:
                sub = sorted(subtree_above(h, x))
                marks[x] = sub[int(rng.integers(len(sub)))]
            try:
                out = rewire_tau(h, vs, marks)
            except ValueError:
                bad += 1
                continue
            if out.root != h.root or len(out) != n or len(out.edges()) != n - 1:
                bad += 1
        return [bad]

    failures = sum(run_chunked(job, N, seed, key, threads, chunk=10_000))
    return Verdict("rewire-tree", failures, 0, failures == 0, seed, N)


def _rayleigh_cdf(x):
    return 1.0 - np.exp(-np.square(x) / 2.0)


@suite("rayleigh")
def _rayleigh(seed, key, threads, scale):
    t0 = time.perf_counter()
    n = 10_000
    w = ProbWeights.uniform(n)
    sigma = w.sigma
    N = _count(20_000, scale)

    def job(rng, c):
        out = []
        for _ in range(c):
            t = sample_ptree(w, rng)
            out.append(sigma * cut_one(t, w, w.draw(rng), rng).n_cuts)
        return out

    x = run_chunked(job, N, seed, key, threads)
    res = ks_statistic(x, _rayleigh_cdf)
    elapsed = time.perf_counter() - t0
    ok = res.statistic < 0.02 and elapsed < 300
    return Verdict("rayleigh", res.statistic, 0.02, ok, seed, N,
                   {"pvalue": res.pvalue, "n": n}, {"runtime_s": elapsed})


A9_THETAS = ((1.0,), (1 / math.sqrt(2), 1 / math.sqrt(2)))


@suite("distd")
def _distd(seed, key, threads, scale):
    N = _count(100_000, scale)
    stats = {}
    for idx, vals in enumerate(A9_THETAS):
        th = ThetaParam.parse(list(vals))
        x = run_chunked(lambda rng, c: [line_break(th, 1, rng).total_length for _ in range(c)],
                        N, seed, key + (idx,), threads, chunk=10_000)
        stats[str(list(vals))] = ks_statistic(x, lambda r: cdf_eta1(th, r)).statistic
    worst = max(stats.values())
    return Verdict("distd", worst, 0.01, worst < 0.01, seed, N, {"ks": stats})


@suite("idl")
def _idl(seed, key, threads, scale):
    th = ThetaParam.parse([1 / math.sqrt(2), 1 / math.sqrt(2)])
    w = build_pn(th, 5000)
    sigma = w.sigma
    N = _count(10_000, scale)

    def job(rng, c):
        out = []
        for _ in range(c):
            t = sample_ptree(w, rng)
            out.append(sigma * cut_one(t, w, w.draw(rng), rng).n_cuts)
        return out

    x = run_chunked(job, N, seed, key, threads)
    res = ks_statistic(x, lambda r: cdf_eta1(th, r))
    return Verdict("idl", res.statistic, 0.05, res.statistic < 0.05, seed, N,
                   {"pvalue": res.pvalue, "sigma_n": sigma})


@suite("birthday")
def _birthday(seed, key, threads, scale):
    w = _random_weights(make_rng(seed, key + (0,)), 50)
    N = _count(100_000, scale)

    def repeats(rng, c):
        return [repeat_times(w, 1, rng).first - 1 for _ in range(c)]

    def depths(rng, c):
        out = []
        for _ in range(c):
            t = sample_ptree(w, rng)
            out.append(t.depth(w.draw(rng)))
        return out

    a = run_chunked(repeats, N, seed, key + (1,), threads, chunk=10_000)
    b = run_chunked(depths, N, seed, key + (2,), threads, chunk=10_000)
    res = ks_two_sample(a, b)
    return Verdict("birthday", res.statistic, 0.015, res.statistic < 0.015, seed, N,
                   {"pvalue": res.pvalue, "mean_repeat": float(np.mean(a)),
                    "mean_depth": float(np.mean(b))})


@suite("gamma-walk")
def _gamma(seed, key, threads, scale):
    N = _count(1_000, scale)

    def job(rng, c):
        bad = 0
        for _ in range(c):
            n = 500
            w = _random_weights(rng, n)
            h = sample_ptree(w, rng)
            u = w.draw(rng)
            xi = [w.draw(rng) for _ in range(5)]
            s = int(rng.integers(2**62))
            try:
                g = gamma_walk(h, w, u, xi, make_rng(s))
            except RuntimeError:
                bad += 1
                continue
            t = shuff_one(h, w, u, make_rng(s))
            d = np.array([[t.distance(a, b) for b in xi] for a in xi])
            if not np.array_equal(d, g.gamma) or not four_point_ok(g.gamma, tol=0):
                bad += 1
        return [bad]

    failures = sum(run_chunked(job, N, seed, key, threads, chunk=100))
    return Verdict("gamma-walk", failures, 0, failures == 0, seed, N)


@suite("genealogy")
def _genealogy(seed, key, threads, scale):
    th = ThetaParam(1.0)
    N = _count(1_000, scale)

    def job(rng, c):
        out = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for _ in range(c):
                res = genealogy_matrix(th, 2, 200, rng=rng)
                d = res.matrix
                good = bool(np.array_equal(d, d.T) and four_point_ok(d, tol=1e-9))
                out.append((float(d[0, 1]), good))
        return out

    rows = run_chunked(job, N, seed, key, threads, chunk=100)
    x = [r[0] for r in rows]
    bad = sum(not r[1] for r in rows)
    res = ks_statistic(x, _rayleigh_cdf)
    ok = res.statistic < 0.03 and bad == 0
    return Verdict("genealogy", res.statistic, 0.03, ok, seed, N,
                   {"pvalue": res.pvalue, "metric_failures": bad,
                    "mean": float(np.mean(x))})
