"""Goodness-of-fit tools and exact laws for small trees."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .ptree import enumerate_parent_arrays

MIN_KS_SAMPLES = 30


@dataclass(frozen=True)
class ChiSquare:
    statistic: float
    df: int
    pvalue: float
    n_classes: int


@dataclass(frozen=True)
class KS:
    statistic: float
    pvalue: float
    n: int


@dataclass
class Verdict:
    name: str
    statistic: float
    threshold: float
    passed: bool
    seed: int
    n_samples: int
    details: dict = field(default_factory=dict)
    # wall-clock figures are kept out of the JSON so artifacts stay reproducible
    timing: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "pass": bool(self.passed),
            "seed": int(self.seed),
            "n_samples": int(self.n_samples),
            "details": self.details,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.name}: statistic={self.statistic:.6g} "
                f"threshold={self.threshold:.6g} n={self.n_samples} seed={self.seed}")


def _pool(expected, observed, min_expected):
    """Merge the smallest classes until every bin expects ``min_expected``."""
    order = np.argsort(expected, kind="stable")
    exp_bins = []
    obs_bins = []
    e_acc = o_acc = 0.0
    for i in order:
        e_acc += expected[i]
        o_acc += observed[i]
        if e_acc >= min_expected:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
            e_acc = o_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp_bins:
            exp_bins[-1] += e_acc
            obs_bins[-1] += o_acc
        else:
            exp_bins.append(e_acc)
            obs_bins.append(o_acc)
    return np.array(exp_bins), np.array(obs_bins)


def chi_square(counts, law, min_expected=5.0) -> ChiSquare:
    """Pearson test of observed ``counts`` against the probabilities ``law``.

    Both are mappings keyed by class.  Classes expecting fewer than
    ``min_expected`` observations are pooled.  An observed class outside the
    support of ``law`` gives p-value 0.
    """
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("no observations")
    if any(c > 0 and law.get(k, 0.0) <= 0.0 for k, c in counts.items()):
        return ChiSquare(math.inf, 0, 0.0, len(law))
    keys = [k for k, q in law.items() if q > 0]
    expected = np.array([law[k] * total for k in keys])
    observed = np.array([counts.get(k, 0) for k in keys], dtype=float)
    e, o = _pool(expected, observed, min_expected)
    stat = float(np.sum((o - e) ** 2 / e))
    df = len(e) - 1
    pvalue = float(special.gammaincc(df / 2.0, stat / 2.0)) if df > 0 else 1.0
    return ChiSquare(stat, df, pvalue, len(e))


def _clean(samples):
    x = np.asarray(samples, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError("empty sample")
    if np.isnan(x).any():
        raise ValueError("sample contains NaN")
    return np.sort(x)


def ks_statistic(samples, cdf) -> KS:
    """One-sample Kolmogorov-Smirnov distance to the continuous ``cdf``."""
    x = _clean(samples)
    n = x.size
    if n < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples, got {n}")
    f = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return KS(d, float(special.kolmogorov(math.sqrt(n) * d)), n)


def ks_two_sample(a, b) -> KS:
    """Two-sample KS distance; exact for samples with ties."""
    x = _clean(a)
    y = _clean(b)
    if min(x.size, y.size) < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples per side")
    grid = np.union1d(x, y)
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    d = float(np.max(np.abs(fx - fy)))
    ne = x.size * y.size / (x.size + y.size)
    return KS(d, float(special.kolmogorov(math.sqrt(ne) * d)), int(x.size + y.size))


def empirical_tv(samples, law) -> float:
    """Total variation between the empirical law of ``samples`` and ``law``."""
    counts = Counter(samples)
    total = sum(counts.values())
    keys = set(counts) | set(law)
    return 0.5 * sum(abs(counts.get(k, 0) / total - law.get(k, 0.0)) for k in keys)


def tree_key(tree):
    return tree.key()


def _parent_key(parent, root):
    return (root, tuple((c, parent[c]) for c in range(1, len(parent)) if c != root))


def exact_tree_law(weights):
    """p-tree probabilities of every rooted tree, keyed like ``RootedTree.key``."""
    p = weights.by_label
    law = {}
    for parent, root in enumerate_parent_arrays(weights.n):
        prob = 1.0
        for c in range(1, len(parent)):
            if c != root:
                prob *= p[parent[c]]
        law[_parent_key(parent, root)] = prob
    return law


def exact_span_law(weights):
    """Law of the span size of (T, V) for T a p-tree and V ~ p independent."""
    p = weights.by_label
    n = weights.n
    law = {}
    for parent, root in enumerate_parent_arrays(n):
        prob = 1.0
        for c in range(1, n + 1):
            if c != root:
                prob *= p[parent[c]]
        for v in range(1, n + 1):
            size = 1
            w = v
            while w != root:
                w = parent[w]
                size += 1
            law[size] = law.get(size, 0.0) + prob * p[v]
    return law


def four_point_ok(d, tol=1e-9) -> bool:
    """Check the four-point condition on a symmetric distance matrix."""
    d = np.asarray(d, dtype=np.float64)
    m = d.shape[0]
    if not np.allclose(d, d.T, atol=tol) or np.any(np.abs(np.diag(d)) > tol):
        return False
    for a in range(m):
        for b in range(a, m):
            for c in range(b, m):
                for e in range(c, m):
                    s = sorted((d[a, b] + d[c, e], d[a, c] + d[b, e], d[a, e] + d[b, c]))
                    if s[2] - s[1] > tol * (1 + abs(s[2])):
                        return False
    return True
