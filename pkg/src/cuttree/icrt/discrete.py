"""Cut-tree distances from a timed cutting run, and the marked reverse walk."""
from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from ..cutting import OneCutRecord, _k_cutting
from ..ptree import ProbWeights, RootedTree, _check_dims
from ..randomness import as_rng
from ..shuffle import _shuffle_draws
from ..stats import four_point_ok


class _TimedStream:
    """i.i.d. p-vertices arriving at total rate 1/sigma."""

    def __init__(self, weights, rng):
        self.weights = weights
        self.rng = rng
        self.sigma = weights.sigma
        self.times = []
        self.vertices = []
        self.picked = []
        self._t = 0.0

    def pick(self, members, contains):
        i = len(self.picked) and self.picked[-1] + 1
        while True:
            while len(self.vertices) <= i:
                self._t += self.rng.exponential(self.sigma)
                self.times.append(self._t)
                self.vertices.append(self.weights.draw(self.rng))
            if contains(self.vertices[i]):
                self.picked.append(i)
                return self.vertices[i]
            i += 1


@dataclass(frozen=True)
class PoissonCutTrace:
    """A 1-cutting run driven by a Poisson rain of p-vertices.

    ``times``/``vertices`` hold every atom up to the one that hits the
    target; ``effective`` indexes the atoms that fell in the target's piece.
    """

    tree: RootedTree
    target: int
    times: tuple
    vertices: tuple
    effective: tuple
    record: OneCutRecord

    @property
    def effective_times(self):
        return tuple(self.times[i] for i in self.effective)

    def L(self, t):
        """Number of cuts that hit the target's piece during [0, t]."""
        return bisect.bisect_right(self.effective_times, t)


def poisson_cut_trace(tree: RootedTree, weights: ProbWeights, v, rng=None) -> PoissonCutTrace:
    _check_dims(tree, weights)
    stream = _TimedStream(weights, as_rng(rng))
    h, _, cuts, _, marks, _ = _k_cutting(tree, (v,), stream.pick)
    seq = tuple(marks[c] for c in cuts[1:])
    record = OneCutRecord(h, cuts, seq, v, tree.root)
    last = stream.picked[-1] + 1
    return PoissonCutTrace(tree, v, tuple(stream.times[:last]),
                           tuple(stream.vertices[:last]), tuple(stream.picked), record)


@dataclass(frozen=True)
class CutDistances:
    """Distances in the cut-tree among the points (root, target, xi...)."""

    points: tuple
    matrix: np.ndarray
    tau: tuple
    hit: tuple
    same_hit: np.ndarray


def one_cut_distance_matrix(trace: PoissonCutTrace, xi) -> CutDistances:
    """Cut-tree distances computed from the original tree and the cut times.

    Point 0 is the cut-tree root, point 1 the target and the rest are
    ``xi``.  For each point the first cut on its path to the target gives a
    time ``tau`` and a vertex ``hit``; the distances follow from the cut
    counter at those times and distances in the original tree.
    """
    t = trace.tree
    v = trace.target
    xi = tuple(xi)
    taus = []
    hits = []
    for x in xi:
        path = set(_path(t, v, x))
        for time, w in zip(trace.times, trace.vertices):
            if w in path:
                taus.append(time)
                hits.append(w)
                break
    L_inf = len(trace.effective)
    m = len(xi) + 2
    d = np.zeros((m, m), dtype=np.int64)
    d[0, 1] = d[1, 0] = L_inf - 1
    Ls = [trace.L(tt) for tt in taus]
    off = [t.distance(x, s) for x, s in zip(xi, hits)]
    for j in range(len(xi)):
        d[0, j + 2] = d[j + 2, 0] = Ls[j] - 1 + off[j]
        d[1, j + 2] = d[j + 2, 1] = L_inf - Ls[j] + off[j]
    same = np.zeros((len(xi), len(xi)), dtype=bool)
    for i in range(len(xi)):
        for j in range(i + 1, len(xi)):
            if hits[i] == hits[j]:
                same[i, j] = same[j, i] = True
                dij = t.distance(xi[i], xi[j])
            else:
                dij = abs(Ls[i] - Ls[j]) + off[i] + off[j]
            d[i + 2, j + 2] = d[j + 2, i + 2] = dij
    pts = (trace.record.tree.root, v) + xi
    return CutDistances(pts, d, tuple(taus), tuple(hits), same)


def _path(tree, a, b):
    c = tree.lca(a, b)
    out = []
    for x in (a, b):
        while x != c:
            out.append(x)
            x = tree.parent[x]
    out.append(c)
    return out


@dataclass(frozen=True)
class GammaWalk:
    """Merging data of the marked reverse walk started from ``xi``."""

    mg: np.ndarray
    first_meet: np.ndarray
    gamma: np.ndarray
    marks: dict
    new_root: int
    walks: tuple


def gamma_walk(h: RootedTree, weights: ProbWeights, U, xi, rng=None) -> GammaWalk:
    """Follow each point down to the U-path and jump through the marks.

    The marks are drawn exactly as the 1-shuffle of ``h`` at ``U`` draws
    them, so ``gamma`` equals the distances among ``xi`` in that shuffle
    when both use the same stream.
    """
    if U not in h.vertices:
        raise ValueError(f"{U} is not a vertex")
    rng = as_rng(rng)
    new_root, marks = _shuffle_draws(h, (U,), weights, rng)
    backbone = h.path_to_root(U)[::-1]
    on_bb = set(backbone)
    succ = {backbone[i]: backbone[i + 1] for i in range(len(backbone) - 1)}
    depth = h.depths

    def meet(a):
        while a not in on_bb:
            a = h.parent[a]
        return a

    walks = []
    for x0 in xi:
        a_seq = [x0]
        x_seq = [meet(x0)]
        while x_seq[-1] != U:
            w = succ[x_seq[-1]]
            if w not in marks:
                raise ValueError(f"no admissible attachment above {x_seq[-1]}")
            a_seq.append(marks[w])
            x_seq.append(meet(marks[w]))
        walks.append((tuple(a_seq), tuple(x_seq)))

    k = len(xi)
    first = np.zeros((k, k), dtype=np.int64)
    gamma = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        ai, xs_i = walks[i]
        for j in range(k):
            if i == j:
                continue
            aj, xs_j = walks[j]
            common = set(xs_i) & set(xs_j)
            y = min(common, key=lambda z: depth[z])
            first[i, j] = xs_i.index(y)
    for i in range(k):
        ai, xs_i = walks[i]
        for j in range(i + 1, k):
            aj, xs_j = walks[j]
            p, q = first[i, j], first[j, i]
            g = sum(depth[ai[s]] - depth[xs_i[s]] + 1 for s in range(p))
            g += sum(depth[aj[s]] - depth[xs_j[s]] + 1 for s in range(q))
            g += h.distance(ai[p], aj[q])
            gamma[i, j] = gamma[j, i] = g
    if not four_point_ok(gamma, tol=0):
        raise RuntimeError("walk distances are not a tree metric")
    return GammaWalk(first + first.T, first, gamma, marks, new_root, tuple(walks))
