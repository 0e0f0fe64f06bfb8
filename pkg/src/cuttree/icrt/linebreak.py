"""Poisson line-breaking construction of reduced ICRTs."""
from __future__ import annotations

import heapq
import math
from bisect import bisect_left, bisect_right

from ..randomness import as_rng
from .realtree import Atom, RealTree, TreePoint
from .theta import ThetaParam


def _cutpoints(theta: ThetaParam, k, rng):
    """First ``k`` cutpoints with their joinpoints and source index.

    Source 0 is the octant process: its points ordered by abscissa are
    ``x_j = sqrt(2 S_j) / theta0`` with ``S_j`` unit-rate arrival times,
    and each ordinate is uniform below its abscissa.  Source ``i`` is the
    rate-theta_i process on the line whose first point is the joinpoint of
    all later ones.
    """
    I = theta.I
    first = [rng.exponential() / t for t in theta.thetas]
    heap = []
    for i, t in enumerate(theta.thetas, start=1):
        heapq.heappush(heap, (first[i - 1] + rng.exponential() / t, i))
    s = rng.exponential()
    heapq.heappush(heap, (math.sqrt(2.0 * s) / theta.theta0, 0))
    out = []
    while len(out) < k:
        x, src = heapq.heappop(heap)
        if src == 0:
            out.append((x, x * rng.random(), 0))
            s += rng.exponential()
            heapq.heappush(heap, (math.sqrt(2.0 * s) / theta.theta0, 0))
        else:
            out.append((x, first[src - 1], src))
            heapq.heappush(heap, (x + rng.exponential() / theta.thetas[src - 1], src))
    return out, first, I


def line_break(theta: ThetaParam, k: int, rng=None) -> RealTree:
    """Reduced tree spanned by the root and the first ``k`` leaves."""
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = as_rng(rng)
    points, first, I = _cutpoints(theta, k, rng)
    eta = [0.0] + [x for x, _, _ in points]
    joins = [j for _, j, _ in points]

    # coordinates that become vertices inside each segment: the graft
    # points of segments 2..k
    inner = [[] for _ in range(k + 1)]
    for j in range(k - 1):
        c = joins[j]
        s = bisect_right(eta, c)
        if c not in inner[s]:
            inner[s].append(c)

    parent = [-1] + [0] * k
    length = [0.0] + [0.0] * k
    coords = [0.0] + eta[1:]
    vertex_at = {}
    chains = [None] * (k + 1)
    for s in range(1, k + 1):
        base = 0 if s == 1 else vertex_at[joins[s - 2]]
        lo = eta[s - 1]
        prev = base
        prev_off = 0.0
        chain = [(0.0, base)]
        for c in sorted(inner[s]):
            v = len(parent)
            off = c - lo
            parent.append(prev)
            length.append(off - prev_off)
            coords.append(c)
            vertex_at[c] = v
            chain.append((off, v))
            prev, prev_off = v, off
        parent[s] = prev
        length[s] = (eta[s] - lo) - prev_off
        chain.append((eta[s] - lo, s))
        chains[s] = chain

    atoms = []
    for i in range(1, I + 1):
        c = first[i - 1]
        if c >= eta[k]:
            continue
        if c in vertex_at:
            atoms.append(Atom(TreePoint(vertex_at[c]), theta.thetas[i - 1], i))
            continue
        s = bisect_right(eta, c)
        chain = chains[s]
        offs = [o for o, _ in chain]
        off = c - eta[s - 1]
        pos = bisect_left(offs, off)
        o, v = chain[pos]
        atoms.append(Atom(TreePoint(v, o - off), theta.thetas[i - 1], i))

    return RealTree(
        tuple(parent), tuple(length), k, tuple(atoms),
        tuple(eta[1:]), tuple(joins), tuple(src for _, _, src in points),
        theta.theta0, tuple(coords),
    )
