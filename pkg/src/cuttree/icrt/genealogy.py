"""Distances in the genealogy of a Poisson fragmentation of a reduced ICRT."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..randomness import as_rng
from ..stats import four_point_ok
from .cuts import simulate_cuts
from .linebreak import line_break
from .theta import ThetaParam

FIRST_HORIZON = 2.0
MAX_DOUBLINGS = 40


class HorizonWarning(UserWarning):
    """Some auxiliary leaves were still attached to a target at the horizon."""


@dataclass(frozen=True)
class GenealogyResult:
    """Distances among the root and the k target leaves of the genealogy.

    ``matrix[0]`` is the root; ``L_inf[i]`` is the total (estimated) mass
    time of target ``i + 1``; ``residual[i]`` is the fraction of auxiliary
    leaves never separated from that target within ``horizon``.
    """

    matrix: np.ndarray
    L_inf: np.ndarray
    separation: np.ndarray
    horizon: float
    residual: np.ndarray
    m: int

    @property
    def k(self):
        return len(self.L_inf)


def _separation_times(rt, root_vertex, emin, vmin):
    """Time at which each vertex gets cut off from ``root_vertex``."""
    n = rt.n_vertices
    parent = rt.parent
    children = rt.children
    tau = np.full(n, math.inf)
    through = {root_vertex: math.inf}
    stack = [root_vertex]
    seen = {root_vertex}
    while stack:
        w = stack.pop()
        base = through[w]
        nbrs = list(children[w])
        if parent[w] >= 0:
            nbrs.append(parent[w])
        for nb in nbrs:
            if nb in seen:
                continue
            seen.add(nb)
            edge = nb if parent[nb] == w else w
            val = min(base, emin[edge])
            tau[nb] = val
            through[nb] = min(val, vmin[nb])
            stack.append(nb)
    return tau


def genealogy_matrix(theta: ThetaParam, k: int, m=None, horizon=None, rng=None) -> GenealogyResult:
    """Simulate the fragmentation of R_(k+m) and read off the genealogy of k leaves.

    Masses are estimated by the ``m`` auxiliary leaves.  Without an explicit
    horizon the simulation window doubles until every auxiliary leaf has been
    separated from every target.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    m = 50 * k if m is None else int(m)
    if m < 1:
        raise ValueError("m must be positive")
    rng = as_rng(rng)
    rt = line_break(theta, k + m, rng)
    n = rt.n_vertices
    emin = np.full(n, math.inf)
    vmin = np.full(n, math.inf)
    targets = list(range(1, k + 1))
    aux = np.arange(k + 1, k + m + 1)
    start = 0.0
    h = float(horizon) if horizon is not None else FIRST_HORIZON
    doublings = 0
    while True:
        cp = simulate_cuts(rt, h, rng, start)
        if len(cp):
            verts = np.array([x.vertex for x in cp.points])
            on_edge = np.array([x.up > 0 for x in cp.points])
            times = np.asarray(cp.times)
            np.minimum.at(emin, verts[on_edge], times[on_edge])
            np.minimum.at(vmin, verts[~on_edge], times[~on_edge])
        taus = [_separation_times(rt, v, emin, vmin) for v in targets]
        unresolved = any(np.isinf(t[aux]).any() for t in taus)
        if horizon is not None or not unresolved or doublings >= MAX_DOUBLINGS:
            break
        start = h
        h *= 2.0
        doublings += 1

    residual = np.array([float(np.mean(np.isinf(t[aux]))) for t in taus])
    if residual.any():
        warnings.warn(f"horizon {h:g} leaves residual mass {residual.max():.3g}",
                      HorizonWarning, stacklevel=2)
    capped = [np.minimum(t[aux], h) for t in taus]
    L_inf = np.array([float(np.mean(c)) for c in capped])
    sep = np.full((k, k), math.inf)
    d = np.zeros((k + 1, k + 1))
    for i in range(k):
        d[0, i + 1] = d[i + 1, 0] = L_inf[i]
        for j in range(i + 1, k):
            t_ij = float(taus[i][targets[j]])
            sep[i, j] = sep[j, i] = t_ij
            L_at = float(np.mean(np.minimum(capped[i], t_ij)))
            d[i + 1, j + 1] = d[j + 1, i + 1] = L_inf[i] + L_inf[j] - 2.0 * L_at
    if not four_point_ok(d, tol=1e-9):
        raise RuntimeError("genealogy distances violate the four-point condition")
    return GenealogyResult(d, L_inf, sep, h, residual, m)
