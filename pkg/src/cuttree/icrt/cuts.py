"""The cut measure on a reduced tree and Poisson rains of cuts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..randomness import as_rng
from .realtree import RealTree, TreePoint


@dataclass(frozen=True)
class CutMeasure:
    """theta0^2 times length on the skeleton plus weighted point masses."""

    density: float
    skeleton_length: float
    atoms: tuple

    @property
    def skeleton_mass(self):
        return self.density * self.skeleton_length

    @property
    def mass(self):
        return self.skeleton_mass + sum(a.weight for a in self.atoms)


def restricted_cut_measure(rt: RealTree) -> CutMeasure:
    return CutMeasure(rt.theta0 ** 2, rt.total_length, tuple(rt.atoms))


@dataclass(frozen=True)
class CutPointProcess:
    """Cuts on ``(start, horizon]`` sorted by time."""

    times: tuple
    points: tuple
    horizon: float
    start: float = 0.0

    def __len__(self):
        return len(self.times)

    @property
    def atoms(self):
        return tuple(zip(self.times, self.points))


def simulate_cuts(rt: RealTree, horizon: float, rng=None, start: float = 0.0) -> CutPointProcess:
    """Poisson atoms of intensity dt x cut measure on ``(start, horizon]``."""
    if not horizon > start:
        raise ValueError("horizon must exceed the start time")
    rng = as_rng(rng)
    cm = restricted_cut_measure(rt)
    mass = cm.mass
    count = int(rng.poisson(mass * (horizon - start))) if mass > 0 else 0
    if count == 0:
        return CutPointProcess((), (), float(horizon), float(start))
    times = np.sort(start + (horizon - start) * rng.random(count))
    which = rng.random(count) * mass
    edge_draw = rng.random(count)
    pos_draw = rng.random(count)
    lengths = np.asarray(rt.length, dtype=np.float64)
    cum_len = np.cumsum(lengths)
    atom_w = np.cumsum([a.weight for a in cm.atoms]) if cm.atoms else np.zeros(0)
    points = []
    for t in range(count):
        if which[t] < cm.skeleton_mass:
            x = edge_draw[t] * cum_len[-1]
            v = int(np.searchsorted(cum_len, x, side="right"))
            v = min(max(v, 1), len(lengths) - 1)
            up = pos_draw[t] * lengths[v]
            points.append(TreePoint(v, float(up)))
        else:
            y = which[t] - cm.skeleton_mass
            a = int(np.searchsorted(atom_w, y, side="right"))
            a = min(a, len(cm.atoms) - 1)
            points.append(cm.atoms[a].point)
    # times are a.s. distinct; nudge exact ties to keep the order strict
    ts = times.tolist()
    for t in range(1, count):
        if ts[t] <= ts[t - 1]:
            ts[t] = np.nextafter(ts[t - 1], np.inf)
    return CutPointProcess(tuple(ts), tuple(points), float(horizon), float(start))


def first_separation(rt: RealTree, cuts: CutPointProcess, i, j):
    """Earliest cut on the path between vertices ``i`` and ``j``, or ``None``."""
    for v in (i, j):
        if not (isinstance(v, (int, np.integer)) and 0 <= v < rt.n_vertices):
            raise ValueError(f"unmarked leaf {v!r}")
    for t, x in zip(cuts.times, cuts.points):
        if rt.on_path(x, i, j):
            return t, x
    return None
