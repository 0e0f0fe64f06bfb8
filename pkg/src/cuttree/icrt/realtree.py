"""Finite rooted real trees with marked leaves and weighted atoms."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True, order=True)
class TreePoint:
    """A point on the edge above ``vertex``, ``up`` units from that vertex.

    ``up == 0`` is the vertex itself; ``0 <= up < length[vertex]``.
    """

    vertex: int
    up: float = 0.0


@dataclass(frozen=True)
class Atom:
    point: TreePoint
    weight: float
    index: int


@dataclass(frozen=True, eq=False)
class RealTree:
    """Rooted real tree; vertex 0 is the root and vertices 1..k are the leaves.

    ``parent[v]`` and ``length[v]`` describe the edge above ``v``.  ``atoms``
    are the weighted branch points lying in the tree; ``branch_points`` is
    the subset that received grafts.  ``cutpoints``/``joinpoints`` record
    the line-breaking run that produced the tree.
    """

    parent: tuple
    length: tuple
    n_leaves: int
    atoms: tuple = ()
    cutpoints: tuple = ()
    joinpoints: tuple = ()
    sources: tuple = ()
    theta0: float = 1.0
    coords: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if len(self.parent) != len(self.length):
            raise ValueError("parent and length differ in size")
        if self.parent[0] != -1:
            raise ValueError("vertex 0 must be the root")
        for v in range(1, len(self.parent)):
            if not self.length[v] > 0:
                raise ValueError(f"edge above {v} has non-positive length")
            if not 0 <= self.parent[v] < len(self.parent):
                raise ValueError(f"bad parent for {v}")
        if len(self.order) != len(self.parent):
            raise ValueError("parent array is not a tree rooted at 0")

    @property
    def n_vertices(self):
        return len(self.parent)

    @property
    def leaves(self):
        return tuple(range(1, self.n_leaves + 1))

    @property
    def branch_points(self):
        """Atoms that carry a graft, as ``{vertex: weight}``."""
        return {a.point.vertex: a.weight for a in self.atoms if a.point.up == 0.0}

    @cached_property
    def children(self):
        ch = [[] for _ in range(len(self.parent))]
        for v in range(1, len(self.parent)):
            ch[self.parent[v]].append(v)
        return ch

    @cached_property
    def order(self):
        """Vertices in breadth-first order from the root."""
        out = [0]
        for v in out:
            out.extend(self.children[v])
            if len(out) > len(self.parent):
                break
        return out

    @cached_property
    def depth(self):
        d = np.zeros(self.n_vertices)
        for v in self.order[1:]:
            d[v] = d[self.parent[v]] + self.length[v]
        return d

    @cached_property
    def level(self):
        lv = [0] * self.n_vertices
        for v in self.order[1:]:
            lv[v] = lv[self.parent[v]] + 1
        return lv

    @property
    def total_length(self):
        return float(sum(self.length))

    def lca(self, a, b):
        lv = self.level
        par = self.parent
        while lv[a] > lv[b]:
            a = par[a]
        while lv[b] > lv[a]:
            b = par[b]
        while a != b:
            a = par[a]
            b = par[b]
        return a

    def is_ancestor(self, a, b):
        """True when vertex ``a`` is ``b`` or lies above it."""
        lv = self.level
        while lv[b] > lv[a]:
            b = self.parent[b]
        return a == b

    def point_depth(self, x: TreePoint):
        return float(self.depth[x.vertex] - x.up)

    def distance(self, a, b):
        """Distance between two vertices."""
        c = self.lca(a, b)
        return float(self.depth[a] + self.depth[b] - 2 * self.depth[c])

    def point_distance(self, x: TreePoint, y: TreePoint):
        if x.vertex == y.vertex:
            return abs(x.up - y.up)
        c = self.lca(x.vertex, y.vertex)
        if c == x.vertex and x.up > 0:
            meet = self.point_depth(x)
        elif c == y.vertex and y.up > 0:
            meet = self.point_depth(y)
        else:
            meet = float(self.depth[c])
        return self.point_depth(x) + self.point_depth(y) - 2 * meet

    def on_path(self, x: TreePoint, a, b):
        """Whether ``x`` lies on the geodesic between vertices ``a`` and ``b``."""
        v = x.vertex
        below_a = self.is_ancestor(v, a)
        below_b = self.is_ancestor(v, b)
        if x.up > 0:
            return below_a != below_b
        if not (below_a or below_b):
            return False
        c = self.lca(a, b)
        return self.is_ancestor(c, v)

    def distance_matrix(self, vertices=None):
        vs = list(range(self.n_vertices)) if vertices is None else list(vertices)
        m = len(vs)
        d = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                d[i, j] = d[j, i] = self.distance(vs[i], vs[j])
        return d

    def leaf_distance_matrix(self, with_root=True):
        vs = ([0] if with_root else []) + list(self.leaves)
        return self.distance_matrix(vs)

    def to_dict(self):
        return {
            "vertices": [
                {"id": v, "parent": self.parent[v], "length": self.length[v]}
                for v in range(self.n_vertices)
            ],
            "leaves": list(self.leaves),
            "branch_points": [
                {"vertex": a.point.vertex, "up": a.point.up, "local_time": a.weight,
                 "index": a.index}
                for a in self.atoms
            ],
            "trace": {
                "cutpoints": list(self.cutpoints),
                "joinpoints": list(self.joinpoints),
                "sources": list(self.sources),
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data, theta0=1.0):
        verts = sorted(data["vertices"], key=lambda r: r["id"])
        parent = tuple(int(r["parent"]) for r in verts)
        length = tuple(float(r["length"]) for r in verts)
        atoms = tuple(Atom(TreePoint(int(b["vertex"]), float(b["up"])),
                           float(b["local_time"]), int(b["index"]))
                      for b in data.get("branch_points", ()))
        tr = data.get("trace", {})
        return cls(parent, length, len(data["leaves"]), atoms,
                   tuple(tr.get("cutpoints", ())), tuple(tr.get("joinpoints", ())),
                   tuple(tr.get("sources", ())), theta0)
