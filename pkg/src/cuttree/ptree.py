"""Probability weights, rooted labelled trees and the p-tree distribution."""
from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

import numpy as np

from . import kernels
from .randomness import alias_draw, alias_table, as_rng

MAX_WALK_STEPS = 10**9
MAX_ENUMERATION_N = 8


class ProbWeights:
    """A strictly positive probability vector on the labels ``1..n``."""

    def __init__(self, p, tol=1e-12):
        arr = np.array(p, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("weights must be non-empty")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("weights must be finite and strictly positive")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > tol:
            raise ValueError(f"weights sum to {total!r}, not 1")
        arr.setflags(write=False)
        self.p = arr
        self.n = int(arr.size)
        prob, alias = alias_table(arr)
        prob.setflags(write=False)
        alias.setflags(write=False)
        self.prob = prob
        self.alias = alias
        lab = np.concatenate([[0.0], arr])
        lab.setflags(write=False)
        self.by_label = lab
        self._lab_list = lab.tolist()
        self._prob_list = prob.tolist()
        self._alias_list = alias.tolist()

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, w):
        w = np.asarray(w, dtype=np.float64)
        return cls(w / w.sum())

    def __len__(self):
        return self.n

    def __getitem__(self, label):
        return self._lab_list[label]

    def __repr__(self):
        return f"ProbWeights(n={self.n})"

    @property
    def labels(self):
        return range(1, self.n + 1)

    @property
    def sigma(self):
        """Euclidean norm of the vector."""
        return float(np.sqrt(np.dot(self.p, self.p)))

    def draw(self, rng) -> int:
        return alias_draw(self._prob_list, self._alias_list, self.n, rng)

    def draw_many(self, rng, size):
        return [self.draw(rng) for _ in range(size)]

    def to_json(self):
        return json.dumps(self.p.tolist())

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        if isinstance(data, dict):
            data = data["p"]
        return cls(data)


class RootedTree:
    """Immutable rooted tree on a finite set of integer labels.

    ``parent`` maps every non-root vertex to its parent.  Trees on ``1..n``
    built from a parent array keep the array and create the mapping lazily.
    """

    __slots__ = ("root", "_parent", "_arr", "_n", "_vertices", "__dict__")

    def __init__(self, parent, root):
        par = {int(k): int(v) for k, v in dict(parent).items()}
        root = int(root)
        if root in par:
            raise ValueError("root must not have a parent")
        verts = set(par) | {root}
        for c, u in par.items():
            if u not in verts:
                raise ValueError(f"parent {u} of {c} is not a vertex")
        # every vertex must reach the root without revisiting
        state = {root: 2}
        for start in par:
            path = []
            w = start
            while state.get(w, 0) == 0:
                state[w] = 1
                path.append(w)
                w = par[w]
            if state[w] == 1:
                raise ValueError("parent map contains a cycle")
            for x in path:
                state[x] = 2
        self.root = root
        self._parent = MappingProxyType(par)
        self._arr = None
        self._n = len(verts)
        self._vertices = frozenset(verts)

    def __setattr__(self, name, value):
        if name in RootedTree.__slots__ and hasattr(self, "_vertices"):
            raise AttributeError("RootedTree is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def from_parent_array(cls, parent, root):
        """Tree on ``1..n`` from an array with ``parent[w]`` at index ``w``.

        Slot 0 and the root's slot are ignored.
        """
        arr = np.array(parent, dtype=np.int64)
        n = arr.size - 1
        root = int(root)
        if n < 1 or not 1 <= root <= n:
            raise ValueError("root outside 1..n")
        arr[0] = 0
        arr[root] = 0
        body = np.delete(arr[1:], root - 1)
        if body.size and (body.min() < 1 or body.max() > n):
            raise ValueError("parent outside 1..n")
        # pointer doubling: all chains must end at the root
        anc = arr.copy()
        anc[root] = root
        anc[0] = root
        for _ in range(max(1, int(n).bit_length() + 1)):
            anc = anc[anc]
        if np.any(anc != root):
            raise ValueError("parent map contains a cycle")
        arr.setflags(write=False)
        self = object.__new__(cls)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "_parent", None)
        object.__setattr__(self, "_arr", arr)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_vertices", None)
        return self

    @property
    def parent(self):
        if self._parent is None:
            arr = self._arr.tolist()
            par = {w: arr[w] for w in range(1, self._n + 1) if w != self.root}
            object.__setattr__(self, "_parent", MappingProxyType(par))
        return self._parent

    @property
    def vertices(self):
        if self._vertices is None:
            object.__setattr__(self, "_vertices", frozenset(range(1, self._n + 1)))
        return self._vertices

    @classmethod
    def from_edges(cls, edges, root, vertices=None):
        adj = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        if vertices is not None:
            for v in vertices:
                adj.setdefault(v, [])
        adj.setdefault(root, [])
        par = {}
        seen = {root}
        queue = deque([root])
        while queue:
            w = queue.popleft()
            for nb in adj[w]:
                if nb not in seen:
                    seen.add(nb)
                    par[nb] = w
                    queue.append(nb)
        if len(seen) != len(adj) or len(edges) != len(adj) - 1:
            raise ValueError("edges do not form a spanning tree")
        return cls(par, root)

    def __len__(self):
        return self._n

    def __eq__(self, other):
        if not isinstance(other, RootedTree):
            return NotImplemented
        if self.root != other.root or self._n != other._n:
            return False
        if self._arr is not None and other._arr is not None:
            return bool(np.array_equal(self._arr, other._arr))
        return dict(self.parent) == dict(other.parent)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"RootedTree(root={self.root}, n={len(self)})"

    def key(self):
        return (self.root, tuple(sorted(self.parent.items())))

    @cached_property
    def children(self):
        ch = {v: [] for v in self.vertices}
        for c, u in self.parent.items():
            ch[u].append(c)
        return MappingProxyType({v: tuple(sorted(c)) for v, c in ch.items()})

    def child_count(self, v) -> int:
        return len(self.children[v])

    @cached_property
    def depths(self):
        d = {self.root: 0}
        queue = deque([self.root])
        while queue:
            w = queue.popleft()
            for c in self.children[w]:
                d[c] = d[w] + 1
                queue.append(c)
        return MappingProxyType(d)

    def depth(self, v) -> int:
        return self.depths[v]

    def path_to_root(self, v):
        """Vertices from ``v`` up to the root, both included."""
        out = [v]
        par = self.parent
        while v in par:
            v = par[v]
            out.append(v)
        return out

    def lca(self, a, b):
        d = self.depths
        par = self.parent
        while d[a] > d[b]:
            a = par[a]
        while d[b] > d[a]:
            b = par[b]
        while a != b:
            a = par[a]
            b = par[b]
        return a

    def distance(self, a, b) -> int:
        d = self.depths
        return d[a] + d[b] - 2 * d[self.lca(a, b)]

    def is_ancestor(self, a, b) -> bool:
        """True when ``a`` lies on the path from ``b`` to the root."""
        d = self.depths
        par = self.parent
        while d[b] > d[a]:
            b = par[b]
        return a == b

    def edges(self):
        return frozenset(frozenset(e) for e in self.parent.items())

    def adjacency(self):
        adj = {v: [] for v in self.vertices}
        for c, u in self.parent.items():
            adj[c].append(u)
            adj[u].append(c)
        return adj

    def bfs_distances(self, source):
        adj = self.adjacency()
        dist = {source: 0}
        queue = deque([source])
        while queue:
            w = queue.popleft()
            for nb in adj[w]:
                if nb not in dist:
                    dist[nb] = dist[w] + 1
                    queue.append(nb)
        return dist

    def is_full(self) -> bool:
        """True when the vertex set is exactly ``1..n``."""
        if self._arr is not None:
            return True
        return min(self.vertices) == 1 and max(self.vertices) == self._n

    def parent_array(self):
        """Read-only array with ``parent[w]`` at index ``w`` (0 for the root)."""
        if self._arr is None:
            if not self.is_full():
                raise ValueError("vertex set is not 1..n")
            arr = np.zeros(self._n + 1, dtype=np.int64)
            for c, u in self.parent.items():
                arr[c] = u
            arr.setflags(write=False)
            object.__setattr__(self, "_arr", arr)
        return self._arr

    def to_dict(self):
        return {
            "n": len(self),
            "root": self.root,
            "parent": {str(c): u for c, u in sorted(self.parent.items())},
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        try:
            par = {int(k): int(v) for k, v in data["parent"].items()}
            tree = cls(par, int(data["root"]))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed tree record: {exc}") from None
        if "n" in data and int(data["n"]) != len(tree):
            raise ValueError("tree record size does not match its vertices")
        return tree

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _check_dims(tree, weights):
    n = weights.n
    if len(tree) != n or not tree.is_full():
        raise ValueError("incompatible dimensions")


def sample_ptree(weights: ProbWeights, rng=None) -> RootedTree:
    """Draw a p-tree with the weighted Aldous-Broder walk."""
    rng = as_rng(rng)
    parent, root = kernels.ab_walk(weights.prob, weights.alias, rng, MAX_WALK_STEPS)
    return RootedTree.from_parent_array(parent, root)


def ptree_pmf(tree: RootedTree, weights: ProbWeights) -> float:
    """Probability of ``tree`` under the p-tree law: prod of p_u^(#children of u)."""
    _check_dims(tree, weights)
    if weights.n > 64:
        logp = 0.0
        for u, ch in tree.children.items():
            if ch:
                logp += len(ch) * math.log(weights[u])
        return math.exp(logp)
    out = 1.0
    for u, ch in tree.children.items():
        if ch:
            out *= weights[u] ** len(ch)
    return out


def _prufer_edges(seq, n):
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(i for i in range(1, n + 1) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    a, b = [i for i in range(1, n + 1) if degree[i] == 1]
    edges.append((a, b))
    return edges


def enumerate_parent_arrays(n):
    """Yield ``(parent, root)`` for all n^(n-1) rooted trees on ``1..n``."""
    if n > MAX_ENUMERATION_N:
        raise ValueError("enumeration bound exceeded")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        yield (0, 0), 1
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        adj = [[] for _ in range(n + 1)]
        for a, b in _prufer_edges(seq, n):
            adj[a].append(b)
            adj[b].append(a)
        for root in range(1, n + 1):
            parent = [0] * (n + 1)
            parent[root] = -1
            stack = [root]
            while stack:
                w = stack.pop()
                for nb in adj[w]:
                    if parent[nb] == 0:
                        parent[nb] = w
                        stack.append(nb)
            parent[root] = 0
            yield tuple(parent), root


def enumerate_rooted_trees(n):
    """All rooted labelled trees on ``1..n`` (n <= 8)."""
    for parent, root in enumerate_parent_arrays(n):
        yield RootedTree.from_parent_array(parent, root)


def reroot(tree: RootedTree, r) -> RootedTree:
    """Same undirected tree, rooted at ``r``."""
    if r not in tree.vertices:
        raise ValueError(f"{r} is not a vertex")
    par = dict(tree.parent)
    path = tree.path_to_root(r)
    for child, up in zip(path, path[1:]):
        par[up] = child
    par.pop(r, None)
    return RootedTree(par, r)


def span_star(tree: RootedTree, targets):
    """Vertices on the paths from the targets to the root, root excluded."""
    out = set()
    par = tree.parent
    for v in targets:
        if v not in tree.vertices:
            raise ValueError(f"{v} is not a vertex")
        while v in par and v not in out:
            out.add(v)
            v = par[v]
    return out


def span(tree: RootedTree, targets) -> RootedTree:
    """Subtree spanned by the root and the targets."""
    verts = span_star(tree, targets)
    return RootedTree({v: tree.parent[v] for v in verts}, tree.root)


def subtree_above(tree: RootedTree, w):
    """All descendants of ``w``, including ``w``."""
    if w not in tree.vertices:
        raise ValueError(f"{w} is not a vertex")
    out = [w]
    ch = tree.children
    for x in out:
        out.extend(ch[x])
    return set(out)


@dataclass(frozen=True)
class RepeatTimes:
    """Repeat times of an i.i.d. sequence X_0, X_1, ...

    ``times[m-1]`` is the m-th index j at which X_j already appeared among
    X_0..X_(j-1).
    """

    times: tuple
    sequence: tuple

    @property
    def first(self):
        return self.times[0]


def repeat_times(weights: ProbWeights, m=1, rng=None) -> RepeatTimes:
    rng = as_rng(rng)
    seen = set()
    seq = []
    times = []
    j = 0
    while len(times) < m:
        x = weights.draw(rng)
        seq.append(x)
        if x in seen:
            times.append(j)
        seen.add(x)
        j += 1
    return RepeatTimes(tuple(times), tuple(seq))
