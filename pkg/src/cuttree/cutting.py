"""Cutting procedures on p-trees and the cut-trees they produce.

A cut picks a vertex from the weights restricted to the live part of the
tree, removes it and keeps only the pieces that still hold an uncut target.
The discarded pieces hang off the cut vertex in the cut-tree, and the record
of which neighbour led toward each surviving piece (the marks) is what makes
the construction reversible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import kernels
from .ptree import ProbWeights, RootedTree, _check_dims
from .randomness import as_rng, draw_restricted


def _marks_json(marks):
    return {str(k): v for k, v in marks.items()}


@dataclass(frozen=True)
class OneCutRecord:
    """Result of isolating one vertex.

    ``marks[i]`` is the neighbour of ``cuts[i]`` on its way to the target,
    for every cut but the last.
    """

    tree: RootedTree
    cuts: tuple
    marks: tuple
    target: int
    original_root: int

    @property
    def n_cuts(self):
        return len(self.cuts)

    @property
    def targets(self):
        return (self.target,)

    @property
    def backbone(self):
        return tuple(self.cuts)

    def marks_by_successor(self):
        """Mark attached to each backbone vertex but the first."""
        return {self.cuts[i + 1]: self.marks[i] for i in range(len(self.marks))}

    def to_dict(self):
        d = self.tree.to_dict()
        d.update(kind="one", targets=[self.target], cuts=list(self.cuts),
                 marks=_marks_json(self.marks_by_successor()),
                 original_root=self.original_root)
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class KCutRecord:
    """Result of isolating several targets at once.

    ``backbone`` is the tree on the effective cuts in which each cut hangs
    below the previous cut that hit the same piece.  ``marks`` maps every
    non-root backbone vertex ``w`` to the neighbour of its backbone parent
    on the way to the piece that ``w`` was later cut from.
    """

    tree: RootedTree
    backbone: RootedTree
    targets: tuple
    cuts: tuple
    mark_sets: tuple
    marks: dict = field(repr=False)
    effective: tuple = field(repr=False)
    original_root: int = 0

    @property
    def n_cuts(self):
        return len(self.cuts)

    def marks_by_successor(self):
        return dict(self.marks)

    def to_dict(self):
        d = self.tree.to_dict()
        d.update(kind="k", targets=list(self.targets), cuts=list(self.cuts),
                 marks=_marks_json(self.marks), original_root=self.original_root)
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class CompleteCutRecord:
    """Result of cutting every vertex; ``tree`` is the genealogy of the cuts."""

    tree: RootedTree
    cuts: tuple
    marks: dict = field(repr=False)
    original_root: int = 0

    @property
    def targets(self):
        return tuple(sorted(self.tree.vertices))

    def marks_by_successor(self):
        return dict(self.marks)

    def to_dict(self):
        d = self.tree.to_dict()
        d.update(kind="complete", targets=list(self.targets), cuts=list(self.cuts),
                 marks=_marks_json(self.marks), original_root=self.original_root)
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


def record_from_dict(data):
    """Rebuild a cut record from its JSON form."""
    tree = RootedTree.from_dict(data)
    kind = data.get("kind", "one")
    marks = {int(k): int(u) for k, u in data.get("marks", {}).items()}
    cuts = tuple(int(x) for x in data.get("cuts", ()))
    targets = tuple(int(x) for x in data.get("targets", ()))
    orig = int(data.get("original_root", 0))
    if kind == "one":
        if len(targets) != 1:
            raise ValueError("one-cut record needs exactly one target")
        seq = tuple(marks[c] for c in cuts[1:])
        return OneCutRecord(tree, cuts, seq, targets[0], orig)
    if kind == "k":
        from .ptree import span
        return KCutRecord(tree, span(tree, targets), targets, cuts, (), marks, (), orig)
    if kind == "complete":
        return CompleteCutRecord(tree, cuts, marks, orig)
    raise ValueError(f"unknown record kind {kind!r}")


def cut_one(tree: RootedTree, weights: ProbWeights, v, rng=None) -> OneCutRecord:
    """Cut at p-distributed vertices of the piece holding ``v`` until ``v`` is hit."""
    _check_dims(tree, weights)
    if v not in tree.vertices:
        raise ValueError(f"{v} is not a vertex")
    rng = as_rng(rng)
    cuts, marks, hparent = kernels.cut_one(
        tree.parent_array(), tree.root, int(v), weights.by_label,
        weights.prob, weights.alias, rng)
    cuts = tuple(int(x) for x in cuts)
    h = RootedTree.from_parent_array(hparent, cuts[0])
    return OneCutRecord(h, cuts, tuple(int(x) for x in marks), int(v), tree.root)


def _rng_pick(weights, rng):
    p = weights._lab_list
    prob = weights._prob_list
    alias = weights._alias_list

    def pick(members, contains):
        return draw_restricted(p, members, contains, rng, prob, alias)

    return pick


class SharedStream:
    """A lazily extended i.i.d. p-sequence read by several cutting runs.

    Each run gets a cursor and accepts the next element that falls in its
    current live set, which couples the runs as in the nested construction.
    """

    def __init__(self, weights, rng):
        self.weights = weights
        self.rng = rng
        self.values = []

    def _at(self, i):
        while len(self.values) <= i:
            self.values.append(self.weights.draw(self.rng))
        return self.values[i]

    def cursor(self):
        pos = [0]
        picked = []

        def pick(members, contains):
            while True:
                x = self._at(pos[0])
                pos[0] += 1
                if contains(x):
                    picked.append(pos[0] - 1)
                    return x

        pick.picked = picked
        return pick


def _k_cutting(tree, targets, pick):
    """Core of k-cutting; ``pick(members, contains)`` chooses each cut."""
    adj = tree.adjacency()
    targets = tuple(targets)
    remaining = set(targets)
    # live vertex -> id of the piece holding it
    piece_of = {w: 0 for w in tree.vertices}
    pieces = {0: set(tree.vertices)}
    origin = {0: None}
    next_id = 1
    cuts = []
    mark_sets = []
    marks = {}
    bb_parent = {}
    hparent = {}
    effective = {v: [] for v in dict.fromkeys(targets)}
    while remaining:
        members = sorted(piece_of)
        x = pick(members, piece_of.__contains__)
        pid = piece_of[x]
        piece = pieces.pop(pid)
        src = origin.pop(pid)
        if src is not None:
            bb_parent[x] = src[0]
            marks[x] = src[1]
            hparent[x] = src[0]
        for v in effective:
            if v in piece:
                effective[v].append(x)
        remaining.discard(x)
        for w in piece:
            del piece_of[w]
        kept = []
        for u in adj[x]:
            if u not in piece:
                continue
            sub = [u]
            up = {u: x}
            for w in sub:
                for nb in adj[w]:
                    if nb in piece and nb not in up and nb != x:
                        up[nb] = w
                        sub.append(nb)
            if remaining.intersection(sub):
                kept.append((u, sub))
            else:
                # discarded parts hang off x as in the original tree
                hparent.update(up)
        mark_sets.append(frozenset(u for u, _ in kept))
        for u, sub in kept:
            pieces[next_id] = set(sub)
            origin[next_id] = (x, u)
            for w in sub:
                piece_of[w] = next_id
            next_id += 1
        cuts.append(x)
    root = cuts[0]
    hparent.pop(root, None)
    h = RootedTree(hparent, root)
    backbone = RootedTree(bb_parent, root)
    eff = tuple(tuple(effective[v]) for v in targets)
    return h, backbone, tuple(cuts), tuple(mark_sets), marks, eff


def cut_k(tree: RootedTree, weights: ProbWeights, targets, rng=None, pick=None) -> KCutRecord:
    """Cut until every target has been picked, discarding target-free pieces."""
    _check_dims(tree, weights)
    targets = tuple(int(v) for v in targets)
    if not targets:
        raise ValueError("need at least one target")
    for v in targets:
        if v not in tree.vertices:
            raise ValueError(f"{v} is not a vertex")
    if pick is None:
        pick = _rng_pick(weights, as_rng(rng))
    h, backbone, cuts, mark_sets, marks, eff = _k_cutting(tree, targets, pick)
    return KCutRecord(h, backbone, targets, cuts, mark_sets, marks, eff, tree.root)


def coupled_cut_family(tree: RootedTree, weights: ProbWeights, targets, rng=None):
    """k-cut records for k = 1..K that all read one shared p-sequence."""
    stream = SharedStream(weights, as_rng(rng))
    targets = tuple(targets)
    return [cut_k(tree, weights, targets[:k], pick=stream.cursor())
            for k in range(1, len(targets) + 1)]


def cut_complete(tree: RootedTree, weights: ProbWeights, rng=None, pick=None) -> CompleteCutRecord:
    """Cut every vertex in p-order; parent of each cut is the last cut of its piece."""
    _check_dims(tree, weights)
    if pick is None:
        pick = _rng_pick(weights, as_rng(rng))
    adj = tree.adjacency()
    alive = set(tree.vertices)
    # the most recent cut whose piece contained w, and the neighbour used
    last = {}
    parent = {}
    marks = {}
    cuts = []
    while alive:
        x = pick(sorted(alive), alive.__contains__)
        if x in last:
            parent[x], marks[x] = last[x]
        alive.discard(x)
        cuts.append(x)
        for u in adj[x]:
            if u not in alive:
                continue
            stack = [u]
            seen = {u}
            while stack:
                w = stack.pop()
                last[w] = (x, u)
                for nb in adj[w]:
                    if nb in alive and nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
    g = RootedTree(parent, cuts[0])
    return CompleteCutRecord(g, tuple(cuts), marks, tree.root)


def canonical_order(tree: RootedTree, targets):
    """Span vertices ordered by first spanning target, then by depth.

    The root is excluded.  A vertex's first spanning target is the earliest
    target whose root path passes through it.
    """
    first = {}
    par = tree.parent
    for ell, v in enumerate(targets):
        w = v
        while w in par and w not in first:
            first[w] = ell
            w = par[w]
    depth = tree.depths
    return tuple(sorted(first, key=lambda w: (first[w], depth[w])))
