"""The shuffle: rewiring a cut-tree back into a tree with the original law."""
from __future__ import annotations

from collections import deque

from .cutting import CompleteCutRecord, KCutRecord, OneCutRecord, canonical_order
from .ptree import ProbWeights, RootedTree, reroot, span, subtree_above
from .randomness import as_rng, draw_restricted


def rewire_tau(h: RootedTree, targets, marks) -> RootedTree:
    """Replace each span edge <x, w> by {x, marks[w]}; the root stays put.

    ``marks[w]`` must lie in the subtree above ``w``.
    """
    sp = span(h, targets)
    span_edges = {}
    for w, x in sp.parent.items():
        if w not in marks:
            raise ValueError(f"missing mark for {w}")
        u = marks[w]
        if u not in h.vertices or not h.is_ancestor(w, u):
            raise ValueError("mark outside admissible subtree")
        span_edges[w] = (x, u)
    adj = {v: [] for v in h.vertices}
    for c, q in h.parent.items():
        if c in span_edges:
            continue
        adj[c].append(q)
        adj[q].append(c)
    for x, u in span_edges.values():
        adj[x].append(u)
        adj[u].append(x)
    parent = {}
    seen = {h.root}
    queue = deque([h.root])
    while queue:
        w = queue.popleft()
        for nb in adj[w]:
            if nb not in seen:
                seen.add(nb)
                parent[nb] = w
                queue.append(nb)
    if len(seen) != len(h):
        raise ValueError("rewiring did not produce a tree")
    return RootedTree(parent, h.root)


def sample_u_vector(h: RootedTree, targets, weights: ProbWeights, rng=None):
    """Marks for the span of ``targets``: each from p restricted to its subtree.

    Drawn in canonical order, which the returned dict preserves.
    """
    rng = as_rng(rng)
    p = weights._lab_list
    marks = {}
    for w in canonical_order(h, targets):
        sub = subtree_above(h, w)
        marks[w] = draw_restricted(p, sorted(sub), sub.__contains__, rng,
                                   weights._prob_list, weights._alias_list)
    return marks


def _shuffle_draws(h, targets, weights, rng):
    """New root first, then the marks; shared with the marked-walk metric."""
    new_root = weights.draw(rng)
    marks = sample_u_vector(h, targets, weights, rng)
    return new_root, marks


def shuff_k(h: RootedTree, weights: ProbWeights, targets, rng=None) -> RootedTree:
    """Random inverse of k-cutting: rewire the span of ``targets``, then reroot."""
    rng = as_rng(rng)
    targets = tuple(targets)
    new_root, marks = _shuffle_draws(h, targets, weights, rng)
    return reroot(rewire_tau(h, targets, marks), new_root)


def shuff_one(h: RootedTree, weights: ProbWeights, v, rng=None) -> RootedTree:
    return shuff_k(h, weights, (v,), rng)


def shuff_complete(g: RootedTree, weights: ProbWeights, rng=None) -> RootedTree:
    """Random inverse of complete cutting on the genealogy tree ``g``."""
    return shuff_k(g, weights, tuple(sorted(g.vertices)), rng)


def reverse_exact(record) -> RootedTree:
    """Undo a cutting run from its recorded marks.

    One- and k-cut records give back the original rooted tree; a complete
    record only determines the edge set, so the result keeps the genealogy
    root.
    """
    if isinstance(record, CompleteCutRecord):
        return rewire_tau(record.tree, record.targets, record.marks_by_successor())
    if isinstance(record, (OneCutRecord, KCutRecord)):
        t = rewire_tau(record.tree, record.targets, record.marks_by_successor())
        return reroot(t, record.original_root)
    raise TypeError(f"not a cut record: {type(record).__name__}")
