"""Pure-Python versions of the hot loops.

They consume the random stream exactly like the compiled versions in
``_kernels.pyx``, so both give identical output for the same generator state.
Arrays are indexed by vertex label ``1..n``; slot 0 is unused.
"""
import numpy as np

from .randomness import REJECTION_MASS, alias_draw


def ab_walk(prob, alias, rng, max_steps):
    """Weighted Aldous-Broder walk on the complete graph with loops.

    Returns ``(parent, root)``; ``parent[root] == 0``.
    """
    prob = prob.tolist()
    alias = alias.tolist()
    n = len(prob)
    parent = [0] * (n + 1)
    seen = [False] * (n + 1)
    y = alias_draw(prob, alias, n, rng)
    root = prev = y
    seen[y] = True
    count = 1
    steps = 0
    while count < n:
        if steps >= max_steps:
            raise RuntimeError("walk did not cover support")
        steps += 1
        y = alias_draw(prob, alias, n, rng)
        if not seen[y]:
            seen[y] = True
            parent[y] = prev
            count += 1
        prev = y
    return np.asarray(parent, dtype=np.int64), root


def _adjacency(parent, root, n):
    adj = [[] for _ in range(n + 1)]
    for w in range(1, n + 1):
        if w != root:
            u = parent[w]
            adj[w].append(u)
            adj[u].append(w)
    return adj


def cut_one(parent, root, v, p, prob, alias, rng):
    """Isolate ``v`` by repeated cuts; returns ``(cuts, marks, hparent)``.

    ``marks[i]`` is the neighbour of ``cuts[i]`` toward ``v`` at the time of
    the cut and ``hparent`` is the parent array of the cut-tree rooted at
    ``cuts[0]``.
    """
    parent = parent.tolist()
    p = p.tolist()
    prob = prob.tolist()
    alias = alias.tolist()
    n = len(parent) - 1
    adj = _adjacency(parent, root, n)
    toward = list(parent)
    w = v
    while w != root:
        toward[parent[w]] = w
        w = parent[w]
    alive = [True] * (n + 1)
    alive[0] = False
    comp = list(range(1, n + 1))
    cuts = []
    marks = []
    hparent = [0] * (n + 1)
    prev_cut = 0
    mass = 0.0
    for w in comp:
        mass += p[w]
    while True:
        if mass >= REJECTION_MASS:
            while True:
                x = alias_draw(prob, alias, n, rng)
                if alive[x]:
                    break
        else:
            u = rng.random() * mass
            acc = 0.0
            x = comp[-1]
            for w in comp:
                acc += p[w]
                if u < acc:
                    x = w
                    break
        cuts.append(x)
        hparent[x] = prev_cut
        prev_cut = x
        if x == v:
            up = 0
        else:
            up = toward[x]
            marks.append(up)
        alive[x] = False
        queue = [x]
        for w in queue:
            for nb in adj[w]:
                if alive[nb] and nb != up:
                    alive[nb] = False
                    hparent[nb] = w
                    queue.append(nb)
        if x == v:
            break
        comp = [w for w in comp if alive[w]]
        mass = 0.0
        for w in comp:
            mass += p[w]
    return (np.asarray(cuts, dtype=np.int64), np.asarray(marks, dtype=np.int64),
            np.asarray(hparent, dtype=np.int64))
