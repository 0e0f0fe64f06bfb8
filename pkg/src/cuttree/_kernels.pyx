# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the weighted Aldous-Broder walk and 1-cutting.

Uniforms come from the generator's ``next_double``, which is the same value
``Generator.random()`` returns, so the pure-Python fallback reproduces these
results bit for bit.
"""
import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int64_t
from numpy.random cimport bitgen_t

from .randomness import REJECTION_MASS

cnp.import_array()

cdef double _REJECT = REJECTION_MASS


cdef inline bitgen_t* _bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline int64_t _alias_draw(bitgen_t* bg, const double* prob,
                                const int64_t* alias, Py_ssize_t n) noexcept nogil:
    cdef double x = bg.next_double(bg.state) * n
    cdef Py_ssize_t i = <Py_ssize_t> x
    if i >= n:
        i = n - 1
    if x - i < prob[i]:
        return i + 1
    return alias[i] + 1


def ab_walk(const double[::1] prob, const int64_t[::1] alias, object rng, int64_t max_steps):
    cdef Py_ssize_t n = prob.shape[0]
    parent_arr = np.zeros(n + 1, dtype=np.int64)
    seen_arr = np.zeros(n + 1, dtype=np.uint8)
    cdef int64_t[::1] parent = parent_arr
    cdef unsigned char[::1] seen = seen_arr
    cdef bitgen_t* bg = _bitgen(rng)
    cdef int64_t y, prev, root, steps = 0
    cdef Py_ssize_t count = 1
    cdef bint failed = False
    lock = rng.bit_generator.lock
    with lock:
        with nogil:
            y = _alias_draw(bg, &prob[0], &alias[0], n)
            root = y
            prev = y
            seen[y] = 1
            while count < n:
                if steps >= max_steps:
                    failed = True
                    break
                steps += 1
                y = _alias_draw(bg, &prob[0], &alias[0], n)
                if not seen[y]:
                    seen[y] = 1
                    parent[y] = prev
                    count += 1
                prev = y
    if failed:
        raise RuntimeError("walk did not cover support")
    return parent_arr, int(root)


def cut_one(const int64_t[::1] parent, int64_t root, int64_t v, const double[::1] p,
            const double[::1] prob, const int64_t[::1] alias, object rng):
    cdef Py_ssize_t n = parent.shape[0] - 1
    cdef Py_ssize_t m = prob.shape[0]
    cdef Py_ssize_t w, j, t, head, tail, comp_len, new_len, ncuts = 0
    cdef int64_t x, nb, up, prev_cut = 0
    cdef double mass, u, acc

    deg_arr = np.zeros(n + 2, dtype=np.int64)
    cdef int64_t[::1] off = deg_arr
    for w in range(1, n + 1):
        if w != root:
            off[w + 1] += 1
            off[parent[w] + 1] += 1
    for w in range(1, n + 2):
        off[w] += off[w - 1]
    adj_arr = np.zeros(max(2 * n - 2, 1), dtype=np.int64)
    fill_arr = deg_arr[:n + 1].copy()
    cdef int64_t[::1] adj = adj_arr
    cdef int64_t[::1] fill = fill_arr
    for w in range(1, n + 1):
        if w != root:
            adj[fill[w]] = parent[w]
            fill[w] += 1
            adj[fill[parent[w]]] = w
            fill[parent[w]] += 1

    # toward[w] is the neighbour of w on the path to v (w != v)
    toward_arr = np.array(parent, dtype=np.int64)
    cdef int64_t[::1] toward = toward_arr
    w = v
    while w != root:
        up = parent[w]
        toward[up] = w
        w = up

    alive_arr = np.ones(n + 1, dtype=np.uint8)
    comp_arr = np.arange(1, n + 1, dtype=np.int64)
    queue_arr = np.zeros(n + 1, dtype=np.int64)
    cuts_arr = np.zeros(n, dtype=np.int64)
    marks_arr = np.zeros(n, dtype=np.int64)
    hparent_arr = np.zeros(n + 1, dtype=np.int64)
    cdef unsigned char[::1] alive = alive_arr
    cdef int64_t[::1] comp = comp_arr
    cdef int64_t[::1] queue = queue_arr
    cdef int64_t[::1] cuts = cuts_arr
    cdef int64_t[::1] marks = marks_arr
    cdef int64_t[::1] hparent = hparent_arr
    alive[0] = 0
    comp_len = n
    cdef bitgen_t* bg = _bitgen(rng)

    lock = rng.bit_generator.lock
    with lock:
        with nogil:
            mass = 0.0
            for t in range(comp_len):
                mass += p[comp[t]]
            while True:
                if mass >= _REJECT:
                    while True:
                        x = _alias_draw(bg, &prob[0], &alias[0], m)
                        if alive[x]:
                            break
                else:
                    u = bg.next_double(bg.state) * mass
                    acc = 0.0
                    x = comp[comp_len - 1]
                    for t in range(comp_len):
                        acc += p[comp[t]]
                        if u < acc:
                            x = comp[t]
                            break
                cuts[ncuts] = x
                ncuts += 1
                hparent[x] = prev_cut
                prev_cut = x
                # discard the part hanging off x away from v
                if x == v:
                    up = 0
                else:
                    up = toward[x]
                    marks[ncuts - 1] = up
                alive[x] = 0
                queue[0] = x
                head = 0
                tail = 1
                while head < tail:
                    w = queue[head]
                    head += 1
                    for j in range(off[w], off[w + 1]):
                        nb = adj[j]
                        if alive[nb] and nb != up:
                            alive[nb] = 0
                            hparent[nb] = w
                            queue[tail] = nb
                            tail += 1
                if x == v:
                    break
                new_len = 0
                mass = 0.0
                for t in range(comp_len):
                    w = comp[t]
                    if alive[w]:
                        comp[new_len] = w
                        new_len += 1
                        mass += p[w]
                comp_len = new_len
    return cuts_arr[:ncuts].copy(), marks_arr[:ncuts - 1].copy(), hparent_arr
