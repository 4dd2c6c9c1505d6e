# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled census kernel: circle counts for all 2^n marker states.

Same contract as the pure-Python version in ``_census_py.py``.
"""

from libc.stdlib cimport free, malloc

IMPLEMENTATION = "cython"


cdef int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def circle_counts(ends, int n_arcs, int n_loops):
    """counts[mask] = number of circles when crossings in ``mask`` take the
    negative marker."""
    cdef int n = len(ends) // 4
    cdef int m = 4 * n
    cdef int* e = <int*> malloc(m * sizeof(int))
    cdef int* parent = <int*> malloc(n_arcs * sizeof(int)) if n_arcs else NULL
    if e == NULL or (n_arcs and parent == NULL):
        free(e)
        free(parent)
        raise MemoryError()
    cdef int i, c, b, x, y, rx, ry, roots
    cdef unsigned long mask, total = 1UL << n
    for i in range(m):
        e[i] = ends[i]
    counts = []
    try:
        for mask in range(total):
            for i in range(n_arcs):
                parent[i] = i
            for c in range(n):
                b = 4 * c
                if (mask >> c) & 1:
                    x = e[b + 1]; y = e[b + 2]
                    rx = _find(parent, x); ry = _find(parent, y)
                    if rx != ry:
                        parent[rx] = ry
                    x = e[b + 3]; y = e[b]
                else:
                    x = e[b]; y = e[b + 1]
                    rx = _find(parent, x); ry = _find(parent, y)
                    if rx != ry:
                        parent[rx] = ry
                    x = e[b + 2]; y = e[b + 3]
                rx = _find(parent, x); ry = _find(parent, y)
                if rx != ry:
                    parent[rx] = ry
            roots = 0
            for i in range(n_arcs):
                if _find(parent, i) == i:
                    roots += 1
            counts.append(roots + n_loops)
    finally:
        free(e)
        free(parent)
    return counts
