"""Pure-Python census kernel: circle counts for all 2^n marker states.

Same contract as the Cython version in ``_census_cy.pyx``; selection
happens in ``khovanov.kernels``.
"""

from __future__ import annotations

IMPLEMENTATION = "python"


def circle_counts(ends: list[int], n_arcs: int, n_loops: int) -> list[int]:
    """counts[mask] = number of circles when crossings in ``mask`` take the
    negative marker.

    ``ends`` holds 4 arc indices (0-based, < n_arcs) per crossing in PD
    order; positive smoothing joins slots (0,1) and (2,3), negative (1,2)
    and (3,0).
    """
    n = len(ends) // 4
    parent = list(range(n_arcs))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    counts = []
    for mask in range(1 << n):
        for i in range(n_arcs):
            parent[i] = i
        for c in range(n):
            b = 4 * c
            if (mask >> c) & 1:
                pairs = ((ends[b + 1], ends[b + 2]), (ends[b + 3], ends[b]))
            else:
                pairs = ((ends[b], ends[b + 1]), (ends[b + 2], ends[b + 3]))
            for x, y in pairs:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
        roots = 0
        for i in range(n_arcs):
            if find(i) == i:
                roots += 1
        counts.append(roots + n_loops)
    return counts
