"""Shared test utilities: random diagram generation and independent oracles."""

from __future__ import annotations

import random
from math import gcd
from itertools import combinations

from khovanov import MovePatch, apply_move, parse_pd

SEEDS = [
    "O",
    "X[1,1,2,2]",
    "X[2,3,3,4] X[1,1,2,4]",
    "X[4,2,5,1] X[6,4,1,3] X[2,6,3,5]",
    "X[1,5,2,4] X[2,5,3,6] X[3,1,4,6]",
]


def random_diagram(rng: random.Random, max_crossings: int = 6):
    """A random honest link diagram built by complicating a seed diagram."""
    diagram = parse_pd(rng.choice(SEEDS))
    while True:
        budget = max_crossings - diagram.n
        moves = []
        if budget >= 1:
            moves.append("R1")
        if budget >= 2:
            moves.append("R2")
        if not moves or rng.random() < 0.35:
            return diagram
        kind = rng.choice(moves)
        arc = rng.choice(diagram.arcs) if diagram.arcs else 0
        variant = rng.choice(["+", "-", "+over", "-over"]) if kind == "R1" else ""
        diagram, _ = apply_move(
            diagram,
            MovePatch(kind, "complicate", arcs=(arc,), variant=variant),
        )


def random_diagrams(seed: int, count: int, max_crossings: int = 6):
    rng = random.Random(seed)
    return [random_diagram(rng, max_crossings) for _ in range(count)]


def snf_naive(matrix):
    """Dense textbook Smith reduction, written independently of the library
    routine: recursive block structure, re-scanning the whole block for the
    smallest nonzero pivot before every reduction step (without that the
    coefficients of an 8x8 integer matrix already explode), one Euclidean
    step at a time, divisibility repaired by absorbing a witness row.
    Returns the positive invariant factors in order.
    """
    m = [list(r) for r in matrix]
    nr = len(m)
    nc = len(m[0]) if m else 0
    t = 0
    factors = []
    while t < nr and t < nc:
        while True:
            pos = min(
                ((r, c) for r in range(t, nr) for c in range(t, nc) if m[r][c]),
                key=lambda rc: abs(m[rc[0]][rc[1]]),
                default=None,
            )
            if pos is None:
                return tuple(factors)
            m[t], m[pos[0]] = m[pos[0]], m[t]
            for row in m:
                row[t], row[pos[1]] = row[pos[1]], row[t]
            p = m[t][t]
            bad_row = next((r for r in range(t + 1, nr) if m[r][t] % p), None)
            if bad_row is not None:
                q = m[bad_row][t] // p
                for c in range(nc):
                    m[bad_row][c] -= q * m[t][c]
                continue
            bad_col = next((c for c in range(t + 1, nc) if m[t][c] % p), None)
            if bad_col is not None:
                q = m[t][bad_col] // p
                for r in range(nr):
                    m[r][bad_col] -= q * m[r][t]
                continue
            for r in range(t + 1, nr):
                if m[r][t]:
                    q = m[r][t] // p
                    for c in range(nc):
                        m[r][c] -= q * m[t][c]
            for c in range(t + 1, nc):
                if m[t][c]:
                    q = m[t][c] // p
                    for r in range(nr):
                        m[r][c] -= q * m[r][t]
            witness = next(
                (r for r in range(t + 1, nr)
                 for c in range(t + 1, nc) if m[r][c] % p),
                None,
            )
            if witness is None:
                break
            for c in range(nc):
                m[t][c] += m[witness][c]
        factors.append(abs(m[t][t]))
        t += 1
    return tuple(factors)


def _det(matrix):
    m = [list(r) for r in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pr = next((r for r in range(k + 1, n) if m[r][k]), None)
            if pr is None:
                return 0
            m[k], m[pr] = m[pr], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def gcd_of_minors(matrix, k: int) -> int:
    """gcd of all k x k minors; the product d_1...d_k of invariant factors."""
    nr = len(matrix)
    nc = len(matrix[0]) if matrix else 0
    g = 0
    for rows in combinations(range(nr), k):
        for cols in combinations(range(nc), k):
            sub = [[matrix[r][c] for c in cols] for r in rows]
            g = gcd(g, _det(sub))
    return abs(g)
