"""Integral homology of bigraded complexes via Smith normal form.

All arithmetic is exact (Python integers).  Pivoting picks the nonzero
entry of least absolute value (ties: lowest row, then column) to limit
coefficient growth.  Besides the invariant factors the module carries two
independent rank oracles, over the rationals and over GF(2), used by the
test suite to cross-check free ranks and 2-torsion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .states import LaurentPoly

__all__ = [
    "SmithDecomposition",
    "HomologyTable",
    "smith_normal_form",
    "homology_groups",
    "compare_tables",
    "rank_rational",
    "rank_mod",
]


@dataclass(frozen=True)
class SmithDecomposition:
    """Invariant factors d_1 | d_2 | ... | d_k (positive) and the rank k."""

    factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.factors)


def _triplets_to_dense(entries: dict, rows: int, cols: int):
    m = [[0] * cols for _ in range(rows)]
    for (r, c), v in entries.items():
        m[r][c] = v
    return m


def smith_normal_form(matrix, rows=None, cols=None) -> SmithDecomposition:
    """Invariant factors of an integer matrix.

    Accepts a dense list of rows, or a sparse {(row, col): value} dict with
    explicit ``rows``/``cols``.
    """
    if isinstance(matrix, dict):
        m = _triplets_to_dense(matrix, rows, cols)
    else:
        m = [list(r) for r in matrix]
    nr = len(m)
    nc = len(m[0]) if m else 0
    factors = []
    top = 0
    while True:
        pivot = None
        best = None
        for r in range(top, nr):
            row = m[r]
            for c in range(top, nc):
                v = row[c]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    pivot = (r, c)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        r0, c0 = pivot
        m[top], m[r0] = m[r0], m[top]
        for row in m:
            row[top], row[c0] = row[c0], row[top]
        while True:
            p = m[top][top]
            dirty = False
            for r in range(top + 1, nr):
                v = m[r][top]
                if v:
                    q = v // p
                    if q:
                        for c in range(top, nc):
                            m[r][c] -= q * m[top][c]
                    if m[r][top]:
                        m[top], m[r] = m[r], m[top]
                        dirty = True
                        break
            if dirty:
                continue
            for c in range(top + 1, nc):
                v = m[top][c]
                if v:
                    q = v // p
                    if q:
                        for r in range(top, nr):
                            m[r][c] -= q * m[r][top]
                    if m[top][c]:
                        for row in m:
                            row[top], row[c] = row[c], row[top]
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the rest of the block, else absorb a witness row
            p = m[top][top]
            witness = None
            for r in range(top + 1, nr):
                for c in range(top + 1, nc):
                    if m[r][c] % p:
                        witness = r
                        break
                if witness is not None:
                    break
            if witness is None:
                break
            for c in range(top, nc):
                m[top][c] += m[witness][c]
        factors.append(abs(m[top][top]))
        top += 1
        if top >= nr or top >= nc:
            break
    return SmithDecomposition(tuple(factors))


def rank_rational(matrix, rows=None, cols=None) -> int:
    """Rank over the rationals by exact fraction elimination."""
    if isinstance(matrix, dict):
        matrix = _triplets_to_dense(matrix, rows, cols)
    m = [[Fraction(v) for v in row] for row in matrix]
    nr = len(m)
    nc = len(m[0]) if m else 0
    rank = 0
    for c in range(nc):
        pr = next((r for r in range(rank, nr) if m[r][c]), None)
        if pr is None:
            continue
        m[rank], m[pr] = m[pr], m[rank]
        pv = m[rank][c]
        for r in range(rank + 1, nr):
            if m[r][c]:
                f = m[r][c] / pv
                for cc in range(c, nc):
                    m[r][cc] -= f * m[rank][cc]
        rank += 1
        if rank == nr:
            break
    return rank


def rank_mod(matrix, p: int, rows=None, cols=None) -> int:
    """Rank over the field with p elements."""
    if isinstance(matrix, dict):
        matrix = _triplets_to_dense(matrix, rows, cols)
    m = [[v % p for v in row] for row in matrix]
    nr = len(m)
    nc = len(m[0]) if m else 0
    rank = 0
    for c in range(nc):
        pr = next((r for r in range(rank, nr) if m[r][c]), None)
        if pr is None:
            continue
        m[rank], m[pr] = m[pr], m[rank]
        inv = pow(m[rank][c], -1, p)
        for r in range(rank + 1, nr):
            if m[r][c]:
                f = (m[r][c] * inv) % p
                for cc in range(c, nc):
                    m[r][cc] = (m[r][cc] - f * m[rank][cc]) % p
        rank += 1
        if rank == nr:
            break
    return rank


class HomologyTable(dict):
    """(i, j) -> (free rank, torsion invariant factors); trivial entries absent."""

    def to_json(self) -> list:
        return [
            {"i": i, "j": j, "rank": rk, "torsion": list(tor)}
            for (i, j), (rk, tor) in sorted(self.items())
        ]

    @classmethod
    def from_json(cls, data) -> "HomologyTable":
        t = cls()
        for row in data:
            t[(row["i"], row["j"])] = (row["rank"], tuple(row.get("torsion", ())))
        return t

    def euler(self) -> LaurentPoly:
        out = LaurentPoly()
        for (i, j), (rk, _) in self.items():
            out.add_term(-rk if i % 2 else rk, j)
        return out


def homology_groups(cx) -> HomologyTable:
    """H^{i,j} = ker d_{i,j} / im d_{i-1,j} as free rank plus torsion."""
    snf = {}
    for bd in cx.bidegrees():
        d = cx.matrix(bd)
        tgt = (bd[0] + 1, bd[1])
        snf[bd] = smith_normal_form(d, rows=cx.dim(tgt), cols=cx.dim(bd)) if d else \
            SmithDecomposition(())
    table = HomologyTable()
    for (i, j) in cx.bidegrees():
        dim = cx.dim((i, j))
        out_rank = snf.get((i, j), SmithDecomposition(())).rank
        incoming = snf.get((i - 1, j), SmithDecomposition(()))
        free = dim - out_rank - incoming.rank
        torsion = tuple(f for f in incoming.factors if f > 1)
        if free or torsion:
            table[(i, j)] = (free, torsion)
    return table


def compare_tables(a: HomologyTable, b: HomologyTable) -> list:
    """Differences bidegree by bidegree; empty list means identical."""
    diffs = []
    for bd in sorted(set(a) | set(b)):
        va = a.get(bd, (0, ()))
        vb = b.get(bd, (0, ()))
        if va != vb:
            diffs.append({"i": bd[0], "j": bd[1], "left": va, "right": vb})
    return diffs
