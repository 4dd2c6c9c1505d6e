"""The bigraded integer Khovanov chain complex of a link diagram.

Generators are enhanced states; the differential flips one positive marker
to negative and re-signs the circles touched by the flip:

    merge (two circles to one):  (+,+) -> +,  (+,-) and (-,+) -> -,
                                 (-,-) -> term dropped;
    split (one circle to two):   + -> (+,-) + (-,+),  - -> (-,-).

Each flip carries the global sign (-1)^(number of negative markers strictly
before the flipped crossing in the crossing order); "after" is also
supported for the convention-search harness.  The differential has bidegree
(1, 0): it raises i and preserves j, which together with d^2 = 0 and the
graded Euler characteristic equalling the Jones polynomial pins the rules
down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import LinkDiagram
from .states import (
    DEFAULT_MAX_CROSSINGS,
    EnhancedState,
    LaurentPoly,
    trace_circles,
)

__all__ = [
    "KhovanovComplex",
    "ChainElement",
    "build_complex",
    "verify_d_squared",
    "graded_euler",
    "saddle",
    "flip_coefficient",
]

StateKey = tuple  # (markers tuple, signs tuple), signs in canonical circle order


class ChainElement(dict):
    """Formal integer combination of state keys within one bidegree."""

    def add(self, key, coeff):
        c = self.get(key, 0) + coeff
        if c:
            self[key] = c
        else:
            self.pop(key, None)

    def scaled(self, k):
        out = ChainElement()
        for key, c in self.items():
            out.add(key, c * k)
        return out

    def plus(self, other):
        out = ChainElement(self)
        for key, c in other.items():
            out.add(key, c)
        return out


def saddle(diagram: LinkDiagram, state: EnhancedState, c: int) -> list[tuple]:
    """Re-sign circles across the marker flip at crossing ``c`` (no global
    sign): returns [(EnhancedState, coefficient), ...].

    The flip is positive-to-negative when state.markers[c] > 0 and the
    reverse otherwise; both directions are pure Frobenius saddles.  Exactly
    one merge or one split happens per flip.
    """
    markers = list(state.markers)
    markers[c] = -markers[c]
    markers = tuple(markers)
    new_circles = trace_circles(diagram, markers)
    old_map = dict(zip(state.circles, state.signs))
    same = set(state.circles) & set(new_circles)
    old_changed = [x for x in state.circles if x not in same]
    new_changed = [x for x in new_circles if x not in same]
    out = []
    if len(old_changed) == 2 and len(new_changed) == 1:
        s1, s2 = old_map[old_changed[0]], old_map[old_changed[1]]
        if s1 < 0 and s2 < 0:
            return []
        merged = 1 if (s1 > 0 and s2 > 0) else -1
        signs = tuple(
            merged if x == new_changed[0] else old_map[x] for x in new_circles
        )
        out.append((EnhancedState(markers, new_circles, signs, state.writhe), 1))
    elif len(old_changed) == 1 and len(new_changed) == 2:
        s = old_map[old_changed[0]]
        pairs = [(1, -1), (-1, 1)] if s > 0 else [(-1, -1)]
        x1, x2 = new_changed
        for a, b in pairs:
            assign = {x1: a, x2: b}
            signs = tuple(
                assign[x] if x in assign else old_map[x] for x in new_circles
            )
            out.append((EnhancedState(markers, new_circles, signs, state.writhe), 1))
    else:
        raise AssertionError(
            f"marker flip changed {len(old_changed)} -> {len(new_changed)} "
            "circles; expected a single merge or split"
        )
    return out


def flip_coefficient(markers, c: int, rule: str = "before") -> int:
    """Ordering sign of the differential's component at crossing ``c``."""
    if rule == "before":
        neg = sum(1 for m in markers[:c] if m < 0)
    elif rule == "after":
        neg = sum(1 for m in markers[c + 1 :] if m < 0)
    else:
        raise ValueError(f"unknown ordering rule {rule!r}")
    return -1 if neg % 2 else 1


@dataclass
class KhovanovComplex:
    """Bigraded free complex with sparse integer differentials.

    ``gens[(i, j)]`` lists state keys in canonical order; ``diffs[(i, j)]``
    holds the matrix of d: C^{i,j} -> C^{i+1,j} as {(row, col): coeff}.
    """

    diagram: LinkDiagram
    sign_rule: str
    gens: dict = field(default_factory=dict)
    diffs: dict = field(default_factory=dict)
    index: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)

    def bidegrees(self):
        return sorted(self.gens)

    def dim(self, bidegree) -> int:
        return len(self.gens.get(bidegree, ()))

    def total_dim(self) -> int:
        return sum(len(v) for v in self.gens.values())

    def position(self, key: StateKey):
        """(bidegree, row index) of a generator."""
        return self.index[key]

    def matrix(self, bidegree) -> dict:
        return self.diffs.get(bidegree, {})

    def census(self) -> dict:
        return {bd: len(v) for bd, v in self.gens.items()}

    def to_json(self) -> dict:
        """Generator census and differential triplets, deterministically ordered."""
        return {
            "census": [
                {"i": i, "j": j, "dim": len(self.gens[(i, j)])}
                for (i, j) in self.bidegrees()
            ],
            "differentials": [
                {
                    "i": i,
                    "j": j,
                    "triplets": [
                        [r, c, v]
                        for (r, c), v in sorted(self.diffs[(i, j)].items())
                    ],
                }
                for (i, j) in sorted(self.diffs)
                if self.diffs[(i, j)]
            ],
        }


def build_complex(
    diagram: LinkDiagram,
    sign_rule: str = "before",
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
) -> KhovanovComplex:
    """Enhanced-state chain complex of a diagram, differential included."""
    from .states import enumerate_enhanced

    cx = KhovanovComplex(diagram, sign_rule)
    for s in enumerate_enhanced(diagram, max_crossings):
        cx.gens.setdefault((s.i, s.j), []).append(s.key())
        cx.states[s.key()] = s
    for bd in cx.gens:
        cx.gens[bd].sort()
        for row, key in enumerate(cx.gens[bd]):
            cx.index[key] = (bd, row)
    for (i, j), keys in cx.gens.items():
        block = cx.diffs.setdefault((i, j), {})
        for col, key in enumerate(keys):
            s = cx.states[key]
            for c in range(diagram.n):
                if s.markers[c] < 0:
                    continue
                coeff = flip_coefficient(s.markers, c, sign_rule)
                for t, k in saddle(diagram, s, c):
                    (bd_t, row) = cx.index[t.key()]
                    if bd_t != (i + 1, j):
                        raise AssertionError(
                            f"differential not of bidegree (1,0): {(i, j)} -> {bd_t}"
                        )
                    prev = block.get((row, col), 0) + coeff * k
                    if prev:
                        block[(row, col)] = prev
                    else:
                        block.pop((row, col), None)
    return cx


def verify_d_squared(cx: KhovanovComplex) -> list:
    """Bidegrees (i, j) where d_{i+1,j} . d_{i,j} has a nonzero entry."""
    bad = []
    for (i, j) in cx.bidegrees():
        d1 = cx.matrix((i, j))
        d2 = cx.matrix((i + 1, j))
        if not d1 or not d2:
            continue
        prod = {}
        by_col = {}
        for (r, c), v in d2.items():
            by_col.setdefault(c, []).append((r, v))
        for (m, c), v in d1.items():
            for r, w in by_col.get(m, ()):
                prod[(r, c)] = prod.get((r, c), 0) + w * v
        if any(prod.values()):
            bad.append((i, j))
    return bad


def graded_euler(cx: KhovanovComplex) -> LaurentPoly:
    """Sum over bidegrees of (-1)^i dim C^{i,j} q^j."""
    out = LaurentPoly()
    for (i, j), keys in cx.gens.items():
        out.add_term(-len(keys) if i % 2 else len(keys), j)
    return out
