"""Explicit chain homotopy equivalences for Reidemeister moves II and III.

For a matched R2 bigon (crossings a, b) the complex of the pre-move diagram
splits off a retained subcomplex spanned by two-term combinations

    r(g) = g + attach(S_b(g)),   g an enhanced state with markers (a-, b+),

where S_b is the Frobenius saddle at b and ``attach`` re-inserts the bigon
circle with the partner sign.  The retraction sends g to r(g), sends a
bigon-circle state whose circle carries the active sign to minus r applied
to the saddle at a of the state with the circle removed, and kills
everything else.  The homotopy pairs the two acyclic families.  R3 has the
same skeleton with a triangle circle, a third retained family (states whose
marker at c is negative, mapped across the move by an isotopy of the
c-smoothed diagrams) and one extra retraction term through the saddle at c.

Sign and labelling conventions are collected in ``SignConvention``; the
frozen default is certified empirically by ``convention_search``, which
reruns every identity over a finite candidate space.  All checks are exact
integer matrix identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .complexes import ChainElement, KhovanovComplex, build_complex, saddle
from .diagram import (
    LinkDiagram,
    MovePatch,
    PatchMismatchError,
    apply_move,
    diagram_from_tuples,
    match_r2,
    match_r3,
)
from .homology import homology_groups
from .states import EnhancedState, trace_circles

__all__ = [
    "SignConvention",
    "DEFAULT_CONVENTION",
    "ChainMap",
    "Homotopy",
    "MoveEquivalence",
    "decompose_r2",
    "r2_isom",
    "r2_retraction",
    "r2_homotopy",
    "decompose_r3",
    "r3_isom",
    "r3_retraction",
    "r3_homotopy",
    "verify_chain_map",
    "verify_homotopy_identity",
    "convention_search",
    "default_candidates",
]


@dataclass(frozen=True)
class SignConvention:
    """One point of the finite convention space the maps are built from.

    ``partner_mid`` is the sign put on the bigon/triangle circle in the
    retained combination; ``active_mid`` selects the circle-sign family the
    retraction and homotopy act on.  The remaining fields are global signs
    on the individual formulas, the differential ordering rule, whether the
    homotopy carries (-1)^(negative markers outside the patch), and the
    saddle coefficient table (``negated`` deliberately breaks merges and is
    kept for demonstrating that the search rejects wrong tables).
    """

    name: str = "default"
    order_rule: str = "before"
    partner_mid: int = 1
    active_mid: int = -1
    partner_sign: int = 1
    rho_b_sign: int = -1
    rho_w_sign: int = 1
    h_w_sign: int = -1
    h_b_sign: int = 1
    h_x_mod: bool = True
    pq_rule: str = "standard"
    isom_eps: str = "xab"

    @property
    def id(self) -> str:
        return self.name


DEFAULT_CONVENTION = SignConvention()


# ---------------------------------------------------------------------------
# graded sparse maps
# ---------------------------------------------------------------------------

class GradedSpace:
    """Dimension bookkeeping for bigraded free modules."""

    def __init__(self, dims: dict):
        self.dims = {bd: d for bd, d in dims.items() if d}

    def dim(self, bd):
        return self.dims.get(bd, 0)

    def bidegrees(self):
        return sorted(self.dims)

    @classmethod
    def of_complex(cls, cx: KhovanovComplex):
        return cls({bd: len(g) for bd, g in cx.gens.items()})


class GradedMap:
    """Sparse integer map between graded spaces with a fixed bidegree shift."""

    def __init__(self, name, src: GradedSpace, tgt: GradedSpace, shift=(0, 0)):
        self.name = name
        self.src = src
        self.tgt = tgt
        self.shift = shift
        self.blocks: dict = {}

    def add(self, bd, row, col, coeff):
        if not coeff:
            return
        block = self.blocks.setdefault(bd, {})
        v = block.get((row, col), 0) + coeff
        if v:
            block[(row, col)] = v
        else:
            del block[(row, col)]

    def block(self, bd):
        return self.blocks.get(bd, {})

    def compose(self, other: "GradedMap", name=None) -> "GradedMap":
        """self after other (self . other)."""
        out = GradedMap(
            name or f"{self.name}.{other.name}",
            other.src,
            self.tgt,
            (self.shift[0] + other.shift[0], self.shift[1] + other.shift[1]),
        )
        for bd, g in other.blocks.items():
            mid_bd = (bd[0] + other.shift[0], bd[1] + other.shift[1])
            f = self.blocks.get(mid_bd)
            if not f:
                continue
            by_col = {}
            for (r, c), v in f.items():
                by_col.setdefault(c, []).append((r, v))
            for (m, c), v in g.items():
                for r, w in by_col.get(m, ()):
                    out.add(bd, r, c, w * v)
        return out

    def plus(self, other, name=None, scale=1):
        assert self.shift == other.shift
        out = GradedMap(name or self.name, self.src, self.tgt, self.shift)
        for bd, blk in self.blocks.items():
            for (r, c), v in blk.items():
                out.add(bd, r, c, v)
        for bd, blk in other.blocks.items():
            for (r, c), v in blk.items():
                out.add(bd, r, c, scale * v)
        return out

    def minus(self, other, name=None):
        return self.plus(other, name=name, scale=-1)

    def first_violation(self):
        for bd in sorted(self.blocks):
            blk = self.blocks[bd]
            if blk:
                (r, c) = sorted(blk)[0]
                return {"i": bd[0], "j": bd[1], "row": r, "col": c,
                        "value": blk[(r, c)]}
        return None

    def first_difference(self, other):
        """First entry where the two maps disagree, with both values."""
        diff = self.minus(other, name="diff")
        v = diff.first_violation()
        if v is None:
            return None
        bd = (v["i"], v["j"])
        rc = (v["row"], v["col"])
        return {"i": v["i"], "j": v["j"], "row": v["row"], "col": v["col"],
                "lhs": self.block(bd).get(rc, 0),
                "rhs": other.block(bd).get(rc, 0)}

    @classmethod
    def identity(cls, space: GradedSpace, name="id"):
        out = cls(name, space, space)
        for bd in space.bidegrees():
            for k in range(space.dim(bd)):
                out.add(bd, k, k, 1)
        return out

    @classmethod
    def differential(cls, cx: KhovanovComplex):
        space = GradedSpace.of_complex(cx)
        out = cls("d", space, space, (1, 0))
        for bd, blk in cx.diffs.items():
            for (r, c), v in blk.items():
                out.add(bd, r, c, v)
        return out


class ChainMap(GradedMap):
    """Bidegree-(0,0) map intended to commute with the differentials."""


class Homotopy(GradedMap):
    """Bidegree-(-1,0) map."""


# ---------------------------------------------------------------------------
# exact linear algebra helpers (small dense blocks)
# ---------------------------------------------------------------------------

def _det_bareiss(m) -> int:
    m = [list(r) for r in m]
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


def _solve_exact(columns, target):
    """Coordinates of ``target`` in the basis ``columns`` (lists of equal
    length), or None if inconsistent.  Exact rational elimination."""
    rows = len(target)
    ncols = len(columns)
    aug = [[Fraction(columns[c][r]) for c in range(ncols)] + [Fraction(target[r])]
           for r in range(rows)]
    piv_cols = []
    rank = 0
    for c in range(ncols):
        pr = next((r for r in range(rank, rows) if aug[r][c]), None)
        if pr is None:
            continue
        aug[rank], aug[pr] = aug[pr], aug[rank]
        pv = aug[rank][c]
        aug[rank] = [x / pv for x in aug[rank]]
        for r in range(rows):
            if r != rank and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[rank])]
        piv_cols.append(c)
        rank += 1
    for r in range(rank, rows):
        if aug[r][ncols]:
            return None
    coords = [Fraction(0)] * ncols
    for r, c in enumerate(piv_cols):
        coords[c] = aug[r][ncols]
    return coords


# ---------------------------------------------------------------------------
# state transport between resolutions
# ---------------------------------------------------------------------------

def _state_with(diagram, markers, sign_by_circle):
    circles = trace_circles(diagram, markers)
    signs = tuple(sign_by_circle[c] for c in circles)
    return EnhancedState(tuple(markers), circles, signs, diagram.writhe())


def _attach(diagram, state, flip_at, patch_arcs, value):
    """Insert the patch-local circle with ``value``; other circles keep their
    signs through containment (new circle inside old)."""
    markers = list(state.markers)
    markers[flip_at] = -markers[flip_at]
    new_circles = trace_circles(diagram, tuple(markers))
    assign = {}
    for nc in new_circles:
        if nc <= patch_arcs:
            assign[nc] = value
            continue
        owners = [oc for oc in state.circles if nc <= oc]
        if len(owners) != 1:
            raise AssertionError("attach: circle containment not one-to-one")
        assign[nc] = state.sign_of(owners[0])
    return _state_with(diagram, tuple(markers), assign)


def _drop(diagram, state, flip_at, patch_arcs):
    """Remove the patch-local circle; other circles keep their signs (old
    circle inside new)."""
    markers = list(state.markers)
    markers[flip_at] = -markers[flip_at]
    new_circles = trace_circles(diagram, tuple(markers))
    old = [c for c in state.circles if not (c <= patch_arcs)]
    assign = {}
    for nc in new_circles:
        owners = [oc for oc in old if oc <= nc]
        if len(owners) != 1:
            raise AssertionError("drop: circle containment not one-to-one")
        assign[nc] = state.sign_of(owners[0])
    return _state_with(diagram, tuple(markers), assign)


def _transport_bijective(diagram, state, new_markers, patch_arcs):
    """Move signs to the resolution ``new_markers`` whose circles match the
    state's circle for circle away from the patch."""
    new_circles = trace_circles(diagram, tuple(new_markers))
    assign = {}
    unmatched_new = []
    used = set()
    for nc in new_circles:
        ext = nc - patch_arcs
        owners = [oc for oc in state.circles if oc - patch_arcs == ext and ext]
        if len(owners) == 1:
            assign[nc] = state.sign_of(owners[0])
            used.add(owners[0])
        else:
            unmatched_new.append(nc)
    leftovers = [oc for oc in state.circles if oc not in used]
    if len(unmatched_new) == 1 and len(leftovers) == 1:
        assign[unmatched_new[0]] = state.sign_of(leftovers[0])
    elif unmatched_new or leftovers:
        raise AssertionError("bijective transport: external arcs do not match")
    return _state_with(diagram, tuple(new_markers), assign)


def _transport_cross(src_state, tgt_diagram, tgt_markers, corr):
    """Carry circle signs from a state of one diagram to a resolution of the
    other through the arc correspondence of the move.

    Image arc sets (which may include loop sentinels) are matched by
    containment, so arcs private to either patch need no special casing.
    """
    tgt_circles = trace_circles(tgt_diagram, tuple(tgt_markers))
    images = []
    for oc in src_state.circles:
        images.append(frozenset(corr[x] for x in oc if x in corr))
    assign = {}
    used = set()
    unmatched = []
    for tc in tgt_circles:
        owners = [
            k for k, img in enumerate(images) if img and img <= tc and k not in used
        ]
        if len(owners) == 1:
            assign[tc] = src_state.signs[owners[0]]
            used.add(owners[0])
        else:
            unmatched.append(tc)
    leftovers = [k for k in range(len(images)) if k not in used]
    if len(unmatched) == 1 and len(leftovers) == 1:
        assign[unmatched[0]] = src_state.signs[leftovers[0]]
    elif unmatched or leftovers:
        raise AssertionError("cross-diagram transport: circles do not match")
    return _state_with(tgt_diagram, tuple(tgt_markers), assign)


def _saddle_terms(diagram, state, crossing, conv: SignConvention):
    """Frobenius saddle at a patch crossing, honouring the convention's
    coefficient table."""
    terms = saddle(diagram, state, crossing)
    if conv.pq_rule == "negated":
        merged = len(terms) == 1 and len(terms[0][0].circles) < len(state.circles)
        if merged:
            terms = [(s, -k) for s, k in terms]
    elif conv.pq_rule != "standard":
        raise ValueError(f"unknown pq rule {conv.pq_rule!r}")
    return terms


# ---------------------------------------------------------------------------
# retained bases
# ---------------------------------------------------------------------------

class RetainedBasis:
    """Basis of the retained summand, as chain elements of the ambient complex.

    Entries are ("combo", key) for two-term combinations indexed by their
    leading state and, for R3, ("state", key) for states whose marker at the
    crossing c is negative.
    """

    def __init__(self, cx: KhovanovComplex):
        self.cx = cx
        self.entries: dict = {}      # bd -> list of entry ids
        self.elements: dict = {}     # entry id -> ChainElement
        self.position: dict = {}     # entry id -> (bd, row)

    def add(self, entry_id, element: ChainElement):
        bd = self.cx.position(next(iter(element)))[0]
        for key in element:
            if self.cx.position(key)[0] != bd:
                raise AssertionError("retained combination mixes bidegrees")
        row = len(self.entries.setdefault(bd, []))
        self.entries[bd].append(entry_id)
        self.elements[entry_id] = element
        self.position[entry_id] = (bd, row)

    def space(self) -> GradedSpace:
        return GradedSpace({bd: len(v) for bd, v in self.entries.items()})

    def inclusion(self, name="in") -> ChainMap:
        out = ChainMap(name, self.space(), GradedSpace.of_complex(self.cx))
        for bd, ids in self.entries.items():
            for col, entry_id in enumerate(ids):
                for key, coeff in self.elements[entry_id].items():
                    _, row = self.cx.position(key)
                    out.add(bd, row, col, coeff)
        return out


class _Trivial:
    """Degenerate 'retained summand = everything' used on the R2 target side."""

    def __init__(self, cx):
        self.cx = cx

    def space(self):
        return GradedSpace.of_complex(self.cx)

    def inclusion(self, name="in"):
        return ChainMap.identity(self.space(), name)

    def retraction(self, name="rho"):
        return ChainMap.identity(self.space(), name)


# ---------------------------------------------------------------------------
# the move equivalence
# ---------------------------------------------------------------------------

class _Side:
    """One diagram of the move with its complex and patch structure."""

    def __init__(self, diagram, kind, conv):
        self.diagram = diagram
        self.kind = kind
        self.conv = conv
        self.cx = build_complex(diagram, sign_rule=conv.order_rule)
        n = diagram.n
        if kind == "R2":
            self.a, self.b = n - 1, n - 2
            self.c = None
            info = match_r2(diagram, self.a, self.b)
            self.patch_arcs = frozenset((info["mid"], info["turn"]))
            self.x_range = range(n - 2)
        else:
            self.a, self.b, self.c = n - 1, n - 2, n - 3
            info = match_r3(diagram, self.a, self.b, self.c)
            self.patch_arcs = frozenset(info["mids"])
            self.x_range = range(n - 3)
        self.info = info

    def family(self, key):
        """Patch-marker pattern of a generator: 'x', 'xa', 'xb', 'xab' with a
        trailing 'c' when the marker at c is negative (R3 only)."""
        markers = key[0]
        tag = ""
        if markers[self.a] < 0:
            tag += "a"
        if markers[self.b] < 0:
            tag += "b"
        name = "x" + tag
        if self.c is not None and markers[self.c] < 0:
            name += "c"
        return name

    def mid_sign(self, key) -> int:
        """Sign of the patch-local circle of an 'xb'-family state."""
        state = self.cx.states[key]
        for circle, sign in zip(state.circles, state.signs):
            if circle <= self.patch_arcs:
                return sign
        raise AssertionError("xb-family state has no patch-local circle")

    def s_x(self, key) -> int:
        markers = key[0]
        neg = sum(1 for k in self.x_range if markers[k] < 0)
        return -1 if neg % 2 else 1

    def combo(self, key) -> ChainElement:
        """Retained combination r(g) for an 'xa'-family generator."""
        conv = self.conv
        g = self.cx.states[key]
        el = ChainElement({key: 1})
        for t, coeff in _saddle_terms(self.diagram, g, self.b, conv):
            partner = _attach(
                self.diagram, t, self.a, self.patch_arcs, conv.partner_mid
            )
            el.add(partner.key(), conv.partner_sign * coeff)
        return el

    def build_retained(self) -> RetainedBasis:
        basis = RetainedBasis(self.cx)
        for bd in self.cx.bidegrees():
            for key in self.cx.gens[bd]:
                fam = self.family(key)
                if fam == "xa":
                    basis.add(("combo", key), self.combo(key))
                elif fam.endswith("c"):
                    basis.add(("state", key), ChainElement({key: 1}))
        return basis

    def retraction(self, basis: RetainedBasis, name="rho") -> ChainMap:
        conv = self.conv
        out = ChainMap(name, GradedSpace.of_complex(self.cx), basis.space())
        for bd in self.cx.bidegrees():
            for col, key in enumerate(self.cx.gens[bd]):
                fam = self.family(key)
                if fam == "xa":
                    _, row = basis.position[("combo", key)]
                    out.add(bd, row, col, 1)
                elif fam.endswith("c"):
                    _, row = basis.position[("state", key)]
                    out.add(bd, row, col, 1)
                elif fam == "xb" and self.mid_sign(key) == conv.active_mid:
                    state = self.cx.states[key]
                    base = _drop(self.diagram, state, self.b, self.patch_arcs)
                    for t, coeff in _saddle_terms(self.diagram, base, self.a, conv):
                        _, row = basis.position[("combo", t.key())]
                        out.add(bd, row, col, conv.rho_b_sign * coeff)
                    if self.c is not None:
                        for t, coeff in _saddle_terms(
                            self.diagram, base, self.c, conv
                        ):
                            _, row = basis.position[("state", t.key())]
                            out.add(bd, row, col, conv.rho_b_sign * coeff)
                elif fam == "xab" and self.c is not None:
                    state = self.cx.states[key]
                    markers = list(key[0])
                    markers[self.a] = 1
                    markers[self.c] = -1
                    t = _transport_bijective(
                        self.diagram, state, markers, self.patch_arcs
                    )
                    _, row = basis.position[("state", t.key())]
                    out.add(bd, row, col, conv.rho_w_sign)
        return out

    def homotopy(self, name="h") -> Homotopy:
        conv = self.conv
        space = GradedSpace.of_complex(self.cx)
        out = Homotopy(name, space, space, (-1, 0))
        for bd in self.cx.bidegrees():
            for col, key in enumerate(self.cx.gens[bd]):
                fam = self.family(key)
                state = self.cx.states[key]
                sx = self.s_x(key) if conv.h_x_mod else 1
                if fam == "xab":
                    t = _attach(
                        self.diagram, state, self.a, self.patch_arcs,
                        conv.partner_mid,
                    )
                    tbd, row = self.cx.position(t.key())
                    out.add(bd, row, col, conv.h_w_sign * sx)
                elif fam == "xb" and self.mid_sign(key) == conv.active_mid:
                    t = _drop(self.diagram, state, self.b, self.patch_arcs)
                    tbd, row = self.cx.position(t.key())
                    out.add(bd, row, col, conv.h_b_sign * sx)
        return out


def _reorder(diagram: LinkDiagram, order) -> LinkDiagram:
    tuples = [diagram.crossings[i].ends for i in order]
    return diagram_from_tuples(tuples, loops=diagram.loops)


class MoveEquivalence:
    """Everything the verification suite needs for one R2 or R3 patch.

    The source diagram is reordered so the patch crossings come last, in the
    order (c,) b, a required by the sign analysis; the simplified / rewired
    diagram inherits the slot order through apply_move.
    """

    def __init__(self, diagram, crossings, kind, convention=DEFAULT_CONVENTION):
        self.kind = kind
        self.conv = convention
        n = diagram.n
        patch = list(crossings)
        if kind == "R2":
            match_r2(diagram, *patch)  # validate before reordering
            order = [i for i in range(n) if i not in patch] + [patch[1], patch[0]]
        elif kind == "R3":
            match_r3(diagram, *patch)
            order = [i for i in range(n) if i not in patch] + [
                patch[2], patch[1], patch[0]
            ]
        else:
            raise PatchMismatchError(f"no homotopy machinery for kind {kind!r}")
        self.source_diagram = _reorder(diagram, order)
        if kind == "R2":
            self.target_diagram, self.corr = apply_move(
                self.source_diagram,
                MovePatch("R2", "simplify", crossings=(n - 1, n - 2)),
            )
        else:
            self.target_diagram, self.corr = apply_move(
                self.source_diagram,
                MovePatch("R3", "move", crossings=(n - 1, n - 2, n - 3)),
            )
        self.src = _Side(self.source_diagram, kind, convention)
        if kind == "R2":
            self.tgt = _Trivial(build_complex(self.target_diagram,
                                              sign_rule=convention.order_rule))
        else:
            self.tgt = _Side(self.target_diagram, kind, convention)

        self.retained_src = self.src.build_retained()
        self.in_src = self.retained_src.inclusion("in")
        self.rho_src = self.src.retraction(self.retained_src, "rho")
        self.h = self.src.homotopy()
        self.d_src = GradedMap.differential(self.src.cx)
        if kind == "R2":
            self.retained_tgt = self.tgt
            self.in_tgt = self.tgt.inclusion("in_D")
            self.rho_tgt = self.tgt.retraction("rho_D")
            self.d_tgt = GradedMap.differential(self.tgt.cx)
        else:
            self.retained_tgt = self.tgt.build_retained()
            self.in_tgt = self.retained_tgt.inclusion("in_D")
            self.rho_tgt = self.tgt.retraction(self.retained_tgt, "rho_D")
            self.d_tgt = GradedMap.differential(self.tgt.cx)
        self.isom = self._build_isom()
        self.isom_inv = self._invert_signed_permutation(self.isom)

    # -- isomorphism ---------------------------------------------------------

    def _target_key_for(self, entry_id):
        """Image basis entry and coefficient of one retained generator.

        Combinations keep their slot markers; c-negative states swap the
        markers at the slots of a and b (the isotopy of the c-smoothed
        diagrams exchanges which crossing plays which role).  The swap
        conjugates the ordering signs, which costs -1 exactly on states with
        negative markers at both a and b.
        """
        kind, key = entry_id
        markers = list(key[0])
        src_state = self.src.cx.states[key]
        if self.kind == "R2":
            tgt_markers = markers[:-2]
            t = _transport_cross(
                src_state, self.target_diagram, tgt_markers, self.corr
            )
            return ("trivial", t.key(), 1)
        eps = 1
        if kind == "combo":
            tgt_markers = list(markers)
        else:
            tgt_markers = list(markers)
            a, b = self.src.a, self.src.b
            tgt_markers[a], tgt_markers[b] = tgt_markers[b], tgt_markers[a]
            if (self.conv.isom_eps == "xab"
                    and markers[a] < 0 and markers[b] < 0):
                eps = -1
        t = _transport_cross(
            src_state, self.target_diagram, tgt_markers, self.corr
        )
        return (kind, t.key(), eps)

    def _build_isom(self) -> ChainMap:
        out = ChainMap("isom", self.retained_src.space(),
                       self.retained_tgt.space() if self.kind == "R3"
                       else self.tgt.space())
        for bd, ids in self.retained_src.entries.items():
            for col, entry_id in enumerate(ids):
                kind, tgt_key, eps = self._target_key_for(entry_id)
                if self.kind == "R2":
                    tbd, row = self.tgt.cx.position(tgt_key)
                else:
                    tbd, row = self.retained_tgt.position[(kind, tgt_key)]
                if tbd != bd:
                    raise AssertionError(
                        f"isom does not preserve bidegree: {bd} -> {tbd}"
                    )
                out.add(bd, row, col, eps)
        return out

    @staticmethod
    def _invert_signed_permutation(f: GradedMap) -> GradedMap:
        out = GradedMap("isom_inv", f.tgt, f.src)
        for bd, blk in f.blocks.items():
            seen_rows = set()
            seen_cols = set()
            for (r, c), v in blk.items():
                if v not in (1, -1) or r in seen_rows or c in seen_cols:
                    raise AssertionError("isom is not a signed permutation")
                seen_rows.add(r)
                seen_cols.add(c)
                out.add(bd, c, r, v)
        return out

    # -- verification ---------------------------------------------------------

    def composite_forward(self) -> ChainMap:
        """in_D . isom . rho : C(D') -> C(D)."""
        return self.in_tgt.compose(self.isom.compose(self.rho_src), "forward")

    def composite_backward(self) -> ChainMap:
        return self.in_src.compose(self.isom_inv.compose(self.rho_tgt), "backward")

    def checks(self, include_decomposition=True) -> list[dict]:
        out = []

        def record(name, violation):
            entry = {"name": name, "pass": violation is None}
            if violation is not None:
                entry["first_violation"] = violation
            out.append(entry)

        # rho . in = id on both retained summands
        ri = self.rho_src.compose(self.in_src)
        record("rho_in_identity",
               ri.first_difference(GradedMap.identity(ri.src)))
        ri_t = self.rho_tgt.compose(self.in_tgt)
        record("rho_in_identity_target",
               ri_t.first_difference(GradedMap.identity(ri_t.src)))

        # in and rho are chain maps for d_R = rho d in
        d_r = self.rho_src.compose(self.d_src.compose(self.in_src))
        record("in_chain_map",
               self.d_src.compose(self.in_src)
               .first_difference(self.in_src.compose(d_r)))
        record("rho_chain_map",
               self.rho_src.compose(self.d_src)
               .first_difference(d_r.compose(self.rho_src)))

        # the move composites commute with the differentials
        fwd = self.composite_forward()
        record("composite_chain_map",
               self.d_tgt.compose(fwd)
               .first_difference(fwd.compose(self.d_src)))
        bwd = self.composite_backward()
        record("composite_chain_map_back",
               self.d_src.compose(bwd)
               .first_difference(bwd.compose(self.d_tgt)))

        # isom intertwines the retained differentials and is invertible
        d_r_tgt = self.rho_tgt.compose(self.d_tgt.compose(self.in_tgt))
        record("isom_chain_map",
               self.isom.compose(d_r)
               .first_difference(d_r_tgt.compose(self.isom)))
        iso_check = self.isom_inv.compose(self.isom)
        record("isom_invertible",
               iso_check.first_difference(GradedMap.identity(iso_check.src)))

        # homotopy identity d h + h d = id - in rho
        lhs = self.d_src.compose(self.h).plus(self.h.compose(self.d_src))
        rhs = GradedMap.identity(lhs.src).minus(
            self.in_src.compose(self.rho_src), name="id-in.rho")
        record("homotopy_identity", lhs.first_difference(rhs))

        # grading discipline and support discipline
        record("bidegrees", self._check_shifts())
        record("support_discipline", self._check_support())

        if include_decomposition:
            record("decomposition", self._check_decomposition())
        return out

    def _check_shifts(self):
        for m, want in ((self.in_src, (0, 0)), (self.rho_src, (0, 0)),
                        (self.isom, (0, 0)), (self.h, (-1, 0))):
            if m.shift != want:
                return {"map": m.name, "shift": m.shift}
        return None

    def _check_support(self):
        active = {"xa", "xab"}
        for bd in self.src.cx.bidegrees():
            keys = self.src.cx.gens[bd]
            rho_blk = self.rho_src.block(bd)
            h_blk = self.h.block(bd)
            rho_cols = {c for (_, c) in rho_blk}
            h_cols = {c for (_, c) in h_blk}
            for col, key in enumerate(keys):
                fam = self.src.family(key)
                rho_ok = (
                    fam == "xa"
                    or fam.endswith("c")
                    or (fam == "xb" and self.src.mid_sign(key) == self.conv.active_mid)
                    or (fam == "xab" and self.kind == "R3")
                )
                h_ok = fam == "xab" or (
                    fam == "xb" and self.src.mid_sign(key) == self.conv.active_mid
                )
                if col in rho_cols and not rho_ok:
                    return {"map": "rho", "family": fam, "i": bd[0], "j": bd[1]}
                if col in h_cols and not h_ok:
                    return {"map": "h", "family": fam, "i": bd[0], "j": bd[1]}
        return None

    def contractible_basis(self) -> RetainedBasis:
        """Complement basis: non-retained families corrected into ker(rho)."""
        basis = RetainedBasis(self.src.cx)
        p = self.in_src.compose(self.rho_src)  # projection onto the retained part
        for bd in self.src.cx.bidegrees():
            keys = self.src.cx.gens[bd]
            blk = p.block(bd)
            by_col = {}
            for (r, c), v in blk.items():
                by_col.setdefault(c, []).append((r, v))
            for col, key in enumerate(keys):
                fam = self.src.family(key)
                retained = fam == "xa" or fam.endswith("c")
                if retained:
                    continue
                el = ChainElement({key: 1})
                for r, v in by_col.get(col, ()):
                    el.add(keys[r], -v)
                basis.add(("contr", key), el)
        return basis

    def _check_decomposition(self):
        contr = self.contractible_basis()
        in_c = contr.inclusion("in_contr")
        # rho kills the complement (d-invariance of ker rho then follows
        # from rho being a chain map)
        rv = self.rho_src.compose(in_c).first_violation()
        if rv is not None:
            return {"reason": "complement not in ker(rho)", **rv}
        # per bidegree the two bases together form a unimodular basis
        for bd in self.src.cx.bidegrees():
            dim = self.src.cx.dim(bd)
            cols = []
            for basis, mp in ((self.retained_src, self.in_src), (contr, in_c)):
                blk = mp.block(bd)
                width = mp.src.dim(bd)
                dense = [[0] * width for _ in range(dim)]
                for (r, c), v in blk.items():
                    dense[r][c] = v
                cols.extend(list(map(list, zip(*dense))) if width else [])
            if len(cols) != dim:
                return {"reason": "dimension mismatch", "i": bd[0], "j": bd[1],
                        "have": len(cols), "want": dim}
            det = _det_bareiss([list(r) for r in zip(*cols)]) if dim else 1
            if det not in (1, -1):
                return {"reason": "basis not unimodular", "i": bd[0],
                        "j": bd[1], "det": det}
        # the complement is acyclic: compute homology of its coordinate complex
        try:
            table = homology_groups(
                _CoordinateComplex(self.src.cx, contr, self.d_src)
            )
        except AssertionError as exc:
            return {"reason": str(exc)}
        if table:
            bd = sorted(table)[0]
            return {"reason": "complement not acyclic", "i": bd[0], "j": bd[1],
                    "group": table[bd]}
        return None

    @property
    def all_pass(self):
        return all(c["pass"] for c in self.checks())

    def report(self, patch=None) -> dict:
        checks = self.checks()
        return {
            "move": self.kind,
            "patch": list(patch) if patch is not None else None,
            "convention": self.conv.id,
            "checks": checks,
            "pass": all(c["pass"] for c in checks),
        }


class _CoordinateComplex:
    """Complex structure on a subspace given by a basis of chain elements."""

    def __init__(self, cx: KhovanovComplex, basis: RetainedBasis, d: GradedMap):
        self.gens = {bd: list(ids) for bd, ids in basis.entries.items()}
        self.diffs = {}
        incl = basis.inclusion("b")
        for bd, ids in basis.entries.items():
            tgt_bd = (bd[0] + 1, bd[1])
            tgt_ids = basis.entries.get(tgt_bd, [])
            dim_tgt = cx.dim(tgt_bd)
            cols = []
            tgt_blk = incl.block(tgt_bd)
            for c in range(len(tgt_ids)):
                vec = [0] * dim_tgt
                for (r, cc), v in tgt_blk.items():
                    if cc == c:
                        vec[r] = v
                cols.append(vec)
            d_in = d.compose(incl)
            blk = d_in.block(bd)
            block = {}
            for col in range(len(ids)):
                vec = [0] * dim_tgt
                for (r, cc), v in blk.items():
                    if cc == col:
                        vec[r] = v
                if not any(vec):
                    continue
                coords = _solve_exact(cols, vec)
                if coords is None:
                    raise AssertionError("complement is not d-invariant")
                for row, val in enumerate(coords):
                    if val:
                        if val.denominator != 1:
                            raise AssertionError(
                                "complement differential not integral"
                            )
                        block[(row, col)] = int(val)
            if block:
                self.diffs[bd] = block

    def bidegrees(self):
        return sorted(self.gens)

    def dim(self, bd):
        return len(self.gens.get(bd, ()))

    def matrix(self, bd):
        return self.diffs.get(bd, {})


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------

def _equivalence(diagram, patch: MovePatch, kind, convention=DEFAULT_CONVENTION):
    return MoveEquivalence(diagram, patch.crossings, kind, convention)


def decompose_r2(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    """(retained, contractible) bases of C(D') for an R2 patch, as chain
    elements; their spans are d-invariant and complementary."""
    eq = _equivalence(diagram, patch, "R2", convention)
    retained = [eq.retained_src.elements[e]
                for bd in sorted(eq.retained_src.entries)
                for e in eq.retained_src.entries[bd]]
    contr_basis = eq.contractible_basis()
    contractible = [contr_basis.elements[e]
                    for bd in sorted(contr_basis.entries)
                    for e in contr_basis.entries[bd]]
    return retained, contractible


def r2_isom(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION) -> ChainMap:
    return _equivalence(diagram, patch, "R2", convention).isom


def r2_retraction(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    return _equivalence(diagram, patch, "R2", convention).rho_src


def r2_homotopy(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    return _equivalence(diagram, patch, "R2", convention).h


def decompose_r3(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    eq = _equivalence(diagram, patch, "R3", convention)
    retained = [eq.retained_src.elements[e]
                for bd in sorted(eq.retained_src.entries)
                for e in eq.retained_src.entries[bd]]
    contr_basis = eq.contractible_basis()
    contractible = [contr_basis.elements[e]
                    for bd in sorted(contr_basis.entries)
                    for e in contr_basis.entries[bd]]
    return retained, contractible


def r3_isom(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION) -> ChainMap:
    return _equivalence(diagram, patch, "R3", convention).isom


def r3_retraction(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    return _equivalence(diagram, patch, "R3", convention).rho_src


def r3_homotopy(diagram, patch: MovePatch, convention=DEFAULT_CONVENTION):
    return _equivalence(diagram, patch, "R3", convention).h


def verify_chain_map(f: GradedMap, d_src: GradedMap, d_tgt: GradedMap) -> list:
    """Bidegrees where d f != f d; empty means f is a chain map."""
    diff = d_tgt.compose(f).minus(f.compose(d_src))
    return sorted(bd for bd, blk in diff.blocks.items() if blk)


def verify_homotopy_identity(h, inmap, rho, d) -> list:
    """Bidegrees violating d h + h d = id - in rho; empty means pass."""
    lhs = d.compose(h).plus(h.compose(d))
    rhs = GradedMap.identity(lhs.src).minus(inmap.compose(rho))
    diff = lhs.minus(rhs)
    return sorted(bd for bd, blk in diff.blocks.items() if blk)


def default_candidates() -> list[SignConvention]:
    """The searched convention space: every global sign and family-selection
    toggle, both ordering rules, both saddle tables."""
    out = []
    k = 0
    for (order_rule, partner_mid, active_mid, partner_sign, rho_b_sign,
         h_w_sign, h_b_sign, h_x_mod, pq_rule) in product(
            ("before", "after"), (1, -1), (1, -1), (1, -1), (1, -1),
            (1, -1), (1, -1), (True, False), ("standard", "negated")):
        out.append(SignConvention(
            name=f"cand-{k}",
            order_rule=order_rule,
            partner_mid=partner_mid,
            active_mid=active_mid,
            partner_sign=partner_sign,
            rho_b_sign=rho_b_sign,
            rho_w_sign=1,
            h_w_sign=h_w_sign,
            h_b_sign=h_b_sign,
            h_x_mod=h_x_mod,
            pq_rule=pq_rule,
        ))
        k += 1
    return out


def convention_search(diagram, patch: MovePatch, kind,
                      candidates=None) -> list[SignConvention]:
    """Conventions under which every identity holds on this patch.

    An empty result is a finding (reported by the caller), not an error.
    """
    if candidates is None:
        candidates = default_candidates()
    passing = []
    for conv in candidates:
        try:
            eq = MoveEquivalence(diagram, patch.crossings, kind, conv)
            checks = eq.checks(include_decomposition=False)
        except AssertionError:
            continue
        if all(c["pass"] for c in checks):
            passing.append(conv)
    return passing
