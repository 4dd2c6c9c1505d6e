"""Integral Khovanov homology of link diagrams from enhanced Kauffman
states, with machine-checked chain homotopy equivalences for Reidemeister
moves II and III."""

__version__ = "0.1.0"

from .complexes import (
    ChainElement,
    KhovanovComplex,
    build_complex,
    graded_euler,
    verify_d_squared,
)
from .diagram import (
    DiagramError,
    LinkDiagram,
    MovePatch,
    PatchMismatchError,
    PDSyntaxError,
    apply_move,
    parse_pd,
)
from .homology import (
    HomologyTable,
    SmithDecomposition,
    compare_tables,
    homology_groups,
    smith_normal_form,
)
from .moves import (
    DEFAULT_CONVENTION,
    ChainMap,
    Homotopy,
    MoveEquivalence,
    SignConvention,
    convention_search,
)
from .states import (
    EnhancedState,
    KauffmanState,
    LaurentPoly,
    check_skein,
    enumerate_enhanced,
    enumerate_kauffman,
    jones_kauffman,
    jones_refined,
    trace_circles,
)
