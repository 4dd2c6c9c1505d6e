"""Kernel selection: compiled census loop when available, pure Python otherwise.

Set ``KHOVANOV_PURE=1`` to force the Python implementation (used by the
benchmark and the kernel-equivalence tests).
"""

from __future__ import annotations

import os

from . import _census_py

if os.environ.get("KHOVANOV_PURE"):
    _impl = _census_py
else:
    try:
        from . import _census_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _census_py

IMPLEMENTATION = _impl.IMPLEMENTATION


def census_circle_counts(diagram, impl=None):
    """Circle count per marker mask (bit set = negative marker)."""
    arc_index = {a: i for i, a in enumerate(diagram.arcs)}
    ends = [arc_index[a] for c in diagram.crossings for a in c.ends]
    module = {None: _impl, "python": _census_py, "cython": _impl}[impl]
    if impl == "cython" and module.IMPLEMENTATION != "cython":
        raise RuntimeError("compiled census kernel not available")
    return module.circle_counts(ends, len(diagram.arcs), diagram.loops)
