"""GF(2) solver backend selection.

The compiled kernel (chainforge._gf2core, built from the Cython source) is
used when importable; otherwise the pure-Python bit-packed implementation.
Set CHAINFORGE_GF2=pure to force the fallback, =compiled to require the
extension.  Both backends share the same contract; see _gf2py.
"""

from __future__ import annotations

import os

from chainforge import _gf2py

_choice = os.environ.get("CHAINFORGE_GF2", "auto")

if _choice == "pure":
    _impl = _gf2py
else:
    try:
        from chainforge import _gf2core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _gf2py

BACKEND = "pure" if _impl is _gf2py else "compiled"

rank = _impl.rank
solve = _impl.solve
solve_full = _impl.solve_full
nullspace = _impl.nullspace

__all__ = ["BACKEND", "rank", "solve", "solve_full", "nullspace"]
