"""Kernel backend selection.

Imports the compiled projected-SOR sweep when the extension built, the
pure-numpy fallback otherwise.  Set MULTISURF_PURE=1 to force the fallback
(used by the benchmark and the backend-agreement tests).
"""

import os

if os.environ.get("MULTISURF_PURE", "") not in ("", "0"):
    from multisurf._pure import psor_sweeps
    COMPILED = False
else:
    try:
        from multisurf._psor_cy import psor_sweeps
        COMPILED = True
    except ImportError:
        from multisurf._pure import psor_sweeps
        COMPILED = False

__all__ = ["psor_sweeps", "COMPILED"]
