"""Kernel backend selection.

The hot loops (field stepping, profile shooting) have two interchangeable
implementations: a Cython extension and the numpy / pure-Python fallback in
:mod:`preyspread._accel.fallback`.  The extension is used when it imported
successfully and ``PREYSPREAD_DISABLE_EXT`` is unset; every call site also
accepts an explicit backend override (used by the equivalence tests and the
benchmark).
"""

import os

from . import fallback

if os.environ.get("PREYSPREAD_DISABLE_EXT", "0") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None

HAVE_EXT = _core is not None


def backend_name() -> str:
    return "compiled" if HAVE_EXT else "fallback"


def resolve(backend):
    """Map a requested backend name to (use_compiled: bool).

    ``None`` means auto (compiled when available); explicit "compiled"
    raises if the extension is missing rather than silently degrading.
    """
    if backend is None:
        return HAVE_EXT
    if backend == "compiled":
        if not HAVE_EXT:
            raise RuntimeError("compiled kernel extension is not available")
        return True
    if backend == "fallback":
        return False
    raise ValueError(f"unknown backend {backend!r}")
