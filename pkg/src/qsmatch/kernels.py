"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module takes over. Set ``QSMATCH_PURE_PYTHON=1``
to force the fallback.
"""

import os
from types import ModuleType

from . import _pykernels

_native: ModuleType | None
if os.environ.get("QSMATCH_PURE_PYTHON") == "1":
    _native = None
else:
    try:
        from . import _ckernels as _native
    except ImportError:
        _native = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _native is not None:
    BACKENDS["cython"] = _native

BACKEND = "cython" if _native is not None else "python"
active: ModuleType = BACKENDS[BACKEND]


def get(name: str | None = None) -> ModuleType:
    """Return a kernel module by name (``None`` gives the active one)."""
    if name is None:
        return active
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}") from None


def use(name: str) -> None:
    """Switch the process-wide active backend."""
    global active, BACKEND
    active = get(name)
    BACKEND = name
