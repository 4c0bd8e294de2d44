"""Pick the transfer kernel: compiled when available, pure Python otherwise.

Set ``TEMPORA_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _refine_py

try:  # pragma: no cover - depends on the build
    from . import _refine as _compiled
except ImportError:  # pragma: no cover
    _compiled = None


def _select():
    if os.environ.get("TEMPORA_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
        return _refine_py
    return _compiled


backend = _select()
BACKEND = backend.BACKEND


def get(name=None):
    """Kernel module by name ("compiled" or "python"); default is the active one."""
    if name is None:
        return backend
    if name == "python":
        return _refine_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel is not built")
        return _compiled
    raise ValueError(f"unknown kernel {name!r}")


def compiled_available() -> bool:
    return _compiled is not None
