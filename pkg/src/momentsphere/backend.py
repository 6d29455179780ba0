"""Kernel backend selection.

The compiled extension is used when it imported successfully; otherwise
the NumPy implementation takes over.  Setting the environment variable
``MOMENTSPHERE_PURE_PYTHON=1`` forces the fallback (used by the test
suite and the benchmark to exercise both paths).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("MOMENTSPHERE_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
sturm_counts = _impl.sturm_counts
solve_shifted = _impl.solve_shifted


def available_backends():
    """Names of the kernel implementations importable in this process."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "c")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for ``name`` ('c' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "c":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
