"""Cone-kernel backend selection.

The compiled extension covers nonnegative and second-order blocks (the hot
path: every beamformer subproblem).  Layouts containing semidefinite blocks,
or environments without the extension, run the pure-NumPy kernels.  Set
``MIMOBEAM_PURE_PYTHON=1`` to force the fallback, or pick explicitly through
``SolverSettings.backend``.
"""

import os

from . import kernels_py
from .kernels_py import build_layout

try:
    from . import _speedups
    HAVE_COMPILED = True
except ImportError:  # extension not built
    _speedups = None
    HAVE_COMPILED = False


def compiled_available() -> bool:
    return HAVE_COMPILED


def select(cones, preference: str = "auto"):
    """Return (kernel module, layout) for a cone list."""
    layout = build_layout(cones)
    if preference == "python":
        return kernels_py, layout
    if preference == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available")
        if layout.has_psd:
            raise RuntimeError("compiled kernels do not cover PSD blocks")
        return _speedups, layout
    if preference != "auto":
        raise ValueError(f"unknown backend {preference!r}")
    if (HAVE_COMPILED and not layout.has_psd
            and os.environ.get("MIMOBEAM_PURE_PYTHON", "") != "1"):
        return _speedups, layout
    return kernels_py, layout


def active_backend_name(cones=None) -> str:
    """Name of the backend ``auto`` would pick (for manifests/benchmarks)."""
    if cones is None:
        if HAVE_COMPILED and os.environ.get("MIMOBEAM_PURE_PYTHON", "") != "1":
            return "compiled"
        return "python"
    ker, _ = select(cones, "auto")
    return "compiled" if ker is not kernels_py else "python"
