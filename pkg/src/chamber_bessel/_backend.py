"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; setting
``CHAMBER_BESSEL_BACKEND=python`` forces the numpy fallback.
"""
from __future__ import annotations

import importlib
import logging
import os

logger = logging.getLogger(__name__)

_FUNCS = ("philox4x32", "std_normals", "jack_solve", "simulate_paths")


def load(name: str | None = None):
    """Return the kernel module for ``name`` ("cython", "python" or ``None`` for auto)."""
    name = name or os.environ.get("CHAMBER_BESSEL_BACKEND", "auto")
    if name in ("auto", "cython"):
        try:
            return importlib.import_module("chamber_bessel._ckernels")
        except ImportError:
            if name == "cython":
                raise
            logger.debug("compiled kernels unavailable, using numpy fallback")
    elif name != "python":
        raise ValueError(f"unknown backend {name!r}")
    return importlib.import_module("chamber_bessel._pykernels")


kernels = load()
BACKEND = kernels.NAME


def available() -> list[str]:
    out = ["python"]
    try:
        importlib.import_module("chamber_bessel._ckernels")
        out.insert(0, "cython")
    except ImportError:
        pass
    return out
