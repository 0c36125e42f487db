"""Simulation backend selection.

Hot kernels exist twice: a numba @njit implementation and a pure-NumPy
vectorized fallback. The env flag SGDLAB_BACKEND ("numba" or "numpy") picks
one at import time; default is numba when importable, NumPy otherwise.
`set_backend` switches at runtime (used by tests and the benchmark).
"""

from __future__ import annotations

import os

from .errors import ConfigError

_VALID = ("numba", "numpy")
_active_name: str | None = None
_active_module = None


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _default_name() -> str:
    choice = os.environ.get("SGDLAB_BACKEND", "").strip().lower()
    if choice and choice not in _VALID:
        raise ConfigError(f"SGDLAB_BACKEND must be one of {_VALID}, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _numba_available():
            raise ConfigError("SGDLAB_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if _numba_available() else "numpy"


def set_backend(name: str) -> None:
    global _active_name, _active_module
    if name not in _VALID:
        raise ConfigError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not _numba_available():
        raise ConfigError("numba backend requested but numba is not importable")
    if name == "numba":
        from . import kernels_numba as mod
    else:
        from . import kernels_numpy as mod
    _active_name, _active_module = name, mod


def active_backend() -> str:
    if _active_name is None:
        set_backend(_default_name())
    return _active_name


def kernels():
    """Module implementing the kernel interface for the active backend."""
    if _active_module is None:
        set_backend(_default_name())
    return _active_module


def set_workers(n: int) -> None:
    """Cap kernel threads. No-op on the NumPy backend (single-threaded).

    Thread count never changes results: every run owns a seed-indexed stream
    and writes to its own output slot.
    """
    if n < 1:
        raise ConfigError("workers must be >= 1")
    if active_backend() == "numba":
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
