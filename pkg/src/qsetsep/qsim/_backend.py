"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy kernels are
the fallback. ``QSETSEP_KERNELS=numpy|cython`` forces a backend at import
time, and :func:`set_backend` switches at runtime (used by the benchmark
and the backend-equivalence tests).
"""

import os

from . import _kernels_np

_BACKENDS = {"numpy": _kernels_np}

try:
    from . import _kernels as _kernels_cy

    _BACKENDS["cython"] = _kernels_cy
except ImportError:
    _kernels_cy = None

kernels = _kernels_np if _kernels_cy is None else _kernels_cy

_forced = os.environ.get("QSETSEP_KERNELS", "").strip().lower()
if _forced:
    if _forced not in _BACKENDS:
        raise ImportError(
            f"QSETSEP_KERNELS={_forced!r} not available; "
            f"choices: {sorted(_BACKENDS)}"
        )
    kernels = _BACKENDS[_forced]


def backend_name() -> str:
    return kernels.name


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    """Switch kernel backends at runtime. Not safe mid-operation."""
    global kernels
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choices: {sorted(_BACKENDS)}")
    kernels = _BACKENDS[name]
