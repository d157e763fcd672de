"""Hot simulation kernels with a numba path and a pure-numpy fallback.

Set ``RATESIM_DISABLE_NUMBA=1`` to force the numpy implementation. Both
backends consume the same pre-drawn uniforms and yield identical results.
"""

import os

from . import _numpy
from .layout import (  # noqa: F401
    SCHEME_CLASSIC,
    SCHEME_PERFORMANCE,
    SCHEME_PROPOSED,
    TEAM,
    block_width,
)


def _want_numba() -> bool:
    flag = os.environ.get("RATESIM_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


def load_backend(name: str | None = None):
    """Return the kernel module for ``name`` ('numba' or 'numpy').

    With no name, numba is used unless disabled by environment or missing.
    """
    explicit = name is not None
    if not explicit:
        name = "numba" if _want_numba() else "numpy"
    if name == "numpy":
        return _numpy
    if name == "numba":
        try:
            from . import _numba
        except ImportError:
            if explicit:
                raise
            return _numpy
        return _numba
    raise ValueError(f"unknown kernel backend {name!r}")


def backend_name(module) -> str:
    return "numba" if module.__name__.endswith("_numba") else "numpy"
