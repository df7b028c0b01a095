"""Kernel dispatch: exposes the backend selected by ``qforecast.backend``.

``impl`` is the active module; ``get_impl(name)`` returns a specific one
(used by the benchmark and the backend-equivalence tests).
"""

from ..backend import ACTIVE

if ACTIVE == "numba":
    from . import _numba as impl
else:
    from . import _numpy as impl


def get_impl(name):
    """Return the kernel module for an explicit backend name."""
    if name == "numpy":
        from . import _numpy

        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown backend {name!r}")
