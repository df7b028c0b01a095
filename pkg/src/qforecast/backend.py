"""Kernel backend selection.

The hot numeric paths (statevector gate application and the adjoint
gradient engine) exist twice: a numba @njit implementation and a pure
numpy one.  The active backend is chosen once at import time:

  * ``QFORECAST_BACKEND=numba``  force numba (error if unavailable)
  * ``QFORECAST_BACKEND=numpy``  force the numpy fallback
  * unset                        numba when importable, else numpy
"""

import os

_ENV_VAR = "QFORECAST_BACKEND"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _resolve() -> str:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested == "numba":
        if not HAS_NUMBA:
            raise ImportError(
                f"{_ENV_VAR}=numba but numba is not importable"
            )
        return "numba"
    if requested == "numpy":
        return "numpy"
    if requested:
        raise ValueError(
            f"unknown {_ENV_VAR} value {requested!r}; expected 'numba' or 'numpy'"
        )
    return "numba" if HAS_NUMBA else "numpy"


ACTIVE = _resolve()


def active_backend() -> str:
    """Name of the backend selected at import: 'numba' or 'numpy'."""
    return ACTIVE
