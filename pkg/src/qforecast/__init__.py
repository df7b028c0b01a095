"""qforecast: variational quantum networks for monthly demand forecasting."""

from .backend import active_backend

__version__ = "0.1.0"

__all__ = ["active_backend", "__version__"]
