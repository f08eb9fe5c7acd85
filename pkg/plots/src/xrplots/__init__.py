"""Figure rendering for xroffload sweep results."""

__version__ = "0.1.0"

from .figures import (FIGURE_KINDS, FigureError, FigureSpec, energy_series,
                      offload_series, region_table, render)

__all__ = ["FIGURE_KINDS", "FigureError", "FigureSpec", "energy_series",
           "offload_series", "region_table", "render"]
