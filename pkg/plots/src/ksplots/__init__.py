"""Post-hoc figures from chemotaxis-lab run artifacts.

Reads only the documented CSV/JSON artifacts (diagnostics.csv, report.json,
sweep.csv); never recomputes physics.
"""

from .figures import FIGURE_KINDS, FigureSpec, MissingColumnError, render

__version__ = "1.0.0"

__all__ = ["FigureSpec", "FIGURE_KINDS", "MissingColumnError", "render", "__version__"]
