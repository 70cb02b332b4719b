"""Figures from benchmark harness CSV reports.

One performance-profile figure (mean gap vs. time budget) and one
Hamming-distance figure per family, one line per solver.  Pure plotting:
the CSV is consumed as-is, never reordered or re-aggregated.
"""

__version__ = "0.1.0"

from .core import SchemaError, plot_profiles, read_report

__all__ = ["SchemaError", "plot_profiles", "read_report", "__version__"]
