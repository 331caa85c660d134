"""Turn convergence-study CSV tables into log-log figures with dashed
reference-slope lines.

This package talks to the solver library only through its documented CSV
schema; it never imports it.
"""

from .plots import (CSV_HEADER, CsvError, PlotSpec, plot_convergence,
                    read_table, validate_csv)

__all__ = ["CSV_HEADER", "CsvError", "PlotSpec", "plot_convergence",
           "read_table", "validate_csv"]
