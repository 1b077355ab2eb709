"""Read-only figure rendering for the simulation reports.

This package never recomputes physics: every curve it draws is a column of
the input files (report.csv / report.json / samples.csv + samples_meta.json /
oracle.json).  Schema-version mismatches are errors, not guesses.
"""
from .render import FigureSpec, KINDS, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "KINDS", "render", "__version__"]
