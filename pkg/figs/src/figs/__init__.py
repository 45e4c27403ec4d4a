"""Batch rendering of petzchain CSV outputs into static figures."""

from .reader import SchemaError, Table, read_table
from .render import KINDS, FigureSpec, render

__all__ = ["SchemaError", "Table", "read_table", "KINDS", "FigureSpec",
           "render"]

__version__ = "0.1.0"
