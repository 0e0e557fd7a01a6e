"""Deterministic matplotlib panels for kgz experiment CSV outputs."""

from .render import FIGURE_KINDS, FigureSpec, SchemaError, load_table, render

__version__ = "0.1.0"
