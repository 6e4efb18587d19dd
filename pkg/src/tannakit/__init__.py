"""Exact toolkit for semigroup actions on categories and difference-differential modules."""

__version__ = "0.1.0"
