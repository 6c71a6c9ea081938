"""Exact toolkit for shift-deformed set-theoretic Yang-Baxter solutions on finite skew braces."""

__version__ = "0.1.0"
