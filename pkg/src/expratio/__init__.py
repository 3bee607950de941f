"""Goodness-of-fit tests for exponentiality built on the ratio X1/X2 ~ F(2,2)."""

__version__ = "0.1.0"
