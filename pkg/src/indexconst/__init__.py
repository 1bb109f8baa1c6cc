"""Certified numerics for the universal constant of a quantitative relative index theorem."""

__version__ = "0.1.0"
